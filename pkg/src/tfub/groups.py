"""Finite Abelian groups, their characters and Fourier transforms.

A group is a direct product Z_{d_1} x ... x Z_{d_m}.  Elements and characters
are both enumerated in mixed-radix lexicographic order with the leftmost factor
most significant, which is the row/column order of the Kronecker product
``W_{d_1} (x) ... (x) W_{d_m}``.

Sign convention: the forward transform is ``fh(xi) = sum_x f(x) conj<xi, x>``
while the Fourier matrix ``W_G`` carries positive exponents, so
``fourier(f) == conj(W_G) @ f``.  The two differ by ``xi -> -xi`` which never
changes a support count.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

DEFAULT_ZERO_TOL = 1e-9


class GroupMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteAbelianGroup:
    factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(int(d) for d in self.factors)
        if any(d < 2 for d in factors):
            raise ValueError(f"cyclic factors must be >= 2, got {factors}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls(() if n == 1 else (n,))

    @classmethod
    def parse(cls, spec: str) -> "FiniteAbelianGroup":
        """Parse ``Z6`` or ``Z2xZ2xZ3`` (case-insensitive); ``Z1`` is the trivial group."""
        text = spec.strip().replace(" ", "")
        if not re.fullmatch(r"[zZ]\d+([xX][zZ]\d+)*", text):
            raise ValueError(f"bad group spec {spec!r}; expected e.g. Z6 or Z2xZ3")
        orders = [int(part[1:]) for part in re.split(r"[xX]", text)]
        if any(d < 1 for d in orders):
            raise ValueError(f"bad group spec {spec!r}")
        return cls(tuple(d for d in orders if d != 1))

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.factors, 1)

    @property
    def is_cyclic_prime(self) -> bool:
        return len(self.factors) == 1 and is_prime(self.factors[0])

    def __len__(self) -> int:
        return self.order

    def __str__(self) -> str:
        return "x".join(f"Z{d}" for d in self.factors) if self.factors else "Z1"

    # -- enumerations S1 / S2 ------------------------------------------------

    @cached_property
    def residues(self) -> np.ndarray:
        """Residue tuples of all elements, shape (order, m), in enumeration order."""
        if not self.factors:
            return np.zeros((1, 0), dtype=np.int64)
        grid = itertools.product(*(range(d) for d in self.factors))
        return np.array(list(grid), dtype=np.int64)

    def index(self, residues) -> int:
        res = tuple(int(r) % d for r, d in zip(residues, self.factors))
        if len(res) != len(self.factors):
            raise ValueError(f"expected {len(self.factors)} residues, got {residues!r}")
        idx = 0
        for r, d in zip(res, self.factors):
            idx = idx * d + r
        return idx

    def element(self, i: int) -> "GroupElement":
        return GroupElement(self, tuple(int(r) for r in self.residues[i]))

    def character(self, i: int) -> "Character":
        return Character(self, tuple(int(r) for r in self.residues[i]))

    def elements(self) -> list["GroupElement"]:
        return [self.element(i) for i in range(self.order)]

    def characters(self) -> list["Character"]:
        return [self.character(i) for i in range(self.order)]

    @cached_property
    def add_table(self) -> np.ndarray:
        """``add_table[i, j]`` is the index of S1(i) + S1(j)."""
        return self._combine(lambda a, b: a + b)

    @cached_property
    def sub_table(self) -> np.ndarray:
        """``sub_table[i, j]`` is the index of S1(i) - S1(j)."""
        return self._combine(lambda a, b: a - b)

    @cached_property
    def neg(self) -> np.ndarray:
        return self.sub_table[0]

    def _combine(self, op) -> np.ndarray:
        res = self.residues
        mods = np.array(self.factors, dtype=np.int64)
        combined = op(res[:, None, :], res[None, :, :]) % mods if self.factors else \
            np.zeros((1, 1, 0), dtype=np.int64)
        weights = np.ones(len(self.factors), dtype=np.int64)
        for i in range(len(self.factors) - 2, -1, -1):
            weights[i] = weights[i + 1] * self.factors[i + 1]
        return (combined * weights).sum(axis=-1)

    @cached_property
    def pairing_matrix(self) -> np.ndarray:
        """``P[r, s] = <S2(r), S1(s)>``; this is the Fourier matrix W_G."""
        mat = np.ones((1, 1), dtype=complex)
        for d in self.factors:
            mat = np.kron(mat, cyclic_dft_matrix(d))
        mat.setflags(write=False)
        return mat


def cyclic_dft_matrix(n: int) -> np.ndarray:
    """``(omega^{rs})`` with omega = exp(2 pi i / n); exponents reduced mod n first."""
    k = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * k / n)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def as_group(group) -> FiniteAbelianGroup:
    if isinstance(group, FiniteAbelianGroup):
        return group
    if isinstance(group, str):
        return FiniteAbelianGroup.parse(group)
    if isinstance(group, int):
        return FiniteAbelianGroup.cyclic(group)
    return FiniteAbelianGroup(tuple(group))


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    residues: tuple[int, ...]

    def __post_init__(self):
        if len(self.residues) != len(self.group.factors):
            raise ValueError("residue count does not match the group")
        red = tuple(int(r) % d for r, d in zip(self.residues, self.group.factors))
        object.__setattr__(self, "residues", red)

    @property
    def index(self) -> int:
        return self.group.index(self.residues)

    def _check(self, other):
        if not isinstance(other, type(self)) or other.group != self.group:
            raise GroupMismatchError(f"cannot combine {self!r} and {other!r}")

    def __add__(self, other):
        self._check(other)
        return type(self)(self.group, tuple(a + b for a, b in zip(self.residues, other.residues)))

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.group, tuple(a - b for a, b in zip(self.residues, other.residues)))

    def __neg__(self):
        return type(self)(self.group, tuple(-a for a in self.residues))


class Character(GroupElement):
    """A character xi, stored by its residues; the group law is componentwise."""

    def __call__(self, x: GroupElement) -> complex:
        return pairing(self, x)


def pairing(xi: Character, x: GroupElement) -> complex:
    """``<xi, x> = prod_i exp(2 pi i xi_i x_i / d_i)``."""
    if xi.group != x.group:
        raise GroupMismatchError("character and element live in different groups")
    phase = sum(
        ((a * b) % d) / d for a, b, d in zip(xi.residues, x.residues, xi.group.factors)
    )
    return complex(np.exp(2j * np.pi * phase))


def dft_matrix(group) -> np.ndarray:
    """The Kronecker-product Fourier matrix W_G (a read-only array)."""
    return as_group(group).pairing_matrix


@dataclass(frozen=True, eq=False)
class Signal:
    """A complex function on a group, stored in S1 order.

    The support uses a relative threshold: an entry counts as nonzero when
    ``|v| > zero_tol * max(1, max|v|)``.
    """

    group: FiniteAbelianGroup
    values: np.ndarray
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self):
        group = as_group(self.group)
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if vals.shape[0] != group.order:
            raise ValueError(f"expected {group.order} values for {group}, got {vals.shape[0]}")
        vals.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "values", vals)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.group.order

    def __getitem__(self, i):
        return self.values[i]

    def support(self) -> np.ndarray:
        return support(self.values, self.zero_tol)

    @property
    def l0(self) -> int:
        return int(self.support().size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def with_values(self, values) -> "Signal":
        return Signal(self.group, values, self.zero_tol)

    def to_json(self) -> dict:
        return {"group": str(self.group), "values": [[v.real, v.imag] for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "Signal":
        vals = [complex(re_, im) for re_, im in obj["values"]]
        return cls(FiniteAbelianGroup.parse(obj["group"]), vals)

    def __repr__(self):
        return f"Signal({self.group}, l0={self.l0})"


def support_mask(values, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    vals = np.abs(np.asarray(values))
    scale = max(1.0, float(vals.max())) if vals.size else 1.0
    return vals > zero_tol * scale


def support(values, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    return np.flatnonzero(support_mask(values, zero_tol))


def l0(values, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    return int(support_mask(values, zero_tol).sum())


def delta(group, at: int = 0) -> Signal:
    group = as_group(group)
    vals = np.zeros(group.order, dtype=complex)
    vals[at] = 1.0
    return Signal(group, vals)


def _signal(f, group=None) -> Signal:
    if isinstance(f, Signal):
        if group is not None and as_group(group) != f.group:
            raise GroupMismatchError("signal lives on a different group")
        return f
    if group is None:
        vals = np.asarray(f)
        group = FiniteAbelianGroup.cyclic(vals.size)
    return Signal(as_group(group), f)


def fourier(f, group=None) -> Signal:
    f = _signal(f, group)
    W = f.group.pairing_matrix
    return f.with_values(np.conj(W) @ f.values)


def inverse_fourier(fh, group=None) -> Signal:
    fh = _signal(fh, group)
    W = fh.group.pairing_matrix
    return fh.with_values(W @ fh.values / fh.group.order)


def rihaczek(f, group=None) -> np.ndarray:
    """``Rf(x, w) = f(x) conj(fh(w)) conj<w, x>``, rows indexed by x, columns by w."""
    f = _signal(f, group)
    fh = fourier(f).values
    W = f.group.pairing_matrix
    return f.values[:, None] * np.conj(fh)[None, :] * np.conj(W.T)


def symplectic_fourier(F: np.ndarray, group) -> np.ndarray:
    """Fourier on G, inverse (unnormalized) Fourier on the dual, then swap axes.

    ``result[r, rho] = sum_{x, xi} F[x, xi] conj<rho, x> <xi, r>``.
    """
    group = as_group(group)
    n = group.order
    F = np.asarray(F, dtype=complex)
    if F.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} array indexed by (x, xi), got {F.shape}")
    W = group.pairing_matrix
    return (np.conj(W) @ F @ W).T
