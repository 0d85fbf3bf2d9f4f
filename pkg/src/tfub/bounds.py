"""Closed-form support bounds and their exact counterparts at desk scale.

Bounds that can be fractional are returned as :class:`fractions.Fraction`;
callers take the ceiling when an integer support count is needed.

The exact quantities are computed with the rank engine:

* ``theta(G, k) = |G| - max_deficient_rows(W_G, k)``
* ``phi_g(G, k) = |G|^2 - max_deficient_rows(A_{G,g}, k)``
* ``psi(D, k)   = rows(D) - (largest zero set of a nonzero D c, ||c||_0 <= k)``
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gabor import gabor_matrix
from .groups import FiniteAbelianGroup, as_group, is_prime
from .rank import (
    DEFAULT_TOL,
    colex_combinations,
    combinations_array,
    deficiency_search,
    flat_closures,
)

THETA_GUARD = 16
PHI_GUARD = 8


class GuardExceededError(ValueError):
    pass


def _check_k(k: int, n: int):
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# -- Fourier bounds ---------------------------------------------------------------


def donoho_stark(n: int, k: int) -> int:
    """Smallest spectral support allowed by ``||f||_0 ||fh||_0 >= n`` when ``||f||_0 = k``."""
    _check_k(k, n)
    return -(-n // k)


def sum_bound(n: int) -> int:
    """``ceil(2 sqrt(n))``, the lower bound on ``||f||_0 + ||fh||_0``."""
    if n < 1:
        raise ValueError("group order must be positive")
    r = math.isqrt(4 * n)
    return r if r * r == 4 * n else r + 1


def tao_bound(p: int, k: int) -> int:
    """``p + 1 - k``: the minimal spectral support on Z_p for ``||f||_0 = k``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    _check_k(k, p)
    return p + 1 - k


@dataclass(frozen=True)
class DivisorBracket:
    d1: int
    d2: int


def divisor_bracket(n: int, k: int) -> DivisorBracket:
    _check_k(k, n)
    divs = divisors(n)
    return DivisorBracket(max(d for d in divs if d <= k), min(d for d in divs if d >= k))


def meshulam_u(n: int, k: int) -> Fraction:
    """``u(n, k) = n / (d1 d2) * (d1 + d2 - k)``."""
    b = divisor_bracket(n, k)
    return Fraction(n, b.d1 * b.d2) * (b.d1 + b.d2 - k)


def meshulam_theta_lower(group, k: int) -> Fraction:
    return meshulam_u(as_group(group).order, k)


def theta_exact(group, k: int, guard: int = THETA_GUARD, threads: int | None = None,
                tol_rel: float = DEFAULT_TOL, certificate: bool = False):
    """Exact theta(G, k) from an exhaustive search over the Fourier matrix.

    With ``certificate=True`` also returns the deficiency certificate, whose
    witness (A, B) is a support A and a set B of vanishing Fourier coefficients.
    """
    group = as_group(group)
    n = group.order
    _check_k(k, n)
    if n > guard:
        raise GuardExceededError(f"|G|={n} exceeds the exact-theta guard {guard}")
    cert = deficiency_search(group.pairing_matrix, k, tol_rel, threads)
    value = n - cert.value
    return (value, cert) if certificate else value


def theta_table(group, guard: int = THETA_GUARD, threads: int | None = None) -> list[int]:
    group = as_group(group)
    return [theta_exact(group, k, guard, threads) for k in range(1, group.order + 1)]


@dataclass
class ThetaProvider:
    """theta(G, k) from one of several sources.

    ``exact`` - exhaustive computation; ``meshulam`` - ceiling of the divisor
    bound; ``tao_prime`` - ``p + 1 - k`` (prime order only); ``naive_plus_one`` -
    ``|G| + 1 - k`` regardless of the order.
    """

    kind: str
    group: FiniteAbelianGroup
    guard: int = THETA_GUARD
    _cache: dict = field(default_factory=dict, repr=False)

    KINDS = ("exact", "meshulam", "tao_prime", "naive_plus_one")

    def __post_init__(self):
        self.group = as_group(self.group)
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown theta provider {self.kind!r}")
        if self.kind == "tao_prime" and not self.group.is_cyclic_prime:
            raise ValueError("the tao_prime provider needs a group of prime order")

    def __call__(self, k: int) -> int:
        n = self.group.order
        _check_k(k, n)
        if k not in self._cache:
            if self.kind == "exact":
                val = theta_exact(self.group, k, self.guard)
            elif self.kind == "meshulam":
                val = math.ceil(meshulam_theta_lower(self.group, k))
            else:
                val = n + 1 - k
            self._cache[k] = val
        return self._cache[k]


# -- STFT bounds ------------------------------------------------------------------


def stft_lower_general(theta: ThetaProvider, kf: int, kfh: int, kg: int, kgh: int,
                       variant: str = "max") -> Fraction:
    """Lower bounds on ||V_g f||_0 from the support sizes of f, fh, g, gh.

    ``max``: max of theta(kg) theta(kfh) and theta(kf) theta(kgh);
    ``arith``: their mean; ``geom``: sqrt of the product of all four values
    (returned as a float when irrational).
    """
    n = theta.group.order
    for v in (kf, kfh, kg, kgh):
        _check_k(v, n)
    a = theta(kg) * theta(kfh)
    b = theta(kf) * theta(kgh)
    if variant == "max":
        return Fraction(max(a, b))
    if variant == "arith":
        return Fraction(a + b, 2)
    if variant == "geom":
        prod = a * b
        r = math.isqrt(prod)
        return Fraction(r) if r * r == prod else math.sqrt(prod)
    raise ValueError(f"unknown variant {variant!r}")


def corollary_prime_bounds(p: int, kf: int, kfh: int, kg: int, kgh: int) -> tuple[int, Fraction]:
    """The max-form and the averaged form of the prime-order STFT bound."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    for v in (kf, kfh, kg, kgh):
        _check_k(v, p)
    q = p + 1
    max_form = max((q - kg) * (q - kfh), (q - kf) * (q - kgh))
    avg_form = Fraction(q * q) - Fraction(q * (kf + kfh + kg + kgh), 2) \
        + Fraction(kfh * kg + kf * kgh, 2)
    return max_form, avg_form


def cauchy_davenport(a: int, b: int, p: int) -> int:
    """``min(a + b - 1, p)``: the smallest possible size of a sumset in Z_p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not (1 <= a <= p and 1 <= b <= p):
        raise ValueError("set sizes must lie in 1..p")
    return min(a + b - 1, p)


def prime_stft_bound(p: int, kf: int, kg: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    _check_k(kf, p)
    _check_k(kg, p)
    if kf + kg > p:
        return p * (p + 1) - kf * kg
    return p * (p + 1) - (p + 1 - kf) * (p + 1 - kg)


def phi_lower_main(group, k: int) -> Fraction:
    """``|G|^2 / (d1 d2) * (d1 + d2 - k)`` = ``|G| u(|G|, k)``."""
    n = as_group(group).order
    return n * meshulam_u(n, k)


def phi_lower_zpq(p: int, q: int, k: int) -> Fraction:
    """Divisor-hull bound on Z_{pq}, primes ``q < p``, evaluated literally."""
    if not (is_prime(p) and is_prime(q)) or q >= p:
        raise ValueError(f"need primes q < p, got p={p}, q={q}")
    _check_k(k, p * q)
    if k < q:
        return Fraction(p * p * (q * q - k + 1))
    return (p * p - Fraction(k, q) + 1) * (q * q - q + 1)


def phi_exact(group, k: int, g, guard: int = PHI_GUARD, threads: int | None = None,
              tol_rel: float = DEFAULT_TOL, certificate: bool = False):
    """``|G|^2 - max_deficient_rows(A_{G,g}, k)`` for the given window."""
    group = as_group(group)
    n = group.order
    _check_k(k, n)
    if n > guard:
        raise GuardExceededError(f"|G|={n} exceeds the exact-phi guard {guard}")
    A = gabor_matrix(group, g).matrix
    cert = deficiency_search(A, k, tol_rel, threads)
    value = n * n - cert.value
    return (value, cert) if certificate else value


def psi(dictionary, k: int, guard: int = 40, tol_rel: float = DEFAULT_TOL,
        zero_tol: float = 1e-8) -> int:
    """Smallest support of a nonzero ``D c`` with ``||c||_0 <= k`` (exhaustive).

    For each k-set of columns the range of ``D_A`` is spanned by an orthonormal
    basis U; the largest zero set of a nonzero vector in that range is the
    closure of some (dim - 1)-subset of rows.
    """
    D = np.asarray(dictionary, dtype=complex)
    rows, cols = D.shape
    if not 1 <= k <= cols:
        raise ValueError(f"k={k} out of range 1..{cols}")
    if max(rows, cols) > guard:
        raise GuardExceededError(f"dictionary of shape {D.shape} exceeds the guard {guard}")
    best = 0
    for A in colex_combinations(cols, k):
        u, s, _ = np.linalg.svd(D[:, A], full_matrices=False)
        if s[0] == 0:
            continue
        d = int((s > tol_rel * s[0] * max(rows, k)).sum())
        U = u[:, :d]
        zm, _, _, _ = flat_closures(U, combinations_array(rows, d - 1), tol_rel, zero_tol)
        best = max(best, int(zm.sum(axis=1).max()))
    return rows - best


# -- tables -----------------------------------------------------------------------


@dataclass(frozen=True)
class BoundRow:
    k: int
    bound_name: str
    value: Fraction

    def csv_row(self) -> tuple:
        v = Fraction(self.value)
        return (self.k, self.bound_name, v.numerator, v.denominator)


def bounds_csv(rows: list[BoundRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "bound_name", "value_num", "value_den"])
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


def table_phi_main(group) -> list[BoundRow]:
    n = as_group(group).order
    return [BoundRow(k, "phi_main", phi_lower_main(group, k)) for k in range(1, n + 1)]


def table_phi_zpq(p: int, q: int) -> list[BoundRow]:
    return [BoundRow(k, "phi_zpq", phi_lower_zpq(p, q, k)) for k in range(1, p * q + 1)]


def fourier_support_pairs(group, theta: ThetaProvider | None = None) -> list[tuple[int, int]]:
    """(||f||_0, ||fh||_0) pairs with k * l >= |G| and l >= theta(k)."""
    n = as_group(group).order
    out = []
    for k in range(1, n + 1):
        for l in range(1, n + 1):
            if k * l >= n and (theta is None or l >= theta(k)) and (theta is None or k >= theta(l)):
                out.append((k, l))
    return out
