"""Time-frequency shifts, the short-time Fourier transform and Gabor frames.

``pi(x, xi) = M_xi T_x`` with ``T_x f(y) = f(y - x)`` and ``M_xi f = f * xi``.
The STFT is ``V_g f(x, xi) = <f, pi(x, xi) g>`` and is returned as an
|G| x |G| array with rows indexed by x and columns by xi.  The full Gabor matrix
stacks the conjugated vectors ``pi(lambda) g`` as rows, in the lexicographic
order flat = index(x) * |G| + index(xi), so that ``A @ f == V_g f .ravel()``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import (
    Character,
    FiniteAbelianGroup,
    GroupElement,
    GroupMismatchError,
    Signal,
    _signal,
    as_group,
    cyclic_dft_matrix,
)


class ZeroWindowError(ValueError):
    pass


@dataclass(frozen=True)
class TimeFrequencyIndex:
    x: GroupElement
    xi: Character

    @property
    def flat(self) -> int:
        return self.x.index * self.x.group.order + self.xi.index

    @classmethod
    def from_flat(cls, group, flat: int) -> "TimeFrequencyIndex":
        group = as_group(group)
        x, xi = divmod(int(flat), group.order)
        return cls(group.element(x), group.character(xi))


def _index(obj, group: FiniteAbelianGroup) -> int:
    if isinstance(obj, GroupElement):
        if obj.group != group:
            raise GroupMismatchError(f"{obj!r} is not an element of {group}")
        return obj.index
    if isinstance(obj, (tuple, list)):
        return group.index(obj)
    return int(obj) % group.order


def translate(f, x) -> Signal:
    """``T_x f(y) = f(y - x)``; ``x`` may be a GroupElement, residue tuple or index."""
    f = _signal(f)
    j = _index(x, f.group)
    return f.with_values(f.values[f.group.sub_table[:, j]])


def modulate(f, xi) -> Signal:
    """Pointwise product with the character ``xi``."""
    f = _signal(f)
    j = _index(xi, f.group)
    return f.with_values(f.values * f.group.pairing_matrix[j])


def time_frequency_shift(g, x, xi) -> Signal:
    return modulate(translate(g, x), xi)


def _check_window(f: Signal, g: Signal):
    if f.group != g.group:
        raise GroupMismatchError("signal and window live on different groups")
    if not np.any(g.values):
        raise ZeroWindowError("the window must be nonzero")


def stft(f, g, group=None) -> np.ndarray:
    """Evaluate ``V_g f(x, xi) = sum_y f(y) conj(g(y - x)) conj<xi, y>`` directly."""
    f = _signal(f, group)
    g = _signal(g, f.group)
    _check_window(f, g)
    grp = f.group
    shifted = g.values[grp.sub_table.T]  # shifted[x, y] = g(y - x)
    W = grp.pairing_matrix
    return (f.values[None, :] * np.conj(shifted)) @ np.conj(W).T


def istft(F, g, group=None) -> Signal:
    """Synthesis ``f = (|G| ||g||^2)^-1 sum_lambda F(lambda) pi(lambda) g``."""
    g = _signal(g, group)
    if not np.any(g.values):
        raise ZeroWindowError("the window must be nonzero")
    n = g.group.order
    F = np.asarray(F, dtype=complex)
    if F.shape not in ((n, n), (n * n,)):
        raise ValueError(f"expected an array of shape ({n}, {n}), got {F.shape}")
    A = gabor_matrix(g.group, g).matrix
    vals = A.conj().T @ F.reshape(-1) / (n * np.vdot(g.values, g.values).real)
    return g.with_values(vals)


@dataclass(frozen=True, eq=False)
class GaborMatrix:
    group: FiniteAbelianGroup
    window: Signal
    matrix: np.ndarray

    @property
    def is_frame(self) -> bool:
        return bool(np.any(self.window.values))

    def index(self, flat: int) -> TimeFrequencyIndex:
        return TimeFrequencyIndex.from_flat(self.group, flat)

    def vectors(self) -> list[Signal]:
        """The Gabor system ``pi(lambda) g`` in row order."""
        return [self.window.with_values(row) for row in np.conj(self.matrix)]


def gabor_matrix(group, g) -> GaborMatrix:
    """Stack the blocks ``(D_{x,g} W_G)^*`` with ``D_{x,g} = diag(T_x g)``.

    Row ``x * |G| + xi`` is ``conj(pi(x, xi) g)``.
    """
    group = as_group(group)
    g = _signal(g, group)
    W = group.pairing_matrix
    shifted = g.values[group.sub_table.T]  # shifted[x, y] = (T_x g)(y)
    blocks = np.conj(W[None, :, :] * shifted[:, None, :])
    mat = blocks.reshape(group.order ** 2, group.order)
    mat.setflags(write=False)
    return GaborMatrix(group, g, mat)


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    rtol: float = 1e-8

    @property
    def is_frame(self) -> bool:
        return self.lower > self.rtol * max(self.upper, 1.0)

    @property
    def is_tight(self) -> bool:
        return self.is_frame and (self.upper - self.lower) <= self.rtol * self.upper


def frame_bounds(vectors, rtol: float = 1e-8) -> FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of ``S = sum_k phi_k phi_k^*``."""
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vecs:
        raise ValueError("frame_bounds needs at least one vector")
    groups = {v.group for v in vectors if isinstance(v, Signal)}
    if len(groups) > 1 or len({v.size for v in vecs}) > 1:
        raise GroupMismatchError("frame vectors must share one group")
    Phi = np.stack(vecs)
    S = Phi.T @ Phi.conj()
    eig = np.linalg.eigvalsh(S)
    lower = max(float(eig[0]), 0.0)
    return FrameBounds(lower, float(eig[-1]), rtol)


def random_window(group, seed=None) -> Signal:
    """Independent standard complex Gaussian entries."""
    group = as_group(group)
    rng = np.random.default_rng(seed)
    vals = (rng.standard_normal(group.order) + 1j * rng.standard_normal(group.order)) / np.sqrt(2)
    return Signal(group, vals)


def unimodular_window(group, seed=None) -> Signal:
    """Entries ``exp(2 pi i u)`` with ``u`` uniform on [0, 1)."""
    group = as_group(group)
    rng = np.random.default_rng(seed)
    return Signal(group, np.exp(2j * np.pi * rng.random(group.order)))


def delta_window(group) -> Signal:
    group = as_group(group)
    vals = np.zeros(group.order, dtype=complex)
    vals[0] = 1.0
    return Signal(group, vals)


def harmonic_frame(n: int, m: int, normalized: bool = False) -> list[Signal]:
    """Characters of Z_m restricted to the first ``n`` coordinates.

    Unnormalized, the frame is tight with bound m; ``normalized=True`` rescales
    each vector to unit norm, giving bound m / n.
    """
    if n < 1 or m < n:
        raise ValueError(f"need m >= n >= 1, got n={n}, m={m}")
    rows = cyclic_dft_matrix(m)[:, :n]
    if normalized:
        rows = rows / np.sqrt(n)
    group = FiniteAbelianGroup.cyclic(n)
    return [Signal(group, r) for r in rows]
