"""Erasure-robust frames, exhaustive sparse decoding and operator identification.

Conventions: a frame is a list of vectors ``phi_k``; its analysis matrix has
rows ``conj(phi_k)`` so that the coefficients ``<f, phi_k>`` are ``Phi @ f``.
For the Gabor system this is exactly :func:`tfub.gabor.gabor_matrix`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .gabor import TimeFrequencyIndex, gabor_matrix, time_frequency_shift
from .groups import FiniteAbelianGroup, Signal, _signal, as_group
from .rank import (
    DEFAULT_TOL,
    all_minors_nonzero,
    batch_ranks,
    combinations_array,
    deficiency_search,
    numeric_rank,
)

FIT_RTOL = 1e-8


class NotAFrameError(ValueError):
    """The kept vectors no longer span the space."""


class NotIdentifiableError(ValueError):
    pass


class AmbiguousRecoveryError(RuntimeError):
    """Two different sparse solutions reproduce the samples."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class GuardExceededError(ValueError):
    pass


def analysis_matrix(frame) -> np.ndarray:
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in frame]
    if not vecs:
        raise ValueError("empty frame")
    if len({v.size for v in vecs}) > 1:
        raise ValueError("frame vectors have different lengths")
    return np.conj(np.stack(vecs))


# -- erasures -------------------------------------------------------------------------


@dataclass(frozen=True)
class ErasurePattern:
    """Which of the ``m`` frame coefficients survive."""

    kept: tuple[int, ...]
    m: int

    def __post_init__(self):
        kept = tuple(sorted(set(int(k) for k in self.kept)))
        if kept and (kept[0] < 0 or kept[-1] >= self.m):
            raise ValueError(f"kept indices must lie in 0..{self.m - 1}")
        object.__setattr__(self, "kept", kept)

    @property
    def erased(self) -> tuple[int, ...]:
        keep = set(self.kept)
        return tuple(i for i in range(self.m) if i not in keep)

    @classmethod
    def uniform(cls, m: int, n_erased: int, seed=None) -> "ErasurePattern":
        rng = np.random.default_rng(seed)
        lost = set(rng.choice(m, size=n_erased, replace=False).tolist())
        return cls(tuple(i for i in range(m) if i not in lost), m)


@dataclass
class RobustnessCertificate:
    ok: bool
    dependent_rows: tuple[int, ...] | None
    checked: int
    uncertain: int = 0

    def __bool__(self):
        return self.ok


def certify_max_robust(frame, tol_rel: float = DEFAULT_TOL, threads: int | None = None
                       ) -> RobustnessCertificate:
    """Every ``dim`` of the frame vectors are linearly independent.

    For a spanning family this is both general position and maximal robustness
    to erasures.  On failure the certificate names the first dependent subset.
    """
    Phi = analysis_matrix(frame)
    m, n = Phi.shape
    if m < n:
        raise ValueError(f"{m} vectors cannot span a space of dimension {n}")
    res = all_minors_nonzero(Phi, n, tol_rel, threads)
    rows = None if res.ok else res.counterexample[1]
    return RobustnessCertificate(res.ok, rows, res.checked, res.uncertain)


def adversarial_erasure(frame, tol_rel: float = DEFAULT_TOL) -> ErasurePattern:
    """Keep exactly a dependent ``dim``-subset; raises if the frame is maximally robust."""
    cert = certify_max_robust(frame, tol_rel)
    if cert.ok:
        raise ValueError("every dim-subset is independent; no adversarial erasure exists")
    return ErasurePattern(cert.dependent_rows, len(frame))


def erase_and_recover(f, frame, pattern: ErasurePattern, tol_rel: float = DEFAULT_TOL) -> Signal:
    """Reconstruct f from the surviving coefficients with the pseudo-inverse."""
    Phi = analysis_matrix(frame)
    f = _signal(f) if not isinstance(f, Signal) else f
    if pattern.m != Phi.shape[0]:
        raise ValueError("pattern does not match the frame size")
    kept = Phi[list(pattern.kept)]
    n = Phi.shape[1]
    if len(pattern.kept) < n or numeric_rank(kept, tol_rel).rank < n:
        raise NotAFrameError(f"the {len(pattern.kept)} kept vectors do not span C^{n}")
    coeffs = kept @ f.values
    return f.with_values(np.linalg.pinv(kept) @ coeffs)


# -- exhaustive l0 decoding -----------------------------------------------------------------


@dataclass
class DecodeResult:
    """``status`` is ``unique``, ``ambiguous`` or ``nofit``."""

    status: str
    coefficients: np.ndarray | None
    support: tuple[int, ...] | None
    alternatives: list[np.ndarray] = field(default_factory=list)
    checked: int = 0

    @property
    def unique(self) -> bool:
        return self.status == "unique"


def _fits(D: np.ndarray, y: np.ndarray, supports: np.ndarray, thr: float):
    """Least-squares fit of ``y`` on each column subset; returns coefficients and a fit mask."""
    sub = D[:, supports]  # (rows, nS, j)
    sub = np.moveaxis(sub, 1, 0)  # (nS, rows, j)
    c = np.einsum("sjr,r->sj", np.linalg.pinv(sub), y)
    resid = np.linalg.norm(np.einsum("srj,sj->sr", sub, c) - y[None, :], axis=1)
    return c, resid <= thr


def l0_decode(dictionary, sample_rows, samples, k: int, guard: int = 2_000_000,
              rtol: float = FIT_RTOL) -> DecodeResult:
    """Every coefficient vector with at most k nonzeros that reproduces the samples.

    Each support of size <= k is fitted by least squares on the sampled rows; a
    fit counts when the residual is at most ``rtol * ||samples||``.  Distinct
    consistent solutions make the answer ``ambiguous``; the search never stops
    early, so a ``unique`` verdict is exhaustive.
    """
    D = np.asarray(dictionary, dtype=complex)
    rows, cols = D.shape
    B = np.asarray(list(sample_rows), dtype=np.int64)
    y = np.asarray(samples, dtype=complex).reshape(-1)
    if y.size != B.size:
        raise ValueError(f"{B.size} sample positions but {y.size} samples")
    if k < 0 or k > cols:
        raise ValueError(f"sparsity {k} out of range 0..{cols}")
    total = sum(math.comb(cols, j) for j in range(1, k + 1))
    if total > guard:
        raise GuardExceededError(f"{total} supports exceed the guard {guard}")
    norm = float(np.linalg.norm(y))
    thr = rtol * norm
    if norm == 0:
        return DecodeResult("unique", np.zeros(cols, dtype=complex), (), [], 0)
    DB = D[B]
    found: list[tuple[tuple[int, ...], np.ndarray]] = []
    checked = 0
    step = 4096
    for j in range(1, k + 1):
        supports = combinations_array(cols, j)
        for start in range(0, len(supports), step):
            chunk = supports[start:start + step]
            c, ok = _fits(DB, y, chunk, thr)
            checked += len(chunk)
            for i in np.flatnonzero(ok):
                full = np.zeros(cols, dtype=complex)
                full[chunk[i]] = c[i]
                scale = max(1.0, float(np.abs(full).max()))
                if not any(np.allclose(full, g, atol=1e-6 * scale, rtol=0) for _, g in found):
                    found.append((tuple(int(s) for s in chunk[i]), full))
    if not found:
        return DecodeResult("nofit", None, None, [], checked)
    supp, first = found[0]
    keep = np.abs(first) > 1e-9 * max(1.0, float(np.abs(first).max()))
    first = np.where(keep, first, 0)
    supp = tuple(int(i) for i in np.flatnonzero(keep))
    if len(found) > 1:
        return DecodeResult("ambiguous", first, supp, [g for _, g in found[1:]], checked)
    return DecodeResult("unique", first, supp, [], checked)


def spectral_recovery(samples, positions, group, k: int) -> DecodeResult:
    """Recover f with ``||fh||_0 <= k`` from ``f`` restricted to ``positions``.

    ``f = |G|^-1 W fh``, so the dictionary is the inverse Fourier matrix.
    """
    group = as_group(group)
    D = group.pairing_matrix / group.order
    return l0_decode(D, positions, samples, k)


def recover_from_stft_samples(g, Lambda, samples, k: int) -> Signal:
    """Recover a k-sparse f from ``V_g f`` on the index set ``Lambda`` (flat indices)."""
    g = _signal(g)
    A = gabor_matrix(g.group, g).matrix
    res = l0_decode(A, [_flat(lam, g.group) for lam in Lambda], samples, k)
    if res.status == "ambiguous":
        raise AmbiguousRecoveryError("several sparse signals fit the samples; the window "
                                     "is not in general position or too few samples", res)
    if res.status == "nofit":
        raise AmbiguousRecoveryError(f"no signal with at most {k} nonzeros fits", res)
    return g.with_values(res.coefficients)


def _flat(lam, group: FiniteAbelianGroup) -> int:
    if isinstance(lam, TimeFrequencyIndex):
        return lam.flat
    if isinstance(lam, (tuple, list)):
        x, xi = lam
        return int(x) * group.order + int(xi)
    return int(lam)


# -- operators ------------------------------------------------------------------------------


@dataclass
class OperatorClass:
    """``H = sum_lambda c_lambda pi(lambda)``; lambda is stored as the flat index x*|G| + xi.

    Shifts may be given as flat indices, (x, xi) pairs or TimeFrequencyIndex objects.
    """

    group: FiniteAbelianGroup
    Lambda: tuple[int, ...]
    coefficients: np.ndarray

    def __post_init__(self):
        self.group = as_group(self.group)
        self.Lambda = tuple(_flat(l, self.group) for l in self.Lambda)
        self.coefficients = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if len(self.Lambda) != self.coefficients.size:
            raise ValueError("one coefficient per time-frequency shift")
        if len(set(self.Lambda)) != len(self.Lambda):
            raise ValueError("repeated time-frequency shift")
        if len(self.Lambda) > self.group.order ** 2:
            raise ValueError("more shifts than |G|^2")

    def indices(self) -> list[TimeFrequencyIndex]:
        return [TimeFrequencyIndex.from_flat(self.group, l) for l in self.Lambda]

    def matrix(self) -> np.ndarray:
        n = self.group.order
        H = np.zeros((n, n), dtype=complex)
        eye = np.eye(n)
        for lam, c in zip(self.indices(), self.coefficients):
            cols = [time_frequency_shift(Signal(self.group, e), lam.x, lam.xi).values for e in eye]
            H += c * np.stack(cols, axis=1)
        return H

    def apply(self, f) -> Signal:
        f = _signal(f, self.group)
        return f.with_values(self.matrix() @ f.values)


def _synthesis_columns(g: Signal) -> np.ndarray:
    """Columns ``pi(lambda) g`` in flat order: the conjugate transpose of A_{G,g}."""
    return gabor_matrix(g.group, g).matrix.conj().T


def identify_operator(g, Lambda, observed, tol_rel: float = DEFAULT_TOL) -> OperatorClass:
    """Coefficients of the operator with known shifts ``Lambda`` from its action on g."""
    g = _signal(g)
    n = g.group.order
    lams = [_flat(l, g.group) for l in Lambda]
    if len(lams) > n:
        raise NotIdentifiableError(f"|Lambda| = {len(lams)} exceeds |G| = {n}")
    obs = np.asarray(observed, dtype=complex).reshape(-1)
    P = _synthesis_columns(g)[:, lams]
    if numeric_rank(P, tol_rel).rank < len(lams):
        raise NotIdentifiableError("the shifted windows are linearly dependent: "
                                   "g is not in general position")
    c, *_ = np.linalg.lstsq(P, obs, rcond=None)
    resid = np.linalg.norm(P @ c - obs)
    if resid > FIT_RTOL * max(np.linalg.norm(obs), 1e-300):
        raise NotIdentifiableError(f"observation is not in the span (residual {resid:.3g})")
    return OperatorClass(g.group, lams, c)


def gabor_synthesis_decode(g, sample_set, samples, sparsity: int, guard: int = 5) -> OperatorClass:
    """Find ``f = sum c_lambda pi(lambda) g`` with ``|Lambda| <= sparsity`` from f on ``sample_set``.

    The shifts are not given to the decoder; every candidate set is tried.
    """
    g = _signal(g)
    n = g.group.order
    if n > guard:
        raise GuardExceededError(f"|G|={n} exceeds the guard {guard}")
    res = l0_decode(_synthesis_columns(g), list(sample_set), samples, sparsity)
    if res.status != "unique":
        raise AmbiguousRecoveryError(f"decoding is {res.status}", res)
    return OperatorClass(g.group, res.support, res.coefficients[list(res.support)])


# -- equivalent characterizations of a good window ----------------------------------------------


@dataclass
class WindowReport:
    minors: bool
    general_position: bool
    max_robust: bool
    min_stft_support: int
    stft_support_ok: bool
    sampling: bool
    identifiable: bool
    counterexample: tuple[int, ...] | None = None

    @property
    def parts(self) -> dict[str, bool]:
        return {"minors": self.minors, "general_position": self.general_position,
                "max_robust": self.max_robust, "stft_support": self.stft_support_ok,
                "sampling": self.sampling, "identifiable": self.identifiable}

    @property
    def all_pass(self) -> bool:
        return all(self.parts.values())

    @property
    def all_fail(self) -> bool:
        return not any(self.parts.values())

    @property
    def consistent(self) -> bool:
        return self.all_pass or self.all_fail


def window_report(g, seed: int = 0, tol_rel: float = DEFAULT_TOL, threads: int | None = None,
                  guard: int = 6) -> WindowReport:
    """Evaluate six equivalent properties of the Gabor system of g independently.

    * every |G| x |G| minor of A_{G,g} is nonzero;
    * every |G| of the vectors pi(lambda) g are independent (batched ranks);
    * the system survives any erasure leaving |G| vectors (certify_max_robust);
    * ``||V_g f||_0 >= |G|^2 - |G| + 1`` for every f != 0 (exhaustive deficiency);
    * every |Lambda| = |G| samples of V_g f determine V_g f (reconstruct and compare);
    * every operator class with |Lambda| = |G| is identified from H g.
    """
    g = _signal(g)
    n = g.group.order
    if n > guard:
        raise GuardExceededError(f"|G|={n} exceeds the guard {guard}")
    A = gabor_matrix(g.group, g).matrix
    m = n * n
    minors = all_minors_nonzero(A, n, tol_rel, threads)

    subsets = combinations_array(m, n)
    ranks = batch_ranks(A[subsets], tol_rel).ranks
    general = bool((ranks == n).all())

    robust = certify_max_robust(list(np.conj(A)), tol_rel, threads)

    cert = deficiency_search(A, n, tol_rel, threads)
    min_support = m - cert.value

    rng = np.random.default_rng(seed)
    f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    V = A @ f
    sampling = True
    step = 4096
    for start in range(0, len(subsets), step):
        chunk = subsets[start:start + step]
        sub = A[chunk]
        sol = np.linalg.pinv(sub) @ V[chunk][..., None]
        rec = (A @ sol[..., 0].T).T
        err = np.linalg.norm(rec - V[None, :], axis=1) / np.linalg.norm(V)
        if (err > 1e-6).any():
            sampling = False
            break

    P = A.conj().T
    identifiable = True
    for start in range(0, len(subsets), step):
        chunk = subsets[start:start + step]
        c = rng.standard_normal((len(chunk), n)) + 1j * rng.standard_normal((len(chunk), n))
        sub = np.moveaxis(P[:, chunk], 1, 0)  # (nS, n, n)
        obs = np.einsum("sij,sj->si", sub, c)
        try:
            sol = np.linalg.solve(sub, obs[..., None])[..., 0]
        except np.linalg.LinAlgError:
            identifiable = False
            break
        err = np.linalg.norm(sol - c, axis=1) / np.linalg.norm(c, axis=1)
        if (err > 1e-6).any() or not np.isfinite(err).all():
            identifiable = False
            break

    return WindowReport(minors.ok, general, robust.ok, min_support, min_support >= m - n + 1,
                        sampling, identifiable, robust.dependent_rows)


def find_certified_window(group, kind: str = "unimodular", attempts: int = 100, start_seed: int = 0):
    """First seed whose window passes :func:`certify_max_robust`; returns (seed, window) or None."""
    from .gabor import random_window, unimodular_window

    make = {"unimodular": unimodular_window, "random": random_window}[kind]
    group = as_group(group)
    for seed in range(start_seed, start_seed + attempts):
        g = make(group, seed)
        if certify_max_robust(list(np.conj(gabor_matrix(group, g).matrix))).ok:
            return seed, g
    return None


def kernel_ambiguity(dictionary, sample_rows, size: int, seed: int = 0):
    """Two different ``size//2``-sparse-ish coefficient vectors agreeing on ``sample_rows``.

    Picks a set S of ``size`` columns whose sampled submatrix has a kernel vector
    with full support on S, splits it into two halves u - v, and returns (u, v):
    both reproduce the same samples.  Returns None when no such S exists.
    """
    D = np.asarray(dictionary, dtype=complex)
    DB = D[list(sample_rows)]
    cols = D.shape[1]
    rng = np.random.default_rng(seed)
    for S in itertools.combinations(range(cols), size):
        sub = DB[:, S]
        _, s, vh = np.linalg.svd(sub)
        rk = int((s > 1e-10 * s[0] * max(sub.shape)).sum()) if s.size else 0
        if rk == size:
            continue
        kern = vh[rk:].conj().T
        v = kern @ (rng.standard_normal(kern.shape[1]) + 1j * rng.standard_normal(kern.shape[1]))
        if (np.abs(v) < 1e-8).any():
            continue
        half = size // 2
        u = np.zeros(cols, dtype=complex)
        w = np.zeros(cols, dtype=complex)
        u[list(S[:half])] = v[:half]
        w[list(S[half:])] = -v[half:]
        return u, w
    return None
