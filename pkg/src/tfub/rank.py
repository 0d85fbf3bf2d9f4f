"""Certified numeric rank and exhaustive minor enumeration.

Ranks come from singular values: ``rank = #{s_i > tol * s_max * max(rows, cols)}``.
Every decision also carries a spectral-gap certificate

* ``gap_ratio = s_rank / s_{rank+1}`` (infinite at full rank), and
* ``margin = s_rank / threshold``,

and a decision with either below :data:`GAP_WARN` is counted as uncertain.
All entries of the matrices studied here are roots of unity times modest
numbers, so honest decisions sit many orders of magnitude away from the
threshold.

Submatrix naming follows the usual convention for restrictions of maps:
``submatrix(M, A, B)`` keeps columns ``A`` and rows ``B`` (a |B| x |A| matrix).
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-10
GAP_WARN = 1e3
# Number of complex entries gathered per batched SVD call.
_CHUNK_ENTRIES = 1 << 21


class UncertainRankError(RuntimeError):
    pass


def resolve_threads(threads: int | None = None) -> int:
    """0/None means: ``TFUB_THREADS`` if set, else the CPU count."""
    if threads:
        return max(1, int(threads))
    env = os.environ.get("TFUB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# -- combinations ---------------------------------------------------------------


def combinations_array(n: int, r: int) -> np.ndarray:
    """All r-subsets of range(n) in lexicographic order, shape (C(n, r), r)."""
    count = math.comb(n, r)
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), r)),
        dtype=np.int64,
        count=count * r,
    )
    return flat.reshape(count, r)


def colex_combinations(n: int, r: int) -> np.ndarray:
    """All r-subsets of range(n) in colexicographic order."""
    combos = combinations_array(n, r)
    if r == 0:
        return combos
    order = np.lexsort(combos.T)  # last key (largest element) is primary
    return combos[order]


# -- single-matrix rank ---------------------------------------------------------


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: tuple[float, ...]
    gap_ratio: float
    threshold: float
    margin: float

    @property
    def uncertain(self) -> bool:
        return self.gap_ratio < GAP_WARN or self.margin < GAP_WARN

    @property
    def full(self) -> bool:
        return self.rank == len(self.singular_values)


def _gap_and_margin(s: np.ndarray, rk: np.ndarray, thr: np.ndarray):
    """Vectorized gap ratio and margin for batches of descending singular values."""
    nb, r = s.shape
    idx = np.arange(nb)
    with np.errstate(divide="ignore", invalid="ignore"):
        above = np.where(rk > 0, s[idx, np.maximum(rk - 1, 0)], np.inf)
        below = np.where(rk < r, s[idx, np.minimum(rk, r - 1)], 0.0)
        gap = np.where(below > 0, above / np.where(below > 0, below, 1.0), np.inf)
        margin = np.where((rk > 0) & (thr > 0), above / np.where(thr > 0, thr, 1.0), np.inf)
    return gap, margin


def numeric_rank(M, tol_rel: float = DEFAULT_TOL) -> RankReport:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.size == 0:
        raise ValueError("numeric_rank needs a nonempty 2-D matrix")
    s = np.linalg.svd(M, compute_uv=False)
    thr = tol_rel * s[0] * max(M.shape)
    rk = int((s > thr).sum())
    gap, margin = _gap_and_margin(s[None, :], np.array([rk]), np.array([thr]))
    return RankReport(rk, tuple(float(v) for v in s), float(gap[0]), float(thr), float(margin[0]))


@dataclass
class BatchRanks:
    ranks: np.ndarray
    min_gap: float
    min_margin: float
    uncertain: int


def batch_ranks(stack: np.ndarray, tol_rel: float = DEFAULT_TOL) -> BatchRanks:
    """Ranks of a stack of equally sized matrices, shape (batch, rows, cols)."""
    stack = np.asarray(stack)
    if stack.shape[0] == 0:
        return BatchRanks(np.zeros(0, dtype=np.int64), math.inf, math.inf, 0)
    s = np.linalg.svd(stack, compute_uv=False)
    thr = tol_rel * s[:, 0] * max(stack.shape[1:])
    rk = (s > thr[:, None]).sum(axis=1)
    gap, margin = _gap_and_margin(s, rk, thr)
    bad = (gap < GAP_WARN) | (margin < GAP_WARN)
    return BatchRanks(rk, float(gap.min()), float(margin.min()), int(bad.sum()))


def submatrix(M, A, B) -> np.ndarray:
    """Columns ``A`` and rows ``B`` of ``M`` (shape |B| x |A|)."""
    M = np.asarray(M)
    A = np.asarray(list(A), dtype=np.int64)
    B = np.asarray(list(B), dtype=np.int64)
    rows, cols = M.shape
    if A.size and (A.min() < 0 or A.max() >= cols):
        raise IndexError(f"column index out of range 0..{cols - 1}")
    if B.size and (B.min() < 0 or B.max() >= rows):
        raise IndexError(f"row index out of range 0..{rows - 1}")
    return M[np.ix_(B, A)]


def null_space(M, tol_rel: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal kernel basis (columns) of ``M`` under the rank rule above."""
    M = np.asarray(M, dtype=complex)
    if M.shape[0] == 0:
        return np.eye(M.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    thr = tol_rel * (s[0] if s.size else 0.0) * max(M.shape)
    rk = int((s > thr).sum())
    return vh[rk:].conj().T


# -- enumeration plumbing ---------------------------------------------------------


def _row_chunk(r_rows: int, r_cols: int) -> int:
    return max(1, _CHUNK_ENTRIES // max(1, r_rows * r_cols))


def _ordered_map(fn, items, threads: int):
    """Map ``fn`` over ``items`` preserving order; threads only change wall time."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class _Tally:
    counts: dict = field(default_factory=dict)
    checked: int = 0
    min_gap: float = math.inf
    min_margin: float = math.inf
    uncertain: int = 0

    def add(self, other: "_Tally"):
        for rk, c in other.counts.items():
            self.counts[rk] = self.counts.get(rk, 0) + c
        self.checked += other.checked
        self.min_gap = min(self.min_gap, other.min_gap)
        self.min_margin = min(self.min_margin, other.min_margin)
        self.uncertain += other.uncertain


# -- histograms --------------------------------------------------------------------


@dataclass
class RankHistogram:
    counts: dict[int, dict[int, int]]
    matrix_kind: str = "matrix"
    group: str | None = None
    seed: int | None = None
    tol: float = DEFAULT_TOL
    truncated: bool = False
    checked: int = 0
    min_gap: float = math.inf
    min_margin: float = math.inf
    uncertain: int = 0

    def to_dict(self) -> dict:
        return {
            "matrix": self.matrix_kind,
            "group": self.group,
            "seed": self.seed,
            "tol": self.tol,
            "counts": {
                str(r): {str(k): v for k, v in sorted(c.items())}
                for r, c in sorted(self.counts.items())
            },
            "truncated": self.truncated,
            "checked": self.checked,
            "min_gap_ratio": _json_float(self.min_gap),
            "min_margin": _json_float(self.min_margin),
            "uncertain": self.uncertain,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "RankHistogram":
        counts = {int(r): {int(k): int(v) for k, v in c.items()} for r, c in obj["counts"].items()}
        return cls(
            counts,
            obj.get("matrix", "matrix"),
            obj.get("group"),
            obj.get("seed"),
            obj.get("tol", DEFAULT_TOL),
            obj.get("truncated", False),
            obj.get("checked", 0),
            _parse_float(obj.get("min_gap_ratio")),
            _parse_float(obj.get("min_margin")),
            obj.get("uncertain", 0),
        )

    def csv_rows(self) -> list[tuple[int, int, int]]:
        return [(r, k, v) for r, c in sorted(self.counts.items()) for k, v in sorted(c.items())]


def _json_float(x: float):
    return "inf" if math.isinf(x) else x


def _parse_float(x):
    if x is None:
        return math.inf
    return float(x)


def minor_rank_histogram(
    M,
    sizes,
    tol_rel: float = DEFAULT_TOL,
    threads: int | None = None,
    budget_minors: int | None = None,
    strict: bool = False,
    matrix_kind: str = "matrix",
    group: str | None = None,
    seed: int | None = None,
) -> RankHistogram:
    """Count certified ranks of every r x r submatrix, for each r in ``sizes``.

    Column subsets run in colexicographic order (outer), row subsets in
    lexicographic order (inner).  With a budget, enumeration stops after that
    many minors and the histogram is marked truncated.
    """
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    sizes = [int(r) for r in sizes]
    for r in sizes:
        if not 1 <= r <= min(rows, cols):
            raise ValueError(f"size {r} out of range 1..{min(rows, cols)}")
    nthreads = resolve_threads(threads)
    hist = RankHistogram({}, matrix_kind, group, seed, tol_rel)
    total = _Tally()
    remaining = budget_minors
    for r in sizes:
        row_sets = combinations_array(rows, r)
        col_sets = colex_combinations(cols, r)
        step = _row_chunk(r, r)
        tasks = [
            (ci, start, min(start + step, len(row_sets)))
            for ci in range(len(col_sets))
            for start in range(0, len(row_sets), step)
        ]
        if remaining is not None:
            kept, budget_left = [], remaining
            for t in tasks:
                if budget_left <= 0:
                    hist.truncated = True
                    break
                n = t[2] - t[1]
                if n > budget_left:
                    t = (t[0], t[1], t[1] + budget_left)
                    hist.truncated = True
                kept.append(t)
                budget_left -= t[2] - t[1]
            tasks = kept

        def work(task, r=r, row_sets=row_sets, col_sets=col_sets):
            ci, start, stop = task
            sub = M[:, col_sets[ci]]
            br = batch_ranks(sub[row_sets[start:stop]], tol_rel)
            tally = _Tally(checked=stop - start, min_gap=br.min_gap,
                           min_margin=br.min_margin, uncertain=br.uncertain)
            vals, cnt = np.unique(br.ranks, return_counts=True)
            tally.counts = {int(v): int(c) for v, c in zip(vals, cnt)}
            return tally

        size_tally = _Tally()
        for t in _ordered_map(work, tasks, nthreads):
            size_tally.add(t)
        hist.counts[r] = dict(sorted(size_tally.counts.items()))
        total.add(size_tally)
        if remaining is not None:
            remaining -= size_tally.checked
    hist.checked = total.checked
    hist.min_gap = total.min_gap
    hist.min_margin = total.min_margin
    hist.uncertain = total.uncertain
    if strict and hist.uncertain:
        raise UncertainRankError(
            f"{hist.uncertain} rank decisions had gap or margin below {GAP_WARN:g} "
            f"(min gap {hist.min_gap:.3g}, min margin {hist.min_margin:.3g})"
        )
    return hist


# -- early-exit searches ------------------------------------------------------------


@dataclass
class MinorSearchResult:
    ok: bool
    counterexample: tuple[tuple[int, ...], tuple[int, ...]] | None  # (A columns, B rows)
    checked: int
    uncertain: int = 0

    def __bool__(self):
        return self.ok


def _search_deficient(M, col_sets, row_sets, k, tol_rel, threads, batch_cols=64):
    """First (A, B) in canonical order with rank M_{B,A} < k.

    Returns ``(A, B, checked, uncertain)``; ``A`` is None when none exists.
    Column sets are processed in blocks so that the reported counterexample does
    not depend on the thread count.
    """
    M = np.asarray(M, dtype=complex)
    step = _row_chunk(row_sets.shape[1], col_sets.shape[1])
    checked = 0
    uncertain = 0

    def work(ci):
        sub = M[:, col_sets[ci]]
        done, unc = 0, 0
        for start in range(0, len(row_sets), step):
            stack = sub[row_sets[start:start + step]]
            br = batch_ranks(stack, tol_rel)
            done += len(stack)
            unc += br.uncertain
            hit = np.flatnonzero(br.ranks < k)
            if hit.size:
                return start + int(hit[0]), done, unc
        return None, done, unc

    for block in range(0, len(col_sets), batch_cols):
        ids = list(range(block, min(block + batch_cols, len(col_sets))))
        results = _ordered_map(work, ids, threads)
        for ci, (hit, done, unc) in zip(ids, results):
            checked += done
            uncertain += unc
            if hit is not None:
                A = tuple(int(a) for a in col_sets[ci])
                B = tuple(int(b) for b in row_sets[hit])
                return A, B, checked, uncertain
    return None, None, checked, uncertain


def all_minors_nonzero(M, r: int, tol_rel: float = DEFAULT_TOL,
                       threads: int | None = None) -> MinorSearchResult:
    """True iff every r x r submatrix has certified rank r; early exit otherwise."""
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    if not 1 <= r <= min(rows, cols):
        raise ValueError(f"size {r} out of range 1..{min(rows, cols)}")
    A, B, checked, unc = _search_deficient(
        M, colex_combinations(cols, r), combinations_array(rows, r), r, tol_rel,
        resolve_threads(threads))
    return MinorSearchResult(A is None, None if A is None else (A, B), checked, unc)


def is_cyclic_interval(indices, n: int) -> bool:
    """True when ``indices`` (a proper or full subset of Z_n) is cyclically contiguous."""
    s = sorted(set(int(i) % n for i in indices))
    if len(s) <= 1 or len(s) == n:
        return True
    # contiguous on the circle iff exactly one gap between consecutive members
    gaps = sum(1 for a, b in zip(s, s[1:] + [s[0] + n]) if b - a > 1)
    return gaps == 1


def _adjacent_row_sets(kind: str, n: int, rows: int, size: int) -> np.ndarray:
    candidates = combinations_array(rows, size)
    if kind == "rows":
        keep = [is_cyclic_interval(c, n) for c in candidates]
    elif kind in ("modulation", "translation"):
        keep = []
        for c in candidates:
            xs, xis = np.divmod(c, n)
            outer, inner = (xs, xis) if kind == "modulation" else (xis, xs)
            keep.append(all(is_cyclic_interval(inner[outer == o], n) for o in np.unique(outer)))
    else:
        raise ValueError(f"unknown adjacency kind {kind!r}")
    return candidates[np.array(keep, dtype=bool)]


def adjacent_minor_check(M, n: int, kind: str = "columns", max_size: int | None = None,
                         tol_rel: float = DEFAULT_TOL, threads: int | None = None,
                         factors=None) -> MinorSearchResult:
    """Check every minor whose index set is cyclically adjacent.

    ``kind``:
      * ``"columns"`` / ``"rows"`` - for W_{Z_n}: the column (row) set is a cyclic
        interval, the other side is arbitrary;
      * ``"modulation"`` - for A_{Z_n,g}: rows grouped by translation, and for each
        translation the chosen modulations form a cyclic interval;
      * ``"translation"`` - the dual: for each modulation the translations are
        a cyclic interval.
    """
    if factors is not None and len(tuple(factors)) > 1:
        raise ValueError("adjacency is only defined for cyclic groups")
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    cap = min(rows, cols) if max_size is None else int(max_size)
    nthreads = resolve_threads(threads)
    checked = uncertain = 0
    for size in range(1, cap + 1):
        if kind == "columns":
            col_sets = colex_combinations(cols, size)
            col_sets = col_sets[[is_cyclic_interval(c, n) for c in col_sets]]
            row_sets = combinations_array(rows, size)
            A, B, c, u = _search_deficient(M, col_sets, row_sets, size, tol_rel, nthreads)
        else:
            row_sets = _adjacent_row_sets(kind, n, rows, size)
            col_sets = colex_combinations(cols, size)
            A, B, c, u = _search_deficient(M, col_sets, row_sets, size, tol_rel, nthreads)
        checked += c
        uncertain += u
        if A is not None:
            return MinorSearchResult(False, (A, B), checked, uncertain)
    return MinorSearchResult(True, None, checked, uncertain)


@dataclass(frozen=True)
class ComplementaryPair:
    cols: tuple[int, ...]
    rows: tuple[int, ...]
    minor_rank: int
    complement_rank: int
    n: int

    @property
    def both_zero(self) -> bool:
        r = len(self.cols)
        return self.minor_rank < r and self.complement_rank < self.n - r


def complementary_minor_pairs(W, r: int, sample_budget: int | None = None,
                              tol_rel: float = DEFAULT_TOL) -> list[ComplementaryPair]:
    """Evaluate the complementary minor of each zero r x r minor of a square ``W``.

    With a budget, only the first ``sample_budget`` zero minors (canonical
    order) are examined.
    """
    W = np.asarray(W, dtype=complex)
    n = W.shape[0]
    if W.shape != (n, n):
        raise ValueError("complementary minors need a square matrix")
    if not 1 <= r < n:
        raise ValueError(f"size {r} out of range 1..{n - 1}")
    col_sets = colex_combinations(n, r)
    row_sets = combinations_array(n, r)
    out = []
    everything = np.arange(n)
    for A in col_sets:
        sub = W[:, A]
        ranks = batch_ranks(sub[row_sets], tol_rel).ranks
        for j in np.flatnonzero(ranks < r):
            B = row_sets[j]
            Ac = np.setdiff1d(everything, A)
            Bc = np.setdiff1d(everything, B)
            comp = numeric_rank(submatrix(W, Ac, Bc), tol_rel).rank
            out.append(ComplementaryPair(tuple(int(a) for a in A), tuple(int(b) for b in B),
                                         int(ranks[j]), comp, n))
            if sample_budget is not None and len(out) >= sample_budget:
                return out
    return out


# -- maximal deficient row sets -----------------------------------------------------------


@dataclass
class DeficiencyCertificate:
    """Result of ``max |B|`` such that some k columns are dependent on the rows ``B``.

    ``witness`` = (A, B) attains the maximum; ``exhausted_level`` is the row count
    at which an exhaustive search found nothing (None when the maximum is all rows
    or came from the flat sweep, which is exhaustive by construction).
    """

    k: int
    value: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    exhausted_level: int | None
    checked: int
    method: str
    uncertain: int = 0
    min_zero_gap: float = math.inf


def _zero_rows(MA: np.ndarray, K: np.ndarray, zero_tol: float):
    """Rows y with M_{y,A} K = 0, plus the smallest 'nonzero' / largest 'zero' ratio."""
    scale = np.linalg.norm(MA, axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    resid = np.linalg.norm(MA @ K, axis=1) / scale
    zero = resid <= zero_tol
    hi = resid[zero].max() if zero.any() else 0.0
    lo = resid[~zero].min() if (~zero).any() else math.inf
    gap = lo / hi if hi > 0 else math.inf
    return np.flatnonzero(zero), gap


def _closure(M, A, B, tol_rel, zero_tol):
    MA = M[:, list(A)]
    K = null_space(MA[list(B)], tol_rel)
    if K.shape[1] == 0:
        return tuple(B)
    # the zero set of one kernel vector is a deficient row set containing B
    Z, _ = _zero_rows(MA, K[:, :1], zero_tol)
    return tuple(int(z) for z in Z)


def deficiency_search(M, k: int, tol_rel: float = DEFAULT_TOL, threads: int | None = None,
                      method: str = "auto", zero_tol: float = 1e-8) -> DeficiencyCertificate:
    """Exact ``max{|B| : exists |A| = k with rank M_{B,A} < k}``.

    ``method="levels"``: start at ``k - 1`` rows (always deficient), test the next
    level with an early-exit search, jump to the zero set of a kernel vector on a
    hit, and stop at the first level with no hit (the exhaustion certificate).

    ``method="flats"``: for each column set, sweep all (k-1)-row subsets R, take the
    kernel of M_{R,A} and count the rows it annihilates; every maximal deficient
    row set is such a closure.  Cheaper for tall matrices.
    """
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    if not 1 <= k <= cols:
        raise ValueError(f"k={k} out of range 1..{cols}")
    if method == "auto":
        method = "flats" if rows > 2 * cols else "levels"
    nthreads = resolve_threads(threads)
    col_sets = colex_combinations(cols, k)
    if method == "flats":
        return _deficiency_flats(M, k, col_sets, tol_rel, nthreads, zero_tol)
    if method != "levels":
        raise ValueError(f"unknown method {method!r}")

    best = min(k - 1, rows)
    witness = None
    if best > 0:
        witness = (tuple(int(a) for a in col_sets[0]), tuple(range(best)))
    checked = uncertain = 0
    while best < rows:
        level = best + 1
        A, B, c, u = _search_deficient(M, col_sets, combinations_array(rows, level), k,
                                       tol_rel, nthreads)
        checked += c
        uncertain += u
        if A is None:
            return DeficiencyCertificate(k, best, witness, level, checked, "levels", uncertain)
        Z = _closure(M, A, B, tol_rel, zero_tol)
        if len(Z) < level:  # numerical disagreement; trust the minor test
            Z = B
        best, witness = len(Z), (A, Z)
    return DeficiencyCertificate(k, best, witness, None, checked, "levels", uncertain)


def flat_closures(MA: np.ndarray, R_sets: np.ndarray, tol_rel: float = DEFAULT_TOL,
                  zero_tol: float = 1e-8):
    """For each row subset R: the rows annihilated by ker M_{R,A}, and whether that
    kernel contains a vector with full support on A.

    Returns ``(zero_mask, full_support, kernel_dim, gap)``; ``zero_mask`` has shape
    (len(R_sets), rows) and ``gap`` is the smallest ratio between a value declared
    nonzero and a value declared zero anywhere in the batch.
    """
    MA = np.asarray(MA, dtype=complex)
    rows, k = MA.shape
    R_sets = np.asarray(R_sets, dtype=np.int64)
    nR, r = R_sets.shape
    scale = np.linalg.norm(MA, axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    if r == 0:
        vh = np.broadcast_to(np.eye(k, dtype=complex), (nR, k, k))
        rk = np.zeros(nR, dtype=np.int64)
    else:
        _, s, vh = np.linalg.svd(MA[R_sets], full_matrices=True)
        thr = tol_rel * s[:, 0] * max(r, k)
        rk = (s > thr[:, None]).sum(axis=1)
    kdim = k - rk
    zero_mask = np.zeros((nR, rows), dtype=bool)
    full = np.zeros(nR, dtype=bool)
    hi_zero, lo_nonzero = 0.0, math.inf
    for d in np.unique(kdim):
        sel = np.flatnonzero(kdim == d)
        if d == 0:
            continue  # trivial kernel: nothing to report
        K = np.conj(np.swapaxes(vh[sel, k - d:, :], 1, 2))  # (m, k, d), orthonormal columns
        resid = np.linalg.norm(np.einsum("yk,mkd->myd", MA, K), axis=2) / scale[None, :]
        rowmag = np.linalg.norm(K, axis=2)
        zm = resid <= zero_tol
        zero_mask[sel] = zm
        full[sel] = (rowmag > zero_tol).all(axis=1)
        for vals in (resid, rowmag):
            small = vals <= zero_tol
            if small.any():
                hi_zero = max(hi_zero, float(vals[small].max()))
            if (~small).any():
                lo_nonzero = min(lo_nonzero, float(vals[~small].min()))
    gap = lo_nonzero / hi_zero if hi_zero > 0 else math.inf
    return zero_mask, full, kdim, gap


def _deficiency_flats(M, k, col_sets, tol_rel, threads, zero_tol):
    rows = M.shape[0]
    if k - 1 >= rows:
        return DeficiencyCertificate(k, rows, (tuple(int(a) for a in col_sets[0]),
                                               tuple(range(rows))), None, 0, "flats")
    R_sets = combinations_array(rows, k - 1)
    step = _row_chunk(k - 1, k)

    def work(ci):
        MA = M[:, col_sets[ci]]
        if numeric_rank(MA, tol_rel).rank < k:
            return rows, tuple(range(rows)), 1, math.inf
        best, bestZ, gap_min = -1, None, math.inf
        for start in range(0, len(R_sets), step):
            zm, _, _, gap = flat_closures(MA, R_sets[start:start + step], tol_rel, zero_tol)
            gap_min = min(gap_min, gap)
            sizes = zm.sum(axis=1)
            j = int(np.argmax(sizes))
            if sizes[j] > best:
                best, bestZ = int(sizes[j]), tuple(int(z) for z in np.flatnonzero(zm[j]))
        return best, bestZ, len(R_sets), gap_min

    value, witness, checked, gap_all = -1, None, 0, math.inf
    results = _ordered_map(work, list(range(len(col_sets))), threads)
    for ci, (best, Z, c, gap) in enumerate(results):
        checked += c
        gap_all = min(gap_all, gap)
        if best > value:
            value, witness = best, (tuple(int(a) for a in col_sets[ci]), Z)
    unc = int(gap_all < GAP_WARN)
    return DeficiencyCertificate(k, value, witness, None, checked, "flats", unc, gap_all)


def max_deficient_rows(M, k: int, tol_rel: float = DEFAULT_TOL, threads: int | None = None,
                       method: str = "auto") -> int:
    return deficiency_search(M, k, tol_rel, threads, method).value
