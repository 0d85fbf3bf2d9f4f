"""Which support sizes can a signal and its transform have simultaneously?

For a matrix M, a pair (k, l) is *feasible* when some f has ``||f||_0 = k`` and
``||M f||_0 = l``.  The characterization used throughout is the kernel form of
the minor-rank criterion: with ``K = ker M_{B,A}`` (rows B, columns A), the
pair (A, B) is realized by some f with supp f = A and supp Mf = B^c exactly
when

* K contains a vector that is nonzero on every coordinate of A, and
* no row outside B annihilates all of K.

Exhaustive maps enumerate *flats*: for each column set A and each row set R
with |R| < |A|, the rows annihilated by ``ker M_{R,A}`` form a set Z, and (A, Z)
is realized iff the kernel has full support on A.  Every realizable (A, B) is
of this form, so the sweep decides every cell.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bounds import donoho_stark, prime_stft_bound
from .gabor import gabor_matrix, stft
from .groups import (
    DEFAULT_ZERO_TOL,
    FiniteAbelianGroup,
    Signal,
    as_group,
    fourier,
    is_prime,
    l0,
    support_mask,
)
from .rank import (
    DEFAULT_TOL,
    colex_combinations,
    combinations_array,
    flat_closures,
    null_space,
    numeric_rank,
    resolve_threads,
    submatrix,
    _ordered_map,
)

ZERO_TOL = 1e-8


class Status(str, Enum):
    FEASIBLE = "FeasibleWitnessed"
    PROVED = "InfeasibleProved"
    EXHAUSTED = "InfeasibleExhausted"
    UNKNOWN = "Unknown"

    @property
    def code(self) -> str:
        return {"FeasibleWitnessed": "F", "InfeasibleProved": "I",
                "InfeasibleExhausted": "X", "Unknown": "U"}[self.value]

    @property
    def infeasible(self) -> bool:
        return self in (Status.PROVED, Status.EXHAUSTED)


class WitnessError(RuntimeError):
    pass


class OracleContradiction(RuntimeError):
    pass


def _encode(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _decode(pairs) -> np.ndarray:
    return np.array([complex(a, b) for a, b in pairs], dtype=complex)


@dataclass
class Cell:
    key: tuple[int, ...]
    status: Status = Status.UNKNOWN
    note: str = ""
    witness: dict[str, np.ndarray] | None = None
    checked: int = 0


@dataclass
class FeasibilityMap:
    """Status of every cell of a support-size grid.

    ``axes`` maps axis names to their ranges, in key order; ``kind`` is one of
    ``fourier``, ``stft`` or ``stft-triple``; ``window`` holds g for ``stft``.
    """

    kind: str
    group: FiniteAbelianGroup
    axes: dict[str, list[int]]
    cells: dict[tuple[int, ...], Cell] = field(default_factory=dict)
    window: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in itertools.product(*self.axes.values()):
            self.cells.setdefault(key, Cell(key))

    def __getitem__(self, key) -> Cell:
        return self.cells[tuple(key)]

    def status(self, *key) -> Status:
        return self.cells[tuple(key)].status

    def feasible_set(self) -> set[tuple[int, ...]]:
        return {k for k, c in self.cells.items() if c.status is Status.FEASIBLE}

    def infeasible_set(self) -> set[tuple[int, ...]]:
        return {k for k, c in self.cells.items() if c.status.infeasible}

    def unknown_set(self) -> set[tuple[int, ...]]:
        return {k for k, c in self.cells.items() if c.status is Status.UNKNOWN}

    def set(self, key, status: Status, note: str = "", witness=None, checked: int = 0):
        cell = self.cells[tuple(key)]
        cell.status, cell.note, cell.witness, cell.checked = status, note, witness, checked

    # -- serialization --------------------------------------------------------------

    def to_dict(self) -> dict:
        names = list(self.axes)
        cells = []
        for key in sorted(self.cells):
            c = self.cells[key]
            entry = dict(zip(names, key))
            entry["status"] = c.status.value
            if c.note:
                entry["note"] = c.note
            if c.checked:
                entry["checked"] = c.checked
            if c.witness is not None:
                entry["witness"] = {k: _encode(v) for k, v in c.witness.items()}
            cells.append(entry)
        out = {"kind": self.kind, "group": str(self.group), "axes": self.axes,
               "cells": cells, "meta": self.meta}
        if self.window is not None:
            out["window"] = _encode(self.window)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "FeasibilityMap":
        axes = {k: list(v) for k, v in obj["axes"].items()}
        window = _decode(obj["window"]) if obj.get("window") is not None else None
        fmap = cls(obj["kind"], FiniteAbelianGroup.parse(obj["group"]), axes,
                   window=window, meta=obj.get("meta", {}))
        names = list(axes)
        for entry in obj["cells"]:
            key = tuple(entry[n] for n in names)
            wit = entry.get("witness")
            fmap.set(key, Status(entry["status"]), entry.get("note", ""),
                     None if wit is None else {k: _decode(v) for k, v in wit.items()},
                     entry.get("checked", 0))
        return fmap

    @classmethod
    def from_json(cls, text: str) -> "FeasibilityMap":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Grid of status codes: rows are the leading axes, columns the last axis."""
        names = list(self.axes)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        last = self.axes[names[-1]]
        w.writerow(["/".join(names[:-1]) + "\\" + names[-1]] + last)
        for head in itertools.product(*(self.axes[n] for n in names[:-1])):
            label = ",".join(str(h) for h in head)
            w.writerow([label] + [self.cells[head + (v,)].status.code for v in last])
        return buf.getvalue()

    # -- verification ---------------------------------------------------------------

    def recompute(self, key) -> tuple[int, ...]:
        """Support counts of the stored witness of ``key``."""
        wit = self.cells[tuple(key)].witness
        if wit is None:
            raise WitnessError(f"cell {key} has no witness")
        f = Signal(self.group, wit["f"])
        if self.kind == "fourier":
            return (f.l0, fourier(f).l0)
        if self.kind == "stft":
            return (f.l0, l0(stft(f, Signal(self.group, self.window))))
        g = Signal(self.group, wit["g"])
        return (f.l0, g.l0, l0(stft(f, g)))

    def verify_witnesses(self) -> list[tuple[int, ...]]:
        """Keys of feasible cells whose witness does not reproduce the cell."""
        return [k for k in sorted(self.feasible_set()) if self.recompute(k) != k]


# -- the minor-rank criterion ---------------------------------------------------------


def lemma_conditions(M, A, B, tol_rel: float = DEFAULT_TOL) -> bool:
    """The rank conditions, evaluated literally with one rank per submatrix.

    rank M_{A-a, B} = rank M_{A,B} = rank M_{A, B+y} - 1 < |A| for all a in A
    and y outside B (rows B, columns A).
    """
    M = np.asarray(M, dtype=complex)
    rows = M.shape[0]
    A, B = list(A), list(B)

    def rank(cols, rws):
        if not cols or not rws:
            return 0
        return numeric_rank(submatrix(M, cols, rws), tol_rel).rank

    r = rank(A, B)
    if r >= len(A):
        return False
    if any(rank([c for c in A if c != a], B) != r for a in A):
        return False
    return all(rank(A, B + [y]) == r + 1 for y in range(rows) if y not in B)


@dataclass
class PairResult:
    status: Status
    A: tuple[int, ...] | None
    B: tuple[int, ...] | None
    checked: int

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


def pair_feasible(M, k: int, l: int, tol_rel: float = DEFAULT_TOL, threads: int | None = None,
                  zero_tol: float = ZERO_TOL) -> PairResult:
    """Search every column set |A| = k and row set |B| = rows - l for a realizable pair.

    Returns the first pair in canonical order (A colex outer, B lex inner) or an
    exhaustion record.  The status is ``FeasibleWitnessed`` only in the sense
    that a realizable (A, B) exists; use :func:`construct_witness` for a vector.
    """
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    if not (1 <= k <= cols and 1 <= l <= rows):
        raise ValueError(f"(k, l)=({k}, {l}) outside 1..{cols} x 1..{rows}")
    col_sets = colex_combinations(cols, k)
    row_sets = combinations_array(rows, rows - l)
    step = max(1, (1 << 20) // max(1, (rows - l) * k))

    def work(ci):
        MA = M[:, col_sets[ci]]
        done = 0
        for start in range(0, len(row_sets), step):
            chunk = row_sets[start:start + step]
            zm, full, kdim, _ = flat_closures(MA, chunk, tol_rel, zero_tol)
            ok = full & (kdim >= 1) & (zm.sum(axis=1) == chunk.shape[1])
            hit = np.flatnonzero(ok)
            if hit.size:
                return start + int(hit[0]), done + int(hit[0]) + 1
            done += len(chunk)
        return None, done

    checked = 0
    nthreads = resolve_threads(threads)
    for block in range(0, len(col_sets), 64):
        ids = list(range(block, min(block + 64, len(col_sets))))
        for ci, (hit, done) in zip(ids, _ordered_map(work, ids, nthreads)):
            checked += done
            if hit is not None:
                return PairResult(Status.FEASIBLE, tuple(int(a) for a in col_sets[ci]),
                                  tuple(int(b) for b in row_sets[hit]), checked)
    return PairResult(Status.EXHAUSTED, None, None, checked)


# -- witnesses ------------------------------------------------------------------------


@dataclass
class WitnessPair:
    f: np.ndarray
    achieved: tuple[int, int]
    method: str
    N: int | None = None


def _min_nonzero(v, tol):
    mag = np.abs(v)
    nz = mag[mag > tol * max(1.0, mag.max())]
    return float(nz.min()) if nz.size else 0.0


def construct_witness(M, A, B, seed: int = 0, tol_rel: float = DEFAULT_TOL,
                      zero_tol: float = DEFAULT_ZERO_TOL, attempts: int = 20) -> WitnessPair:
    """Build f with supp f = A and supp Mf = complement of B.

    The building blocks are ``f_a`` (kernel vectors with ``f_a(a) != 0``) and
    ``g_y`` (kernel vectors with ``Mg_y(y) != 0``), each scaled to minimum nonzero
    modulus 1.  They are first combined with weights ``N^(2r)``, N the smallest
    power of ten above every sup-norm involved; when that dynamic range is too
    large for double precision the blocks are combined with seeded random
    unit-modulus weights instead.  Either way the supports are verified.
    """
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    A = [int(a) for a in A]
    B = [int(b) for b in B]
    Bc = [y for y in range(rows) if y not in set(B)]
    target = (len(A), len(Bc))
    K = null_space(M[np.ix_(B, A)], tol_rel) if B else np.eye(len(A), dtype=complex)
    if K.shape[1] == 0:
        raise WitnessError("M_{B,A} has full column rank: no kernel")
    rowmag = np.linalg.norm(K, axis=1)
    if (rowmag <= ZERO_TOL).any():
        a = A[int(np.argmin(rowmag))]
        raise WitnessError(f"every kernel vector vanishes at column {a}")
    MK = M[:, A] @ K
    ymag = np.linalg.norm(MK[Bc], axis=1) / np.maximum(np.linalg.norm(M[np.ix_(Bc, A)], axis=1), 1e-300)
    if Bc and (ymag <= ZERO_TOL).any():
        y = Bc[int(np.argmin(ymag))]
        raise WitnessError(f"row {y} annihilates the whole kernel")

    blocks = []
    for i in range(len(A)):
        blocks.append(K @ K[i].conj())  # f_a restricted to A
    for y in Bc:
        blocks.append(K @ MK[y].conj())  # g_y restricted to A
    scaled = []
    for h in blocks:
        full = np.zeros(cols, dtype=complex)
        full[A] = h
        m = _min_nonzero(full, ZERO_TOL)
        scaled.append(full / m)

    def check(f):
        got = (l0(f, zero_tol), l0(M @ f, zero_tol))
        ok = got == target and set(np.flatnonzero(support_mask(f, zero_tol))) == set(A)
        return ok, got

    sups = []
    for h in scaled:
        Mh = M @ h
        sups += [np.abs(h).max(), np.abs(Mh).max()]
        mn = _min_nonzero(Mh, ZERO_TOL)
        if mn > 0:
            sups.append(1.0 / mn)
    N = 10 ** max(1, math.ceil(math.log10(max(sups) + 1.0)))
    span = 2 * (len(scaled) - 1) * math.log10(N)
    if span <= 6:
        weights = np.array([float(N) ** (2 * r) for r in range(len(scaled))])
        f = np.tensordot(weights, np.array(scaled), axes=1)
        ok, got = check(f)
        if ok:
            return WitnessPair(f, got, "power-weights", N)
    rng = np.random.default_rng(seed)
    H = np.array(scaled)
    for _ in range(attempts):
        w = np.exp(2j * np.pi * rng.random(len(scaled)))
        f = w @ H
        f = f / _min_nonzero(f, ZERO_TOL)
        ok, got = check(f)
        if ok:
            return WitnessPair(f, got, "random-weights", None)
    raise WitnessError(f"no combination reproduced the target supports {target}")


def subgroup_witness(group, d: int) -> Signal:
    """Indicator of a subgroup of order d; its transform is supported on the annihilator."""
    group = as_group(group)
    n = group.order
    if n % d:
        raise ValueError(f"{d} does not divide |G|={n}")
    remaining = d
    gens = []
    for factor in group.factors:
        e = math.gcd(remaining, factor)
        remaining //= e
        gens.append((factor // e, e))  # step and count within this factor
    if remaining != 1:
        raise ValueError(f"no product subgroup of order {d} in {group}")
    points = itertools.product(*[[s * i for i in range(c)] for s, c in gens])
    vals = np.zeros(n, dtype=complex)
    for p in points:
        vals[group.index(p)] = 1.0
    return Signal(group, vals)


# -- exhaustive flat sweep -------------------------------------------------------------


def translation_orbit_reps(group, k: int) -> np.ndarray:
    """One k-subset per orbit under translation, the lexicographically least one."""
    group = as_group(group)
    n = group.order
    add = group.add_table
    reps = []
    for c in colex_combinations(n, k):
        images = np.sort(add[:, c], axis=1)
        best = min(tuple(int(v) for v in row) for row in images)
        if best == tuple(int(v) for v in c):
            reps.append(c)
    return np.array(reps, dtype=np.int64).reshape(-1, k)


@dataclass
class SweepResult:
    found: dict[int, tuple[tuple[int, ...], tuple[int, ...]]]  # l -> (A, zero rows B)
    checked: int
    complete: bool
    min_gap: float


def flat_sweep(M, k: int, col_sets, wanted=None, budget: int | None = None,
               tol_rel: float = DEFAULT_TOL, zero_tol: float = ZERO_TOL,
               threads: int | None = None) -> SweepResult:
    """All output support sizes l achievable with ||f||_0 = k and supp f in ``col_sets``.

    Stops early once every l in ``wanted`` has been found.  ``budget`` caps the
    number of kernel evaluations; a capped sweep reports ``complete=False``.
    """
    M = np.asarray(M, dtype=complex)
    rows = M.shape[0]
    wanted = None if wanted is None else set(wanted)
    found: dict[int, tuple] = {}
    checked = 0
    min_gap = math.inf
    R_by_size = [combinations_array(rows, j) for j in range(0, min(k, rows + 1))]
    step = max(1, (1 << 20) // max(1, k * k))
    nthreads = resolve_threads(threads)

    def work(A):
        MA = M[:, A]
        local: dict[int, tuple] = {}
        done, gap_min = 0, math.inf
        for R_sets in R_by_size:
            for start in range(0, len(R_sets), step):
                chunk = R_sets[start:start + step]
                zm, full, kdim, gap = flat_closures(MA, chunk, tol_rel, zero_tol)
                gap_min = min(gap_min, gap)
                done += len(chunk)
                ok = np.flatnonzero(full & (kdim >= 1))
                if ok.size == 0:
                    continue
                ls = rows - zm[ok].sum(axis=1)
                for l in np.unique(ls):
                    if int(l) not in local:
                        j = ok[int(np.flatnonzero(ls == l)[0])]
                        local[int(l)] = (tuple(int(a) for a in A),
                                         tuple(int(z) for z in np.flatnonzero(zm[j])))
        return local, done, gap_min

    per_A = sum(len(r) for r in R_by_size)
    block = max(1, nthreads * 4)
    for b0 in range(0, len(col_sets), block):
        ids = list(range(b0, min(b0 + block, len(col_sets))))
        if budget is not None and checked + per_A * len(ids) > budget:
            ids = ids[: max(0, (budget - checked) // per_A)]
            if not ids:
                return SweepResult(found, checked, False, min_gap)
        for local, done, gap in _ordered_map(lambda i: work(col_sets[i]), ids, nthreads):
            checked += done
            min_gap = min(min_gap, gap)
            for l, wit in local.items():
                found.setdefault(l, wit)
        if wanted is not None and wanted <= set(found):
            return SweepResult(found, checked, True, min_gap)
        if budget is not None and len(ids) < min(block, len(col_sets) - b0):
            return SweepResult(found, checked, False, min_gap)
    return SweepResult(found, checked, True, min_gap)


def _fill_row(fmap: FeasibilityMap, M, k: int, proved: dict[int, str], col_sets, budget,
              threads, seed, signal_from=lambda f: {"f": f}):
    rows = M.shape[0]
    possible = [l for l in range(1, rows + 1) if l not in proved]
    res = flat_sweep(M, k, col_sets, wanted=possible, budget=budget, threads=threads)
    for l, note in proved.items():
        fmap.set((k, l), Status.PROVED, note)
    for l in range(1, rows + 1):
        if l in res.found:
            if l in proved:
                raise OracleContradiction(f"cell ({k}, {l}) witnessed but excluded by {proved[l]}")
            A, Z = res.found[l]
            wp = construct_witness(M, A, Z, seed=seed)
            fmap.set((k, l), Status.FEASIBLE, "flat sweep", signal_from(wp.f))
        elif l not in proved:
            if res.complete and set(possible) - set(res.found):
                # the sweep only stops early when everything wanted was found
                fmap.set((k, l), Status.EXHAUSTED, "flat sweep", None, res.checked)
            else:
                fmap.set((k, l), Status.UNKNOWN, "budget exhausted", None, res.checked)
    return res


def fourier_pair_map(group, ks=None, budget: int | None = None, threads: int | None = None,
                     guard: int = 16, seed: int = 0) -> FeasibilityMap:
    """(||f||_0, ||fh||_0) grid.

    Cells with ``k l < |G|`` (and, for prime order, ``k + l <= |G|``) are excluded
    by the closed-form bounds; every other cell is decided by the flat sweep over
    translation classes of supports.
    """
    group = as_group(group)
    n = group.order
    if n > guard:
        raise ValueError(f"|G|={n} exceeds the guard {guard}")
    M = np.conj(group.pairing_matrix)
    fmap = FeasibilityMap("fourier", group, {"k": list(range(1, n + 1)), "l": list(range(1, n + 1))})
    for k in (range(1, n + 1) if ks is None else ks):
        proved = {}
        for l in range(1, n + 1):
            if l < donoho_stark(n, k):
                proved[l] = "product bound k*l >= |G|"
            elif group.is_cyclic_prime and k + l < n + 1:
                proved[l] = "prime-order bound k+l >= |G|+1"
        _fill_row(fmap, M, k, proved, translation_orbit_reps(group, k), budget, threads, seed)
    return fmap


def stft_pair_map(group, g, ks=None, budget: int | None = None, threads: int | None = None,
                  guard: int = 8, seed: int = 0) -> FeasibilityMap:
    """(||f||_0, ||V_g f||_0) grid for the window g (exhaustive flat sweep)."""
    group = as_group(group)
    n = group.order
    if n > guard:
        raise ValueError(f"|G|={n} exceeds the guard {guard}")
    g = Signal(group, g)
    M = gabor_matrix(group, g).matrix
    fmap = FeasibilityMap("stft", group, {"k": list(range(1, n + 1)), "l": list(range(1, n * n + 1))},
                          window=g.values.copy())
    for k in (range(1, n + 1) if ks is None else ks):
        proved = {l: "||V_g f||_0 >= |G|" for l in range(1, n)}
        _fill_row(fmap, M, k, proved, translation_orbit_reps(group, k), budget, threads, seed)
    return fmap


# -- (||f||_0, ||g||_0, ||V_g f||_0) ---------------------------------------------------------


def _batch_stft_l0(F: np.ndarray, Gw: np.ndarray, group: FiniteAbelianGroup,
                   zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    shifted = Gw[:, group.sub_table.T]  # (t, x, y) = g(y - x)
    W = group.pairing_matrix
    V = np.einsum("ty,txy,zy->txz", F, np.conj(shifted), np.conj(W))
    mag = np.abs(V).reshape(len(F), -1)
    scale = np.maximum(1.0, mag.max(axis=1))
    return (mag > zero_tol * scale[:, None]).sum(axis=1)


def _random_entries(rng, n_trials: int, k: int, n: int) -> np.ndarray:
    """Mixed alphabets: Gaussian, small integers, and roots of unity of order n."""
    kind = rng.integers(0, 4, size=n_trials)
    gauss = rng.standard_normal((n_trials, k)) + 1j * rng.standard_normal((n_trials, k))
    ints = rng.choice(np.array([1, -1, 2, -2]), size=(n_trials, k)).astype(complex)
    signs = rng.choice(np.array([1.0, -1.0]), size=(n_trials, k)).astype(complex)
    roots = np.exp(2j * np.pi * rng.integers(0, n, size=(n_trials, k)) / n)
    out = np.where((kind == 0)[:, None], gauss, ints)
    out = np.where((kind == 2)[:, None], signs, out)
    return np.where((kind == 3)[:, None], roots, out)


def _random_supported(rng, n_trials: int, k: int, n: int) -> np.ndarray:
    vals = np.zeros((n_trials, n), dtype=complex)
    supp = np.argsort(rng.random((n_trials, n)), axis=1)[:, :k]
    np.put_along_axis(vals, supp, _random_entries(rng, n_trials, k, n), axis=1)
    return vals


def stft_triple_map(group, trials: int = 10_000, seed: int = 0, exact: bool = True,
                    guard: int = 5) -> FeasibilityMap:
    """(||f||_0, ||g||_0, ||V_g f||_0) grid.

    Exclusions: ``||V_g f||_0 >= |G|``; exactly ``|G|`` times the other support
    when either f or g is a point mass; at most ``|G| min(|G|, kf kg)`` nonzero
    rows times |G|; for prime order the sumset bound.  Feasible cells come from a
    seeded random search over support patterns and small alphabets.  On Z3, the
    two cells the above cannot settle are decided by an exact algebraic oracle.
    """
    group = as_group(group)
    n = group.order
    if n > guard:
        raise ValueError(f"|G|={n} exceeds the guard {guard}")
    axes = {"kf": list(range(1, n + 1)), "kg": list(range(1, n + 1)), "l": list(range(1, n * n + 1))}
    fmap = FeasibilityMap("stft-triple", group, axes, meta={"trials": trials, "seed": seed})
    rng = np.random.default_rng(seed)
    prime = group.is_cyclic_prime
    for kf in axes["kf"]:
        for kg in axes["kg"]:
            proved = {}
            for l in axes["l"]:
                if l < n:
                    proved[l] = "||V_g f||_0 >= |G|"
                elif (kf == 1 or kg == 1) and l != n * (kf * kg):
                    proved[l] = "point mass: ||V_g f||_0 = |G| * other support"
                elif l > n * min(n, kf * kg):
                    proved[l] = "at most kf*kg nonzero rows"
                elif prime and l < prime_stft_bound(n, kf, kg):
                    proved[l] = "sumset bound"
            F = _random_supported(rng, trials, kf, n)
            Gw = _random_supported(rng, trials, kg, n)
            ls = _batch_stft_l0(F, Gw, group)
            for l in axes["l"]:
                hits = np.flatnonzero(ls == l)
                if l in proved:
                    if hits.size:
                        raise OracleContradiction(f"cell {(kf, kg, l)} witnessed but {proved[l]}")
                    fmap.set((kf, kg, l), Status.PROVED, proved[l])
                elif hits.size:
                    i = int(hits[0])
                    fmap.set((kf, kg, l), Status.FEASIBLE, "random search",
                             {"f": F[i].copy(), "g": Gw[i].copy()})
    if exact and n == 3:
        for l in (4, 5):
            if fmap.status(3, 3, l) is Status.UNKNOWN:
                res = z3_full_support_oracle(l)
                if res.feasible:
                    raise OracleContradiction(f"exact oracle found a solution for l={l}")
                fmap.set((3, 3, l), Status.EXHAUSTED,
                         f"Groebner basis over Q(w): {res.systems} zero patterns",
                         None, res.systems)
    return fmap


# -- exact oracle on Z3 ----------------------------------------------------------------------


@dataclass
class OracleResult:
    feasible: bool
    systems: int
    patterns: int
    witness_pattern: tuple | None = None


def _z3_pattern_rep(Z) -> tuple:
    """Least image of a zero pattern under the support-preserving symmetries.

    Translating or modulating f shifts rows or columns; conjugating both f and g
    flips the frequency axis; exchanging f and g flips both axes.
    """
    best = None
    for sx in (1, -1):
        for sxi in (1, -1):
            for ax in range(3):
                for axi in range(3):
                    img = tuple(sorted(((sx * x + ax) % 3, (sxi * xi + axi) % 3) for x, xi in Z))
                    if best is None or img < best:
                        best = img
    return best


def z3_full_support_oracle(l: int) -> OracleResult:
    """Decide whether f, g on Z3 with full support can have ||V_g f||_0 = l.

    After scaling, f = (1, a, b) and conj(g) = (1, c, d).  For each zero pattern
    Z of size 9 - l (up to symmetry; each row of a full-support pair has at most
    two zeros) the system {V = 0 on Z, a b c d t * prod_{not Z} V = 1} together
    with w^2 + w + 1 = 0 is infeasible iff its reduced Groebner basis is {1}.
    """
    import sympy as sp

    a, b, c, d, t, w = sp.symbols("a b c d t w")
    f = [1, a, b]
    h = [1, c, d]
    cells = [(x, xi) for x in range(3) for xi in range(3)]
    V = {(x, xi): sp.expand(sum(f[y] * h[(y - x) % 3] * w ** ((-xi * y) % 3) for y in range(3)))
         for x, xi in cells}
    nzeros = 9 - l
    reps = set()
    patterns = 0
    for Z in itertools.combinations(cells, nzeros):
        patterns += 1
        if max(sum(1 for x, _ in Z if x == r) for r in range(3)) > 2:
            continue
        reps.add(_z3_pattern_rep(Z))
    systems = 0
    for Z in sorted(reps):
        systems += 1
        others = sp.Mul(*[V[cl] for cl in cells if cl not in Z])
        polys = [V[cl] for cl in Z] + [w ** 2 + w + 1, sp.expand(a * b * c * d * others * t - 1)]
        G = sp.groebner(polys, t, a, b, c, d, w, order="grevlex", domain="QQ")
        if list(G.exprs) != [1]:
            return OracleResult(True, systems, patterns, Z)
    return OracleResult(False, systems, patterns)


# -- conjecture comparison ----------------------------------------------------------------


@dataclass
class ConjectureReport:
    agree: list
    violations: list
    unknown: list

    @property
    def consistent(self) -> bool:
        return not self.violations


def conjecture_check(group, g, budget: int | None = None, threads: int | None = None,
                     guard: int = 8) -> ConjectureReport:
    """Compare the (||f||_0, ||V_g f||_0) map with the Fourier map shifted by |G|^2 - |G|.

    The prediction is: (k, L) occurs iff (k, L - |G|^2 + |G|) occurs for the
    Fourier transform.  Cells undecided on either side are listed as unknown.
    """
    group = as_group(group)
    n = group.order
    if n > guard:
        raise ValueError(f"|G|={n} exceeds the guard {guard}")
    smap = stft_pair_map(group, g, budget=budget, threads=threads, guard=guard)
    fmap = fourier_pair_map(group, budget=budget, threads=threads)
    shift = n * n - n
    agree, bad, unknown = [], [], []
    for (k, L), cell in sorted(smap.cells.items()):
        l = L - shift
        if 1 <= l <= n:
            pred = fmap.status(k, l)
        else:
            pred = Status.PROVED
        if cell.status is Status.UNKNOWN or pred is Status.UNKNOWN:
            unknown.append((k, L))
        elif (cell.status is Status.FEASIBLE) == (pred is Status.FEASIBLE):
            agree.append((k, L))
        else:
            bad.append((k, L))
    return ConjectureReport(agree, bad, unknown)


# -- built-in oracles ------------------------------------------------------------------------


def z6_oracle(k: int, l: int) -> bool:
    """Known classification on Z6: feasible iff k l >= 6 and (k, l) != (3, 3)."""
    return k * l >= 6 and (k, l) != (3, 3)


def z2p_known_infeasible(n: int) -> set[tuple[int, int]]:
    """On Z_{2p}, p >= 5 prime: no f with (||f||_0, ||fh||_0) = (3, p - 1) or its mirror."""
    if n % 2 or not is_prime(n // 2) or n // 2 < 5:
        return set()
    p = n // 2
    return {(3, p - 1), (p - 1, 3)}


def check_fourier_oracles(fmap: FeasibilityMap) -> list[str]:
    """Contradictions between a Fourier map and the built-in oracles (empty if none)."""
    problems = []
    n = fmap.group.order
    cyclic = len(fmap.group.factors) <= 1
    for (k, l), cell in fmap.cells.items():
        if cell.status is Status.UNKNOWN:
            continue
        feas = cell.status is Status.FEASIBLE
        if feas and k * l < n:
            problems.append(f"({k},{l}) witnessed below the product bound")
        if n == 6 and cyclic and feas != z6_oracle(k, l):
            problems.append(f"({k},{l}) disagrees with the Z6 classification")
        if cyclic and (k, l) in z2p_known_infeasible(n) and feas:
            problems.append(f"({k},{l}) witnessed but known infeasible on Z{n}")
    return problems


def z3_triple_oracle(kf: int, kg: int, l: int) -> bool:
    """Complete classification of (||f||_0, ||g||_0, ||V_g f||_0) on Z3."""
    if kf == 1 or kg == 1:
        return l == 3 * kf * kg
    allowed = {(2, 2): {8, 9}, (2, 3): {6, 7, 8, 9}, (3, 2): {6, 7, 8, 9}, (3, 3): {3, 6, 7, 8, 9}}
    return l in allowed[(kf, kg)]


def check_stft_oracles(fmap: FeasibilityMap, certified: bool | None = None) -> list[str]:
    """Contradictions between an STFT map and the bounds (empty if none).

    For pair maps with a window all of whose minors are nonzero (``certified``),
    a cell is feasible exactly when k + l >= |G|^2 + 1.
    """
    problems = []
    n = fmap.group.order
    for key, cell in fmap.cells.items():
        if cell.status is Status.UNKNOWN:
            continue
        feas = cell.status is Status.FEASIBLE
        l = key[-1]
        if feas and l < n:
            problems.append(f"{key} witnessed below |G|")
        if fmap.kind == "stft" and certified and feas != (key[0] + l >= n * n + 1):
            problems.append(f"{key} disagrees with k + l >= |G|^2 + 1")
        if fmap.kind == "stft-triple":
            kf, kg, _ = key
            if fmap.group.is_cyclic_prime and feas and l < prime_stft_bound(n, kf, kg):
                problems.append(f"{key} witnessed below the sumset bound")
            if n == 3 and feas != z3_triple_oracle(kf, kg, l):
                problems.append(f"{key} disagrees with the Z3 classification")
    return problems
