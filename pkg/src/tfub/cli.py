"""Command-line front end: ``tfub <command> [options]``.

Every artifact is a JSON document (or a CSV projection) that embeds the parsed
configuration, the tool version, the seed and the wall time.  Re-running with
the same configuration gives byte-identical output apart from ``wall_time``.

Exit codes: 0 success; 2 usage error; 3 an oracle or bound contradiction;
4 an uncertain rank decision (singular-value gap or margin below 1e3).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .bounds import (
    ThetaProvider,
    corollary_prime_bounds,
    donoho_stark,
    meshulam_theta_lower,
    phi_exact,
    phi_lower_main,
    phi_lower_zpq,
    prime_stft_bound,
    stft_lower_general,
    sum_bound,
    tao_bound,
    theta_exact,
)
from .feasibility import (
    check_fourier_oracles,
    check_stft_oracles,
    fourier_pair_map,
    stft_pair_map,
    stft_triple_map,
)
from .gabor import delta_window, gabor_matrix, random_window, unimodular_window
from .groups import FiniteAbelianGroup, Signal, inverse_fourier, is_prime
from .rank import all_minors_nonzero, minor_rank_histogram
from .recovery import (
    AmbiguousRecoveryError,
    ErasurePattern,
    NotAFrameError,
    OperatorClass,
    erase_and_recover,
    gabor_synthesis_decode,
    identify_operator,
    l0_decode,
    spectral_recovery,
    window_report,
)

EXIT_CONTRADICTION = 3
EXIT_UNCERTAIN = 4

# Published Z_pq row of the Z6 bound table; the literal formula is emitted next to it.
PRINTED_ZPQ_ROW_Z6 = (36, 26, 25, 23, 22, 20)


class Outcome:
    def __init__(self):
        self.contradictions: list[str] = []
        self.uncertain = 0

    @property
    def code(self) -> int:
        if self.contradictions:
            return EXIT_CONTRADICTION
        if self.uncertain:
            return EXIT_UNCERTAIN
        return 0


# -- helpers ----------------------------------------------------------------------------


def _frac(v) -> dict | float:
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    if isinstance(v, (int, np.integer)):
        return {"num": int(v), "den": 1}
    return float(v)


def _parse_sizes(text: str | None, cap: int) -> list[int]:
    if not text:
        return list(range(1, cap + 1))
    out: list[int] = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _window(group: FiniteAbelianGroup, kind: str, seed: int, path: str | None = None) -> Signal:
    if path:
        with open(path) as fh:
            sig = Signal.from_json(json.load(fh))
        if sig.group != group:
            raise SystemExit(f"window file is on {sig.group}, expected {group}")
        return sig
    if kind == "random":
        return random_window(group, seed)
    if kind == "unimodular":
        return unimodular_window(group, seed)
    if kind == "delta":
        return delta_window(group)
    raise SystemExit(f"unknown window {kind!r}")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, result: dict, table: list[list] | None, outcome: Outcome, started: float) -> int:
    doc = {
        "tool": "tfub",
        "version": __version__,
        "command": args.command,
        "config": _config(args),
        "seed": args.seed,
        "result": result,
        "contradictions": outcome.contradictions,
        "uncertain": outcome.uncertain,
        "wall_time": round(time.perf_counter() - started, 3),
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        meta = {k: v for k, v in doc.items() if k != "result"}
        w.writerow(["#meta", json.dumps(meta, sort_keys=True, default=_json_default)])
        for row in table or []:
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(doc, sort_keys=True, indent=1, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for msg in outcome.contradictions:
        print(f"contradiction: {msg}", file=sys.stderr)
    if outcome.uncertain:
        print(f"warning: {outcome.uncertain} uncertain rank decisions", file=sys.stderr)
    return outcome.code


# -- commands ---------------------------------------------------------------------------


def cmd_rank_histogram(args) -> int:
    started = time.perf_counter()
    group = FiniteAbelianGroup.parse(args.group)
    if args.matrix == "dft":
        M = group.pairing_matrix
        seed = None
    else:
        M = gabor_matrix(group, _window(group, args.window, args.seed, args.window_file)).matrix
        seed = args.seed
    hist = minor_rank_histogram(M, _parse_sizes(args.sizes, min(M.shape)), args.tol, args.threads or None,
                                args.budget_minors, False, args.matrix, str(group), seed)
    out = Outcome()
    out.uncertain = hist.uncertain
    table = [["size", "rank", "count"]] + [list(r) for r in hist.csv_rows()]
    return _emit(args, hist.to_dict(), table, out, started)


def cmd_feasibility(args) -> int:
    started = time.perf_counter()
    group = FiniteAbelianGroup.parse(args.group)
    ks = _parse_sizes(args.k, group.order) if args.k else None
    threads = args.threads or None
    out = Outcome()
    if args.transform == "fourier":
        fmap = fourier_pair_map(group, ks, args.budget_minors, threads, guard=args.guard or 16,
                                seed=args.seed)
        out.contradictions += check_fourier_oracles(fmap)
    elif args.transform == "stft":
        g = _window(group, args.window, args.seed, args.window_file)
        fmap = stft_pair_map(group, g, ks, args.budget_minors, threads, guard=args.guard or 8,
                             seed=args.seed)
        A = gabor_matrix(group, g).matrix
        certified = all(all_minors_nonzero(A, r, args.tol).ok for r in range(1, group.order + 1))
        fmap.meta["window_all_minors_nonzero"] = certified
        out.contradictions += check_stft_oracles(fmap, certified)
    else:
        fmap = stft_triple_map(group, trials=args.trials or 10_000, seed=args.seed,
                               guard=args.guard or 5)
        out.contradictions += check_stft_oracles(fmap)
    bad = fmap.verify_witnesses()
    out.contradictions += [f"witness for {k} does not reproduce its cell" for k in bad]
    table = [row for row in csv.reader(io.StringIO(fmap.to_csv()))]
    return _emit(args, fmap.to_dict(), table, out, started)


def _cell_args(tokens) -> dict[str, tuple[int, ...]]:
    cell = {}
    for tok in tokens or []:
        key, _, val = tok.partition("=")
        cell[key.strip()] = tuple(int(x) for x in val.split(","))
    return cell


def cmd_bounds(args) -> int:
    started = time.perf_counter()
    group = FiniteAbelianGroup.parse(args.group)
    n = group.order
    which = args.which
    result: dict = {"which": which}
    table: list[list] = []
    out = Outcome()
    ks = [args.k] if args.k else list(range(1, n + 1))

    def rows(name, fn):
        vals = [(k, fn(k)) for k in ks]
        result["rows"] = [{"k": k, "bound_name": name, "value": _frac(v)} for k, v in vals]
        table.append(["k", "bound_name", "value_num", "value_den"])
        for k, v in vals:
            f = Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator()
            table.append([k, name, f.numerator, f.denominator])

    if which == "table2":
        theta = ThetaProvider(args.provider, group)
        result["provider"] = args.provider
        result["note"] = ("entries use theta(k) = |G| + 1 - k, which reproduces the printed table; "
                          "use --provider exact for the exact theta")
        pairs = [(k, l) for k in range(1, n + 1) for l in range(1, n + 1) if k * l >= n]
        cell = _cell_args(args.cell)
        if cell:
            f, g = cell["f"], cell["g"]
            v = stft_lower_general(theta, f[0], f[1], g[0], g[1], args.variant)
            result["cell"] = {"f": f, "g": g, "value": _frac(v)}
            table = [["kf", "kfh", "kg", "kgh", "value"], [*f, *g, str(v)]]
        else:
            grid = []
            table.append(["f\\g"] + [f"{a} {b}" for a, b in pairs])
            for f in pairs:
                vals = [stft_lower_general(theta, *f, *g, args.variant) for g in pairs]
                grid.append({"f": f, "values": [_frac(v) for v in vals]})
                table.append([f"{f[0]} {f[1]}"] + [str(v) for v in vals])
            result["columns"] = pairs
            result["grid"] = grid
    elif which in ("table4", "table4-main", "table4-zpq"):
        if which in ("table4", "table4-main"):
            rows("phi_main", lambda k: phi_lower_main(group, k))
        if which in ("table4", "table4-zpq"):
            p, q = args.p, args.q
            if p is None or q is None:
                fac = [d for d in range(2, n + 1) if n % d == 0 and is_prime(d)]
                if len(fac) != 2 or fac[0] * fac[1] != n:
                    raise SystemExit("--p/--q required unless |G| is a product of two distinct primes")
                q, p = fac
            literal = [(k, phi_lower_zpq(p, q, k)) for k in ks]
            result["zpq"] = {"p": p, "q": q,
                             "literal": [{"k": k, "value": _frac(v)} for k, v in literal]}
            if not table:
                table.append(["k", "bound_name", "value_num", "value_den"])
            for k, v in literal:
                table.append([k, "phi_zpq_literal", v.numerator, v.denominator])
            if (p, q) == (3, 2):
                result["zpq"]["printed"] = list(PRINTED_ZPQ_ROW_Z6)
                result["zpq"]["note"] = "printed row is not reproduced by the formula; both are reported"
                for k in ks:
                    table.append([k, "phi_zpq_printed", PRINTED_ZPQ_ROW_Z6[k - 1], 1])
    elif which == "tao":
        rows("tao", lambda k: tao_bound(n, k))
    elif which == "ds":
        rows("donoho_stark", lambda k: donoho_stark(n, k))
    elif which == "sum":
        result["value"] = sum_bound(n)
        table = [["bound_name", "value"], ["sum", sum_bound(n)]]
    elif which == "meshulam":
        rows("meshulam", lambda k: meshulam_theta_lower(group, k))
    elif which == "theta":
        rows("theta_exact", lambda k: theta_exact(group, k, args.guard or 16, args.threads or None))
    elif which == "phi":
        g = _window(group, args.window, args.seed, args.window_file)
        rows("phi_exact", lambda k: phi_exact(group, k, g, args.guard or 8, args.threads or None))
    elif which == "prime-stft":
        cell = _cell_args(args.cell)
        kf, kg = cell.get("f", (1, 1))[0], cell.get("g", (1, 1))[0]
        result["value"] = prime_stft_bound(n, kf, kg)
        table = [["kf", "kg", "value"], [kf, kg, result["value"]]]
    elif which == "corollary":
        cell = _cell_args(args.cell)
        mx, avg = corollary_prime_bounds(n, *cell["f"], *cell["g"])
        result["max_form"], result["avg_form"] = mx, _frac(avg)
        table = [["max_form", "avg_num", "avg_den"], [mx, avg.numerator, avg.denominator]]
    else:
        raise SystemExit(f"unknown bound {which!r}")
    return _emit(args, result, table, out, started)


def cmd_certify(args) -> int:
    started = time.perf_counter()
    group = FiniteAbelianGroup.parse(args.group)
    n = group.order
    g = _window(group, args.window, args.seed, args.window_file)
    A = gabor_matrix(group, g).matrix
    out = Outcome()
    result: dict = {"window": g.to_json()}
    top = all_minors_nonzero(A, n, args.tol, args.threads or None)
    result["order_G_minors_nonzero"] = top.ok
    result["dependent_rows"] = None if top.ok else list(top.counterexample[1])
    out.uncertain += top.uncertain
    every = {"ok": True, "zero_minor": None}
    for r in range(1, n + 1):
        res = all_minors_nonzero(A, r, args.tol, args.threads or None)
        out.uncertain += res.uncertain
        if not res.ok:
            cols, rws = res.counterexample
            every = {"ok": False, "zero_minor": {"size": r, "columns": list(cols), "rows": list(rws)}}
            break
    result["all_minors_nonzero"] = every["ok"]
    result["zero_minor"] = every["zero_minor"]
    result["verdict"] = "pass" if every["ok"] else "fail"
    if args.full:
        rep = window_report(g, seed=args.seed)
        result["equivalent_parts"] = rep.parts
        result["min_stft_support"] = rep.min_stft_support
        if not rep.consistent:
            out.contradictions.append("the six equivalent window properties disagree")
        if rep.minors != top.ok:
            out.contradictions.append("minor check and report disagree")
    table = [["property", "value"], ["all_minors_nonzero", every["ok"]],
             ["order_G_minors_nonzero", top.ok]]
    return _emit(args, result, table, out, started)


def _rng(seed):
    return np.random.default_rng(seed)


def _scenario_spectral(n, k, samples, trials, seed):
    group = FiniteAbelianGroup.cyclic(n)
    rng = _rng(seed)
    unique = exact = 0
    worst = 0.0
    for _ in range(trials):
        fh = np.zeros(n, dtype=complex)
        S = rng.choice(n, k, replace=False)
        fh[S] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        f = inverse_fourier(fh, group).values
        B = np.sort(rng.choice(n, samples, replace=False))
        res = spectral_recovery(f[B], B, group, k)
        if res.unique:
            unique += 1
            err = float(np.linalg.norm(res.coefficients - fh) / np.linalg.norm(fh))
            worst = max(worst, err)
            exact += err <= 1e-8
    return {"trials": trials, "unique": unique, "exact": exact, "max_rel_error": worst}


def _scenario_stft(k, trials, seed, n=5):
    group = FiniteAbelianGroup.cyclic(n)
    g = random_window(group, seed)
    A = gabor_matrix(group, g).matrix
    rng = _rng(seed + 1)
    ok = 0
    worst = 0.0
    for _ in range(trials):
        f = np.zeros(n, dtype=complex)
        S = rng.choice(n, k, replace=False)
        f[S] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        Lam = np.sort(rng.choice(n * n, 2 * k, replace=False))
        res = l0_decode(A, Lam, (A @ f)[Lam], k)
        if res.unique:
            err = float(np.linalg.norm(res.coefficients - f) / np.linalg.norm(f))
            worst = max(worst, err)
            ok += err <= 1e-8
    return {"trials": trials, "exact": ok, "max_rel_error": worst}


def _scenario_synthesis(size, samples, trials, seed, n=5):
    group = FiniteAbelianGroup.cyclic(n)
    g = random_window(group, seed)
    P = gabor_matrix(group, g).matrix.conj().T
    rng = _rng(seed + 1)
    ok = ambiguous = 0
    for _ in range(trials):
        Lam = np.sort(rng.choice(n * n, size, replace=False))
        c = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        f = P[:, Lam] @ c
        B = np.sort(rng.choice(n, samples, replace=False))
        try:
            op = gabor_synthesis_decode(g, B, f[B], size)
        except AmbiguousRecoveryError:
            ambiguous += 1
            continue
        ok += op.Lambda == tuple(int(x) for x in Lam) and np.allclose(op.coefficients, c, atol=1e-8)
    return {"trials": trials, "exact": ok, "ambiguous": ambiguous}


def _scenario_operator(size, trials, seed, n=5):
    group = FiniteAbelianGroup.cyclic(n)
    g = random_window(group, seed)
    rng = _rng(seed + 1)
    ok = 0
    worst = 0.0
    for _ in range(trials):
        Lam = np.sort(rng.choice(n * n, size, replace=False))
        c = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        H = OperatorClass(group, Lam, c)
        obs = H.apply(g).values
        got = identify_operator(g, Lam, obs)
        resid = float(np.linalg.norm(OperatorClass(group, Lam, got.coefficients).apply(g).values - obs))
        worst = max(worst, resid / np.linalg.norm(obs))
        ok += np.allclose(got.coefficients, c, atol=1e-8)
    return {"trials": trials, "exact": ok, "max_rel_residual": worst}


def _scenario_erasure(erased, trials, seed, n=5):
    group = FiniteAbelianGroup.cyclic(n)
    g = random_window(group, seed)
    frame = list(np.conj(gabor_matrix(group, g).matrix))
    rng = _rng(seed + 1)
    ok = failed = 0
    for t in range(trials):
        f = Signal(group, rng.standard_normal(n) + 1j * rng.standard_normal(n))
        pattern = ErasurePattern.uniform(n * n, erased, seed=int(rng.integers(2**32)))
        try:
            rec = erase_and_recover(f, frame, pattern)
        except NotAFrameError:
            failed += 1
            continue
        ok += bool(np.linalg.norm(rec.values - f.values) <= 1e-8 * f.norm)
    return {"trials": trials, "exact": ok, "not_a_frame": failed}


SCENARIOS = {
    "z16-spectral": lambda a: _scenario_spectral(16, 3, a.samples or 13, a.trials or 100, a.seed),
    "z17-spectral": lambda a: _scenario_spectral(17, 3, a.samples or 6, a.trials or 1000, a.seed),
    "z5-stft": lambda a: _scenario_stft(2, a.trials or 100, a.seed),
    "z5-synthesis": lambda a: _scenario_synthesis(2, a.samples or 4, a.trials or 100, a.seed),
    "z5-operator": lambda a: _scenario_operator(5, a.trials or 100, a.seed),
    "z5-erasure": lambda a: _scenario_erasure(25 - (a.samples or 5), a.trials or 100, a.seed),
}


def cmd_recover(args) -> int:
    started = time.perf_counter()
    result = {"scenario": args.scenario, **SCENARIOS[args.scenario](args)}
    rate = result.get("exact", 0) / max(1, result["trials"])
    result["success_rate"] = rate
    table = [["key", "value"]] + [[k, v] for k, v in result.items()]
    return _emit(args, result, table, Outcome(), started)


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default="Z5", help="group spec such as Z6 or Z2xZ3 (default Z5)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=1e-10, help="relative singular-value tolerance")
    common.add_argument("--threads", type=int, default=0,
                        help="worker threads; 0 = TFUB_THREADS or the CPU count")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--budget-minors", type=int, default=None,
                        help="cap on submatrices examined; results are marked truncated/Unknown")
    common.add_argument("--trials", type=int, default=None, help="random trials where applicable")
    common.add_argument("--guard", type=int, default=None, help="override the group-size guard")
    common.add_argument("--window", choices=("random", "unimodular", "delta"), default="random",
                        help="window family (seeded by --seed)")
    common.add_argument("--window-file", help="window as signal JSON {group, values}")

    parser = argparse.ArgumentParser(prog="tfub", description=__doc__.split("\n\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter,
                                     epilog="Exit codes: 0 ok, 2 usage, 3 contradiction, 4 uncertain rank.")
    parser.add_argument("--version", action="version", version=f"tfub {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank-histogram", parents=[common], help="histogram of minor ranks")
    p.add_argument("--matrix", choices=("dft", "gabor"), default="dft")
    p.add_argument("--sizes", help="e.g. 1-5 or 2,3 (default: all)")
    p.set_defaults(func=cmd_rank_histogram)

    p = sub.add_parser("feasibility", parents=[common], help="support-size feasibility map")
    p.add_argument("--transform", choices=("fourier", "stft", "stft-triple"), default="fourier")
    p.add_argument("--k", help="restrict to these ||f||_0 values, e.g. 6 or 2-4")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("bounds", parents=[common], help="closed-form and exact support bounds")
    p.add_argument("--which", required=True,
                   choices=("table2", "table4", "table4-main", "table4-zpq", "tao", "ds", "sum",
                            "meshulam", "theta", "phi", "prime-stft", "corollary"))
    p.add_argument("--cell", nargs="+", help="support sizes, e.g. f=2,3 g=2,3")
    p.add_argument("--k", type=int, help="single k instead of 1..|G|")
    p.add_argument("--provider", default="naive_plus_one", choices=ThetaProvider.KINDS)
    p.add_argument("--variant", default="max", choices=("max", "arith", "geom"))
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("certify", parents=[common], help="certify a Gabor window")
    p.add_argument("--full", action="store_true", help="also evaluate all six equivalent properties")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("recover", parents=[common], help="seeded recovery scenarios")
    p.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    p.add_argument("--samples", type=int, help="number of samples kept")
    p.set_defaults(func=cmd_recover)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
