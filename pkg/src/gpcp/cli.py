"""Command-line driver: ``gpcp {solve,residual,classify,errorbound,demo}``.

Exit codes: 0 success, 1 solver failure (no solution found or a demo check
failed), 2 usage error, 3 malformed or invalid problem file.  The default seed
is 42; the ``GPCP_SEED`` environment variable overrides it and ``--seed``
overrides both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable, Optional, Sequence

import numpy as np

from . import classify, errorbound, fixtures
from .errors import (
    DimensionError,
    EmptySolutionEstimate,
    OddOrderError,
    ParseError,
    ProjectionUnsupported,
    UnsupportedCone,
    ValidationError,
)
from .model import GpcpProblem, natural_residual, normal_map
from .polymap import leading_tensor
from .problem_io import load_problem, problem_to_dict
from .solvers import SolveConfig, homotopy_solve, multistart_solve, newton_minmap

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_USAGE = 2
EXIT_INPUT = 3

DEFAULT_SEED = 42

QUERIES = ("er-pair", "r0-pair", "pd", "copositive", "smap")


class UsageError(Exception):
    pass


def resolve_seed(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("GPCP_SEED")
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"GPCP_SEED must be an integer, got {env!r}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _fmt_point(x) -> str:
    return "(" + ", ".join(f"{v:.6f}" for v in x) + ")"


def _dump(report: dict) -> str:
    return json.dumps(errorbound._jsonable(report), indent=2, sort_keys=True) + "\n"


def _emit(report: dict, out: Optional[str]) -> None:
    text = _dump(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _box(args, p: GpcpProblem):
    if args.box is None:
        return None
    lo, hi = args.box
    if not lo < hi:
        raise UsageError("--box needs LO < HI")
    return np.full(p.dim, lo), np.full(p.dim, hi)


# subcommands


def cmd_solve(args) -> int:
    p = load_problem(args.file)
    cfg = SolveConfig(starts=args.starts, seed=args.seed, tol=args.tol)
    est = multistart_solve(p, cfg, _box(args, p))
    print(f"{p.name or args.file}: {len(est)} solution(s) from {cfg.starts} starts (seed {cfg.seed})")
    for x, r in zip(est.points, est.residuals):
        print(f"  {_fmt_point(x)}  r = {r:.3e}")
    if args.homotopy:
        trace = homotopy_solve(p, cfg)
        tail = f" at {_fmt_point(trace.x_star)}" if trace.converged else ""
        print(f"homotopy: {trace.outcome}{tail} ({len(trace.samples)} path samples)")
    if args.out:
        _emit(
            {
                "problem": problem_to_dict(p),
                "command": "solve",
                "config": {"seed": cfg.seed, "starts": cfg.starts, "tol": cfg.tol, "box": args.box},
                "results": {"omega_hat": est.to_dict()},
            },
            args.out,
        )
    return EXIT_OK if len(est) else EXIT_SOLVER


def cmd_residual(args) -> int:
    p = load_problem(args.file)
    x = np.asarray(args.at, dtype=float)
    if x.shape != (p.dim,):
        raise UsageError(f"--at needs {p.dim} coordinates, got {x.size}")
    if p.is_orthant():
        print(f"r(x) = {float(natural_residual(p, x)):.17g}")
    else:
        print(f"||Phi(x)|| = {float(np.linalg.norm(normal_map(p, x))):.17g}")
    return EXIT_OK


def cmd_classify(args) -> int:
    p = load_problem(args.file)
    kw = {"seed": args.seed}
    if args.iters is not None:
        kw["iters"] = args.iters
    tensor = leading_tensor(p.f if args.tensor == "F" else p.g)
    q = args.query
    if q in ("er-pair", "r0-pair"):
        if args.budget is not None:
            kw["starts"] = args.budget
        a, b = leading_tensor(p.f), leading_tensor(p.g)
        fn = classify.find_er_counterexample if q == "er-pair" else classify.find_r0_counterexample
        verdict = fn(a, b, p.cone, **kw)
    elif q == "pd":
        if args.budget is not None:
            kw["starts"] = args.budget
        verdict = classify.check_positive_definite(tensor, **kw)
    elif q == "copositive":
        if args.budget is not None:
            kw["starts"] = args.budget
        if p.is_orthant():
            verdict = classify.check_strictly_copositive(tensor, **kw)
        else:
            verdict = classify.check_strictly_k_positive(tensor, p.cone, **kw)
    else:
        kw.pop("iters", None)
        if args.budget is not None:
            kw["samples"] = args.budget
        verdict = classify.check_s_map_invariance(p, **kw)
    print(verdict.summary())
    if verdict.found and verdict.witness:
        for key, val in verdict.witness.items():
            print(f"  {key} = {np.asarray(val).tolist()}")
    if args.out:
        _emit(
            {
                "problem": problem_to_dict(p),
                "command": "classify",
                "config": {"seed": args.seed, "query": q, "budget": verdict.budget_used, "tensor": args.tensor},
                "results": verdict.to_dict(),
            },
            args.out,
        )
    return EXIT_OK


def cmd_errorbound(args) -> int:
    p = load_problem(args.file)
    cfg = SolveConfig(starts=args.starts, seed=args.seed)
    est = multistart_solve(p, cfg, _box(args, p))
    if not len(est):
        print("no solution found; nothing to measure distances to", file=sys.stderr)
        return EXIT_SOLVER
    scan_box = None
    if args.scan_box is not None:
        scan_box = (np.full(p.dim, args.scan_box[0]), np.full(p.dim, args.scan_box[1]))
    report = errorbound.error_bound_scan(p, est, box=scan_box, sample_count=args.samples, seed=args.seed)
    a51 = [
        errorbound.falsify_assumption_5_1(p, v, rho_grid=args.rho, pair_budget=args.pairs, seed=args.seed)
        for v in ("i", "ii")
    ]
    a52 = [errorbound.probe_assumption_5_2(p, x, seed=args.seed) for x in est.points]
    c54 = errorbound.probe_condition_5_4(p, seed=args.seed)
    results = {
        "omega_hat": est.to_dict(),
        "scan": report.to_dict(),
        "local_growth": [{"at": x, **pr.to_dict()} for x, pr in zip(est.points, a52)],
        "pointwise_monotonicity": [pr.to_dict() for pr in a51],
        "ray_growth": c54.to_dict(),
    }
    config = {
        "seed": args.seed,
        "starts": cfg.starts,
        "solve_box": args.box,
        "scan_box": args.scan_box,
        "samples": args.samples,
        "pair_budget": args.pairs,
        "rho_grid": list(args.rho),
        "tol": cfg.tol,
        "residual_floor": errorbound.RESIDUAL_FLOOR,
        "tau_window": list(errorbound.TAU_WINDOW),
    }
    _emit({"problem": problem_to_dict(p), "command": "errorbound", "config": config, "results": results}, args.out)
    print(
        f"c_estimate = {report.c_estimate:.6g}, tau_fit = {report.tau_fit:.4g}, "
        f"|Omega_hat| = {len(est)}; monotonicity {a51[0].outcome}, pointwise {a51[1].outcome}, "
        f"local growth {'ViolationFound' if any(pr.violation for pr in a52) else 'ConsistentWithinBudget'}, "
        f"ray growth {c54.outcome}",
        file=sys.stderr if not args.out else sys.stdout,
    )
    return EXIT_OK


# demo


def _demo_checks(seed: int, budget: int) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    def er_pair():
        a, b = fixtures.example_2_1_pair()
        v = classify.find_er_counterexample(a, b, fixtures.example_5_1().cone, starts=budget, seed=seed)
        return not v.found, v.summary()

    def solve_51():
        est = multistart_solve(fixtures.example_5_1(), SolveConfig(seed=seed), (np.zeros(2), np.full(2, 3.0)))
        ok = len(est) == 1 and np.linalg.norm(est.points[0] - 1.0) <= 1e-8
        return ok, f"{len(est)} point(s): " + ", ".join(_fmt_point(x) for x in est.points)

    def a51():
        res = errorbound.falsify_assumption_5_1(fixtures.example_5_1(), "i", seed=seed)
        w = res.witness or {}
        ok = res.violation and abs(w.get("value", np.nan) - 7 * 0.1**6 / 64) <= 1e-12
        return ok, f"{res.outcome}, value {w.get('value', float('nan')):.6g} at rho 0.01"

    def a52():
        res = errorbound.probe_assumption_5_2(
            fixtures.example_5_1(), [1.0, 1.0], directions=[[0.0, 1.0], [0.0, -1.0]], seed=seed
        )
        up, down = (e["limit"] for e in res.evidence)
        ok = abs(up - 1.0) <= 0.05 and abs(down + 3.0) <= 0.1 and not res.violation
        return ok, f"limits {up:.4f} along (0,1), {down:.4f} along (0,-1)"

    def bound():
        p = fixtures.example_5_1()
        est = multistart_solve(p, SolveConfig(seed=seed), (np.zeros(2), np.full(2, 3.0)))
        box = (np.zeros(2), np.full(2, 2.0))
        one = errorbound.error_bound_scan(p, est, box, 10_000, seed)
        two = errorbound.error_bound_scan(p, est, box, 20_000, seed)
        change = abs(two.c_estimate - one.c_estimate) / one.c_estimate
        ok = np.isfinite(one.c_estimate) and change < 0.2
        return ok, f"c {one.c_estimate:.4f} -> {two.c_estimate:.4f} on doubling; tau fit {one.tau_fit:.3f}"

    def tcp():
        p = fixtures.tcp_demo()
        est = multistart_solve(p, SolveConfig(seed=seed))
        trace = homotopy_solve(p)
        ok = (
            len(est) == 1
            and np.linalg.norm(est.points[0] - 1.0) <= 1e-8
            and trace.converged
            and np.linalg.norm(trace.x_star - 1.0) <= 1e-8
        )
        return ok, f"multistart {len(est)} point(s), homotopy {trace.outcome}"

    def lcp():
        p = fixtures.lcp_demo()
        res = newton_minmap(p, np.zeros(2))
        trace = homotopy_solve(p)
        target = np.array([1.0, 2.0])
        ok = (
            res.solved
            and np.max(np.abs(res.x - target)) <= 1e-10
            and trace.converged
            and np.max(np.abs(trace.x_star - target)) <= 1e-10
        )
        return ok, f"newton {_fmt_point(res.x)}, homotopy {trace.outcome}"

    return [
        ("ER pair search", er_pair),
        ("quartic fixture solve", solve_51),
        ("monotonicity probe falsified", a51),
        ("local growth limits", a52),
        ("error bound scan", bound),
        ("TCP unit-tensor demo", tcp),
        ("LCP demo", lcp),
    ]


def cmd_demo(args) -> int:
    rows = []
    for name, check in _demo_checks(args.seed, args.budget):
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append((name, bool(ok), detail))
    width = max(len(r[0]) for r in rows)
    for name, ok, detail in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    passed = sum(ok for _, ok, _ in rows)
    print(f"{passed}/{len(rows)} checks passed")
    return EXIT_OK if passed == len(rows) else EXIT_SOLVER


# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpcp", description="Polynomial complementarity toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, needs_file=True):
        if needs_file:
            sp.add_argument("--file", required=True, help="problem file, or the name of a bundled fixture")
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (default: $GPCP_SEED or 42)")

    sp = sub.add_parser("solve", help="multistart semismooth Newton")
    common(sp)
    sp.add_argument("--starts", type=int, default=64)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--box", type=float, nargs=2, metavar=("LO", "HI"), default=None)
    sp.add_argument("--homotopy", action="store_true", help="also run the homotopy path follower")
    sp.add_argument("--out", default=None, help="write a JSON report here")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("residual", help="natural residual at a point")
    sp.add_argument("--file", required=True)
    sp.add_argument("--at", type=_floats, required=True, metavar="X1,X2,...")
    sp.set_defaults(func=cmd_residual, seed=None)

    sp = sub.add_parser("classify", help="budgeted counterexample search")
    common(sp)
    sp.add_argument("--query", choices=QUERIES, required=True)
    sp.add_argument("--budget", type=int, default=None, help="number of starts (samples for smap)")
    sp.add_argument("--iters", type=int, default=None)
    sp.add_argument("--tensor", choices=("F", "G"), default="F", help="leading tensor for pd/copositive")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("errorbound", help="error-bound scan and hypothesis probes")
    common(sp)
    sp.add_argument("--starts", type=int, default=64)
    sp.add_argument("--box", type=float, nargs=2, metavar=("LO", "HI"), default=None)
    sp.add_argument("--scan-box", type=float, nargs=2, metavar=("LO", "HI"), default=None)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--pairs", type=int, default=2000)
    sp.add_argument("--rho", type=float, nargs="+", default=[0.01])
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_errorbound)

    sp = sub.add_parser("demo", help="run the built-in fixtures end to end")
    common(sp, needs_file=False)
    sp.add_argument("--budget", type=int, default=10_000, help="starts for the ER search")
    sp.set_defaults(func=cmd_demo)
    return parser


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        args.seed = resolve_seed(args.seed)
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptySolutionEstimate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (
        UsageError,
        FileNotFoundError,
        UnsupportedCone,
        ProjectionUnsupported,
        OddOrderError,
        DimensionError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
