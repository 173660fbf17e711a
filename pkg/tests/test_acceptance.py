"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (shown in the terminal summary under
"acceptance criteria") before asserting.  Run on its own with

    pytest tests/test_acceptance.py -v
"""

import time

import numpy as np

from gpcp import classify, cli, cones
from gpcp import errorbound as eb
from gpcp.cones import FinitelyGenerated, NonnegativeOrthant
from gpcp.fixtures import PAIR_CORPUS, example_2_1_pair, example_5_1, lcp, lcp_demo, zero_unit_problem
from gpcp.model import natural_residual
from gpcp.polymap import PolyMap, TensorTuple, evaluate, jacobian, leading_tensor
from gpcp.solvers import SolveConfig, homotopy_solve, multistart_solve, newton_minmap
from gpcp.tensor_core import DenseTensor, contract_to_vector
from oracles import example_2_1_system, fd_jacobian, naive_contract

K2 = NonnegativeOrthant(2)
BOX3 = (np.zeros(2), np.full(2, 3.0))


def test_criterion_1_example_2_1_er_pair(acceptance_log):
    a, b = example_2_1_pair()
    start = time.perf_counter()
    verdict = classify.find_er_counterexample(a, b, K2, starts=10_000, seed=42)
    grid_min, _, _, _ = classify.grid_search_er(a, b, K2, angles=3600, slack_grid=np.linspace(0, 10, 41))
    elapsed = time.perf_counter() - start

    theta = np.linspace(0, 2 * np.pi, 3600, endpoint=False)
    slacks = np.linspace(0, 10, 41)
    th, v, t = (g.ravel() for g in np.meshgrid(theta, slacks, slacks, indexing="ij"))
    x1, x2 = np.cos(th), np.sin(th)
    u, w = example_2_1_system(x1, x2, v, t)
    first = np.allclose(u[:, 0] * w[:, 0], x1**2 * (x1**2 + v) * (x1**2 + t), rtol=1e-12, atol=1e-15)
    on_axis = np.abs(x1) < 1e-12
    y2, vv, tt = x2[on_axis], v[on_axis], t[on_axis]
    second = bool(np.allclose(u[on_axis, 1] * w[on_axis, 1], y2**2 * (y2**2 + vv) * (y2**2 + tt), rtol=1e-12))
    c1, c2, c3 = classify.er_terms(a, b, K2, np.stack([x1, x2], 1), v, t)
    reduction = first and second and bool(np.min(c1**2 + c2**2 + c3**2) > 0)

    ok = (not verdict.found) and grid_min >= 1e-6 and reduction and elapsed < 60
    acceptance_log(
        1,
        "ER pair fixture search",
        ok,
        f"{verdict.summary()}; grid min {grid_min:.4g}; reduction {'holds' if reduction else 'broken'}; {elapsed:.1f}s",
    )


def test_criterion_2_example_5_1_solve(acceptance_log):
    p = example_5_1()
    start = time.perf_counter()
    est = multistart_solve(p, SolveConfig(starts=64, seed=42), BOX3)
    elapsed = time.perf_counter() - start
    exact = natural_residual(p, np.array([1.0, 1.0])) == 0.0
    ok = len(est) == 1 and np.max(np.abs(est.points[0] - 1.0)) <= 1e-8 and exact and elapsed < 5
    pts = ", ".join(str(np.round(x, 10).tolist()) for x in est.points)
    acceptance_log(2, "quartic fixture multistart", ok, f"{len(est)} point(s) {pts}; r(1,1) exact zero {exact}; {elapsed:.2f}s")


def test_criterion_3_assumption_5_1_falsified(acceptance_log):
    res = eb.falsify_assumption_5_1(example_5_1(), "i", rho_grid=(0.01,))
    w = res.witness or {}
    structured = w.get("x") is not None and w["x"].tolist() == [0.1, 0.05] and w["y"].tolist() == [0.1, 0.1]
    value = w.get("value", np.nan)
    ok = res.violation and structured and abs(value - 7 * 0.1**6 / 64) <= 1e-12 and abs(value - 1.09375e-7) <= 1e-12
    acceptance_log(3, "pointwise monotonicity violation on quartic fixture", ok, f"{res.outcome}, max product {value!r}")


def test_criterion_4_assumption_5_2_limits(acceptance_log):
    radii = 2.0 ** -np.arange(1, 31)
    res = eb.probe_assumption_5_2(example_5_1(), [1.0, 1.0], directions=[[0.0, 1.0], [0.0, -1.0]], radii=radii)
    up, down = res.evidence
    ok = (
        up["j0"] == 2
        and abs(up["limit"] - 1.0) <= 0.05
        and down["j0"] == 2
        and abs(down["limit"] + 3.0) <= 0.1
    )
    acceptance_log(4, "local growth limits at (1,1)", ok, f"(0,1) -> {up['limit']:.6f}, (0,-1) -> {down['limit']:.6f}")


def test_criterion_5_error_bound(acceptance_log):
    p = example_5_1()
    start = time.perf_counter()
    omega = multistart_solve(p, SolveConfig(seed=42), BOX3)
    box = (np.zeros(2), np.full(2, 2.0))
    one = eb.error_bound_scan(p, omega, box, 10_000, seed=42)
    two = eb.error_bound_scan(p, omega, box, 20_000, seed=42)
    elapsed = time.perf_counter() - start
    change = abs(two.c_estimate - one.c_estimate) / one.c_estimate
    tau_ok = 0.8 <= one.tau_fit <= 1.2
    ok = np.isfinite(one.c_estimate) and change < 0.2 and tau_ok and elapsed < 30
    acceptance_log(
        5,
        "error bound at desk scale",
        ok,
        f"c {one.c_estimate:.4f} -> {two.c_estimate:.4f} ({100 * change:.1f}% change); "
        f"tau fit {one.tau_fit:.4f} {'in' if tau_ok else 'OUTSIDE'} [0.8, 1.2]; {elapsed:.2f}s",
    )


def test_criterion_6_solver_cross_validation(acceptance_log):
    rng = np.random.default_rng(42)
    worst = 0.0
    failures = 0
    for _ in range(50):
        n = int(rng.integers(1, 6))
        a = rng.standard_normal((n, n))
        p = lcp(a @ a.T + 0.1 * np.eye(n), rng.standard_normal(n))
        newton = newton_minmap(p, np.zeros(n))
        trace = homotopy_solve(p)
        if not (newton.solved and trace.converged):
            failures += 1
            continue
        worst = max(worst, float(np.max(np.abs(newton.x - trace.x_star))))
    demo_n = newton_minmap(lcp_demo(), [0.5, 0.5])
    demo_h = homotopy_solve(lcp_demo())
    target = np.array([1.0, 2.0])
    demo_ok = (
        demo_n.solved
        and demo_h.converged
        and np.max(np.abs(demo_n.x - target)) <= 1e-10
        and np.max(np.abs(demo_h.x_star - target)) <= 1e-10
    )
    ok = failures == 0 and worst <= 1e-6 and demo_ok
    acceptance_log(6, "Newton vs homotopy on PD LCPs", ok, f"max gap {worst:.2e}, failures {failures}, LCP demo {demo_ok}")


def _oracle_suites(tmp_path):
    rng = np.random.default_rng(7)
    notes = []

    worst = 0.0
    for _ in range(1000):
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        t = DenseTensor(rng.uniform(-1, 1, (n,) * m))
        x = rng.uniform(-2, 2, n)
        ref, scale = naive_contract(t.data, x)
        worst = max(worst, float(np.max(np.abs(contract_to_vector(t, x) - ref) / np.maximum(scale, 1e-300))))
    contraction = worst <= 1e-13
    notes.append(f"contraction {worst:.1e}")

    worst = 0.0
    for _ in range(100):
        n, m = int(rng.integers(1, 5)), int(rng.integers(2, 5))
        ts = tuple(DenseTensor(rng.uniform(-1, 1, (n,) * k)) for k in range(m, 1, -1))
        f = PolyMap(TensorTuple(ts), rng.uniform(-1, 1, n))
        x = rng.uniform(-1, 1, n)
        worst = max(worst, float(np.max(np.abs(jacobian(f, x) - fd_jacobian(lambda z: evaluate(f, z), x)))))
    jac = worst <= 1e-5
    notes.append(f"jacobian {worst:.1e}")

    laws = True
    fg = FinitelyGenerated(np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 2.0]]))
    for k in (NonnegativeOrthant(3), fg):
        xs = rng.standard_normal((200, 3)) * 3
        ys = rng.standard_normal((200, 3)) * 3
        px, py = cones.project(k, xs), cones.project(k, ys)
        laws &= bool(np.max(np.abs(cones.project(k, px) - px)) <= 1e-9)
        laws &= bool(np.max(np.abs(np.sum((px - xs) * px, axis=1))) <= 1e-6)
        samples = cones.sample_points(k, rng, 50)
        laws &= bool(np.min((px - xs) @ samples.T) >= -1e-6)
        laws &= bool(np.all(np.linalg.norm(px - py, axis=1) <= np.linalg.norm(xs - ys, axis=1) + 1e-9))
    notes.append(f"projection laws {laws}")

    z = zero_unit_problem()
    a, b = leading_tensor(z.f), leading_tensor(z.g)
    r0 = classify.find_r0_counterexample(a, b, K2, starts=200)
    transfer = r0.found and classify.er_merit(a, b, K2, r0.witness["x"], 0.0, 0.0) <= 1e-12
    notes.append(f"ER/R0 transfer {transfer}")

    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [cli.run_cli(["errorbound", "--file", "example_5_1.json", "--samples", "3000", "--out", str(o)]) for o in outs]
    c1 = classify.find_er_counterexample(*example_2_1_pair(), K2, starts=200, seed=5)
    c2 = classify.find_er_counterexample(*example_2_1_pair(), K2, starts=200, seed=5)
    determinism = (
        codes == [0, 0]
        and outs[0].read_bytes() == outs[1].read_bytes()
        and c1.min_value == c2.min_value
        and np.array_equal(c1.witness["x"], c2.witness["x"])
    )
    notes.append(f"determinism {determinism}")
    return contraction and jac and laws and transfer and determinism, "; ".join(notes)


def test_criterion_7_oracle_and_property_suites(acceptance_log, tmp_path):
    ok, detail = _oracle_suites(tmp_path)
    acceptance_log(7, "oracle and property suites", ok, detail)


def test_criterion_8_r0_and_ray_condition(acceptance_log):
    rows = []
    ok = True
    for name, build in PAIR_CORPUS.items():
        p = build()
        r0 = classify.find_r0_counterexample(leading_tensor(p.f), leading_tensor(p.g), p.cone, starts=1000, seed=42)
        rays = eb.probe_condition_5_4(p, seed=42, random_rays=64)
        if not r0.found and rays.violation:
            ok = False
        rows.append((name, r0.found, rays.violation))
    expected = {"example_2_1": (False, False), "unit_unit": (False, False), "zero_unit": (True, True)}
    ok = ok and all(expected[n] == (f, v) for n, f, v in rows)
    detail = ", ".join(f"{n}: R0 cx {f}, ray violation {v}" for n, f, v in rows)
    acceptance_log(8, "R0 verdicts vs ray growth probes", ok, detail)


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-v"]))
