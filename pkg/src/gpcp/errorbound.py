"""Empirical checks around the residual error bound ``dist(x, Omega) <= c r(x)``.

``Omega`` is never known exactly; every routine works with a numerical
estimate ``Omega_hat`` from :func:`gpcp.solvers.multistart_solve`.  Distances
to ``Omega_hat`` over-estimate distances to ``Omega`` when solutions are
missed, so ``c_estimate`` is conservative.

Limits and limsups are replaced by finite schedules read off over a trailing
window; the thresholds below are the defaults.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import classify
from .errors import EmptySolutionEstimate, NotASolution, UnsupportedCone
from .model import GpcpProblem, SolutionSetEstimate, is_solution, min_map, natural_residual
from .polymap import evaluate, leading_tensor

RESIDUAL_FLOOR = 1e-14
TAU_WINDOW = (1e-12, 1.0)
PREMISE_TOL = 1e-3
NONZERO_TOL = 0.01
WINDOW = 5
OVERFLOW = 1e300

CAVEAT = (
    "distances are measured to the numerical solution estimate; if it misses "
    "solutions, c_estimate over-estimates the true constant"
)


class Target(str, enum.Enum):
    A51_I = "A51i"
    A51_II = "A51ii"
    A52 = "A52"
    C54 = "C54"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


@dataclass
class ErrorBoundReport:
    omega_hat: SolutionSetEstimate
    sample_count: int
    box: tuple
    points: np.ndarray
    dist: np.ndarray
    residual: np.ndarray
    ratio: np.ndarray  # nan where r(x) is below the division guard
    c_estimate: float
    tau_fit: float
    tau_window: tuple = TAU_WINDOW
    caveat: str = CAVEAT

    def ratios(self):
        """``(x, dist, r, ratio)`` rows for samples that pass the division guard."""
        keep = np.isfinite(self.ratio)
        return list(zip(self.points[keep], self.dist[keep], self.residual[keep], self.ratio[keep]))

    def to_dict(self, top: int = 10) -> dict:
        keep = np.flatnonzero(np.isfinite(self.ratio))
        worst = keep[np.argsort(-self.ratio[keep], kind="stable")[:top]]
        return _jsonable(
            {
                "omega_hat": self.omega_hat.to_dict(),
                "omega_hat_size": len(self.omega_hat),
                "samples": {"count": self.sample_count, "box": [list(self.box[0]), list(self.box[1])]},
                "ratios_used": int(keep.size),
                "c_estimate": self.c_estimate,
                "tau_fit": self.tau_fit,
                "tau_window": list(self.tau_window),
                "largest_ratios": [
                    {"x": self.points[i], "dist": self.dist[i], "r": self.residual[i], "ratio": self.ratio[i]}
                    for i in worst
                ],
                "caveat": self.caveat,
            }
        )


@dataclass
class AssumptionProbeResult:
    target: Target
    violation: bool
    witness: Optional[dict] = None
    evidence: list = field(default_factory=list)

    @property
    def outcome(self) -> str:
        return "ViolationFound" if self.violation else "ConsistentWithinBudget"

    def to_dict(self) -> dict:
        return _jsonable(
            {"target": self.target.value, "outcome": self.outcome, "witness": self.witness, "evidence": self.evidence}
        )


def distance_to_estimate(points, omega_hat: SolutionSetEstimate) -> np.ndarray:
    sol = omega_hat.as_array()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.min(np.linalg.norm(pts[:, None, :] - sol[None, :, :], axis=2), axis=1)


def error_bound_scan(
    p: GpcpProblem,
    omega_hat: SolutionSetEstimate,
    box=None,
    sample_count: int = 10_000,
    seed: int = 42,
    tau_window: tuple = TAU_WINDOW,
) -> ErrorBoundReport:
    """Sample the ratio ``dist(x, Omega_hat) / r(x)`` uniformly over ``box``.

    ``c_estimate`` is the largest ratio seen; ``tau_fit`` is the least-squares
    slope of ``log dist`` against ``log r`` over samples with ``r`` in ``tau_window``.
    """
    if not p.is_orthant():
        raise UnsupportedCone("the error-bound scan uses the natural residual (orthant only)")
    if len(omega_hat) == 0:
        raise EmptySolutionEstimate("no solution points to measure distances to")
    if box is None:
        sol = omega_hat.as_array()
        box = (np.minimum(sol.min(axis=0) - 1.0, 0.0), sol.max(axis=0) + 1.0)
    lo = np.broadcast_to(np.asarray(box[0], dtype=float), (p.dim,))
    hi = np.broadcast_to(np.asarray(box[1], dtype=float), (p.dim,))
    rng = np.random.default_rng(seed)
    x = rng.uniform(lo, hi, size=(sample_count, p.dim))
    dist = distance_to_estimate(x, omega_hat)
    r = natural_residual(p, x)
    ratio = np.full(sample_count, np.nan)
    ok = r > RESIDUAL_FLOOR
    ratio[ok] = dist[ok] / r[ok]
    c_est = float(np.max(ratio[ok])) if np.any(ok) else float("nan")
    sel = (r > tau_window[0]) & (r <= tau_window[1]) & (dist > 0)
    if np.count_nonzero(sel) >= 2:
        tau = float(np.polyfit(np.log(r[sel]), np.log(dist[sel]), 1)[0])
    else:
        tau = float("nan")
    return ErrorBoundReport(
        omega_hat, sample_count, (lo.copy(), hi.copy()), x, dist, r, ratio, c_est, tau, tuple(tau_window)
    )


def _pair_value(p: GpcpProblem, x: np.ndarray, y: np.ndarray, variant: str) -> np.ndarray:
    prod = (evaluate(p.f, x) - evaluate(p.f, y)) * (evaluate(p.g, x) - evaluate(p.g, y))
    return prod.max(axis=-1) if variant == "i" else prod.sum(axis=-1)


def falsify_assumption_5_1(
    p: GpcpProblem,
    variant: str = "i",
    rho_grid: Sequence[float] = (0.01,),
    pair_budget: int = 2000,
    seed: int = 42,
    structured_eps: Sequence[float] = (0.1, 0.01, 0.001),
) -> AssumptionProbeResult:
    """Look for pairs with ``max_j dF_j dG_j <= rho ||x - y||^2`` (variant ``i``)
    or ``<dF, dG> <= rho ||x - y||^2`` (variant ``ii``).

    Candidates are the family ``x = (eps, eps/2)``, ``y = (eps, eps)`` (2-d
    problems only) followed by seeded random pairs.  The assumption asks for
    *some* positive constant, so the overall outcome is a violation only when
    every constant in the grid is violated.
    """
    if variant not in ("i", "ii"):
        raise ValueError("variant must be 'i' or 'ii'")
    n = p.dim
    xs, ys, kinds = [], [], []
    if n == 2:
        for eps in structured_eps:
            xs.append([eps, eps / 2])
            ys.append([eps, eps])
            kinds.append(f"structured eps={eps:g}")
    rng = np.random.default_rng(seed)
    base = rng.standard_normal((pair_budget, n)) * 10.0 ** rng.uniform(-2, 1, size=(pair_budget, 1))
    offset = rng.standard_normal((pair_budget, n)) * 10.0 ** rng.uniform(-4, 0, size=(pair_budget, 1))
    xs.extend(base)
    ys.extend(base + offset)
    kinds.extend(["random"] * pair_budget)
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    sep = np.sum((x - y) ** 2, axis=1)
    keep = sep > 0
    x, y, sep = x[keep], y[keep], sep[keep]
    kinds = [k for k, ok in zip(kinds, keep) if ok]
    value = _pair_value(p, x, y, variant)

    evidence = []
    witnesses = {}
    for rho in rho_grid:
        slack = value - rho * sep
        bad = np.flatnonzero(slack <= 0)
        if bad.size:
            i = int(bad[0])
            witnesses[rho] = {
                "rho": rho,
                "x": x[i],
                "y": y[i],
                "value": float(value[i]),
                "rho_dist_sq": float(rho * sep[i]),
                "kind": kinds[i],
            }
            evidence.append({"rho": rho, "violated": True, "pairs_checked": int(x.shape[0])})
        else:
            evidence.append(
                {
                    "rho": rho,
                    "violated": False,
                    "pairs_checked": int(x.shape[0]),
                    "smallest_normalized_slack": float(np.min(value / sep - rho)),
                }
            )
    violated_all = len(witnesses) == len(rho_grid) and len(rho_grid) > 0
    witness = witnesses[min(witnesses)] if witnesses else None
    target = Target.A51_I if variant == "i" else Target.A51_II
    return AssumptionProbeResult(target, violated_all, witness, evidence)


def default_radii() -> np.ndarray:
    return 2.0 ** -np.arange(1, 31)


def default_scales() -> np.ndarray:
    return 2.0 ** np.arange(1, 41)


def _unit(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    return d / np.linalg.norm(d)


def _stable_limit(seq: np.ndarray, window: int) -> tuple[float, bool]:
    last = float(seq[-1])
    tail = seq[-window:]
    stable = bool(np.max(np.abs(tail - last)) <= 0.05 * abs(last) + 1e-6)
    return last, stable


def probe_assumption_5_2(
    p: GpcpProblem,
    xbar,
    directions=None,
    radii=None,
    nonzero_tol: float = NONZERO_TOL,
    window: int = WINDOW,
    seed: int = 42,
    random_directions: int = 8,
) -> AssumptionProbeResult:
    """Follow ``xbar + r_k d`` into a solution and read off the limits of
    ``min{F_j, G_j}(xbar + r_k d) / r_k`` per component.

    Default directions are ``+-e_j`` plus a few seeded random unit vectors.
    """
    xbar = np.asarray(xbar, dtype=float)
    if not is_solution(p, xbar, 1e-8):
        raise NotASolution(f"{xbar.tolist()} is not a solution within 1e-8")
    n = p.dim
    if directions is None:
        eye = np.eye(n)
        rnd = np.random.default_rng(seed).standard_normal((random_directions, n))
        directions = list(eye) + list(-eye) + list(rnd)
    radii = default_radii() if radii is None else np.asarray(radii, dtype=float)
    evidence = []
    bad = None
    for d in directions:
        d = _unit(d)
        pts = xbar + radii[:, None] * d
        ratios = min_map(p, pts) / radii[:, None]
        limits, stable = zip(*(_stable_limit(ratios[:, j], window) for j in range(n)))
        candidates = [j for j in range(n) if stable[j]] or list(range(n))
        j0 = max(candidates, key=lambda j: abs(limits[j]))
        entry = {
            "direction": d,
            "j0": j0 + 1,
            "limit": limits[j0],
            "stabilized": stable[j0],
            "ratios": ratios[:, j0],
            "radii": radii,
        }
        evidence.append(entry)
        if abs(limits[j0]) < nonzero_tol and bad is None:
            bad = entry
    return AssumptionProbeResult(Target.A52, bad is not None, bad, evidence)


def probe_condition_5_4(
    p: GpcpProblem,
    ray_directions=None,
    scales=None,
    premise_tol: float = PREMISE_TOL,
    limit_tol: float = PREMISE_TOL,
    window: int = WINDOW,
    seed: int = 42,
    random_rays: int = 64,
) -> AssumptionProbeResult:
    """Probe the growth condition along rays ``s_k d``.

    Along each ray the negative parts ``[-F]_+ / ||x||`` and ``[-G]_+ / ||x||``
    are checked to vanish; when they do, some component of
    ``min{F, G} / ||x||`` must keep a positive limsup.  Rays where the
    negative parts do not vanish are skipped.  Evaluation stops once any value
    passes 1e300, and the trend is read from the steps before that.
    """
    if not p.is_orthant():
        raise UnsupportedCone("the growth-condition probe is defined on the orthant")
    if ray_directions is None:
        ray_directions = np.random.default_rng(seed).standard_normal((random_rays, p.dim))
    scales = default_scales() if scales is None else np.asarray(scales, dtype=float)
    evidence = []
    bad = None
    with np.errstate(over="ignore", invalid="ignore"):
        for d in ray_directions:
            d = _unit(d)
            pts = scales[:, None] * d
            fx = evaluate(p.f, pts)
            gx = evaluate(p.g, pts)
            finite = np.all(np.isfinite(fx) & np.isfinite(gx) & (np.abs(fx) <= OVERFLOW) & (np.abs(gx) <= OVERFLOW), axis=1)
            stop = int(np.argmin(finite)) if not finite.all() else len(scales)
            s, fx, gx = scales[:stop], fx[:stop], gx[:stop]
            entry = {"direction": d, "steps_used": stop}
            if stop == 0:
                entry["status"] = "overflow"
                evidence.append(entry)
                continue
            w = min(window, stop)
            neg_f = np.linalg.norm(np.maximum(-fx, 0.0), axis=1) / s
            neg_g = np.linalg.norm(np.maximum(-gx, 0.0), axis=1) / s
            entry["neg_part_limits"] = [float(neg_f[-w:].mean()), float(neg_g[-w:].mean())]
            if not (entry["neg_part_limits"][0] < premise_tol and entry["neg_part_limits"][1] < premise_tol):
                entry["status"] = "premise not met"
                evidence.append(entry)
                continue
            ratios = np.minimum(fx, gx) / s[:, None]
            limsup = ratios[-w:].max(axis=0)
            j0 = int(np.argmax(limsup))
            entry["limsup"] = limsup
            entry["j0"] = j0 + 1
            if limsup[j0] > limit_tol:
                entry["status"] = "consistent"
            else:
                entry["status"] = "violation"
                if bad is None:
                    bad = entry
            evidence.append(entry)
    return AssumptionProbeResult(Target.C54, bad is not None, bad, evidence)


def error_bound_hypotheses(
    p: GpcpProblem,
    omega_hat: SolutionSetEstimate | None = None,
    starts: int = 1000,
    seed: int = 42,
) -> dict:
    """Run the budgeted checks behind the sufficient conditions for a global
    Lipschitzian bound and report them side by side.

    Two routes are assembled: (1) the leading pair is ER and either the
    degrees agree or the higher even-order leading tensor is positive
    definite; (2) ``m > l``, the leading pair is ER, ``A^(1)`` is strictly
    copositive and ``x - F(x)`` maps the orthant into itself.  Each route
    also needs the local condition at every known solution.  Every "holds"
    is budget-qualified.
    """
    a, b = leading_tensor(p.f), leading_tensor(p.g)
    er = classify.find_er_counterexample(a, b, p.cone, starts=starts, seed=seed)
    out: dict = {"er_pair": er.to_dict(), "m": p.m, "l": p.l}
    route1 = not er.found
    if p.m != p.l:
        big = a if p.m > p.l else b
        if big.order % 2:
            out["positive_definite"] = "not applicable (odd order)"
            route1 = False
        else:
            pd = classify.check_positive_definite(big, starts=min(starts, 256), seed=seed)
            out["positive_definite"] = pd.to_dict()
            route1 = route1 and not pd.found
    route2 = False
    if p.m > p.l:
        cop = classify.check_strictly_copositive(a, starts=min(starts, 256), seed=seed)
        smap = classify.check_s_map_invariance(p, seed=seed)
        out["strictly_copositive"] = cop.to_dict()
        out["s_map"] = smap.to_dict()
        route2 = (not er.found) and (not cop.found) and (not smap.found)
    local_ok = None
    if omega_hat is not None and len(omega_hat):
        probes = [probe_assumption_5_2(p, x, seed=seed) for x in omega_hat.points]
        local_ok = not any(pr.violation for pr in probes)
        out["local_condition"] = [pr.outcome for pr in probes]
    out["route_equal_or_definite"] = route1
    out["route_copositive"] = route2
    out["local_condition_ok"] = local_ok
    holds = (route1 or route2) and bool(local_ok)
    out["conclusion"] = (
        "hypotheses hold within search budget (not a proof)" if holds else "hypotheses not established"
    )
    return out
