"""Semismooth Newton on the min-map, homotopy path following, and multistart.

The homotopy follows the zeros of ``H(x, t) = t x + (1 - t) Phi(x)`` from the
trivial root ``x = 0`` at ``t = 1`` down to ``t = 0`` where ``H = Phi``.  If
``||x||`` blows up along the way the run is flagged as a suspected exceptional
family: the numerical face of the alternative "either a solution exists or an
unbounded family of perturbed solutions does".
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from . import cones
from .errors import UnsupportedCone
from .model import GpcpProblem, SolutionSetEstimate, is_solution, natural_residual, normal_map
from .polymap import evaluate, jacobian

log = logging.getLogger(__name__)

SINGULAR = "Singular"
MAX_ITERS = "MaxIters"
LINE_SEARCH = "LineSearch"
BLOWUP = "BlowUp"

CONVERGED = "Converged"
EXCEPTIONAL = "ExceptionalFamilySuspected"
STALLED = "Stalled"

T_FLOOR = 1e-8
T_STEP = 0.05
T_RATIO = 0.9


@dataclass
class SolveConfig:
    tol: float = 1e-10
    max_iters: int = 200
    starts: int = 64
    seed: int = 42
    backtrack: float = 0.5
    armijo: float = 1e-4
    blowup_norm: float = 1e6
    pivot_floor: float = 1e-12
    dedupe_radius: float = 1e-6

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtracking factor must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iters: int
    reason: Optional[str] = None  # None when solved

    @property
    def solved(self) -> bool:
        return self.reason is None


@dataclass
class PathSample:
    t: float
    x: np.ndarray
    norm_x: float
    residual: float  # ||Phi(x)||

    @property
    def mu(self) -> float:
        """Perturbation weight ``t / (1 - t)`` of the equivalent perturbed system."""
        return self.t / (1.0 - self.t) if self.t < 1.0 else float("inf")


@dataclass
class PathTrace:
    samples: list = field(default_factory=list)
    outcome: str = STALLED
    x_star: Optional[np.ndarray] = None

    @property
    def converged(self) -> bool:
        return self.outcome == CONVERGED


def _solve(jac: np.ndarray, rhs: np.ndarray, floor: float) -> Optional[np.ndarray]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(jac, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < floor:
        return None
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def _damped_newton(
    system: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    x0: np.ndarray,
    cfg: SolveConfig,
    value_only: Callable[[np.ndarray], np.ndarray],
) -> NewtonResult:
    """Semismooth Newton with Armijo backtracking on ``0.5 ||Phi||^2``."""
    x = np.array(x0, dtype=float)
    phi, jac = system(x)
    norm = float(np.linalg.norm(phi))
    for it in range(cfg.max_iters):
        if norm <= cfg.tol:
            return NewtonResult(x, norm, it)
        step = _solve(jac, -phi, cfg.pivot_floor)
        if step is None:
            return NewtonResult(x, norm, it, SINGULAR)
        merit = 0.5 * norm**2
        alpha = 1.0
        while True:
            trial = x + alpha * step
            trial_phi = value_only(trial)
            trial_norm = float(np.linalg.norm(trial_phi))
            if np.isfinite(trial_norm) and 0.5 * trial_norm**2 <= merit - cfg.armijo * alpha * norm**2:
                break
            alpha *= cfg.backtrack
            if alpha < 1e-14:
                return NewtonResult(x, norm, it, LINE_SEARCH)
        x = trial
        if np.linalg.norm(x) > cfg.blowup_norm:
            return NewtonResult(x, trial_norm, it + 1, BLOWUP)
        phi, jac = system(x)
        norm = float(np.linalg.norm(phi))
    if norm <= cfg.tol:
        return NewtonResult(x, norm, cfg.max_iters)
    return NewtonResult(x, norm, cfg.max_iters, MAX_ITERS)


def _minmap_system(p: GpcpProblem):
    def system(x):
        fx, gx = evaluate(p.f, x), evaluate(p.g, x)
        use_f = fx <= gx  # ties take the F row
        jac = np.where(use_f[:, None], jacobian(p.f, x), jacobian(p.g, x))
        return np.where(use_f, fx, gx), jac

    def value(x):
        return np.minimum(evaluate(p.f, x), evaluate(p.g, x))

    return system, value


def newton_minmap(p: GpcpProblem, x0, cfg: SolveConfig | None = None) -> NewtonResult:
    """Solve ``min{F(x), G(x)} = 0`` by semismooth Newton from ``x0``."""
    cfg = cfg or SolveConfig()
    if not p.is_orthant():
        raise UnsupportedCone("newton_minmap requires the nonnegative orthant")
    x0 = np.asarray(x0, dtype=float)
    natural_residual(p, x0)  # dimension check
    system, value = _minmap_system(p)
    return _damped_newton(system, x0, cfg, value)


def _homotopy_system(p: GpcpProblem, t: float):
    eye = np.eye(p.dim)

    def system(x):
        fx, gx = evaluate(p.f, x), evaluate(p.g, x)
        jf, jg = jacobian(p.f, x), jacobian(p.g, x)
        z = fx - gx
        dproj = cones.projection_jacobian(p.cone, z)
        phi = fx - cones.project(p.cone, z)
        jphi = jf - dproj @ (jf - jg)
        return t * x + (1.0 - t) * phi, t * eye + (1.0 - t) * jphi

    def value(x):
        return t * x + (1.0 - t) * normal_map(p, x)

    return system, value


def homotopy_value(p: GpcpProblem, x, t: float) -> np.ndarray:
    """``H(x, t) = t x + (1 - t) Phi(x)``."""
    return _homotopy_system(p, t)[1](np.asarray(x, dtype=float))


def t_schedule():
    """Yield the decreasing homotopy parameters after ``t = 1``, ending with 0."""
    t = 1.0
    while t > 0.0:
        t = max(t - T_STEP, t * T_RATIO)
        if t <= T_FLOOR:
            t = 0.0
        yield t


def homotopy_solve(p: GpcpProblem, cfg: SolveConfig | None = None) -> PathTrace:
    """Follow the zero curve of ``H`` from ``(0, 1)`` toward ``t = 0``."""
    cfg = cfg or SolveConfig()
    x = np.zeros(p.dim)
    # raises ProjectionUnsupported up front for halfspace cones
    phi0 = normal_map(p, x)
    trace = PathTrace(samples=[PathSample(1.0, x.copy(), 0.0, float(np.linalg.norm(phi0)))])
    for t in t_schedule():
        system, value = _homotopy_system(p, t)
        res = _damped_newton(system, x, cfg, value)
        if res.reason == BLOWUP or (res.solved and np.linalg.norm(res.x) > cfg.blowup_norm):
            if t > T_FLOOR:
                trace.samples.append(
                    PathSample(t, res.x, float(np.linalg.norm(res.x)), float(np.linalg.norm(normal_map(p, res.x))))
                )
                trace.outcome = EXCEPTIONAL
                return trace
        if not res.solved:
            log.debug("corrector failed at t=%g: %s", t, res.reason)
            trace.outcome = STALLED
            return trace
        x = res.x
        trace.samples.append(
            PathSample(t, x.copy(), float(np.linalg.norm(x)), float(np.linalg.norm(normal_map(p, x))))
        )
    if is_solution(p, x, 10 * cfg.tol):
        trace.outcome = CONVERGED
        trace.x_star = x
    else:
        trace.outcome = STALLED
    return trace


def default_box(p: GpcpProblem) -> tuple[np.ndarray, np.ndarray]:
    hi = 2.0 * (1.0 + np.linalg.norm(p.f.constant) + np.linalg.norm(p.g.constant))
    return np.zeros(p.dim), np.full(p.dim, hi)


def draw_starts(p: GpcpProblem, cfg: SolveConfig, box=None) -> np.ndarray:
    lo, hi = default_box(p) if box is None else box
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (p.dim,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (p.dim,))
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform(lo, hi, size=(cfg.starts, p.dim))


def dedupe(points, residuals, radius: float) -> SolutionSetEstimate:
    """Merge points closer than ``radius`` (keeping the smaller residual), sort lexicographically."""
    kept: list[np.ndarray] = []
    kept_res: list[float] = []
    for x, r in zip(points, residuals):
        for i, y in enumerate(kept):
            if np.linalg.norm(x - y) <= radius:
                if r < kept_res[i]:
                    kept[i], kept_res[i] = x, r
                break
        else:
            kept.append(x)
            kept_res.append(r)
    order = sorted(range(len(kept)), key=lambda i: tuple(kept[i]))
    return SolutionSetEstimate(
        points=[kept[i] for i in order], residuals=[kept_res[i] for i in order], dedupe_radius=radius
    )


def multistart_solve(p: GpcpProblem, cfg: SolveConfig | None = None, box=None) -> SolutionSetEstimate:
    """Run ``newton_minmap`` from seeded uniform starts in ``box`` and collect solutions."""
    cfg = cfg or SolveConfig()
    if not p.is_orthant():
        raise UnsupportedCone("multistart uses the min-map Newton backend (orthant only)")
    found, res = [], []
    for x0 in draw_starts(p, cfg, box):
        out = newton_minmap(p, x0, cfg)
        if out.solved:
            found.append(out.x)
            res.append(out.residual)
    return dedupe(found, res, cfg.dedupe_radius)
