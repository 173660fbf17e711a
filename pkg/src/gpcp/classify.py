"""Counterexample search for structured tensor-pair classes.

Every search here is a budgeted multistart minimization.  Finding a point
with (near) zero merit is a genuine counterexample; not finding one only
means none was found within the search budget, never that the class
membership is proved.

All starts run as one numpy batch, so a budget of 10^4 starts costs a few
hundred batched merit evaluations rather than millions of scalar ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cones
from .cones import Cone, NonnegativeOrthant
from .errors import DimensionError, OddOrderError
from .model import GpcpProblem
from .polymap import evaluate
from .tensor_core import DenseTensor, contract_to_scalar, contract_to_vector, form_gradient

MERIT_THRESHOLD = 1e-16
VALUE_THRESHOLD = 1e-10
FD_STEP = 1e-7
SLACK_CAP = 100.0
SLACK_LOG_LOW = 1e-3
REFINE_CANDIDATES = 8
REFINE_ITERS = 1000


class Query(str, enum.Enum):
    ER_PAIR = "ErPair"
    R0_PAIR = "R0Pair"
    POSITIVE_DEFINITE = "PositiveDefinite"
    STRICTLY_COPOSITIVE = "StrictlyCopositive"
    STRICTLY_K_POSITIVE = "StrictlyKPositive"
    S_MAPS_CONE_INTO_CONE = "SMapsConeIntoCone"


@dataclass
class ClassificationVerdict:
    query: Query
    found: bool
    witness: Optional[dict] = None
    budget_used: dict = field(default_factory=dict)
    min_value: Optional[float] = None

    @property
    def outcome(self) -> str:
        return "CounterexampleFound" if self.found else "NoCounterexampleFound"

    def summary(self) -> str:
        if self.found:
            return f"{self.outcome} (min value {self.min_value:.3e})"
        if "starts" in self.budget_used:
            what = f"budget {self.budget_used['starts']} starts"
        else:
            what = f"budget {self.budget_used.get('samples', 0)} samples"
        return f"{self.outcome} ({what}) within search budget, not a proof"

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            return v

        return {
            "query": self.query.value,
            "outcome": self.outcome,
            "qualifier": None if self.found else "within search budget",
            "witness": None if self.witness is None else {k: clean(v) for k, v in self.witness.items()},
            "budget_used": self.budget_used,
            "min_value": self.min_value,
        }


def _check_pair(a: DenseTensor, b: DenseTensor, k: Cone):
    if a.dim != b.dim or a.dim != k.dim:
        raise DimensionError(f"dims disagree: A {a.dim}, B {b.dim}, cone {k.dim}")


def er_terms(a: DenseTensor, b: DenseTensor, k: Cone, x, v, t) -> tuple:
    """The three residuals of the augmented system: cone violation of
    ``A x^{m-1} + v x``, dual violation of ``B x^{l-1} + t x`` and their inner product.
    Works on a single point or on a batch (``x`` of shape ``(B, n)``)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    u = contract_to_vector(a, x) + v[..., None] * x
    w = contract_to_vector(b, x) + t[..., None] * x
    return cones.violation(k, u), cones.violation(cones.dual(k), w), np.sum(u * w, axis=-1)


def er_merit(a: DenseTensor, b: DenseTensor, k: Cone, x, v=0.0, t=0.0):
    c1, c2, c3 = er_terms(a, b, k, x, v, t)
    return np.asarray(c1) ** 2 + np.asarray(c2) ** 2 + np.asarray(c3) ** 2


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _pair_search(a, b, k, starts: int, iters: int, seed: int, with_slacks: bool):
    """Batched projected-gradient search; returns the best (x, v, t, merit)."""
    n = a.dim
    rng = np.random.default_rng(seed)
    x = _normalize_rows(rng.standard_normal((starts, n)))
    if with_slacks:
        slack = np.exp(rng.uniform(np.log(SLACK_LOG_LOW), np.log(SLACK_CAP), size=(starts, 2)))
        slack[rng.random((starts, 2)) < 0.25] = 0.0
    else:
        slack = np.zeros((starts, 2))
    z = np.hstack([x, slack])
    nvar = n + 2 if with_slacks else n

    def merit(zz):
        return er_merit(a, b, k, zz[:, :n], zz[:, n], zz[:, n + 1])

    def proj(zz):
        zz = zz.copy()
        zz[:, :n] = _normalize_rows(zz[:, :n])
        zz[:, n:] = np.clip(zz[:, n:], 0.0, SLACK_CAP)
        return zz

    def run(zz, count):
        cur = merit(zz)
        step = np.full(zz.shape[0], 0.1)
        for _ in range(count):
            grad = np.zeros_like(zz)
            for j in range(nvar):
                e = np.zeros(zz.shape[1])
                e[j] = FD_STEP
                grad[:, j] = (merit(zz + e) - merit(zz - e)) / (2 * FD_STEP)
            trial = proj(zz - step[:, None] * grad)
            tm = merit(trial)
            better = tm < cur
            zz = np.where(better[:, None], trial, zz)
            cur = np.where(better, tm, cur)
            step = np.where(better, np.minimum(step * 2.0, 1e3), step * 0.5)
            step = np.maximum(step, 1e-12)
        return zz, cur

    z, vals = run(z, iters)
    # refine the best few starts a while longer
    top = _ordered(z, vals)[: min(REFINE_CANDIDATES, starts)]
    z_ref, vals_ref = run(z[top], REFINE_ITERS)
    best = _ordered(z_ref, vals_ref)[0]
    zb = z_ref[best]
    return zb[:n], float(zb[n]), float(zb[n + 1]), float(vals_ref[best])


def _ordered(points: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Indices sorted by value, ties broken lexicographically on the point."""
    keys = [points[:, j] for j in range(points.shape[1] - 1, -1, -1)] + [values]
    return np.lexsort(keys)


def find_er_counterexample(
    a: DenseTensor,
    b: DenseTensor,
    k: Cone,
    starts: int = 1000,
    iters: int = 500,
    seed: int = 42,
) -> ClassificationVerdict:
    """Search for a nonzero ``x`` and slacks ``v, t >= 0`` solving the augmented
    complementarity system, i.e. a certificate that ``(A, B)`` is *not* an ER pair."""
    _check_pair(a, b, k)
    x, v, t, val = _pair_search(a, b, k, starts, iters, seed, with_slacks=True)
    budget = {"starts": starts, "iters": iters, "refine_iters": REFINE_ITERS}
    return ClassificationVerdict(
        Query.ER_PAIR, val < MERIT_THRESHOLD, {"x": x, "v": v, "t": t, "merit": val}, budget, val
    )


def find_r0_counterexample(
    a: DenseTensor,
    b: DenseTensor,
    k: Cone,
    starts: int = 1000,
    iters: int = 500,
    seed: int = 42,
) -> ClassificationVerdict:
    """As :func:`find_er_counterexample` with both slacks pinned to zero."""
    _check_pair(a, b, k)
    x, _, _, val = _pair_search(a, b, k, starts, iters, seed, with_slacks=False)
    budget = {"starts": starts, "iters": iters, "refine_iters": REFINE_ITERS}
    return ClassificationVerdict(Query.R0_PAIR, val < MERIT_THRESHOLD, {"x": x, "merit": val}, budget, val)


def grid_search_er(a: DenseTensor, b: DenseTensor, k: Cone, angles: int = 3600, slack_grid=None):
    """Exhaustive grid over the unit circle and a slack grid (2-d only).

    Returns ``(min merit, x, v, t)``.
    """
    _check_pair(a, b, k)
    if a.dim != 2:
        raise DimensionError("grid search is for n = 2")
    if slack_grid is None:
        slack_grid = np.linspace(0.0, 10.0, 41)
    theta = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    x = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    best = (np.inf, None, None, None)
    for v in slack_grid:
        for t in slack_grid:
            vals = er_merit(a, b, k, x, np.full(angles, v), np.full(angles, t))
            i = int(np.argmin(vals))
            if vals[i] < best[0]:
                best = (float(vals[i]), x[i], float(v), float(t))
    return best


def _sphere_minimize(value, grad, project, x0: np.ndarray, iters: int):
    """Batched projected gradient on a constraint set given by ``project``."""
    x = project(x0)
    cur = value(x)
    step = np.full(x.shape[0], 0.1)
    for _ in range(iters):
        g = grad(x)
        trial = project(x - step[:, None] * g)
        tv = value(trial)
        moved = trial - x
        # sufficient decrease: the quadratic model at this step must bound the new value
        model = cur + np.sum(g * moved, axis=1) + np.sum(moved**2, axis=1) / (2 * step)
        better = (tv < cur) & (tv <= model + 1e-15 * np.abs(cur))
        x = np.where(better[:, None], trial, x)
        cur = np.where(better, tv, cur)
        step = np.maximum(np.where(better, np.minimum(step * 2.0, 1e3), step * 0.5), 1e-14)
    return x, cur


def _form_search(a: DenseTensor, project, x0, iters, query: Query, starts: int) -> ClassificationVerdict:
    def value(x):
        return contract_to_scalar(a, x)

    def grad(x):
        return form_gradient(a, x)

    x, vals = _sphere_minimize(value, grad, project, x0, iters)
    i = _ordered(x, vals)[0]
    val = float(vals[i])
    return ClassificationVerdict(
        query, val <= VALUE_THRESHOLD, {"x": x[i], "value": val}, {"starts": starts, "iters": iters}, val
    )


def check_positive_definite(a: DenseTensor, starts: int = 256, iters: int = 500, seed: int = 42) -> ClassificationVerdict:
    """Minimize ``A x^m`` over the unit sphere; ``min_value`` estimates the minimum."""
    if a.order % 2:
        raise OddOrderError(f"order {a.order} is odd; an odd-order tensor is never positive definite")
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal((starts, a.dim))
    return _form_search(a, _normalize_rows, x0, iters, Query.POSITIVE_DEFINITE, starts)


def _cone_sphere_projector(k: Cone):
    def project(x):
        y = cones.project(k, x)
        norms = np.linalg.norm(y, axis=1, keepdims=True)
        # a point that projects to the apex keeps its old value
        bad = norms[:, 0] < 1e-12
        y[bad] = np.abs(x[bad]) if isinstance(k, NonnegativeOrthant) else x[bad]
        norms[bad] = np.linalg.norm(y[bad], axis=1, keepdims=True)
        return y / norms

    return project


def check_strictly_k_positive(
    a: DenseTensor, k: Cone, starts: int = 256, iters: int = 500, seed: int = 42
) -> ClassificationVerdict:
    """Minimize ``A x^m`` over ``{x in K, ||x|| = 1}``."""
    if a.dim != k.dim:
        raise DimensionError("tensor and cone dims differ")
    rng = np.random.default_rng(seed)
    if isinstance(k, NonnegativeOrthant):
        x0 = np.abs(rng.standard_normal((starts, a.dim)))
        query = Query.STRICTLY_COPOSITIVE
    else:
        x0 = cones.sample_points(k, rng, starts)
        query = Query.STRICTLY_K_POSITIVE
    return _form_search(a, _cone_sphere_projector(k), x0, iters, query, starts)


def check_strictly_copositive(a: DenseTensor, starts: int = 256, iters: int = 500, seed: int = 42) -> ClassificationVerdict:
    return check_strictly_k_positive(a, NonnegativeOrthant(a.dim), starts, iters, seed)


def check_s_map_invariance(p: GpcpProblem, samples: int = 2000, seed: int = 42, tol: float | None = None) -> ClassificationVerdict:
    """Sample ``x`` in K over several magnitudes and test ``x - F(x)`` in K."""
    k = p.cone
    tol = k.tol if tol is None else tol
    rng = np.random.default_rng(seed)
    x = cones.sample_points(k, rng, samples)
    x *= 10.0 ** rng.uniform(-3.0, 3.0, size=(samples, 1))
    s = x - evaluate(p.f, x)
    viol = np.asarray(cones.violation(k, s))
    bad = np.flatnonzero(viol > tol)
    found = bad.size > 0
    # smallest violating sample makes the most readable witness
    i = int(bad[np.argmin(np.linalg.norm(x[bad], axis=1))]) if found else int(np.argmax(viol))
    witness = {"x": x[i], "s": s[i], "violation": float(viol[i])} if found else None
    return ClassificationVerdict(
        Query.S_MAPS_CONE_INTO_CONE, found, witness, {"samples": samples}, float(viol[i])
    )
