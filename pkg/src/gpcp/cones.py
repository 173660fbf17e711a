"""Closed convex cones: the nonnegative orthant and finitely generated cones.

The orthant has an exact projection (the positive part).  A finitely generated
cone ``{G @ lam : lam >= 0}`` is projected approximately by projected gradient
on ``lam``, followed by an exact least-squares solve on the support it finds
whenever that solve passes the optimality check.  Its dual is kept in halfspace form ``{y : <g, y> >= 0}``, which
supports membership tests but not projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ProjectionUnsupported

DEFAULT_TOL = 1e-8

PG_CHANGE_TOL = 1e-10
PG_MAX_ITERS = 100_000


class Cone:
    dim: int
    tol: float

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,) or x.ndim > 2:
            raise DimensionError(f"point of shape {x.shape} does not match cone dim {self.dim}")
        return x


@dataclass(frozen=True)
class NonnegativeOrthant(Cone):
    dim: int
    tol: float = DEFAULT_TOL


@dataclass(frozen=True, eq=False)
class _Generated(Cone):
    generators: np.ndarray
    tol: float = DEFAULT_TOL
    dim: int = field(init=False)

    def __post_init__(self):
        gens = np.array(self.generators, dtype=float, copy=True)
        if gens.ndim != 2 or gens.shape[0] == 0:
            raise DimensionError("generators must be a non-empty list of vectors")
        if not np.all(np.isfinite(gens)):
            raise ValueError("generators must be finite")
        if np.any(np.linalg.norm(gens, axis=1) == 0):
            raise ValueError("generators must be nonzero")
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "dim", gens.shape[1])

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.tol == other.tol
            and np.array_equal(self.generators, other.generators)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.generators.tobytes(), self.tol))


class FinitelyGenerated(_Generated):
    """``{sum_i lam_i g_i : lam >= 0}``; ``generators`` has one row per generator."""


class DualOfFinitelyGenerated(_Generated):
    """``{y : <g_i, y> >= 0 for every generator g_i}``."""


def _generated_coefficients(k: FinitelyGenerated, x: np.ndarray) -> np.ndarray:
    """Nonnegative coefficients ``lam`` with ``lam @ G`` approximately nearest to ``x``."""
    gmat = k.generators  # (r, n)
    gram = gmat @ gmat.T
    lipschitz = float(np.max(np.sum(np.abs(gram), axis=1)))
    step = 1.0 / lipschitz
    batched = x.ndim == 2
    xs = x if batched else x[None, :]
    target = xs @ gmat.T  # (B, r)
    lam = np.zeros_like(target)
    for _ in range(PG_MAX_ITERS):
        new = np.maximum(lam - step * (lam @ gram - target), 0.0)
        change = np.max(np.abs(new - lam))
        lam = new
        if change < PG_CHANGE_TOL:
            break
    lam = _polish(gmat, gram, xs, lam)
    return lam if batched else lam[0]


def _support_solve(gmat: np.ndarray, x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    lam = np.zeros(gmat.shape[0])
    if mask.any():
        lam[mask] = np.linalg.lstsq(gmat[mask].T, x, rcond=None)[0]
    return lam


def _kkt_ok(gmat: np.ndarray, x: np.ndarray, lam: np.ndarray) -> bool:
    resid = x - lam @ gmat
    return bool(np.all(lam >= 0) and np.all(resid @ gmat.T <= 1e-12 * (1.0 + np.linalg.norm(x))))


def _polish(gmat: np.ndarray, gram: np.ndarray, xs: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Warm-started active-set refinement of the projected-gradient coefficients.

    Starting from the support found by projected gradient, solve least squares
    on the support, drop negative coefficients and add violated generators for
    a few rounds.  Rows that never pass the KKT check keep their iterate.
    """
    out = lam.copy()
    r = gmat.shape[0]
    for row, x in enumerate(xs):
        mask = lam[row] > 1e-9 * max(1.0, float(lam[row].max(initial=0.0)))
        for _ in range(2 * r + 2):
            cand = _support_solve(gmat, x, mask)
            if _kkt_ok(gmat, x, cand):
                out[row] = cand
                break
            if np.any(cand[mask] < 0):
                mask = mask.copy()
                mask[np.argmin(np.where(mask, cand, np.inf))] = False
                continue
            grad = (x - cand @ gmat) @ gmat.T
            grad[mask] = -np.inf
            mask = mask.copy()
            mask[int(np.argmax(grad))] = True
    return out


def project(k: Cone, x) -> np.ndarray:
    """Euclidean projection onto ``k`` (batched along the first axis)."""
    x = k._check(x)
    if isinstance(k, NonnegativeOrthant):
        return np.maximum(x, 0.0)
    if isinstance(k, FinitelyGenerated):
        return _generated_coefficients(k, x) @ k.generators
    raise ProjectionUnsupported(f"no projection for {type(k).__name__}")


def projection_jacobian(k: Cone, z) -> np.ndarray:
    """One element of the generalized Jacobian of ``P_K`` at a single point ``z``.

    At orthant kinks (``z_j == 0``) the zero row is taken.
    """
    z = k._check(z)
    if isinstance(k, NonnegativeOrthant):
        return np.diag((z > 0).astype(float))
    if isinstance(k, FinitelyGenerated):
        lam = _generated_coefficients(k, z)
        active = k.generators[lam > 1e-12]
        if active.size == 0:
            return np.zeros((k.dim, k.dim))
        u, s, _ = np.linalg.svd(active.T, full_matrices=False)
        basis = u[:, s > 1e-10 * s[0]]
        return basis @ basis.T
    raise ProjectionUnsupported(f"no projection for {type(k).__name__}")


def dual(k: Cone) -> Cone:
    if isinstance(k, NonnegativeOrthant):
        return k
    if isinstance(k, FinitelyGenerated):
        return DualOfFinitelyGenerated(k.generators, tol=k.tol)
    if isinstance(k, DualOfFinitelyGenerated):
        return FinitelyGenerated(k.generators, tol=k.tol)
    raise TypeError(f"unknown cone {k!r}")


def distance(k: Cone, x) -> np.ndarray | float:
    x = k._check(x)
    d = np.linalg.norm(x - project(k, x), axis=-1)
    return d if x.ndim == 2 else float(d)


def violation(k: Cone, x) -> np.ndarray | float:
    """How far ``x`` is from membership; zero inside the cone.

    Distance for cones with a projection, and the worst ``max(0, -<g, x>)``
    over generators for a halfspace-represented dual.
    """
    x = k._check(x)
    if isinstance(k, DualOfFinitelyGenerated):
        v = np.maximum(-(x @ k.generators.T).min(axis=-1), 0.0)
        return v if x.ndim == 2 else float(v)
    return distance(k, x)


def contains(k: Cone, x, tol: float | None = None) -> bool | np.ndarray:
    tol = k.tol if tol is None else tol
    return violation(k, x) <= tol


def sample_points(k: Cone, rng: np.random.Generator, count: int) -> np.ndarray:
    """Random points of ``k`` (orthant or generated cone)."""
    if isinstance(k, NonnegativeOrthant):
        return np.abs(rng.standard_normal((count, k.dim)))
    if isinstance(k, FinitelyGenerated):
        return rng.exponential(size=(count, k.generators.shape[0])) @ k.generators
    raise ProjectionUnsupported(f"cannot sample {type(k).__name__} directly")
