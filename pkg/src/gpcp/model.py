"""GPCP instances: find x with F(x) in K, G(x) in K*, <F(x), G(x)> = 0."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cones
from .cones import Cone, NonnegativeOrthant
from .errors import DimensionError, UnsupportedCone
from .polymap import PolyMap, evaluate


@dataclass(frozen=True, eq=False)
class GpcpProblem:
    f: PolyMap
    g: PolyMap
    cone: Cone
    name: Optional[str] = None

    def __post_init__(self):
        if not (self.f.dim == self.g.dim == self.cone.dim):
            raise DimensionError(
                f"dims disagree: F {self.f.dim}, G {self.g.dim}, cone {self.cone.dim}"
            )

    @property
    def dim(self) -> int:
        return self.f.dim

    @property
    def m(self) -> int:
        return self.f.degree_plus_one

    @property
    def l(self) -> int:  # noqa: E743
        return self.g.degree_plus_one

    def is_orthant(self) -> bool:
        return isinstance(self.cone, NonnegativeOrthant)


@dataclass
class SolutionSetEstimate:
    """Deduplicated numerical solutions, an estimate of the solution set."""

    points: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    dedupe_radius: float = 1e-6

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 0))
        return np.vstack(self.points)

    def to_dict(self) -> dict:
        return {
            "points": [np.asarray(p).tolist() for p in self.points],
            "residuals": [float(r) for r in self.residuals],
            "dedupe_radius": self.dedupe_radius,
        }


@dataclass(frozen=True)
class SolutionCheck:
    ok: bool
    feas_F: float
    feas_G: float
    gap: float

    def __bool__(self) -> bool:
        return self.ok


def _require_orthant(p: GpcpProblem):
    if not p.is_orthant():
        raise UnsupportedCone("the natural residual is defined for the nonnegative orthant only")


def min_map(p: GpcpProblem, x) -> np.ndarray:
    _require_orthant(p)
    return np.minimum(evaluate(p.f, x), evaluate(p.g, x))


def natural_residual(p: GpcpProblem, x) -> np.ndarray | float:
    """``r(x) = ||min{F(x), G(x)}||``; batched input gives one value per row."""
    r = np.linalg.norm(min_map(p, x), axis=-1)
    return r if np.ndim(r) else float(r)


def normal_map(p: GpcpProblem, x) -> np.ndarray:
    """``Phi(x) = F(x) - P_K(F(x) - G(x))``; its zeros are the solutions."""
    fx = evaluate(p.f, x)
    gx = evaluate(p.g, x)
    return fx - cones.project(p.cone, fx - gx)


def is_solution(p: GpcpProblem, x, tol: float) -> SolutionCheck:
    """Test the three complementarity conditions at ``x``.

    The gap test is scaled, ``|<F,G>| <= tol * (1 + ||F|| ||G||)``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dim,):
        raise DimensionError(f"point of shape {x.shape} does not match problem dim {p.dim}")
    fx = evaluate(p.f, x)
    gx = evaluate(p.g, x)
    feas_f = float(cones.violation(p.cone, fx))
    feas_g = float(cones.violation(cones.dual(p.cone), gx))
    gap = abs(float(fx @ gx))
    ok = (
        feas_f <= tol
        and feas_g <= tol
        and gap <= tol * (1.0 + np.linalg.norm(fx) * np.linalg.norm(gx))
    )
    return SolutionCheck(bool(ok), feas_f, feas_g, gap)
