"""Numerical toolkit for generalized polynomial complementarity problems.

Find ``x`` with ``F(x) in K``, ``G(x) in K*`` and ``<F(x), G(x)> = 0`` where
``F`` and ``G`` are polynomial maps built from tensor tuples.
"""

from .cones import DualOfFinitelyGenerated, FinitelyGenerated, NonnegativeOrthant
from .errors import (
    DimensionError,
    EmptySolutionEstimate,
    GpcpError,
    NotASolution,
    OddOrderError,
    ParseError,
    ProjectionUnsupported,
    UnsupportedCone,
    ValidationError,
)
from .model import GpcpProblem, SolutionSetEstimate, is_solution, min_map, natural_residual, normal_map
from .polymap import PolyMap, TensorTuple, evaluate, jacobian, leading_tensor
from .problem_io import load_problem, save_problem
from .solvers import SolveConfig, homotopy_solve, multistart_solve, newton_minmap
from .tensor_core import DenseTensor, contract_to_scalar, contract_to_vector

__version__ = "0.1.0"

__all__ = [
    "DenseTensor",
    "contract_to_vector",
    "contract_to_scalar",
    "TensorTuple",
    "PolyMap",
    "evaluate",
    "jacobian",
    "leading_tensor",
    "NonnegativeOrthant",
    "FinitelyGenerated",
    "DualOfFinitelyGenerated",
    "GpcpProblem",
    "SolutionSetEstimate",
    "min_map",
    "natural_residual",
    "normal_map",
    "is_solution",
    "SolveConfig",
    "newton_minmap",
    "homotopy_solve",
    "multistart_solve",
    "load_problem",
    "save_problem",
    "GpcpError",
    "DimensionError",
    "ProjectionUnsupported",
    "UnsupportedCone",
    "OddOrderError",
    "EmptySolutionEstimate",
    "NotASolution",
    "ParseError",
    "ValidationError",
]
