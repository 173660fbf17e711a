"""Built-in instances used by the demo, the CLI and the test-suite."""

from __future__ import annotations

import numpy as np

from .cones import NonnegativeOrthant
from .model import GpcpProblem
from .polymap import PolyMap
from .tensor_core import DenseTensor, unit_tensor, zero_tensor


def example_2_1_pair() -> tuple[DenseTensor, DenseTensor]:
    """Fourth-order 2-d pair with a_1111 = 1, a_2111 = -1, a_2222 = 1 and
    b_1111 = 1, b_2122 = -1, b_2222 = 1 (1-based indices)."""
    a = DenseTensor.from_sparse(4, 2, {(0, 0, 0, 0): 1.0, (1, 0, 0, 0): -1.0, (1, 1, 1, 1): 1.0})
    b = DenseTensor.from_sparse(4, 2, {(0, 0, 0, 0): 1.0, (1, 0, 1, 1): -1.0, (1, 1, 1, 1): 1.0})
    return a, b


def example_5_1() -> GpcpProblem:
    """F = A x^3 + (-1, 0), G = B x^3 + (1, 0) with the pair above; unique solution (1, 1)."""
    a, b = example_2_1_pair()
    f = PolyMap.from_tensors([a], [-1.0, 0.0])
    g = PolyMap.from_tensors([b], [1.0, 0.0])
    return GpcpProblem(f, g, NonnegativeOrthant(2), name="example_5_1")


def example_2_1_problem() -> GpcpProblem:
    """The fourth-order ER test pair as leading tensors with zero constants."""
    a, b = example_2_1_pair()
    return GpcpProblem(
        PolyMap.from_tensors([a]), PolyMap.from_tensors([b]), NonnegativeOrthant(2), name="example_2_1_pair"
    )


def identity_map(n: int, constant=None) -> PolyMap:
    return PolyMap.from_tensors([unit_tensor(2, n)], constant)


def tcp_demo() -> GpcpProblem:
    """TCP with F = I x^3 + (-1, -1), G = x."""
    f = PolyMap.from_tensors([unit_tensor(4, 2)], [-1.0, -1.0])
    return GpcpProblem(f, identity_map(2), NonnegativeOrthant(2), name="tcp_demo")


def lcp_demo() -> GpcpProblem:
    """LCP with F = x + (-1, -2), G = x; unique solution (1, 2)."""
    return GpcpProblem(identity_map(2, [-1.0, -2.0]), identity_map(2), NonnegativeOrthant(2), name="lcp_demo")


def lcp(matrix, q, name: str | None = None) -> GpcpProblem:
    """Standard LCP ``0 <= x  perp  M x + q >= 0``."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    f = PolyMap.from_tensors([DenseTensor(matrix)], q)
    return GpcpProblem(f, identity_map(n), NonnegativeOrthant(n), name=name)


def zero_unit_problem() -> GpcpProblem:
    """F = 0 (fourth-order zero leading tensor), G = I x^3; not an R0 pair."""
    f = PolyMap.from_tensors([zero_tensor(4, 2)])
    g = PolyMap.from_tensors([unit_tensor(4, 2)])
    return GpcpProblem(f, g, NonnegativeOrthant(2), name="zero_unit_pair")


def unit_unit_problem() -> GpcpProblem:
    f = PolyMap.from_tensors([unit_tensor(4, 2)])
    g = PolyMap.from_tensors([unit_tensor(4, 2)])
    return GpcpProblem(f, g, NonnegativeOrthant(2), name="unit_unit_pair")


def infeasible_problem() -> GpcpProblem:
    """F = -1 (constant, zero matrix part), G = x in one dimension: no solution."""
    f = PolyMap.from_tensors([zero_tensor(2, 1)], [-1.0])
    return GpcpProblem(f, identity_map(1), NonnegativeOrthant(1), name="infeasible")


PAIR_CORPUS = {
    "example_2_1": example_5_1,
    "unit_unit": unit_unit_problem,
    "zero_unit": zero_unit_problem,
}

BUILTIN_PROBLEMS = {
    "example_5_1": example_5_1,
    "example_2_1_pair": example_2_1_problem,
    "tcp_demo": tcp_demo,
    "lcp_demo": lcp_demo,
    "zero_unit_pair": zero_unit_problem,
    "unit_unit_pair": unit_unit_problem,
}
