"""Polynomial maps ``F(x) = sum_k A^(k) x^{m-k} + a`` built from tensor tuples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .tensor_core import DenseTensor, contract_jacobian, contract_to_vector, zero_tensor


@dataclass(frozen=True, eq=False)
class TensorTuple:
    """Tensors ``(A^(1), ..., A^(m-1))`` of orders ``m, m-1, ..., 2``.

    A missing intermediate degree is an explicit zero tensor, never a gap.
    """

    tensors: tuple[DenseTensor, ...]

    def __post_init__(self):
        tensors = tuple(self.tensors)
        if not tensors:
            raise DimensionError("a tensor tuple needs at least the matrix term")
        m = tensors[0].order
        n = tensors[0].dim
        for k, t in enumerate(tensors):
            if t.order != m - k:
                raise DimensionError(
                    f"tensor {k + 1} of the tuple has order {t.order}, expected {m - k}"
                )
            if t.dim != n:
                raise DimensionError(f"tensor {k + 1} has dim {t.dim}, expected {n}")
        if tensors[-1].order != 2:
            raise DimensionError("the last tensor of a tuple must be a matrix")
        object.__setattr__(self, "tensors", tensors)

    @property
    def degree_plus_one(self) -> int:
        return self.tensors[0].order

    @property
    def dim(self) -> int:
        return self.tensors[0].dim

    @classmethod
    def from_orders(cls, dim: int, degree_plus_one: int, given: dict[int, DenseTensor]) -> "TensorTuple":
        """Assemble a tuple from ``{order: tensor}``, filling missing orders with zeros."""
        tensors = []
        for order in range(degree_plus_one, 1, -1):
            t = given.get(order)
            tensors.append(t if t is not None else zero_tensor(order, dim))
        return cls(tuple(tensors))


@dataclass(frozen=True, eq=False)
class PolyMap:
    tuple: TensorTuple
    constant: np.ndarray

    def __post_init__(self):
        c = np.array(self.constant, dtype=float, copy=True).reshape(-1)
        if c.size != self.tuple.dim:
            raise DimensionError(f"constant has length {c.size}, tuple dim is {self.tuple.dim}")
        if not np.all(np.isfinite(c)):
            raise ValueError("constant vector must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "constant", c)

    @classmethod
    def from_tensors(cls, tensors: Sequence[DenseTensor], constant=None) -> "PolyMap":
        """Build from a list of tensors; lower orders not given become zero.

        The tensors may be given in any order but no two may share an order.
        """
        tensors = list(tensors)
        if not tensors:
            raise DimensionError("need at least one tensor")
        n = tensors[0].dim
        by_order: dict[int, DenseTensor] = {}
        for t in tensors:
            if t.order < 2:
                raise DimensionError("polynomial-map tensors must have order >= 2")
            if t.order in by_order:
                raise DimensionError(f"two tensors of order {t.order}")
            by_order[t.order] = t
        m = max(by_order)
        if constant is None:
            constant = np.zeros(n)
        return cls(TensorTuple.from_orders(n, m, by_order), constant)

    @property
    def dim(self) -> int:
        return self.tuple.dim

    @property
    def degree_plus_one(self) -> int:
        return self.tuple.degree_plus_one

    @property
    def tensors(self) -> tuple[DenseTensor, ...]:
        return self.tuple.tensors

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)


def _check(p: PolyMap, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (p.dim,) or x.ndim > 2:
        raise DimensionError(f"point of shape {x.shape} does not match map dim {p.dim}")
    return x


def evaluate(p: PolyMap, x) -> np.ndarray:
    """Evaluate ``F(x)``; a ``(B, n)`` batch returns ``(B, n)``."""
    x = _check(p, x)
    out = np.zeros(x.shape) + p.constant
    for t in p.tensors:
        out += contract_to_vector(t, x)
    return out


def jacobian(p: PolyMap, x) -> np.ndarray:
    """Analytic Jacobian, ``J[j, i] = dF_j / dx_i``."""
    x = _check(p, x)
    if x.ndim != 1:
        raise DimensionError("jacobian takes a single point")
    jac = np.zeros((p.dim, p.dim))
    for t in p.tensors:
        jac += contract_jacobian(t, x)
    return jac


def leading_tensor(p: PolyMap) -> DenseTensor:
    return p.tensors[0]
