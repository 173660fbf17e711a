"""Dense real square tensors and their contractions with vectors.

A tensor of order ``m`` and dimension ``n`` is stored as a read-only numpy
array of shape ``(n,) * m``.  Index ``(j1, ..., jm)`` is row-major, so the
flat entry list runs with ``j1`` slowest.  No symmetry is assumed anywhere:
contractions always run over the trailing ``m - 1`` slots and leave the first
slot free, exactly as written in ``(A x^{m-1})_j = sum a_{j j2..jm} x_j2..x_jm``.

Most functions accept either a single vector of shape ``(n,)`` or a batch of
shape ``(B, n)``; the batched form is what the classifiers use to run many
starts at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """An m-th order n-dimensional real tensor with dense storage."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=float, copy=True)
        if arr.ndim < 1:
            raise DimensionError("a tensor needs order >= 1")
        n = arr.shape[0]
        if n < 1 or any(s != n for s in arr.shape):
            raise DimensionError(f"tensor must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Flat row-major view of the entries (length ``dim ** order``)."""
        return self.data.reshape(-1)

    @classmethod
    def from_entries(cls, order: int, dim: int, entries: Sequence[float]) -> "DenseTensor":
        flat = np.asarray(entries, dtype=float).reshape(-1)
        if flat.size != dim**order:
            raise DimensionError(
                f"expected {dim ** order} entries for order {order}, dim {dim}; got {flat.size}"
            )
        return cls(flat.reshape((dim,) * order))

    @classmethod
    def from_sparse(
        cls, order: int, dim: int, entries: Mapping[tuple, float] | Iterable[tuple[tuple, float]]
    ) -> "DenseTensor":
        """Build from ``{(i1, ..., im): value}`` with 0-based indices."""
        items = entries.items() if isinstance(entries, Mapping) else entries
        arr = np.zeros((dim,) * order)
        for idx, value in items:
            idx = tuple(int(i) for i in idx)
            if len(idx) != order or any(i < 0 or i >= dim for i in idx):
                raise DimensionError(f"index {idx} invalid for order {order}, dim {dim}")
            arr[idx] = value
        return cls(arr)

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if other.data.shape != self.data.shape:
            raise DimensionError("tensor shapes differ")
        return DenseTensor(self.data + other.data)

    def __mul__(self, scalar: float) -> "DenseTensor":
        return DenseTensor(self.data * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"DenseTensor(order={self.order}, dim={self.dim}, nnz={np.count_nonzero(self.data)})"


def _as_points(t: DenseTensor, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2) or x.shape[-1] != t.dim:
        raise DimensionError(f"vector of shape {x.shape} does not match tensor dim {t.dim}")
    return x, x.ndim == 2


def _contract_trailing(arr: np.ndarray, x: np.ndarray, batched: bool, keep: int) -> np.ndarray:
    """Contract trailing axes of ``arr`` with ``x`` until ``keep`` tensor axes remain."""
    if not batched:
        while arr.ndim > keep:
            arr = arr @ x
        return np.array(arr)
    if arr.ndim == keep:
        return np.broadcast_to(arr, (x.shape[0],) + arr.shape).copy()
    # monomials x_i1 * ... * x_ik in row-major order, then one matmul
    b, n = x.shape
    k = arr.ndim - keep
    mono = x
    for _ in range(k - 1):
        mono = (mono[:, :, None] * x[:, None, :]).reshape(b, -1)
    lead = arr.shape[:keep]
    return (mono @ arr.reshape(-1, n**k).T).reshape((b,) + lead)


def contract_to_vector(t: DenseTensor, x) -> np.ndarray:
    """Return ``A x^{m-1}``; for order 1 this is the tensor itself."""
    x, batched = _as_points(t, x)
    return _contract_trailing(t.data, x, batched, 1)


def contract_to_scalar(t: DenseTensor, x) -> np.ndarray | float:
    """Return ``A x^m = <x, A x^{m-1}>``."""
    x, batched = _as_points(t, x)
    y = contract_to_vector(t, x)
    if batched:
        return np.einsum("bi,bi->b", x, y)
    return float(x @ y)


def contract_jacobian(t: DenseTensor, x) -> np.ndarray:
    """Jacobian of ``x -> A x^{m-1}`` at a single point.

    Entry ``(j, i)`` sums, over every variable slot ``s >= 2``, the contraction
    with ``x`` in all other variable slots and index ``i`` fixed in slot ``s``.
    """
    x, batched = _as_points(t, x)
    if batched:
        raise DimensionError("contract_jacobian takes a single point")
    n, m = t.dim, t.order
    if m == 1:
        return np.zeros((n, n))
    jac = np.zeros((n, n))
    for s in range(1, m):
        jac += _contract_trailing(np.moveaxis(t.data, s, 1), x, False, 2)
    return jac


def form_gradient(t: DenseTensor, x) -> np.ndarray:
    """Gradient of the form ``x -> A x^m`` (single point or batch)."""
    x, batched = _as_points(t, x)
    grad = np.zeros_like(x)
    for s in range(t.order):
        grad = grad + _contract_trailing(np.moveaxis(t.data, s, 0), x, batched, 1)
    return grad


def frobenius_norm(t: DenseTensor) -> float:
    return float(np.sqrt(np.sum(t.data**2)))


def unit_tensor(order: int, dim: int) -> DenseTensor:
    """Kronecker-delta tensor; order 2 gives the identity matrix."""
    if order < 1 or dim < 1:
        raise ValueError("order and dim must be positive")
    arr = np.zeros((dim,) * order)
    for j in range(dim):
        arr[(j,) * order] = 1.0
    return DenseTensor(arr)


def zero_tensor(order: int, dim: int) -> DenseTensor:
    if order < 1 or dim < 1:
        raise ValueError("order and dim must be positive")
    return DenseTensor(np.zeros((dim,) * order))
