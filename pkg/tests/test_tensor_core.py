import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gpcp.errors import DimensionError
from gpcp.fixtures import example_2_1_pair
from gpcp.tensor_core import (
    DenseTensor,
    contract_jacobian,
    contract_to_scalar,
    contract_to_vector,
    form_gradient,
    frobenius_norm,
    unit_tensor,
    zero_tensor,
)
from oracles import fd_jacobian, naive_contract

finite = st.floats(-10, 10, allow_nan=False)


@st.composite
def tensor_and_point(draw, max_order=4, max_dim=3):
    m = draw(st.integers(2, max_order))
    n = draw(st.integers(1, max_dim))
    data = draw(arrays(float, (n,) * m, elements=finite))
    x = draw(arrays(float, (n,), elements=finite))
    return DenseTensor(data), x


class TestConstruction:
    def test_shape_and_entries(self):
        t = DenseTensor.from_entries(3, 2, range(8))
        assert t.order == 3 and t.dim == 2
        assert t.entries.tolist() == list(range(8))

    def test_entry_count_mismatch(self):
        with pytest.raises(DimensionError):
            DenseTensor.from_entries(3, 2, range(7))

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            DenseTensor(np.zeros((2, 3)))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            DenseTensor(np.array([[1.0, bad], [0.0, 1.0]]))

    def test_storage_is_read_only_copy(self):
        src = np.eye(2)
        t = DenseTensor(src)
        src[0, 0] = 5.0
        assert t.data[0, 0] == 1.0
        with pytest.raises(ValueError):
            t.data[0, 0] = 2.0

    def test_from_sparse_bad_index(self):
        with pytest.raises(DimensionError):
            DenseTensor.from_sparse(2, 2, {(0, 2): 1.0})

    def test_arithmetic(self):
        a, b = example_2_1_pair()
        s = a + 2 * b
        assert s.data[0, 0, 0, 0] == 3.0
        assert s.data[1, 0, 1, 1] == -2.0
        assert a == DenseTensor(a.data.copy())
        assert a != b


class TestContraction:
    def test_example_pair_vector(self):
        a, _ = example_2_1_pair()
        assert contract_to_vector(a, [1.0, 2.0]).tolist() == [1.0, 7.0]

    def test_unit_tensor_collapses(self, rng):
        x = rng.standard_normal(2)
        np.testing.assert_allclose(contract_to_vector(unit_tensor(4, 2), x), x**3, rtol=1e-14)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_zero_point(self, m, rng):
        t = DenseTensor(rng.standard_normal((3,) * m))
        assert np.all(contract_to_vector(t, np.zeros(3)) == 0.0)
        assert contract_to_scalar(t, np.zeros(3)) == 0.0

    def test_scalar_examples(self):
        a, _ = example_2_1_pair()
        assert contract_to_scalar(unit_tensor(4, 2), [1.0, 2.0]) == 17.0
        assert contract_to_scalar(a, [1.0, 1.0]) == 1.0

    def test_naive_oracle(self, rng):
        worst = 0.0
        for _ in range(1000):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(1, 4))
            t = DenseTensor(rng.uniform(-1, 1, (n,) * m))
            x = rng.uniform(-2, 2, n)
            ref, scale = naive_contract(t.data, x)
            err = np.max(np.abs(contract_to_vector(t, x) - ref) / np.maximum(scale, 1e-300))
            worst = max(worst, err)
        assert worst <= 1e-13

    def test_batched_matches_single(self, rng):
        t = DenseTensor(rng.standard_normal((3, 3, 3, 3)))
        xs = rng.standard_normal((7, 3))
        batch = contract_to_vector(t, xs)
        for x, row in zip(xs, batch):
            np.testing.assert_allclose(row, contract_to_vector(t, x), rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(contract_to_scalar(t, xs), [contract_to_scalar(t, x) for x in xs], rtol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            contract_to_vector(unit_tensor(3, 2), np.ones(3))

    @given(tensor_and_point(), st.floats(-3, 3), st.floats(-3, 3))
    def test_bilinearity(self, tx, alpha, beta):
        t, x = tx
        other = DenseTensor(np.flip(t.data))
        lhs = contract_to_vector(alpha * t + beta * other, x)
        rhs = alpha * contract_to_vector(t, x) + beta * contract_to_vector(other, x)
        _, s1 = naive_contract(t.data, x)
        _, s2 = naive_contract(other.data, x)
        scale = abs(alpha) * s1 + abs(beta) * s2 + 1.0
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)

    @given(tensor_and_point(), st.floats(0.1, 10))
    def test_homogeneity(self, tx, lam):
        t, x = tx
        lhs = contract_to_vector(t, lam * x)
        rhs = lam ** (t.order - 1) * contract_to_vector(t, x)
        _, scale = naive_contract(t.data, lam * x)
        assert np.all(np.abs(lhs - rhs) <= 1e-10 * (scale + 1e-300))

    @given(tensor_and_point())
    def test_scalar_is_inner_product(self, tx):
        t, x = tx
        y = contract_to_vector(t, x)
        scale = np.abs(x) @ naive_contract(t.data, x)[1] + 1.0
        assert abs(contract_to_scalar(t, x) - x @ y) <= 1e-13 * scale


class TestDerivatives:
    def test_jacobian_fd(self, rng):
        for _ in range(100):
            m = int(rng.integers(2, 5))
            n = int(rng.integers(1, 5))
            t = DenseTensor(rng.uniform(-1, 1, (n,) * m))
            x = rng.uniform(-1, 1, n)
            fd = fd_jacobian(lambda z: contract_to_vector(t, z), x)
            assert np.max(np.abs(contract_jacobian(t, x) - fd)) <= 1e-5

    def test_form_gradient_fd(self, rng):
        t = DenseTensor(rng.standard_normal((2, 2, 2, 2)))
        x = rng.standard_normal(2)
        fd = fd_jacobian(lambda z: np.atleast_1d(contract_to_scalar(t, z)), x)[0]
        np.testing.assert_allclose(form_gradient(t, x), fd, atol=1e-6)


class TestNormsAndSpecialTensors:
    def test_frobenius(self):
        a, _ = example_2_1_pair()
        assert frobenius_norm(a) == pytest.approx(np.sqrt(3.0), rel=1e-15)
        assert frobenius_norm(zero_tensor(3, 2)) == 0.0
        assert frobenius_norm(unit_tensor(2, 2)) == pytest.approx(np.sqrt(2.0))

    def test_unit_matrix(self):
        assert np.array_equal(unit_tensor(2, 3).data, np.eye(3))

    def test_unit_tensor_support(self):
        nz = np.argwhere(unit_tensor(4, 2).data)
        assert [tuple(i) for i in nz] == [(0, 0, 0, 0), (1, 1, 1, 1)]
