import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gpcp import cones
from gpcp.cones import DualOfFinitelyGenerated, FinitelyGenerated, NonnegativeOrthant
from gpcp.errors import DimensionError, ProjectionUnsupported

vec2 = arrays(float, (2,), elements=st.floats(-10, 10, allow_nan=False))
vec3 = arrays(float, (3,), elements=st.floats(-10, 10, allow_nan=False))

FG3 = FinitelyGenerated(np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 2.0]]))


class TestProject:
    def test_orthant(self):
        assert cones.project(NonnegativeOrthant(2), [-1.0, 2.0]).tolist() == [0.0, 2.0]

    def test_orthogonal_ray(self):
        k = FinitelyGenerated(np.array([[1.0, 0.0]]))
        np.testing.assert_allclose(cones.project(k, [0.0, 1.0]), [0.0, 0.0], atol=1e-12)

    def test_orthant_idempotent_exact(self):
        x = np.array([0.5, 3.0])
        assert np.array_equal(cones.project(NonnegativeOrthant(2), x), x)

    def test_dual_unsupported(self):
        with pytest.raises(ProjectionUnsupported):
            cones.project(DualOfFinitelyGenerated(np.eye(2)), [1.0, 1.0])

    def test_dimension(self):
        with pytest.raises(DimensionError):
            cones.project(NonnegativeOrthant(2), [1.0, 2.0, 3.0])

    def test_batched(self, rng):
        xs = rng.standard_normal((6, 3))
        np.testing.assert_allclose(cones.project(FG3, xs), [cones.project(FG3, x) for x in xs], atol=1e-12)

    def test_generators_validated(self):
        with pytest.raises(ValueError):
            FinitelyGenerated(np.array([[0.0, 0.0]]))


class TestProjectionLaws:
    @given(vec2)
    def test_orthant_characterization(self, x):
        k = NonnegativeOrthant(2)
        p = cones.project(k, x)
        assert (p - x) @ p == 0.0
        for y in np.eye(2):
            assert (p - x) @ y >= 0.0

    @given(vec3)
    def test_generated_characterization(self, x):
        p = cones.project(FG3, x)
        assert abs((p - x) @ p) <= 1e-6 * (1 + x @ x)
        for g in FG3.generators:
            assert (p - x) @ g >= -1e-6 * (1 + np.linalg.norm(x))

    @given(vec3)
    def test_idempotence(self, x):
        for k in (NonnegativeOrthant(3), FG3):
            p = cones.project(k, x)
            assert np.max(np.abs(cones.project(k, p) - p)) <= 1e-9

    @given(vec3, vec3)
    def test_nonexpansive(self, x, y):
        for k in (NonnegativeOrthant(3), FG3):
            d = np.linalg.norm(cones.project(k, x) - cones.project(k, y))
            assert d <= np.linalg.norm(x - y) + 1e-9

    def test_nnls_agreement(self, rng):
        from scipy.optimize import nnls

        for _ in range(50):
            x = rng.standard_normal(3) * 3
            coef, _ = nnls(FG3.generators.T, x)
            np.testing.assert_allclose(cones.project(FG3, x), coef @ FG3.generators, atol=1e-7)


class TestDualAndMembership:
    def test_orthant_self_dual(self):
        assert cones.dual(NonnegativeOrthant(2)) == NonnegativeOrthant(2)

    def test_generated_dual(self):
        k = FinitelyGenerated(np.array([[1.0, 0.0]]))
        d = cones.dual(k)
        assert isinstance(d, DualOfFinitelyGenerated)
        assert cones.contains(d, [0.0, -5.0]) and not cones.contains(d, [-1.0, 0.0])

    def test_bipolar_membership(self, rng):
        for k in (NonnegativeOrthant(3), FG3, cones.dual(FG3)):
            kk = cones.dual(cones.dual(k))
            pts = rng.standard_normal((1000, 3))
            assert np.array_equal(cones.contains(k, pts), cones.contains(kk, pts))

    def test_distance_examples(self):
        assert cones.distance(NonnegativeOrthant(2), [-3.0, 4.0]) == 3.0
        assert cones.distance(NonnegativeOrthant(2), [1.0, 4.0]) == 0.0
        ray = FinitelyGenerated(np.array([[1.0, 1.0]]))
        assert cones.distance(ray, [1.0, -1.0]) == pytest.approx(np.sqrt(2.0), abs=1e-10)

    def test_distance_needs_projection(self):
        with pytest.raises(ProjectionUnsupported):
            cones.distance(DualOfFinitelyGenerated(np.eye(2)), [1.0, 1.0])

    def test_primal_dual_pairing(self, rng):
        for k in (NonnegativeOrthant(3), FG3):
            xs = cones.sample_points(k, rng, 200)
            if isinstance(k, NonnegativeOrthant):
                ys = np.abs(rng.standard_normal((200, 3)))
            else:
                cand = rng.standard_normal((5000, 3))
                ys = cand[cones.contains(cones.dual(k), cand, tol=0.0)][:200]
            assert np.min(xs @ ys.T) >= -1e-9

    def test_membership_tolerance(self):
        k = NonnegativeOrthant(2)
        assert cones.contains(k, [-1e-9, 1.0])
        assert not cones.contains(k, [-1e-7, 1.0])
        assert cones.contains(NonnegativeOrthant(2, tol=1e-6), [-1e-7, 1.0])

    def test_projection_jacobian_orthant(self):
        np.testing.assert_array_equal(
            cones.projection_jacobian(NonnegativeOrthant(3), [1.0, 0.0, -2.0]), np.diag([1.0, 0.0, 0.0])
        )
