import numpy as np
import pytest

from polyproj.latticial import (LatticialCone, SingularBasisError, cone_membership,
                                dual_generators, exhaustive_supports, mixed_representation,
                                project_cone)


@pytest.mark.parametrize("basis, duals", [
    ([[1, 0], [0, 1]], [[-1, 0], [0, -1]]),
    ([[1, 0], [1, 1]], [[-1, 1], [0, -1]]),
    ([[2, 0], [0, 1]], [[-0.5, 0], [0, -1]]),
])
def test_dual_generators(basis, duals):
    K = LatticialCone(basis)
    U = dual_generators(K)
    np.testing.assert_allclose(U, duals, atol=1e-15)
    np.testing.assert_allclose(np.asarray(basis, float) @ U.T, -np.eye(2), atol=1e-12)


def test_dual_relation_random(rng):
    for n in range(1, 9):
        K = LatticialCone(rng.standard_normal((n, n)) + 2 * np.eye(n))
        np.testing.assert_allclose(K.basis @ K.duals.T, -np.eye(n), atol=1e-10)


def test_singular_basis_rejected():
    with pytest.raises(SingularBasisError):
        LatticialCone([[1, 2], [2, 4]])
    with pytest.raises(SingularBasisError):
        LatticialCone([[1, 0, 0], [0, 1, 0]])


def test_cone_membership():
    K = LatticialCone(np.eye(2))
    assert cone_membership(K, [1, 1])
    assert not cone_membership(K, [-1, 2])
    assert cone_membership(LatticialCone([[1, 0], [1, 1]]), [2, 1])


def test_project_cone_orthant():
    K = LatticialCone(np.eye(2))
    s = project_cone(K, [-1, 2])
    np.testing.assert_allclose(s.y, [0, 2])
    np.testing.assert_allclose(s.z, [-1, 0])
    s = project_cone(K, [3, 4])
    np.testing.assert_array_equal(s.y, [3, 4])
    np.testing.assert_array_equal(s.z, [0, 0])
    s = project_cone(K, [-3, -4])
    np.testing.assert_allclose(s.y, [0, 0], atol=1e-15)
    np.testing.assert_allclose(s.z, [-3, -4])


def test_project_cone_orthant_clipping(rng):
    K = LatticialCone(np.eye(5))
    for _ in range(30):
        x = rng.standard_normal(5)
        s = project_cone(K, x)
        np.testing.assert_allclose(s.y, np.maximum(x, 0), atol=1e-14)
        np.testing.assert_allclose(s.z, np.minimum(x, 0), atol=1e-14)


def test_mixed_representation_orthant():
    K = LatticialCone(np.eye(2))
    rep = mixed_representation(K, [-1, 2])
    assert rep.support == (0,) and rep.complement == (1,)
    np.testing.assert_allclose(rep.beta, [1])
    np.testing.assert_allclose(rep.alpha, [2])
    rep = mixed_representation(K, [-1, -2])
    assert rep.support == (0, 1) and rep.complement == ()
    np.testing.assert_allclose(rep.beta, [1, 2])


def test_mixed_representation_skewed():
    K = LatticialCone([[1, 0], [1, 1]])
    x = np.array([0.0, -1.0])
    rep = mixed_representation(K, x)
    assert exhaustive_supports(K, x) == [rep.support] == [(1,)]
    np.testing.assert_allclose(rep.beta, [1])
    np.testing.assert_allclose(rep.alpha, [0], atol=1e-15)
    np.testing.assert_allclose(rep.projection(K), [0, 0], atol=1e-15)
    np.testing.assert_allclose(rep.projection(K) + rep.polar_part(K), x)


def test_mixed_inside_cone_is_trivial():
    K = LatticialCone([[1, 0], [1, 1]])
    rep = mixed_representation(K, [2, 1])
    assert rep.support == ()
    np.testing.assert_allclose(rep.alpha, [1, 1])


def _well_conditioned(rng, n):
    while True:
        B = rng.standard_normal((n, n))
        if np.linalg.cond(B) < 1e3:
            return LatticialCone(B)


def test_moreau_and_exactly_one(rng):
    for _ in range(40):
        n = int(rng.integers(1, 7))
        K = _well_conditioned(rng, n)
        x = 2 * rng.standard_normal(n)
        s = project_cone(K, x)
        np.testing.assert_allclose(s.y + s.z, x, atol=1e-10)
        assert abs(np.dot(s.y, s.z)) <= 1e-10 * (1 + np.dot(x, x))
        if cone_membership(K, x):
            continue
        rep = mixed_representation(K, x)
        assert exhaustive_supports(K, x) == [rep.support]
        np.testing.assert_array_equal(rep.beta, s.multipliers)
        np.testing.assert_allclose(rep.beta_solved, rep.beta, rtol=1e-8, atol=1e-10)
        np.testing.assert_allclose(rep.projection(K), s.y, atol=1e-9)
        # z lies in the polar cone: it is a positive combination of the duals
        np.testing.assert_allclose(rep.polar_part(K), s.z, atol=1e-9)


def test_skewed_cone_fails_loudly():
    # cond 2e6: the Gram solve cannot deliver the answer to working accuracy
    K = LatticialCone([[1, 0], [1, 1e-6]])
    with pytest.raises(ArithmeticError, match="orthogonality"):
        project_cone(K, [-1, 1])
    s = project_cone(K, [1, -1])
    np.testing.assert_allclose(s.y, [1, 0], atol=1e-12)


def test_random_gaussian_cones_always_certified():
    # supports of such cones often have a tiny Hadamard ratio; they must not be gated out
    rng = np.random.default_rng(6)
    for _ in range(300):
        n = int(rng.integers(5, 9))
        K = LatticialCone(rng.standard_normal((n, n)))
        if np.linalg.cond(K.basis) > 1e3:
            continue
        x = 2 * rng.standard_normal(n)
        s = project_cone(K, x)
        np.testing.assert_allclose(s.y + s.z, x, atol=1e-12)
