import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from polyproj.core import (DimensionError, Halfspace, Polyhedron, as_vector, contains, inner,
                           project_halfspace, residuals)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("a, b, expected", [
    ((1, 0), (0, 1), 0.0),
    ((1, 2), (3, 4), 11.0),
    ((0, 0), (5, -3), 0.0),
])
def test_inner(a, b, expected):
    assert inner(a, b) == expected


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner((1, 2), (1, 2, 3))


def test_vector_validation():
    with pytest.raises(ValueError):
        as_vector([])
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError):
        as_vector([[1.0, 2.0]])


def test_zero_normal_rejected():
    with pytest.raises(ValueError, match="nonzero"):
        Halfspace([0.0, 0.0], 1.0)


def test_polyhedron_requires_same_dimension():
    with pytest.raises(DimensionError):
        Polyhedron([Halfspace([1, 0], 0), Halfspace([1, 0, 0], 0)])
    with pytest.raises(ValueError):
        Polyhedron([])


@pytest.mark.parametrize("x, expected", [
    ((2, 1), (2, 1)),
    ((0, 0), (0, 0)),
    ((-1, -2), (-1, -2)),
])
def test_residuals(orthant, x, expected):
    np.testing.assert_array_equal(residuals(orthant, x), expected)


def test_residuals_dimension_mismatch(orthant):
    with pytest.raises(DimensionError):
        residuals(orthant, (1, 2, 3))


def test_contains(orthant):
    assert contains(orthant, (-1, -1), 0.0)
    assert contains(orthant, (1e-12, 0), 1e-9)
    assert not contains(orthant, (1, 0), 1e-9)
    with pytest.raises(ValueError):
        contains(orthant, (0, 0), -1.0)


@pytest.mark.parametrize("u, eta, x, expected", [
    ((0, 1), 0, (3, 2), (3, 0)),
    ((1, 0), 0, (-4, 7), (-4, 7)),
    ((2, 0), 2, (3, 0), (1, 0)),
])
def test_project_halfspace(u, eta, x, expected):
    np.testing.assert_allclose(project_halfspace(Halfspace(u, eta), x), expected, atol=1e-15)


def _halfspace_and_point(dim):
    return st.tuples(
        arrays(float, dim, elements=finite).filter(lambda u: np.linalg.norm(u) > 1e-3),
        finite,
        arrays(float, dim, elements=finite),
    )


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(_halfspace_and_point))
def test_project_halfspace_idempotent_and_feasible(data):
    u, eta, x = data
    hs = Halfspace(u, eta)
    once = project_halfspace(hs, x)
    twice = project_halfspace(hs, once)
    scale = 1 + np.linalg.norm(x) + abs(eta)
    np.testing.assert_allclose(twice, once, atol=1e-12 * scale)
    # one rounding of <x|u> can leave the result a hair above eta
    slack = 1e-12 * (1 + abs(eta)) + 4e-16 * np.linalg.norm(u) * np.linalg.norm(x)
    assert np.dot(once, u) <= eta + slack


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_residuals_affine(dim, n, seed):
    rng = np.random.default_rng(seed)
    P = Polyhedron.from_arrays(rng.standard_normal((n, dim)), rng.standard_normal(n))
    x = rng.standard_normal(dim)
    d = rng.standard_normal(dim)
    lhs = residuals(P, x + d) - residuals(P, x)
    np.testing.assert_allclose(lhs, P.normals @ d, atol=1e-12)
