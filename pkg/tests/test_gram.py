import itertools

import numpy as np
import pytest

from polyproj import gram
from polyproj.core import Polyhedron, residuals
from polyproj.gram import (build_gram, cramer_numerators, nu_in, nu_out, rank_bound,
                           sign_factor, subdet)


def _poly(normals, offsets=None):
    normals = np.asarray(normals, dtype=float)
    offsets = np.zeros(len(normals)) if offsets is None else offsets
    return Polyhedron.from_arrays(normals, offsets)


@pytest.mark.parametrize("normals, expected", [
    ([[1, 0], [0, 1]], [[1, 0], [0, 1]]),
    ([[1, 0], [1, 1]], [[1, 1], [1, 2]]),
    ([[1, 0], [2, 0]], [[1, 2], [2, 4]]),
])
def test_build_gram(normals, expected):
    G = build_gram(_poly(normals))
    np.testing.assert_array_equal(G, expected)
    assert np.array_equal(G, G.T)


def test_gram_symmetric_bitwise(rng):
    U = rng.standard_normal((7, 4))
    G = build_gram(U)
    assert np.array_equal(G, G.T)
    assert np.all(np.diag(G) > 0)


def test_subdet_examples():
    assert subdet([[1, 1], [1, 2]], (0, 1), (0, 1)) == pytest.approx(1.0)
    assert subdet([[1, 2], [2, 4]], (0, 1), (0, 1)) == pytest.approx(0.0, abs=1e-15)
    G = build_gram(_poly([[3, 4], [1, 1]]))
    assert subdet(G, (0,), (0,)) == 25.0
    with pytest.raises(ValueError):
        subdet(G, (0, 1), (0,))


def test_subdet_matches_cofactor_expansion(rng):
    # Leibniz expansion as an independent determinant
    def leibniz(M):
        n = len(M)
        total = 0.0
        for perm in itertools.permutations(range(n)):
            inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
            total += (-1) ** inv * np.prod([M[i][perm[i]] for i in range(n)])
        return total

    G = build_gram(rng.standard_normal((5, 5)))
    for rows in [(0, 2, 4), (1, 2, 3, 4), (0, 1, 2, 3, 4)]:
        for cols in [(0, 1, 3), (1, 3, 4, 0), (0, 1, 2, 3, 4)]:
            if len(cols) != len(rows):
                continue
            sub = G[np.ix_(rows, cols)]
            assert subdet(G, rows, cols) == pytest.approx(leibniz(sub), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("I, a, expected", [
    ((0, 2), 0, -1),
    ((0, 2), 2, 1),
    ((0, 2), 1, -1),
])
def test_sign_factor(I, a, expected):
    assert sign_factor(I, a) == expected


def test_sign_factor_alternates_on_contiguous_sets():
    for m in range(1, 7):
        I = tuple(range(m))
        signs = [sign_factor(I, a) for a in I]
        assert signs == [(-1) ** (k + 1) for k in range(m)]
        assert all(s in (-1, 1) for s in signs)
        assert sign_factor(I, m + 3) == (-1) ** (m + 1)


def test_nu_in_examples():
    G = np.eye(3)
    np.testing.assert_array_equal(nu_in(G, [5, 0, 0], (0,)), [5])
    np.testing.assert_allclose(nu_in(np.eye(2), [3, 4], (0, 1)), [3, 4])
    G = np.array([[2.0, 1.0], [1.0, 2.0]])
    nu = nu_in(G, [3, 3], (0, 1))
    np.testing.assert_allclose(nu, [3, 3])
    assert subdet(G, (0, 1), (0, 1)) == pytest.approx(3.0)
    np.testing.assert_allclose(nu / 3.0, np.linalg.solve(G, [3, 3]))


def test_nu_out_examples():
    P = _poly([[1, 0], [0, 1]])
    G = build_gram(P)
    assert nu_out(G, residuals(P, [2, 1]), (0,), 1) == pytest.approx(1.0)
    assert nu_out(G, residuals(P, [2, -1]), (0,), 1) == pytest.approx(-1.0)
    # u3 orthogonal to the support and w3 = 0
    P = Polyhedron.from_arrays([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 1])
    G = build_gram(P)
    w = residuals(P, [3, 2, 1])
    assert w[2] == 0
    assert nu_out(G, w, (0, 1), 2) == pytest.approx(0.0, abs=1e-14)


def test_nu_out_rejects_member():
    with pytest.raises(ValueError):
        nu_out(np.eye(2), [1, 1], (0, 1), 1)


def _random_problem(rng, n, d):
    U = rng.standard_normal((n, d))
    eta = rng.standard_normal(n)
    x = 2 * rng.standard_normal(d)
    P = Polyhedron.from_arrays(U, eta)
    return P, x


@pytest.mark.parametrize("seed", range(20))
def test_cramer_identity(seed):
    rng = np.random.default_rng(seed)
    P, x = _random_problem(rng, 6, 6)
    G = build_gram(P)
    w = residuals(P, x)
    for k in range(1, 6):
        for I in itertools.combinations(range(6), k):
            d = subdet(G, I, I)
            direct = np.linalg.solve(G[np.ix_(I, I)], w[list(I)])
            np.testing.assert_allclose(nu_in(G, w, I) / d, direct, rtol=1e-8,
                                       atol=1e-8 * np.abs(direct).max())


@pytest.mark.parametrize("seed", range(20))
def test_residual_identity_all_interleavings(seed):
    rng = np.random.default_rng(100 + seed)
    P, x = _random_problem(rng, 6, 5)
    G = build_gram(P)
    w = residuals(P, x)
    for k in range(1, 5):
        for I in itertools.combinations(range(6), k):
            d = subdet(G, I, I)
            if d <= 1e-10 * np.prod(np.diag(G)[list(I)]):
                continue
            nu_t = np.linalg.solve(G[np.ix_(I, I)], w[list(I)])
            x_bar = x - nu_t @ P.normals[list(I)]
            for ip in set(range(6)) - set(I):
                expected = d * (x_bar @ P.normals[ip] - P.offsets[ip])
                scale = (1 + np.abs(w).max()) * np.prod(np.maximum(np.diag(G)[list(I) + [ip]], 1))
                assert abs(nu_out(G, w, I, ip) - expected) <= 1e-8 * scale


def test_positive_principal_minors(rng):
    U = rng.standard_normal((6, 3))
    G = build_gram(U)
    for k in range(1, 7):
        for I in itertools.combinations(range(6), k):
            ok, d = gram.is_nonsingular(G, I)
            if ok:
                assert d > 0
            if k > 3:
                assert not ok


def test_cramer_numerators_general_matrix(rng):
    M = rng.standard_normal((4, 4))
    b = rng.standard_normal(4)
    np.testing.assert_allclose(cramer_numerators(M, b) / np.linalg.det(M), np.linalg.solve(M, b))


@pytest.mark.parametrize("G, expected", [
    (np.eye(3), 3),
    (build_gram(np.array([[1.0, 0.0], [2.0, 0.0]])), 1),
    (np.array([[4.0]]), 1),
])
def test_rank_bound(G, expected):
    assert rank_bound(G) == expected


def test_rank_bound_random(rng):
    for d, n in [(2, 5), (3, 3), (4, 7), (6, 2)]:
        U = rng.standard_normal((n, d))
        assert rank_bound(build_gram(U)) == min(d, n)
    U = rng.standard_normal((3, 5))
    U = np.vstack([U, U[0] + U[1], 2 * U[2]])
    assert rank_bound(build_gram(U)) == 3
