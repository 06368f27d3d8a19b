"""Gram matrices of halfspace normals and the cofactor multiplier formulas.

For a support ``I`` with ``det G[I, I] != 0`` the scaled multipliers

    nu_i = sum_{j in I} w_j B_I^j B_I^i det G[I \\ j, I \\ i]          (i in I)

satisfy ``nu / det G[I, I] = solve(G[I, I], w[I])``, and for ``i' not in I``

    nu_i' = sum_{j in I + [i']} w_j B_I^j B_I^i' det G[I, (I + [i']) \\ j]

equals ``det G[I, I]`` times the residual of constraint ``i'`` at the
candidate point. The elimination path (:func:`solve_principal`) is what the
projector uses; the cofactor path is kept literal so it can be checked
against it.

Index sets are zero-based, strictly ascending tuples of ints.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import Polyhedron

DEFAULT_TOL_DET = 1e-10


def build_gram(P_or_normals) -> np.ndarray:
    """Matrix of pairwise inner products of the normals, symmetric by construction."""
    if isinstance(P_or_normals, Polyhedron):
        U = P_or_normals.normals
    else:
        U = np.atleast_2d(np.asarray(P_or_normals, dtype=float))
    G = U @ U.T
    G = np.triu(G) + np.triu(G, 1).T
    G.setflags(write=False)
    return G


def as_index_set(indices, n: int | None = None) -> tuple:
    idx = tuple(int(i) for i in indices)
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"index set must be strictly ascending: {idx}")
    if n is not None and idx and (idx[0] < 0 or idx[-1] >= n):
        raise IndexError(f"index set {idx} out of range for n={n}")
    return idx


def det(M) -> float:
    """Determinant by LU factorization with partial pivoting; 1 for a 0x0 matrix."""
    M = np.asarray(M, dtype=float)
    if M.shape[0] == 0:
        return 1.0
    if M.shape == (1, 1):
        return float(M[0, 0])
    return float(np.linalg.det(M))


def subdet(G, rows: Sequence[int], cols: Sequence[int]) -> float:
    """Determinant of ``G[rows, cols]`` with indices taken in the given order.

    Callers pass ascending index sets; the one exception is :func:`nu_out`,
    which keeps the extra column last.
    """
    rows = list(rows)
    cols = list(cols)
    if len(rows) != len(cols):
        raise ValueError(f"submatrix is not square: {len(rows)}x{len(cols)}")
    if not rows:
        raise ValueError("submatrix must be at least 1x1")
    G = np.asarray(G)
    return det(G[np.ix_(rows, cols)])


def singularity_threshold(G, I: Sequence[int], tol_det: float = DEFAULT_TOL_DET) -> float:
    """Scale-invariant gate: ``tol_det * prod_{i in I} G[i, i]``."""
    d = np.diag(np.asarray(G))[list(I)]
    return tol_det * float(np.prod(d))


def is_nonsingular(G, I: Sequence[int], tol_det: float = DEFAULT_TOL_DET) -> tuple:
    """Return ``(passes_gate, det G[I, I])``."""
    d = subdet(G, I, I)
    return abs(d) > singularity_threshold(G, I, tol_det), d


def sign_factor(I: Sequence[int], a: int) -> int:
    """``(-1)^{#{b in I : b <= a}}`` if ``a`` is in ``I``, else ``(-1)^{|I|+1}``."""
    I = tuple(I)
    if a in I:
        return -1 if sum(1 for b in I if b <= a) % 2 else 1
    return -1 if (len(I) + 1) % 2 else 1


def nu_in(G, w, I: Sequence[int]) -> np.ndarray:
    """Scaled support multipliers by the cofactor formula (not divided by det)."""
    I = as_index_set(I)
    if not I:
        raise ValueError("support must be nonempty")
    w = np.asarray(w, dtype=float)
    if len(I) == 1:
        return np.array([w[I[0]]])
    out = np.empty(len(I))
    for pos, i in enumerate(I):
        rest_i = [k for k in I if k != i]
        total = 0.0
        for j in I:
            rest_j = [k for k in I if k != j]
            total += w[j] * sign_factor(I, j) * sign_factor(I, i) * subdet(G, rest_j, rest_i)
        out[pos] = total
    return out


def nu_out(G, w, I: Sequence[int], iprime: int) -> float:
    """Scaled feasibility coefficient of a non-support constraint.

    The sign factor ``B_I^{i'} = (-1)^{|I|+1}`` treats ``i'`` as appended after
    the members of ``I``, so the column ``i'`` is kept in the trailing position
    of ``G[I, (I + [i']) \\ j]``. With that ordering the value equals
    ``det G[I, I] * (<x_bar|u_i'> - eta_i')`` for every interleaving.
    """
    I = as_index_set(I)
    if not I:
        raise ValueError("support must be nonempty")
    if iprime in I:
        raise ValueError(f"index {iprime} belongs to the support")
    w = np.asarray(w, dtype=float)
    b_out = sign_factor(I, iprime)
    total = w[iprime] * b_out * b_out * subdet(G, I, I)
    for j in I:
        cols = [k for k in I if k != j] + [iprime]
        total += w[j] * sign_factor(I, j) * b_out * subdet(G, I, cols)
    return total


def cramer_numerators(M, rhs) -> np.ndarray:
    """Adjugate applied to ``rhs``: ``sum_k rhs_k (-1)^{k+i} det M[~k, ~i]``.

    Dividing by ``det(M)`` gives the solution of ``M z = rhs``.
    """
    M = np.asarray(M, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    m = M.shape[0]
    if M.shape != (m, m) or rhs.shape != (m,):
        raise ValueError("need a square matrix and a matching right-hand side")
    if m == 1:
        return rhs.copy()
    out = np.empty(m)
    idx = list(range(m))
    for i in range(m):
        cols = idx[:i] + idx[i + 1:]
        total = 0.0
        for k in range(m):
            rows = idx[:k] + idx[k + 1:]
            sign = -1.0 if (i + k) % 2 else 1.0
            total += rhs[k] * sign * det(M[np.ix_(rows, cols)])
        out[i] = total
    return out


def solve_principal(G, w, I: Sequence[int]) -> np.ndarray:
    """Solve ``G[I, I] z = w[I]`` by elimination with partial pivoting."""
    I = list(I)
    A = np.asarray(G)[np.ix_(I, I)]
    b = np.asarray(w, dtype=float)[I]
    if len(I) == 1:
        return b / A[0, 0]
    return np.linalg.solve(A, b)


def rank_bound(G, tol_det: float = DEFAULT_TOL_DET) -> int:
    """Numerical rank of a Gram matrix.

    Greedy diagonal pivoting: at each step the normal with the largest
    relative distance to the span of those already chosen is added, as long
    as the normalized principal minor ``det G[I, I] / prod G[i, i]`` of the
    chosen set stays above ``tol_det``.
    """
    if tol_det < 0:
        raise ValueError("tol_det must be nonnegative")
    S = np.array(G, dtype=float)
    n = S.shape[0]
    norms = np.diag(S).copy()
    remaining = list(range(n))
    ratio = 1.0
    rank = 0
    while remaining:
        rel = np.array([S[k, k] / norms[k] for k in remaining])
        best = int(np.argmax(rel))
        if ratio * rel[best] <= tol_det:
            break
        k = remaining.pop(best)
        ratio *= rel[best]
        rank += 1
        piv = S[k, k]
        col = S[:, k].copy()
        S -= np.outer(col, col) / piv
    return rank
