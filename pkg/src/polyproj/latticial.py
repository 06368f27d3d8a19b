"""Projection onto latticial cones and the Moreau decomposition.

A latticial cone ``K = cone{b_1, ..., b_n}`` in ``R^n`` has linearly
independent generators. Its polar is generated by the dual vectors ``u_j``
with ``<u_j|b_i> = -delta_ij``, and ``x`` lies in ``K`` iff ``<x|u_i> <= 0``
for every ``i``. So ``K`` is the polyhedron ``{h : <h|u_i> <= 0}`` and the
closed-form projector applies directly.

For ``x`` outside ``K`` exactly one support ``I`` gives

    x = sum_{i not in I} alpha_i b_i + sum_{j in I} beta_j u_j,
    alpha >= 0, beta > 0,

and then ``P_K x = sum alpha_i b_i`` while ``beta`` equals the projector's
multipliers on ``I``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import Polyhedron, as_vector
from .projector import SearchConfig, project

MAX_CONDITION = 1e12
# The duals are independent once the basis passes MAX_CONDITION, so the
# Hadamard-ratio determinant gate of the generic search would only reject
# genuine supports of moderately skewed cones.
CONE_CONFIG = SearchConfig(tol_det=0.0)


class SingularBasisError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LatticialCone:
    """Cone generated by the rows of a nonsingular square matrix."""

    basis: np.ndarray

    def __init__(self, basis):
        B = np.atleast_2d(np.array(basis, dtype=float))
        n = B.shape[0]
        if B.shape != (n, n):
            raise SingularBasisError(f"basis must be square, got shape {B.shape}")
        if not np.all(np.isfinite(B)):
            raise SingularBasisError("basis has non-finite entries")
        cond = np.linalg.cond(B)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise SingularBasisError(f"basis is singular or too ill-conditioned (cond={cond:.3g})")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "_duals", _solve_duals(B))

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def duals(self) -> np.ndarray:
        """Rows are the dual generators ``u_j``."""
        return self._duals

    def polyhedron(self) -> Polyhedron:
        return Polyhedron.from_arrays(self._duals, np.zeros(self.n))


def _solve_duals(B: np.ndarray) -> np.ndarray:
    # B @ u_j = -e_j for every j; one factorization, n right-hand sides
    U = np.linalg.solve(B, -np.eye(B.shape[0])).T
    U.setflags(write=False)
    return U


def dual_generators(K: LatticialCone) -> np.ndarray:
    """Dual vectors with ``<u_j|b_i> = -delta_ij`` (rows of the result)."""
    return K.duals


def cone_membership(K: LatticialCone, x, tol: float = 0.0) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(K.duals @ x <= tol))


@dataclass(frozen=True)
class MoreauSplit:
    y: np.ndarray
    z: np.ndarray
    support: tuple
    multipliers: np.ndarray


def project_cone(K: LatticialCone, x, cfg: SearchConfig = CONE_CONFIG,
                 tol: float = 1e-10) -> MoreauSplit:
    """``y = P_K x`` through the closed-form projector and ``z = x - y = P_{K polar} x``.

    Raises ArithmeticError if the orthogonality ``<y|z> = 0`` fails by more
    than ``tol * |y| |z|`` (plus rounding at the scale of ``x``).
    """
    x = as_vector(x, "x")
    if x.shape != (K.n,):
        raise ValueError(f"point must have dimension {K.n}")
    res = project(K.polyhedron(), x, cfg)
    y = res.point
    z = x - y
    if res.certificate is None:
        support, nu = (), np.zeros(0)
    else:
        support, nu = res.certificate.support, res.certificate.multipliers
    scale = float(np.linalg.norm(x))
    inner = abs(float(np.dot(y, z)))
    if inner > tol * (float(np.linalg.norm(y) * np.linalg.norm(z)) + scale * scale):
        # Gram solves lose roughly cond(basis)**2 in relative accuracy
        raise ArithmeticError(
            f"Moreau orthogonality failed (|<y|z>| = {inner:.3g}, "
            f"basis condition {np.linalg.cond(K.basis):.3g})")
    return MoreauSplit(y, z, support, nu)


@dataclass(frozen=True)
class MixedRepresentation:
    """``x = sum_{i in complement} alpha_i b_i + sum_{j in support} beta_j u_j``.

    `alpha` is indexed by `complement`, `beta` by `support`; both zero-based.
    `beta_solved` holds the coefficients on the duals recovered from the
    mixed linear system, for comparison with `beta`.
    """

    support: tuple
    complement: tuple
    alpha: np.ndarray
    beta: np.ndarray
    beta_solved: np.ndarray

    def projection(self, K: LatticialCone) -> np.ndarray:
        return self.alpha @ K.basis[list(self.complement)] if self.complement else np.zeros(K.n)

    def polar_part(self, K: LatticialCone) -> np.ndarray:
        return self.beta @ K.duals[list(self.support)] if self.support else np.zeros(K.n)


def _mixed_solve(K: LatticialCone, x, I):
    """Coefficients of ``x`` over ``{b_i}_{i not in I} + {u_j}_{j in I}``."""
    comp = tuple(i for i in range(K.n) if i not in I)
    M = np.vstack([K.basis[list(comp)], K.duals[list(I)]]) if comp and I else (
        K.basis if not I else K.duals[list(I)])
    try:
        c = np.linalg.solve(M.T, x)
    except np.linalg.LinAlgError as exc:
        raise SingularBasisError(f"mixed basis for support {I} is singular") from exc
    return comp, c[:len(comp)], c[len(comp):]


def mixed_representation(K: LatticialCone, x, cfg: SearchConfig = CONE_CONFIG) -> MixedRepresentation:
    """Mixed generator/dual representation read off the projector's certificate.

    `beta` is the certificate's multiplier vector itself; `alpha` comes from
    solving the mixed system. Raises ArithmeticError when the sign pattern
    ``alpha >= 0, beta > 0`` does not hold within tolerance.
    """
    x = as_vector(x, "x")
    split = project_cone(K, x, cfg)
    I = tuple(split.support)
    comp, alpha, beta_solved = _mixed_solve(K, x, I)
    scale = 1e-9 * (1.0 + float(np.linalg.norm(x)))
    if np.any(alpha < -scale):
        raise ArithmeticError(f"negative generator coefficient {alpha.min():.3g}")
    if np.any(split.multipliers <= 0):
        raise ArithmeticError("nonpositive dual coefficient")
    return MixedRepresentation(I, comp, alpha, split.multipliers, beta_solved)


def exhaustive_supports(K: LatticialCone, x, tol: float = 1e-10) -> list:
    """Every ``I`` (including the empty and the full set) whose mixed coefficients have
    ``alpha >= -tol`` and ``beta > tol``. Independent of the projector."""
    x = np.asarray(x, dtype=float)
    hits = []
    for k in range(K.n + 1):
        for I in itertools.combinations(range(K.n), k):
            _, alpha, beta = _mixed_solve(K, x, I)
            if np.all(alpha >= -tol) and np.all(beta > tol):
                hits.append(I)
    return hits
