"""Vectors, halfspaces and polyhedra in a finite coordinate realization.

A point of the ambient space is a one-dimensional float array. The
projection of ``x`` onto an intersection of halfspaces always lies in
``x + span{u_1, ..., u_n}``, so nothing is lost by working with finite
coordinates.

Indices are zero-based throughout the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when vectors of different dimension are combined."""


def as_vector(values, name: str = "vector") -> np.ndarray:
    """Return `values` as a finite, one-dimensional float array."""
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite coordinates")
    arr.setflags(write=False)
    return arr


def inner(a, b) -> float:
    """Standard scalar product of two coordinate vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


@dataclass(frozen=True)
class Halfspace:
    """The set ``{h : <h|normal> <= offset}``."""

    normal: np.ndarray
    offset: float

    def __init__(self, normal, offset):
        u = as_vector(normal, "normal")
        if not np.any(u != 0.0):
            raise ValueError("halfspace normal must be nonzero")
        eta = float(offset)
        if not np.isfinite(eta):
            raise ValueError("halfspace offset must be finite")
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "offset", eta)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Halfspace):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.normal, other.normal)

    def __hash__(self):
        return hash((self.normal.tobytes(), self.offset))


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """Finite intersection of halfspaces, kept in a fixed index order."""

    halfspaces: tuple

    def __init__(self, halfspaces: Iterable[Halfspace]):
        hs = tuple(halfspaces)
        if not hs:
            raise ValueError("a polyhedron needs at least one halfspace")
        dims = {h.dim for h in hs}
        if len(dims) != 1:
            raise DimensionError(f"halfspace normals have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "halfspaces", hs)
        normals = np.vstack([h.normal for h in hs])
        normals.setflags(write=False)
        offsets = np.array([h.offset for h in hs])
        offsets.setflags(write=False)
        object.__setattr__(self, "_normals", normals)
        object.__setattr__(self, "_offsets", offsets)

    @classmethod
    def from_arrays(cls, normals, offsets) -> "Polyhedron":
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
        if normals.shape[0] != offsets.shape[0]:
            raise DimensionError("need one offset per normal")
        return cls(Halfspace(u, eta) for u, eta in zip(normals, offsets))

    @property
    def normals(self) -> np.ndarray:
        """Matrix whose row ``i`` is the normal of halfspace ``i``."""
        return self._normals

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    @property
    def n(self) -> int:
        return len(self.halfspaces)

    @property
    def dim(self) -> int:
        return self._normals.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.halfspaces == other.halfspaces


def _check_point(P: Polyhedron, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (P.dim,):
        raise DimensionError(f"point has shape {x.shape}, polyhedron lives in R^{P.dim}")
    return x


def residuals(P: Polyhedron, x) -> np.ndarray:
    """Constraint residuals ``w_i = <x|u_i> - eta_i``; ``x`` is in P iff all are <= 0."""
    x = _check_point(P, x)
    return P.normals @ x - P.offsets


def feasibility_scale(offsets) -> np.ndarray:
    """Per-constraint scale ``1 + |eta_i|`` used by every feasibility tolerance."""
    return 1.0 + np.abs(np.asarray(offsets, dtype=float))


def contains(P: Polyhedron, x, tol: float = 0.0) -> bool:
    """Membership test with the scaled band ``w_i <= tol * (1 + |eta_i|)``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    w = residuals(P, x)
    return bool(np.all(w <= tol * feasibility_scale(P.offsets)))


def project_halfspace(hs: Halfspace, x) -> np.ndarray:
    """Closed-form projection onto a single halfspace."""
    x = np.asarray(x, dtype=float)
    if x.shape != hs.normal.shape:
        raise DimensionError(f"dimension mismatch: {x.shape} vs {hs.normal.shape}")
    u = hs.normal
    excess = float(np.dot(x, u)) - hs.offset
    if excess <= 0.0:
        return x.copy()
    return x - (excess / float(np.dot(u, u))) * u


def combination(normals: np.ndarray, coeffs: Sequence[float], support: Sequence[int]) -> np.ndarray:
    """``sum_k coeffs[k] * normals[support[k]]``; zero vector for an empty support."""
    support = list(support)
    if not support:
        return np.zeros(normals.shape[1])
    return np.asarray(coeffs, dtype=float) @ normals[support]
