"""Seeded random problem instances with a nonempty feasible set."""

from __future__ import annotations

import numpy as np

from .core import Polyhedron


def random_polyhedron(rng: np.random.Generator, dim: int, n: int, slack: float = 1.0):
    """Halfspaces that all contain a random interior point.

    Offsets are ``<interior|u_i> + s_i`` with ``s_i`` uniform on ``(0, slack]``.
    Returns ``(polyhedron, interior_point)``.
    """
    U = rng.standard_normal((n, dim))
    interior = rng.standard_normal(dim)
    eta = U @ interior + rng.uniform(0.0, slack, n) + 1e-3 * slack
    return Polyhedron.from_arrays(U, eta), interior


def random_instance(rng: np.random.Generator, dim: int, n: int, spread: float = 3.0):
    """A random polyhedron and a point drawn around it (usually outside)."""
    P, interior = random_polyhedron(rng, dim, n)
    x = interior + spread * rng.standard_normal(dim)
    return P, x


def redundant_instance(rng: np.random.Generator, dim: int, n_base: int, n_copies: int,
                       spread: float = 3.0):
    """Instance whose extra normals duplicate or rescale base normals.

    Every copy is ``c * u_k`` with offset ``c * eta_k`` for a positive
    ``c``, so the feasible set is unchanged while the Gram matrix becomes
    singular and several supports can represent the same projection.
    """
    P, interior = random_polyhedron(rng, dim, n_base)
    U = list(P.normals)
    eta = list(P.offsets)
    for _ in range(n_copies):
        k = int(rng.integers(n_base))
        c = float(rng.choice([1.0, 2.0, 0.5, rng.uniform(0.2, 3.0)]))
        U.append(c * P.normals[k])
        eta.append(c * P.offsets[k])
    order = rng.permutation(len(U))
    P = Polyhedron.from_arrays(np.array(U)[order], np.array(eta)[order])
    x = interior + spread * rng.standard_normal(dim)
    return P, x


def instance_stream(seed: int, count: int, dims=(2, 10), ns=(1, 8)):
    """Yield ``count`` instances with dimension and halfspace count drawn from the given ranges."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        dim = int(rng.integers(dims[0], dims[1] + 1))
        n = int(rng.integers(ns[0], ns[1] + 1))
        yield random_instance(rng, dim, n)
