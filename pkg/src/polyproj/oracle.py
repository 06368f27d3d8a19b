"""Independent checks for projections onto polyhedra.

Nothing here touches determinants, multiplier formulas or support search;
only the vector primitives from :mod:`polyproj.core` are shared with the
projector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import lsq_linear

from .core import Polyhedron, feasibility_scale, project_halfspace, residuals


class MaxItersExceeded(RuntimeError):
    def __init__(self, message, iterate):
        super().__init__(message)
        self.iterate = iterate


@dataclass
class DykstraState:
    iterate: np.ndarray
    corrections: np.ndarray
    iterations: int = 0
    displacement: float = np.inf


def dykstra(P: Polyhedron, x, tol: float = 1e-10, max_iters: int = 200_000,
            return_state: bool = False):
    """Cyclic Dykstra projection onto the intersection of the halfspaces of `P`.

    One iteration is a full sweep over the halfspaces. The loop stops when a
    sweep moves the iterate and the correction terms by less than `tol`
    in total.

    Parameters
    ----------
    P : Polyhedron
    x : array_like
        Point to project.
    tol : float
        Stopping threshold on the per-sweep movement.
    max_iters : int
        Maximum number of sweeps.
    return_state : bool
        Return the final :class:`DykstraState` instead of the point.

    Raises
    ------
    MaxItersExceeded
        When `max_iters` sweeps do not meet the tolerance; the last iterate
        is attached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    y = np.array(x, dtype=float)
    if y.shape != (P.dim,):
        raise ValueError(f"point must have dimension {P.dim}")
    state = DykstraState(y, np.zeros((P.n, P.dim)))
    hs = P.halfspaces
    e = state.corrections
    for it in range(1, max_iters + 1):
        start = y.copy()
        moved = 0.0
        for i, h in enumerate(hs):
            z = y + e[i]
            y = project_halfspace(h, z)
            new_e = z - y
            moved += float(np.sum(np.abs(new_e - e[i])))
            e[i] = new_e
        state.iterate = y
        state.iterations = it
        state.displacement = float(np.linalg.norm(y - start))
        if state.displacement + moved < tol:
            return state if return_state else y
    raise MaxItersExceeded(f"Dykstra did not reach tol={tol} in {max_iters} sweeps", y)


@dataclass
class Verdict:
    accepted: bool
    violations: list = field(default_factory=list)
    seed: Optional[int] = None
    witness: Optional[np.ndarray] = None

    @property
    def conditions(self) -> list:
        return sorted({v[0] for v in self.violations})

    def as_dict(self) -> dict:
        out = {
            "accepted": self.accepted,
            "violations": [
                {"condition": c, "index": i, "magnitude": float(m)} for c, i, m in self.violations
            ],
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def kkt_verify(P: Polyhedron, x, x_bar, certificate=None, tol: float = 1e-9,
               tol_pos: float = 0.0) -> Verdict:
    """Check a projection certificate against the Kuhn-Tucker conditions.

    Four conditions are recomputed from the raw data: strictly positive
    multipliers on the support ("positivity"), feasibility of `x_bar`
    ("feasibility"), equality of every support constraint ("active"), and
    ``x - x_bar = sum nu_i u_i`` ("stationarity"). Constraint residuals are
    measured against ``tol * (1 + |eta_i|)``, stationarity against
    ``tol * (1 + |x|)``. An absent certificate means an empty support.

    Index entries in the returned violations are zero-based; stationarity
    carries index ``-1``.
    """
    x = np.asarray(x, dtype=float)
    x_bar = np.asarray(x_bar, dtype=float)
    if certificate is None:
        support, nu = (), np.zeros(0)
    else:
        support = tuple(int(i) for i in certificate.support)
        nu = np.asarray(certificate.multipliers, dtype=float)
    if len(support) != len(nu):
        raise ValueError("certificate support and multipliers differ in length")
    if any(i < 0 or i >= P.n for i in support):
        raise IndexError("certificate index out of range")

    bad = []
    for i, v in zip(support, nu):
        if not v > tol_pos:
            bad.append(("positivity", i, float(v)))
    r = residuals(P, x_bar)
    band = tol * feasibility_scale(P.offsets)
    for i in range(P.n):
        if r[i] > band[i]:
            bad.append(("feasibility", i, float(r[i])))
    for i in support:
        if abs(r[i]) > band[i]:
            bad.append(("active", i, float(abs(r[i]))))
    combo = np.zeros_like(x)
    for i, v in zip(support, nu):
        combo = combo + v * P.halfspaces[i].normal
    gap = float(np.linalg.norm(x - x_bar - combo))
    if gap > tol * (1.0 + float(np.linalg.norm(x))):
        bad.append(("stationarity", -1, gap))
    return Verdict(not bad, bad)


def vi_spot_check(P: Polyhedron, x, x_bar, samples: int = 100, seed: int = 0,
                  tol: float = 1e-8, dykstra_tol: float = 1e-12) -> Verdict:
    """Sample feasible points ``h`` and test ``<x - x_bar | h - x_bar> <= tol * scale``.

    Any violation disproves optimality of `x_bar`; passing is evidence only.
    Half of the samples are random perturbations of `x_bar`, the other half
    are pushed towards `x` before being made feasible, which is where a
    wrong candidate is most easily exposed. Feasible points come from
    :func:`dykstra`.
    """
    x = np.asarray(x, dtype=float)
    x_bar = np.asarray(x_bar, dtype=float)
    rng = np.random.default_rng(seed)
    d = x - x_bar
    radius = max(float(np.linalg.norm(d)), 1.0)
    scale = 1.0 + float(np.linalg.norm(d)) * radius
    bad = []
    witness = None
    for s in range(samples):
        step = rng.standard_normal(P.dim)
        step *= radius * rng.uniform(0.01, 1.0) / max(float(np.linalg.norm(step)), 1e-300)
        trial = x_bar + step
        if s % 2:
            trial = trial + rng.uniform(0.0, 1.0) * d
        try:
            h = dykstra(P, trial, tol=dykstra_tol)
        except MaxItersExceeded as exc:
            raise RuntimeError("could not produce a feasible sample point") from exc
        gap = float(np.dot(d, h - x_bar))
        if gap > tol * scale:
            bad.append(("variational", s, gap))
            if witness is None:
                witness = h
    return Verdict(not bad, bad, seed=seed, witness=witness)


@dataclass(frozen=True)
class Certificate:
    """Support and multipliers of a candidate, in the shape :func:`kkt_verify` reads."""

    support: tuple
    multipliers: np.ndarray


def reconstruct_certificate(P: Polyhedron, x, candidate, tol: float = 1e-9) -> Optional[Certificate]:
    """Best nonnegative multipliers on the candidate's active set.

    Solves ``min |x - candidate - sum nu_i u_i|`` over ``nu >= 0`` restricted
    to constraints that hold with equality at `candidate`, then drops zero
    multipliers. Returns None for an empty support.
    """
    x = np.asarray(x, dtype=float)
    c = np.asarray(candidate, dtype=float)
    r = residuals(P, c)
    active = np.flatnonzero(np.abs(r) <= tol * feasibility_scale(P.offsets))
    d = x - c
    if active.size == 0 or not np.any(d != 0):
        return None
    # bounded-variable least squares; scipy's nnls misses the optimum on some
    # small, nearly dependent systems
    fit = lsq_linear(P.normals[active].T, d, bounds=(0.0, np.inf), method="bvls", tol=1e-15)
    nu = np.where(fit.x > 0, fit.x, 0.0)
    keep = nu > 0
    if not keep.any():
        return None
    return Certificate(tuple(int(i) for i in active[keep]), nu[keep])
