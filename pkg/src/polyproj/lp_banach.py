"""Projections in the sequence spaces l_p, p > 1.

Outside Hilbert space there is no closed form in general, but two things
are computable:

* for coordinate halfspaces ``delta_k h_k <= eta_k`` (``|delta_k| = 1``)
  the projection clips each constrained coordinate independently,
  whatever ``p`` is;
* for finitely supported functionals a candidate ``x_bar`` can be checked:
  it is the projection iff ``x_bar = x`` on coordinates no functional
  touches and, for some support ``I`` of active constraints with a
  nonsingular coefficient block, the derivative terms
  ``|x_bar_k - x_k|^{p-2} (x_bar_k - x_k)`` equal ``-sum_{i in I} lambda_k^i nu_i``
  with ``nu > 0``.

Vectors are finite leading arrays with an implicit zero tail, so every
"for all coordinates" condition reduces to a finite one.

The same reasoning in L_p(Omega) only yields ``x_bar(t) = x(t)`` almost
everywhere off the supports of the functionals; there is no finite
representation for it here, and p = 1 is excluded because the norm has no
usable directional derivative formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .gram import cramer_numerators, det


@dataclass(frozen=True)
class LpVector:
    """Leading coordinates of an l_p sequence; every later coordinate is zero."""

    coords: np.ndarray
    p: float

    def __init__(self, coords, p):
        c = np.array(coords, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        p = float(p)
        if not p > 1.0:
            raise ValueError(f"p must be > 1, got {p}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "p", p)

    def padded(self, m: int) -> np.ndarray:
        out = np.zeros(max(m, self.coords.size))
        out[:self.coords.size] = self.coords
        return out

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coords) ** self.p) ** (1.0 / self.p))

    def __eq__(self, other):
        if not isinstance(other, LpVector):
            return NotImplemented
        m = max(self.coords.size, other.coords.size)
        return self.p == other.p and np.array_equal(self.padded(m), other.padded(m))


@dataclass(frozen=True)
class CoordinateHalfspaceSystem:
    """Constraints ``delta_k h_k <= eta_k`` for the (zero-based) coordinates in `coords`."""

    coords: tuple
    signs: tuple
    offsets: tuple

    def __init__(self, coords, signs, offsets):
        coords = tuple(int(k) for k in coords)
        signs = tuple(int(s) for s in signs)
        offsets = tuple(float(e) for e in offsets)
        if not coords:
            raise ValueError("need at least one constrained coordinate")
        if len(set(coords)) != len(coords) or min(coords) < 0:
            raise ValueError("coordinates must be distinct and nonnegative")
        if not len(coords) == len(signs) == len(offsets):
            raise ValueError("coords, signs and offsets differ in length")
        if any(abs(s) != 1 for s in signs):
            raise ValueError("every sign must be +1 or -1")
        order = np.argsort(coords)
        object.__setattr__(self, "coords", tuple(coords[i] for i in order))
        object.__setattr__(self, "signs", tuple(signs[i] for i in order))
        object.__setattr__(self, "offsets", tuple(offsets[i] for i in order))

    @property
    def n(self) -> int:
        """One past the highest constrained coordinate."""
        return self.coords[-1] + 1

    def as_functionals(self) -> "SparseFunctionalSystem":
        L = np.zeros((len(self.coords), self.n))
        for row, (k, s) in enumerate(zip(self.coords, self.signs)):
            L[row, k] = s
        return SparseFunctionalSystem(L, self.offsets)


@dataclass(frozen=True, eq=False)
class SparseFunctionalSystem:
    """Constraints ``sum_j L[i, j] h_j <= offsets[i]``; columns past ``L.shape[1]`` are zero."""

    L: np.ndarray
    offsets: np.ndarray

    def __init__(self, L, offsets):
        L = np.atleast_2d(np.array(L, dtype=float))
        eta = np.atleast_1d(np.array(offsets, dtype=float))
        if L.shape[0] != eta.shape[0]:
            raise ValueError("need one offset per functional")
        if np.any(np.all(L == 0, axis=1)):
            raise ValueError("functionals must be nonzero")
        L.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "offsets", eta)

    def free_coords(self, m: int) -> np.ndarray:
        """Boolean mask over ``range(m)`` of coordinates untouched by every functional."""
        mask = np.ones(m, dtype=bool)
        k = min(m, self.L.shape[1])
        mask[:k] = np.all(self.L[:, :k] == 0, axis=0)
        return mask

    def padded(self, m: int) -> np.ndarray:
        out = np.zeros((self.L.shape[0], max(m, self.L.shape[1])))
        out[:, :self.L.shape[1]] = self.L
        return out


def duality_terms(d, p: float) -> np.ndarray:
    """``|d|^{p-2} d`` elementwise, continuously extended by 0 at ``d = 0``."""
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    nz = d != 0
    out[nz] = np.abs(d[nz]) ** (p - 1.0) * np.sign(d[nz])
    return out


def directional_derivative_lp(u: LpVector, v: LpVector, x: LpVector) -> float:
    """Derivative of ``h -> |h - x|_p^p / p`` at `u` in direction `v`."""
    if not u.p == v.p == x.p:
        raise ValueError("all arguments must share the same p")
    m = max(u.coords.size, v.coords.size, x.coords.size)
    return float(np.dot(duality_terms(u.padded(m) - x.padded(m), u.p), v.padded(m)))


def lp_clip_project(S: CoordinateHalfspaceSystem, x: LpVector) -> LpVector:
    """Projection onto coordinate halfspaces: ``z_k = delta_k eta_k`` where ``delta_k x_k >= eta_k``."""
    z = x.padded(S.n)
    for k, s, eta in zip(S.coords, S.signs, S.offsets):
        if s * z[k] >= eta:
            z[k] = s * eta
    return LpVector(z, x.p)


@dataclass
class CandidateVerdict:
    accepted: bool
    failed_conditions: list = field(default_factory=list)
    support: tuple = ()
    multipliers: np.ndarray = None

    def as_dict(self) -> dict:
        out = {
            "accepted": self.accepted,
            "failed_conditions": [
                {"condition": c, "index": i, "magnitude": float(m)}
                for c, i, m in self.failed_conditions
            ],
        }
        if self.accepted:
            out["support"] = [i + 1 for i in self.support]
            out["multipliers"] = [float(v) for v in self.multipliers]
        return out


def _check_support(L, eta, xb, g, I, K, rest, tol, tol_pos, tol_det):
    """Failures of the coordinate, multiplier and off-support conditions for ``(I, K)``."""
    M = L[np.ix_(I, K)]
    d = det(M)
    gate = tol_det * float(np.prod(np.linalg.norm(M, axis=1)))
    if abs(d) <= gate:
        return None, [("singular", -1, abs(d))]
    fails = []
    # coordinates of x_bar on K are pinned by the active equalities
    mask = np.ones(L.shape[1], dtype=bool)
    mask[list(K)] = False
    eta_t = eta[list(I)] - L[np.ix_(I, np.flatnonzero(mask))] @ xb[mask]
    xk = cramer_numerators(M, eta_t) / d
    for k, a, b in zip(K, xk, xb[list(K)]):
        if abs(a - b) > tol * (1.0 + abs(b)):
            fails.append(("coordinate", int(k), abs(a - b)))
    xi = -g[list(K)]
    nu = cramer_numerators(M.T, xi) / d
    for i, v in zip(I, nu):
        if not v > tol_pos:
            fails.append(("multiplier", i, float(v)))
    for j in rest:
        if j in K:
            continue
        target = -float(L[list(I), j] @ nu)
        if abs(g[j] - target) > tol * (1.0 + abs(g[j])):
            fails.append(("off_support", int(j), abs(g[j] - target)))
    return nu, fails


def verify_candidate(F: SparseFunctionalSystem, x: LpVector, x_bar: LpVector,
                     tol: float = 1e-9, tol_pos: float = 1e-12,
                     tol_det: float = 1e-10) -> CandidateVerdict:
    """Decide whether `x_bar` is the l_p projection of `x` onto ``{h : F h <= eta}``.

    Active constraints are those with ``|<f_i|x_bar> - eta_i| <= tol * (1 + |eta_i|)``.
    Subsets ``I`` of them are tried from largest to smallest, paired with
    coordinate sets ``K`` (``|K| = |I|``) drawn from the supports of the
    functionals in ``I``; ``K = I`` is tried first when those coordinates
    exist. The candidate is accepted when some pair passes every condition.
    """
    if x.p != x_bar.p:
        raise ValueError("x and x_bar must share p")
    p = x.p
    m = max(x.coords.size, x_bar.coords.size, F.L.shape[1])
    L = F.padded(m)
    eta = F.offsets
    xv = x.padded(m)
    xb = x_bar.padded(m)
    band = tol * (1.0 + np.abs(eta))

    r = L @ xb - eta
    fails = [("feasibility", i, float(r[i])) for i in range(len(eta)) if r[i] > band[i]]
    free = F.free_coords(m)
    fails += [("tail", int(k), abs(xb[k] - xv[k])) for k in np.flatnonzero(free)
              if abs(xb[k] - xv[k]) > tol * (1.0 + abs(xv[k]))]
    if fails:
        return CandidateVerdict(False, fails)

    if np.all(L @ xv - eta <= band):
        gap = np.abs(xb - xv)
        bad = [("identity", int(k), float(gap[k])) for k in np.flatnonzero(gap > tol * (1.0 + np.abs(xv)))]
        return CandidateVerdict(not bad, bad)

    g = duality_terms(xb - xv, p)
    rest = np.flatnonzero(~free)
    active = [i for i in range(len(eta)) if abs(r[i]) <= band[i]]
    if not active:
        return CandidateVerdict(False, [("active", -1, 0.0)])

    best = None
    for size in range(len(active), 0, -1):
        for I in itertools.combinations(active, size):
            cols = sorted(set(np.flatnonzero(np.any(L[list(I)] != 0, axis=0))))
            pairs = itertools.combinations(cols, size)
            if set(I) <= set(cols):
                pairs = itertools.chain([tuple(I)], (K for K in pairs if K != tuple(I)))
            for K in pairs:
                nu, f = _check_support(L, eta, xb, g, list(I), list(K), rest, tol, tol_pos, tol_det)
                if nu is not None and not f:
                    return CandidateVerdict(True, [], tuple(I), nu)
                if nu is not None and (best is None or len(f) < len(best)):
                    best = f
    return CandidateVerdict(False, best or [("singular", -1, 0.0)])
