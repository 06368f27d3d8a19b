"""Finite closed-form projection onto an intersection of halfspaces.

The projection of ``x`` not in ``C`` is ``x - sum_{i in I} nu_i u_i`` for a
support ``I`` whose Gram block is nonsingular, whose complementarity system
``G[I, I] nu = w[I]`` has a strictly positive solution and whose candidate
point satisfies every constraint outside ``I``. Such a support always exists
when ``C`` is nonempty, so enumerating the nonempty subsets of the index set
finds it in finitely many steps.

Supports are visited by increasing cardinality and lexicographically within
a cardinality; the first accepted one is returned. With ``workers > 1`` each
cardinality tier is split across threads and the lexicographically smallest
acceptance of the tier wins, which reproduces the sequential answer.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import gram
from .core import Polyhedron, feasibility_scale, residuals

DEFAULT_MAX_HALFSPACES = 24


class NoCertificateError(RuntimeError):
    """No support passed every check.

    Either the polyhedron is empty (which the method cannot detect) or the
    tolerances are too tight. ``diagnostics`` holds the search counters and
    the closest near miss.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SubsetCapError(ValueError):
    """Too many halfspaces for exhaustive support enumeration."""


class SingularSystemError(ArithmeticError):
    """A gated complementarity system turned out singular."""


@dataclass(frozen=True)
class SearchConfig:
    """Tolerances and search controls.

    tol_feas : a residual ``r_i`` counts as satisfied when ``r_i <= tol_feas * (1 + |eta_i|)``.
    tol_pos : multipliers must exceed this to count as strictly positive.
    tol_det : singularity gate, ``|det G[I, I]| <= tol_det * prod G[i, i]`` means singular.
    max_card : optional user cap on the support size (the Gram rank is always a cap).
    workers : thread count for the per-tier search.
    max_halfspaces : refuse larger problems.
    """

    tol_feas: float = 1e-9
    tol_pos: float = 1e-12
    tol_det: float = gram.DEFAULT_TOL_DET
    max_card: Optional[int] = None
    workers: int = 1
    max_halfspaces: int = DEFAULT_MAX_HALFSPACES

    def __post_init__(self):
        for name in ("tol_feas", "tol_pos", "tol_det"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.max_card is not None and self.max_card < 1:
            raise ValueError("max_card must be >= 1")


@dataclass(frozen=True)
class SupportCertificate:
    support: tuple
    multipliers: np.ndarray
    det_GII: float
    residual_bound: Optional[float]

    def as_dict(self, one_based: bool = True) -> dict:
        shift = 1 if one_based else 0
        return {
            "support": [i + shift for i in self.support],
            "multipliers": [float(v) for v in self.multipliers],
            "det_GII": float(self.det_GII),
            "residual_bound": None if self.residual_bound is None else float(self.residual_bound),
        }


@dataclass
class SearchStats:
    subsets_examined: int = 0
    singular_skipped: int = 0
    solves_rejected: int = 0
    feasibility_rejected: int = 0

    def merge(self, other: "SearchStats") -> None:
        self.subsets_examined += other.subsets_examined
        self.singular_skipped += other.singular_skipped
        self.solves_rejected += other.solves_rejected
        self.feasibility_rejected += other.feasibility_rejected

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    certificate: Optional[SupportCertificate]
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def support(self) -> tuple:
        return () if self.certificate is None else self.certificate.support


@dataclass(frozen=True)
class GramSupport:
    support: tuple
    multipliers: np.ndarray


FEASIBLE = "FEASIBLE"


def solve_support(G, w, I: Sequence[int], tol_pos: float = 1e-12):
    """Positive solution of ``G[I, I] nu = w[I]``, or None when some ``nu_k <= tol_pos``."""
    try:
        nu = gram.solve_principal(G, w, I)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"complementarity system on {tuple(I)} is singular") from exc
    if not np.all(np.isfinite(nu)):
        raise SingularSystemError(f"complementarity system on {tuple(I)} is singular")
    if np.any(nu <= tol_pos):
        return None
    return nu


def feasibility_check(P: Polyhedron, x, I: Sequence[int], nu, tol_feas: float = 1e-9):
    """Candidate ``x - sum nu_i u_i`` if it satisfies every constraint outside ``I``, else None."""
    x_bar, worst = _candidate(P, x, I, nu)
    if worst is not None and worst > tol_feas:
        return None
    return x_bar


def _candidate(P: Polyhedron, x, I, nu):
    """Candidate point and the largest scaled off-support violation (None if I is everything)."""
    I = list(I)
    x_bar = np.asarray(x, dtype=float) - np.asarray(nu) @ P.normals[I]
    out = np.ones(P.n, dtype=bool)
    out[I] = False
    if not out.any():
        return x_bar, None
    r = (P.normals[out] @ x_bar - P.offsets[out]) / feasibility_scale(P.offsets[out])
    return x_bar, float(r.max())


def enumerate_supports(n: int, max_card: int) -> Iterator[tuple]:
    """Nonempty subsets of ``range(n)`` by cardinality, lexicographic within each."""
    for k in range(1, min(n, max_card) + 1):
        yield from itertools.combinations(range(n), k)


def _card_cap(G, cfg: SearchConfig) -> int:
    cap = gram.rank_bound(G, cfg.tol_det)
    if cfg.max_card is not None:
        cap = min(cap, cfg.max_card)
    return cap


def _check_size(n: int, cfg: SearchConfig) -> None:
    if n > cfg.max_halfspaces:
        raise SubsetCapError(
            f"{n} halfspaces exceed the enumeration cap of {cfg.max_halfspaces} "
            f"({2 ** n - 1} candidate supports); raise max_halfspaces explicitly "
            "or use oracle.dykstra for an iterative approximation"
        )


# An evaluator maps a support to (status, multipliers, det, violation).
_ACCEPT, _SINGULAR, _NEG, _INFEAS = "accept", "singular", "nonpositive", "infeasible"


def _make_evaluator(G, w, cfg: SearchConfig, violation: Callable) -> Callable:
    def evaluate(I):
        ok, d = gram.is_nonsingular(G, I, cfg.tol_det)
        if not ok or d <= 0:
            return _SINGULAR, None, d, None
        nu = solve_support(G, w, I, cfg.tol_pos)
        if nu is None:
            return _NEG, None, d, None
        worst = violation(I, nu)
        if worst is not None and worst > cfg.tol_feas:
            return _INFEAS, nu, d, worst
        return _ACCEPT, nu, d, worst

    return evaluate


def _scan(evaluate, supports, stats: SearchStats, near: dict, stop_first: bool = True):
    """Evaluate supports in order; return accepted (I, nu, det, worst) tuples."""
    found = []
    for I in supports:
        stats.subsets_examined += 1
        status, nu, d, worst = evaluate(I)
        if status == _SINGULAR:
            stats.singular_skipped += 1
        elif status == _NEG:
            stats.solves_rejected += 1
        elif status == _INFEAS:
            stats.feasibility_rejected += 1
            if near.get("violation") is None or worst < near["violation"]:
                near.update(support=I, violation=worst, multipliers=nu)
        else:
            found.append((I, nu, d, worst))
            if stop_first:
                break
    return found


def _search(n: int, evaluate, cap: int, workers: int, stats: SearchStats):
    near: dict = {}
    for k in range(1, min(n, cap) + 1):
        tier = itertools.combinations(range(n), k)
        if workers == 1:
            found = _scan(evaluate, tier, stats, near)
            if found:
                return found[0], near
            continue
        tier = list(tier)
        size = math.ceil(len(tier) / workers)
        chunks = [tier[i:i + size] for i in range(0, len(tier), size)]
        parts = [(SearchStats(), {}) for _ in chunks]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda args: _scan(evaluate, args[0], args[1][0], args[1][1]),
                zip(chunks, parts),
            ))
        for part_stats, part_near in parts:
            stats.merge(part_stats)
            v = part_near.get("violation")
            if v is not None and (near.get("violation") is None or v < near["violation"]):
                near.update(part_near)
        # chunks are contiguous lexicographic ranges, so the first nonempty one holds the minimum
        for found in results:
            if found:
                return found[0], near
    return None, near


def _no_certificate(stats: SearchStats, near: dict, cap: int) -> NoCertificateError:
    diag = {"stats": stats.as_dict(), "cardinality_cap": cap}
    if near:
        diag["near_miss"] = {
            "support": list(near["support"]),
            "violation": near["violation"],
            "multipliers": [float(v) for v in near["multipliers"]],
        }
    return NoCertificateError(
        "no support passed the complementarity and feasibility checks; "
        "the polyhedron may be empty or the tolerances too tight",
        diag,
    )


def project(P: Polyhedron, x, cfg: SearchConfig = SearchConfig()) -> ProjectionResult:
    """Project ``x`` onto ``P`` and return the point with its support certificate."""
    _check_size(P.n, cfg)
    x = np.asarray(x, dtype=float)
    w = residuals(P, x)
    if np.all(w <= cfg.tol_feas * feasibility_scale(P.offsets)):
        return ProjectionResult(x.copy(), None, SearchStats())
    G = gram.build_gram(P)
    cap = _card_cap(G, cfg)

    def violation(I, nu):
        return _candidate(P, x, I, nu)[1]

    stats = SearchStats()
    hit, near = _search(P.n, _make_evaluator(G, w, cfg, violation), cap, cfg.workers, stats)
    if hit is None:
        raise _no_certificate(stats, near, cap)
    I, nu, d, worst = hit
    x_bar = x - nu @ P.normals[list(I)]
    cert = SupportCertificate(tuple(I), nu, float(d), _raw_bound(P, x_bar, I))
    return ProjectionResult(x_bar, cert, stats)


def _raw_bound(P: Polyhedron, x_bar, I) -> Optional[float]:
    out = np.ones(P.n, dtype=bool)
    out[list(I)] = False
    if not out.any():
        return None
    return float((P.normals[out] @ x_bar - P.offsets[out]).max())


def accepting_supports(P: Polyhedron, x, cfg: SearchConfig = SearchConfig()) -> list:
    """Every support that passes all checks, with its candidate point.

    Returns a list of ``(support, multipliers, point)``; empty when ``x`` is in ``P``.
    """
    _check_size(P.n, cfg)
    x = np.asarray(x, dtype=float)
    w = residuals(P, x)
    if np.all(w <= cfg.tol_feas * feasibility_scale(P.offsets)):
        return []
    G = gram.build_gram(P)
    evaluate = _make_evaluator(G, w, cfg, lambda I, nu: _candidate(P, x, I, nu)[1])
    found = _scan(evaluate, enumerate_supports(P.n, _card_cap(G, cfg)), SearchStats(), {},
                  stop_first=False)
    return [(I, nu, x - nu @ P.normals[list(I)]) for I, nu, _, _ in found]


def project_by_gram(G, w, cfg: SearchConfig = SearchConfig()):
    """Support and multipliers from inner products alone.

    Works in any inner-product space: the caller rebuilds the point as
    ``x - sum nu_i u_i``. Off-support feasibility is tested through
    ``w_i' - sum_k nu_k G[k, i'] <= tol_feas * (1 + |w_i'|)``.
    Returns :data:`FEASIBLE` when no residual is positive.
    """
    G = np.asarray(G, dtype=float)
    w = np.asarray(w, dtype=float)
    n = G.shape[0]
    if G.shape != (n, n) or w.shape != (n,):
        raise ValueError("Gram matrix and residuals have inconsistent shapes")
    _check_size(n, cfg)
    scale = 1.0 + np.abs(w)
    if np.all(w <= cfg.tol_feas * scale):
        return FEASIBLE
    cap = _card_cap(G, cfg)

    def violation(I, nu):
        out = np.ones(n, dtype=bool)
        out[list(I)] = False
        if not out.any():
            return None
        r = w[out] - nu @ G[np.ix_(list(I), np.flatnonzero(out))]
        return float((r / scale[out]).max())

    stats = SearchStats()
    hit, near = _search(n, _make_evaluator(G, w, cfg, violation), cap, cfg.workers, stats)
    if hit is None:
        raise _no_certificate(stats, near, cap)
    return GramSupport(tuple(hit[0]), hit[1])


def reduce_support(normals, nu, tol: float = 1e-10, tol_det: float = gram.DEFAULT_TOL_DET):
    """Rewrite ``sum nu_i u_i`` (nu >= 0) over linearly independent normals.

    Searches subsets by increasing cardinality for an exact representation
    with strictly positive coefficients and a nonsingular Gram block.
    Returns ``(support, coefficients)``.
    """
    U = np.atleast_2d(np.asarray(normals, dtype=float))
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (U.shape[0],):
        raise ValueError("need one coefficient per normal")
    if np.any(nu < 0):
        raise ValueError("coefficients must be nonnegative")
    target = nu @ U
    size = float(np.linalg.norm(target))
    if size == 0.0:
        raise ValueError("the combination is zero; nothing to reduce")
    G = gram.build_gram(U)
    for I in enumerate_supports(U.shape[0], U.shape[0]):
        ok, d = gram.is_nonsingular(G, I, tol_det)
        if not ok or d <= 0:
            continue
        c = gram.solve_principal(G, U @ target, I)
        if np.any(c <= 0):
            continue
        if np.linalg.norm(c @ U[list(I)] - target) <= tol * (1.0 + size):
            return tuple(I), c
    raise ArithmeticError("no positive representation over independent normals was found")
