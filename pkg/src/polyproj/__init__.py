"""Exact projection onto intersections of halfspaces with checkable certificates."""

from .core import Halfspace, Polyhedron, contains, inner, project_halfspace, residuals
from .gram import build_gram, nu_in, nu_out, rank_bound, sign_factor, subdet
from .oracle import dykstra, kkt_verify, vi_spot_check
from .projector import (FEASIBLE, NoCertificateError, ProjectionResult, SearchConfig,
                        SubsetCapError, SupportCertificate, accepting_supports,
                        feasibility_check, project, project_by_gram, reduce_support,
                        solve_support)

__all__ = [
    "Halfspace", "Polyhedron", "contains", "inner", "project_halfspace", "residuals",
    "build_gram", "nu_in", "nu_out", "rank_bound", "sign_factor", "subdet",
    "dykstra", "kkt_verify", "vi_spot_check",
    "FEASIBLE", "NoCertificateError", "ProjectionResult", "SearchConfig", "SubsetCapError",
    "SupportCertificate", "accepting_supports", "feasibility_check", "project",
    "project_by_gram", "reduce_support", "solve_support",
]
