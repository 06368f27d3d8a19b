"""Line-oriented problem files.

Three formats share one grammar: whitespace-separated tokens, ``#`` starts a
comment that runs to the end of the line, blank lines are ignored, and the
first meaningful line is a header naming the format.

``polyproj v1``::

    dim D
    halfspace u_1 ... u_D eta      (one or more)
    point x_1 ... x_D
    tol T                          (optional)

``polyproj-cone v1``::

    dim D
    basis b_1 ... b_D              (exactly D lines)
    point x_1 ... x_D

``polyproj-lp v1``::

    p P
    coord k delta eta              (k is 1-based, delta is +1 or -1)
    point x_1 ... x_m              (later coordinates are zero)

Numbers are written with 17 significant digits so that files round-trip
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Halfspace, Polyhedron
from .latticial import LatticialCone, SingularBasisError
from .lp_banach import CoordinateHalfspaceSystem, LpVector

HEADER = "polyproj v1"
CONE_HEADER = "polyproj-cone v1"
LP_HEADER = "polyproj-lp v1"


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def fmt(v: float) -> str:
    s = format(float(v), ".17g")
    return "0" if s == "-0" else s


def _lines(text: str):
    for no, raw in enumerate(text.split("\n"), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield no, tokens


def _num(tok: str, no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", no) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite number: {tok!r}", no)
    return v


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"not an integer: {tok!r}", no) from None


def _expect_header(lines, header: str):
    try:
        no, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty file") from None
    if " ".join(tokens) != header:
        raise ParseError(f"expected header {header!r}, got {' '.join(tokens)!r}", no)


def _dim(lines) -> int:
    try:
        no, tokens = next(lines)
    except StopIteration:
        raise ParseError("missing 'dim' line") from None
    if tokens[0] != "dim" or len(tokens) != 2:
        raise ParseError("expected 'dim D'", no)
    d = _int(tokens[1], no)
    if d < 1:
        raise ParseError("dimension must be >= 1", no)
    return d


@dataclass(frozen=True, eq=False)
class Problem:
    polyhedron: Polyhedron
    point: np.ndarray
    tol: Optional[float] = None

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        return (self.polyhedron == other.polyhedron and self.tol == other.tol
                and np.array_equal(self.point, other.point))


def parse_problem(text: str) -> Problem:
    lines = _lines(text)
    _expect_header(lines, HEADER)
    D = _dim(lines)
    halfspaces, point, tol = [], None, None
    for no, tokens in lines:
        kw, args = tokens[0], tokens[1:]
        if kw == "halfspace":
            if len(args) != D + 1:
                raise ParseError(f"halfspace needs {D} coordinates and an offset", no)
            vals = [_num(t, no) for t in args]
            try:
                halfspaces.append(Halfspace(vals[:D], vals[D]))
            except ValueError as exc:
                raise ParseError(f"invalid halfspace: {exc}", no) from None
        elif kw == "point":
            if point is not None:
                raise ParseError("more than one point line", no)
            if len(args) != D:
                raise ParseError(f"point needs {D} coordinates", no)
            point = np.array([_num(t, no) for t in args])
        elif kw == "tol":
            if len(args) != 1:
                raise ParseError("expected 'tol T'", no)
            tol = _num(args[0], no)
            if tol < 0:
                raise ParseError("tol must be nonnegative", no)
        else:
            raise ParseError(f"unknown keyword {kw!r}", no)
    if not halfspaces:
        raise ParseError("no halfspace lines")
    if point is None:
        raise ParseError("missing point line")
    return Problem(Polyhedron(halfspaces), point, tol)


def format_problem(problem: Problem) -> str:
    P = problem.polyhedron
    out = [HEADER, f"dim {P.dim}"]
    for h in P.halfspaces:
        out.append("halfspace " + " ".join(fmt(v) for v in h.normal) + " " + fmt(h.offset))
    out.append("point " + " ".join(fmt(v) for v in problem.point))
    if problem.tol is not None:
        out.append(f"tol {fmt(problem.tol)}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True, eq=False)
class ConeProblem:
    cone: LatticialCone
    point: np.ndarray


def parse_cone(text: str) -> ConeProblem:
    lines = _lines(text)
    _expect_header(lines, CONE_HEADER)
    D = _dim(lines)
    rows, point, first_basis = [], None, None
    for no, tokens in lines:
        kw, args = tokens[0], tokens[1:]
        if kw == "basis":
            if len(args) != D:
                raise ParseError(f"basis vector needs {D} coordinates", no)
            first_basis = first_basis or no
            rows.append([_num(t, no) for t in args])
        elif kw == "point":
            if point is not None:
                raise ParseError("more than one point line", no)
            if len(args) != D:
                raise ParseError(f"point needs {D} coordinates", no)
            point = np.array([_num(t, no) for t in args])
        else:
            raise ParseError(f"unknown keyword {kw!r}", no)
    if len(rows) != D:
        raise ParseError(f"expected {D} basis lines, got {len(rows)}")
    if point is None:
        raise ParseError("missing point line")
    try:
        cone = LatticialCone(rows)
    except SingularBasisError as exc:
        raise ParseError(f"basis starting here is unusable: {exc}", first_basis) from None
    return ConeProblem(cone, point)


def format_cone(problem: ConeProblem) -> str:
    B = problem.cone.basis
    out = [CONE_HEADER, f"dim {B.shape[0]}"]
    out += ["basis " + " ".join(fmt(v) for v in row) for row in B]
    out.append("point " + " ".join(fmt(v) for v in problem.point))
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class LpProblem:
    system: CoordinateHalfspaceSystem
    point: LpVector


def parse_lp(text: str) -> LpProblem:
    lines = _lines(text)
    _expect_header(lines, LP_HEADER)
    p, coords, signs, offsets, point = None, [], [], [], None
    for no, tokens in lines:
        kw, args = tokens[0], tokens[1:]
        if kw == "p":
            if len(args) != 1:
                raise ParseError("expected 'p P'", no)
            p = _num(args[0], no)
            if not p > 1:
                raise ParseError(f"p must be > 1, got {fmt(p)}", no)
        elif kw == "coord":
            if len(args) != 3:
                raise ParseError("expected 'coord k delta eta'", no)
            k = _int(args[0], no)
            delta = _num(args[1], no)
            if k < 1:
                raise ParseError("coordinate index must be >= 1", no)
            if k - 1 in coords:
                raise ParseError(f"coordinate {k} constrained twice", no)
            if abs(delta) != 1:
                raise ParseError("delta must be +1 or -1", no)
            coords.append(k - 1)
            signs.append(int(delta))
            offsets.append(_num(args[2], no))
        elif kw == "point":
            if point is not None:
                raise ParseError("more than one point line", no)
            if not args:
                raise ParseError("point needs at least one coordinate", no)
            point = [_num(t, no) for t in args]
        else:
            raise ParseError(f"unknown keyword {kw!r}", no)
    if p is None:
        raise ParseError("missing 'p' line")
    if not coords:
        raise ParseError("no coord lines")
    if point is None:
        raise ParseError("missing point line")
    return LpProblem(CoordinateHalfspaceSystem(coords, signs, offsets), LpVector(point, p))


def format_lp(problem: LpProblem) -> str:
    S = problem.system
    out = [LP_HEADER, f"p {fmt(problem.point.p)}"]
    for k, s, eta in zip(S.coords, S.signs, S.offsets):
        out.append(f"coord {k + 1} {s} {fmt(eta)}")
    out.append("point " + " ".join(fmt(v) for v in problem.point.coords))
    return "\n".join(out) + "\n"
