"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 no certificate, 3 verification
reject. Reports go to stdout, diagnostics to stderr. Constraint and
coordinate indices in reports are 1-based, matching the file formats.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import fileformat, latticial, lp_banach, oracle
from .fileformat import ParseError, fmt
from .instances import random_instance
from .projector import (DEFAULT_MAX_HALFSPACES, NoCertificateError, SearchConfig,
                        SubsetCapError, project)

EXIT_OK, EXIT_INPUT, EXIT_NO_CERT, EXIT_REJECT = 0, 1, 2, 3
AGREEMENT_TOL = 1e-6


def _vec(v):
    return [float(t) for t in v]


def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        json.dump(report, out, indent=2, sort_keys=False)
        out.write("\n")
        return
    for key, value in report.items():
        out.write(f"{key}: {_human(value)}\n")


def _human(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return fmt(value)
    if isinstance(value, (list, tuple)):
        if value and isinstance(value[0], dict):
            return "; ".join(_human(v) for v in value)
        return " ".join(_human(v) for v in value) if value else "-"
    if isinstance(value, dict):
        return " ".join(f"{k}={_human(v)}" for k, v in value.items())
    if value is None:
        return "-"
    return str(value)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_project(args) -> int:
    try:
        prob = fileformat.parse_problem(_read(args.file))
    except (OSError, ParseError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    tol = args.tol if args.tol is not None else (prob.tol if prob.tol is not None else 1e-9)
    try:
        cfg = SearchConfig(tol_feas=tol, max_card=args.max_card, workers=args.parallel,
                           max_halfspaces=args.max_halfspaces)
        res = project(prob.polyhedron, prob.point, cfg)
    except SubsetCapError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except ValueError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except NoCertificateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps(exc.diagnostics, indent=2), file=sys.stderr)
        _emit({"status": "no_certificate", "diagnostics": exc.diagnostics}, args.json)
        return EXIT_NO_CERT
    verdict = oracle.kkt_verify(prob.polyhedron, prob.point, res.point, res.certificate, tol=tol)
    cert = res.certificate.as_dict() if res.certificate else None
    report = {
        "status": "projected" if cert else "inside",
        "point": _vec(res.point),
        "support": cert["support"] if cert else [],
        "multipliers": cert["multipliers"] if cert else [],
        "det_GII": cert["det_GII"] if cert else None,
        "residual_bound": cert["residual_bound"] if cert else None,
        "verification": "ACCEPT" if verdict.accepted else "REJECT",
        "violations": verdict.as_dict()["violations"],
        "stats": res.stats.as_dict(),
    }
    _emit(report, args.json)
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def cmd_verify(args) -> int:
    try:
        prob = fileformat.parse_problem(_read(args.file))
        cand = np.array([fileformat._num(t, None) for t in args.candidate.split()])
    except (OSError, ParseError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    P, x = prob.polyhedron, prob.point
    if cand.shape != (P.dim,):
        return _fail(f"candidate has {cand.size} coordinates, problem dimension is {P.dim}",
                     EXIT_INPUT)
    tol = args.tol if args.tol is not None else (prob.tol if prob.tol is not None else 1e-9)
    cert = oracle.reconstruct_certificate(P, x, cand, tol)
    kkt = oracle.kkt_verify(P, x, cand, cert, tol=tol)
    violations = kkt.as_dict()["violations"]
    vi = None
    if not any(v["condition"] == "feasibility" for v in violations):
        vi = oracle.vi_spot_check(P, x, cand, samples=args.samples, seed=args.seed)
        violations += vi.as_dict()["violations"][:5]
    for v in violations:
        if v["index"] >= 0 and v["condition"] != "variational":
            v["index"] += 1
    accepted = kkt.accepted and (vi is None or vi.accepted)
    report = {
        "verdict": "ACCEPT" if accepted else "REJECT",
        "candidate": _vec(cand),
        "support": [i + 1 for i in cert.support] if cert else [],
        "multipliers": _vec(cert.multipliers) if cert else [],
        "conditions_failed": sorted({v["condition"] for v in violations}),
        "violations": violations,
        "vi_samples": args.samples if vi is not None else 0,
        "seed": args.seed,
    }
    _emit(report, args.json)
    return EXIT_OK if accepted else EXIT_REJECT


def cmd_cone(args) -> int:
    try:
        prob = fileformat.parse_cone(_read(args.file))
    except (OSError, ParseError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    K, x = prob.cone, prob.point
    try:
        split = latticial.project_cone(K, x)
        rep = latticial.mixed_representation(K, x)
    except latticial.SingularBasisError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except (NoCertificateError, ArithmeticError) as exc:
        return _fail(str(exc), EXIT_NO_CERT)
    report = {
        "y": _vec(split.y),
        "z": _vec(split.z),
        "support": [i + 1 for i in rep.support],
        "alpha_indices": [i + 1 for i in rep.complement],
        "alpha": _vec(rep.alpha),
        "beta": _vec(rep.beta),
        "moreau_sum_residual": float(np.linalg.norm(x - split.y - split.z)),
        "moreau_inner": float(np.dot(split.y, split.z)),
    }
    _emit(report, args.json)
    return EXIT_OK


def cmd_lp(args) -> int:
    try:
        prob = fileformat.parse_lp(_read(args.file))
    except (OSError, ParseError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    z = lp_banach.lp_clip_project(prob.system, prob.point)
    verdict = lp_banach.verify_candidate(prob.system.as_functionals(), prob.point, z)
    vd = verdict.as_dict()
    report = {
        "p": prob.point.p,
        "point": _vec(z.coords),
        "verdict": "ACCEPT" if verdict.accepted else "REJECT",
        "support": vd.get("support", []),
        "multipliers": vd.get("multipliers", []),
        "failed_conditions": vd["failed_conditions"],
    }
    _emit(report, args.json)
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def cmd_bench(args) -> int:
    if args.dim < 1:
        return _fail("--dim must be >= 1", EXIT_INPUT)
    if args.n < 1:
        return _fail("--n must be >= 1", EXIT_INPUT)
    if args.n > args.max_halfspaces:
        return _fail(
            f"--n {args.n} exceeds the enumeration cap of {args.max_halfspaces} halfspaces "
            f"({2 ** args.n - 1} candidate supports); pass --max-halfspaces to override, "
            "or use the iterative oracle for problems of this size", EXIT_INPUT)
    if args.count < 0:
        return _fail("--count must be >= 0", EXIT_INPUT)
    cfg = SearchConfig(workers=args.parallel, max_halfspaces=args.max_halfspaces)
    rng = np.random.default_rng(args.seed)
    rows = []
    for k in range(args.count):
        P, x = random_instance(rng, args.dim, args.n)
        t0 = time.perf_counter()
        try:
            res = project(P, x, cfg)
        except NoCertificateError as exc:
            rows.append({"instance": k, "status": "no_certificate",
                         "diagnostics": exc.diagnostics})
            continue
        t1 = time.perf_counter()
        ref = oracle.dykstra(P, x, tol=1e-10)
        t2 = time.perf_counter()
        rows.append({
            "instance": k,
            "status": "ok",
            "support_size": len(res.support),
            "subsets_examined": res.stats.subsets_examined,
            "max_diff": float(np.max(np.abs(res.point - ref))) if P.dim else 0.0,
            "closed_form_ms": 1e3 * (t1 - t0),
            "oracle_ms": 1e3 * (t2 - t1),
        })
    ok = [r for r in rows if r["status"] == "ok"]
    worst = max((r["max_diff"] for r in ok), default=0.0)
    failures = len(rows) - len(ok)
    summary = {
        "instances": len(rows),
        "no_certificate": failures,
        "max_diff": worst,
        "agreement_tol": AGREEMENT_TOL,
        "all_agree": failures == 0 and worst <= AGREEMENT_TOL,
        "closed_form_ms_total": sum(r["closed_form_ms"] for r in ok),
        "oracle_ms_total": sum(r["oracle_ms"] for r in ok),
    }
    if args.json:
        _emit({"dim": args.dim, "n": args.n, "seed": args.seed, "oracle": args.oracle,
               "rows": rows, "summary": summary}, True)
    else:
        out = sys.stdout
        out.write(f"{'#':>5} {'|I|':>4} {'subsets':>8} {'max|diff|':>12} {'closed ms':>10} {'oracle ms':>10}\n")
        for r in rows:
            if r["status"] != "ok":
                out.write(f"{r['instance']:>5} no certificate\n")
                continue
            out.write(f"{r['instance']:>5} {r['support_size']:>4} {r['subsets_examined']:>8} "
                      f"{r['max_diff']:>12.3e} {r['closed_form_ms']:>10.3f} {r['oracle_ms']:>10.3f}\n")
        out.write(f"summary: instances={summary['instances']} no_certificate={failures} "
                  f"max_diff={worst:.3e} all_agree={'yes' if summary['all_agree'] else 'no'} "
                  f"closed_form_ms={summary['closed_form_ms_total']:.1f} "
                  f"oracle_ms={summary['oracle_ms_total']:.1f}\n")
    if failures:
        return EXIT_NO_CERT
    return EXIT_OK if worst <= AGREEMENT_TOL else EXIT_REJECT


def cmd_generate(args) -> int:
    if args.dim < 1 or args.n < 1:
        return _fail("--dim and --n must be >= 1", EXIT_INPUT)
    rng = np.random.default_rng(args.seed)
    P, x = random_instance(rng, args.dim, args.n)
    sys.stdout.write(fileformat.format_problem(fileformat.Problem(P, x)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyproj",
        description="Exact projection onto intersections of halfspaces with KKT certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project the point of a problem file")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=None, help="feasibility tolerance (default 1e-9)")
    p.add_argument("--max-card", type=int, default=None, help="largest support size to try")
    p.add_argument("--parallel", type=int, default=1, metavar="WORKERS")
    p.add_argument("--max-halfspaces", type=int, default=DEFAULT_MAX_HALFSPACES)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("verify", help="check a candidate projection")
    p.add_argument("file")
    p.add_argument("--candidate", required=True, help='coordinates, e.g. "0 0"')
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cone", help="Moreau split for a latticial cone file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("lp", help="coordinate clipping in l_p with verification")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lp)

    p = sub.add_parser("bench", help="closed form against the Dykstra oracle")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", choices=["dykstra"], default="dykstra")
    p.add_argument("--parallel", type=int, default=1, metavar="WORKERS")
    p.add_argument("--max-halfspaces", type=int, default=DEFAULT_MAX_HALFSPACES)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a random problem file to stdout")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "parallel", 1) < 1:
        return _fail("--parallel must be >= 1", EXIT_INPUT)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
