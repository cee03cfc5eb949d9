"""``witnesslab`` command line.

Every command prints a JSON envelope ``{tool, version, command, seed,
wall_time_s, timestamp, payload}``.  Only the envelope carries timing
information, so the payload is byte-identical for a fixed command and seed
(``--payload-only`` prints just that part).

Exit codes: 0 success or heuristic block positivity, 2 certified violation,
1 usage or validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .optimality import (DecompositionError, appendix_a_kernels, appendix_inequalities,
                         class1_det_factorized, class2_contraction_terms, class2_probe_det,
                         lambda_star_bisect, optimality_report, probe_directions,
                         probe_leading_coefficient_formula, saturation_points,
                         SubtractionProbe, subtract_rank1, theorem1_projector,
                         verify_decomposition_classI, verify_decomposition_classII)
from .positivity import (NOT_BLOCK_POSITIVE, seesaw_minimize, span_analysis,
                         zero_locus_families)
from .tensor_core import matrix_to_json
from .witness_factory import (ConstraintViolation, DescriptorError, FamilyParam,
                              class4_identities, class_membership, family_params, family_witness,
                              n3_identities, parse_angle, parse_descriptor, validate_alpha)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


def thread_cap() -> int:
    raw = os.environ.get("WITNESSLAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"WITNESSLAB_THREADS={raw!r} is not an integer") from None
    if value < 1:
        raise UsageError("WITNESSLAB_THREADS must be >= 1")
    return value


def jsonable(obj):
    """Plain JSON types; non-finite floats become strings, complex becomes [re, im]."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, allow_nan=False)


@dataclass
class ReportEnvelope:
    command: list[str]
    seed: int | None
    payload: dict
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "tool": "witnesslab",
            "version": __version__,
            "command": self.command,
            "seed": self.seed,
            "wall_time_s": self.wall_time_s,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "payload": self.payload,
        }


@dataclass(frozen=True)
class SweepSpec:
    family: str
    points: int
    seed: int = 0
    starts: int = 200
    tol: float = 1e-9
    optimized: bool = False

    def __post_init__(self):
        if self.family not in ("classI", "classII", "n3"):
            raise UsageError(f"sweep needs a family name, got {self.family!r}")
        if self.points < 2:
            raise UsageError("--points must be >= 2")
        if self.tol <= 0 or self.starts < 1:
            raise UsageError("--tol must be > 0 and --starts >= 1")

    def angles(self) -> np.ndarray:
        if self.family == "n3":
            return np.linspace(0.0, 2 * math.pi, self.points, endpoint=False)
        return np.linspace(0.0, math.pi, self.points)


# -- commands -----------------------------------------------------------------

def _descriptor(text):
    try:
        return parse_descriptor(text)
    except (DescriptorError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_witness(args) -> tuple[dict, int]:
    d = _descriptor(args.descriptor)
    payload: dict = {"schema": "witnesslab.witness/1", "descriptor": args.descriptor,
                     "kind": d.kind, "n": d.n}
    alpha = d.alpha_vector()
    if alpha is not None:
        report = validate_alpha(alpha)
        payload["alpha"] = [float(a) for a in alpha]
        payload["validation"] = report.to_dict()
        if not report.ok:
            raise ConstraintViolation(
                f"alpha violates the constraints: sum residual {report.sum_residual:.3g}, "
                f"gram residual {report.gram_residual:.3g}", report)
        if d.n == 4:
            payload["membership"] = class_membership(alpha)
            payload["identities"] = class4_identities(alpha)
        elif d.n == 3:
            payload["identities"] = n3_identities(alpha)
    if args.dump:
        payload["matrix"] = matrix_to_json(d.witness())
    return payload, EXIT_OK


def cmd_certify(args) -> tuple[dict, int]:
    d = _descriptor(args.descriptor)
    w = d.witness()
    if args.subtract_lambda is not None:
        if d.n != 4:
            raise UsageError("--subtract-lambda needs an n = 4 witness")
        try:
            w = subtract_rank1(w, SubtractionProbe(theorem1_projector(), args.subtract_lambda))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rep = seesaw_minimize(w, starts=args.starts, seed=args.seed,
                          tol=args.tol if args.tol is not None else 1e-9)
    payload = rep.to_dict()
    payload["descriptor"] = args.descriptor
    payload["subtract_lambda"] = args.subtract_lambda
    return payload, EXIT_VIOLATION if rep.verdict == NOT_BLOCK_POSITIVE else EXIT_OK


def _family_param(text) -> FamilyParam:
    d = _descriptor(text)
    if d.param is None:
        raise UsageError(f"{text!r} is not a family descriptor")
    return d.param


def cmd_span(args) -> tuple[dict, int]:
    p = _family_param(args.descriptor)
    try:
        family = zero_locus_families(p, optimized=args.optimized, samples=args.points or 40,
                                     offset=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    desc = p.describe() + (" optimized" if args.optimized else "")
    rep = span_analysis(family, rel_tol=args.tol if args.tol is not None else 1e-8,
                        description=desc)
    return rep.to_dict(), EXIT_OK


def cmd_optimize(args) -> tuple[dict, int]:
    p = _family_param(args.descriptor)
    tol = args.tol if args.tol is not None else 1e-4
    if args.full:
        return optimality_report(p, starts=args.starts, seed=args.seed, bisect_tol=tol), EXIT_OK
    if p.family != "classI":
        raise UsageError("optimize needs a class I descriptor (use --full for other families)")
    return lambda_star_bisect(p, tol=tol, starts=args.starts, seed=args.seed).to_dict(), EXIT_OK


def cmd_verify_cert(args) -> tuple[dict, int]:
    which = ["classI", "classII"] if args.which == "all" else [args.which]
    out = {"schema": "witnesslab.certificates/1", "reports": []}
    fns = {"classI": verify_decomposition_classI, "classII": verify_decomposition_classII}
    ok = True
    for name in which:
        try:
            out["reports"].append(fns[name]().to_dict())
        except DecompositionError as exc:
            out["reports"].append({"name": name, "verified": False, "error": str(exc)})
            ok = False
    return out, EXIT_OK if ok else EXIT_USAGE


def _appendix_a(theta, points, seed):
    grid_t = np.linspace(0, math.pi, points)
    grid_p = np.linspace(0, math.pi / 2, points)
    rows, min_lhs, mismatches = [], math.inf, 0
    for t in grid_t:
        for ph in grid_p:
            r = appendix_inequalities(float(t), float(ph))
            min_lhs = min(min_lhs, r["main_ineq_lhs"], r["main_ineq1_lhs"])
            mismatches += (r["main_ineq1_lhs"] <= 1e-12) != r["saturated"]
            rows.append({"theta": float(t), "phi": float(ph), **r})
    rng = np.random.default_rng(seed)
    dets = [class1_det_factorized(theta, rng.uniform(0, 1, 4)) for _ in range(1000)]
    payload = {
        "schema": "witnesslab.appendix/1", "part": "A", "theta": theta,
        "inequality_grid_points": points, "inequality_min_lhs": min_lhs,
        "saturation_mismatches": mismatches,
        "kernels": appendix_a_kernels(theta, phase=0.7, t=0.3, phases7=(0.2, 1.1, 2.5)),
        "saturation_point_dets": [class1_det_factorized(theta, sp.moduli())
                                  for sp in saturation_points(theta)],
        "factorized_det_min_random": min(dets),
    }
    return payload, rows


def _appendix_b(theta, points, seed):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(points):
        X = rng.uniform(0, 1, 4)
        t = class2_contraction_terms(theta, X)
        rows.append({"X0": X[0], "X1": X[1], "X2": X[2], "X3": X[3], **t.to_dict()})
    payload = {"schema": "witnesslab.appendix/1", "part": "B", "theta": theta, "samples": points,
               "min_term": min(min(r["S1"], r["S2"], r["S3"]) for r in rows),
               "zero_locus_total": class2_contraction_terms(theta, [0.3, 0.2, 0.3, 0.2]).total}
    return payload, rows


def _appendix_c(theta, points, seed):
    if not 0 < theta < math.pi:
        raise UsageError("appendix C needs theta in (0, pi)")
    rows = []
    for x, y in probe_directions(points):
        r = class2_probe_det(theta, 1e-4, None, x, y)
        weight = abs(y) if r.shifted else abs(x)
        rows.append({"abs_x": abs(x), "arg_y": float(np.angle(y)), "k": r.k,
                     "shifted": r.shifted, "det": r.det, "leading_coeff": r.leading_coeff,
                     "printed_formula": probe_leading_coefficient_formula(theta, r.k, weight, 8.0),
                     "exact_formula": probe_leading_coefficient_formula(theta, r.k, weight, 16.0)})
    payload = {"schema": "witnesslab.appendix/1", "part": "C", "theta": theta,
               "directions": points, "all_negative": all(r["det"] < 0 for r in rows)}
    return payload, rows


def cmd_appendix(args) -> tuple[dict, int]:
    theta = parse_angle(args.theta) if args.theta is not None else math.pi / 3
    fn = {"A": _appendix_a, "B": _appendix_b, "C": _appendix_c}[args.part]
    default_points = {"A": 64, "B": 200, "C": 12}[args.part]
    payload, rows = fn(theta, args.points or default_points, args.seed)
    payload["rows"] = rows if args.part != "A" else []
    args._table = rows
    return payload, EXIT_OK


def _sweep_row(spec: SweepSpec, angle: float) -> dict:
    p = FamilyParam(spec.family, float(angle))
    alpha = family_params(p)
    report = validate_alpha(alpha)
    cert = seesaw_minimize(family_witness(p), starts=spec.starts, seed=spec.seed, tol=spec.tol)
    span = span_analysis(zero_locus_families(p))
    row = {"theta": float(angle)}
    for name, a in zip("abcd", alpha):
        row[name] = float(a)
    row.update({
        "constraint_residual": max(report.sum_residual, report.gram_residual),
        "min_expectation": cert.recomputed_value, "verdict": cert.verdict,
        "span_rank": span.rank, "lambda_star": None, "lambda_verdict": None,
    })
    if spec.optimized and spec.family == "classI":
        opt = lambda_star_bisect(p, starts=spec.starts, seed=spec.seed)
        row["lambda_star"] = opt.lambda_star
        row["lambda_verdict"] = "consistent" if opt.consistent else "inconsistent"
    return row


def cmd_sweep(args) -> tuple[dict, int]:
    spec = SweepSpec(family=args.family, points=args.points or 17, seed=args.seed,
                     starts=args.starts, tol=args.tol if args.tol is not None else 1e-9,
                     optimized=args.optimized)
    angles = spec.angles()
    with ThreadPoolExecutor(max_workers=min(thread_cap(), len(angles))) as pool:
        rows = list(pool.map(lambda a: _sweep_row(spec, a), angles))
    args._table = rows
    violations = sum(r["verdict"] == NOT_BLOCK_POSITIVE for r in rows)
    payload = {"schema": "witnesslab.sweep/1", "family": spec.family, "points": spec.points,
               "seed": spec.seed, "starts": spec.starts, "optimized": spec.optimized,
               "rows": rows}
    return payload, EXIT_VIOLATION if violations else EXIT_OK


# -- plumbing -------------------------------------------------------------------

def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                         for k, v in r.items()})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--starts", type=int, default=200, help="see-saw random starts")
    common.add_argument("--tol", type=float, default=None,
                        help="command tolerance (certify 1e-9, span 1e-8, optimize 1e-4)")
    common.add_argument("--points", type=int, default=None, help="grid or sample size")
    common.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--payload-only", action="store_true",
                        help="print the deterministic payload without the envelope")

    parser = argparse.ArgumentParser(prog="witnesslab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"witnesslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("witness", parents=[common], help="construct and validate a witness")
    p.add_argument("descriptor", help="e.g. classI:theta=pi/4, n3:phi=0, alpha:1,1,1,0")
    p.add_argument("--dump", action="store_true", help="include the full matrix")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("certify", parents=[common], help="see-saw block-positivity check")
    p.add_argument("descriptor")
    p.add_argument("--subtract-lambda", type=float, default=None, metavar="X",
                   help="subtract X |Psi><Psi| before certifying (n = 4)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("span", parents=[common], help="rank of the analytic zero locus")
    p.add_argument("descriptor")
    p.add_argument("--optimized", action="store_true", help="class I after subtracting 2P")
    p.set_defaults(func=cmd_span)

    p = sub.add_parser("optimize", parents=[common], help="bisection for lambda*")
    p.add_argument("descriptor")
    p.add_argument("--full", action="store_true", help="emit the aggregate optimality report")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify-cert", parents=[common], help="check the decomposition certificates")
    p.add_argument("which", nargs="?", choices=("classI", "classII", "all"), default="all")
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("appendix", parents=[common], help="closed-form determinant checks")
    p.add_argument("part", choices=("A", "B", "C"))
    p.add_argument("--theta", default=None, help="angle (default pi/3)")
    p.set_defaults(func=cmd_appendix)

    p = sub.add_parser("sweep", parents=[common], help="table over a family's angle grid")
    p.add_argument("family", choices=("classI", "classII", "n3"))
    p.add_argument("--optimized", action="store_true", help="also bisect for lambda* (class I)")
    p.set_defaults(func=cmd_sweep)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    args._table = None
    start = time.perf_counter()
    try:
        if args.starts < 1:
            raise UsageError("--starts must be >= 1")
        if args.points is not None and args.points < 1:
            raise UsageError("--points must be >= 1")
        if args.format == "csv" and args.command not in ("sweep", "appendix"):
            raise UsageError("--format csv is available for sweep and appendix only")
        payload, code = args.func(args)
    except (UsageError, ConstraintViolation, DescriptorError, ValueError) as exc:
        print(f"witnesslab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "csv":
        _emit(rows_to_csv(args._table or []), args.out)
        return code
    if args.payload_only:
        text = dumps(payload)
    else:
        env = ReportEnvelope(command=["witnesslab", *argv],
                             seed=args.seed, payload=payload,
                             wall_time_s=round(time.perf_counter() - start, 6))
        text = dumps(env.to_dict())
    _emit(text + "\n", args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
