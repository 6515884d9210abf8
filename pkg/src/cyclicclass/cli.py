"""Command-line front end.

Exit codes: 0 success, 1 contradiction or corpus disagreement, 2 usage or
input error, 3 factorization budget exceeded.  ``--machine`` switches any
subcommand to JSON Lines output: a header record with ``document`` and
``schema_version`` followed by one record per result.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from . import __version__
from .arith import BUDGET_ENV_VAR, FactorizationTimeout, factorize
from .bounds import FieldShape, class_number_upper_bound
from .classifier import (
    BoundNotExceeded,
    DegreeViolatesGammaConstraint,
    IntermediateField,
    Verdict,
    apply_bound_refinement,
    classify_all,
    make_profile,
)
from .corpus import SCHEMA_VERSION, emit_report, load_corpus, replay
from .cyclotomic import build_instance
from .errors import CyclicClassError
from .expressions import ExpressionEvalError, parse_factor_list
from .galois_sim import feasible_alphas

EXIT_OK = 0
EXIT_CONTRADICTION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _subfield(text: str) -> IntermediateField:
    try:
        d, disc = text.split(":")
        return IntermediateField(int(d), int(disc))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected d:D, got {text!r}") from exc


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _emit_machine(out: TextIO, command: str, records: list[dict]) -> None:
    out.write(_dumps({"document": f"{command}-result", "schema_version": SCHEMA_VERSION}) + "\n")
    for r in records:
        out.write(_dumps(r) + "\n")


def _verdict_record(v: Verdict, exponent: int) -> dict:
    rec = {
        "prime": v.prime,
        "exponent": exponent,
        "structure": v.structure.value,
        "applicable": v.applicable,
        "cases": [c.label for c in v.cases],
        "admissible": v.labels(),
        "contradiction": v.contradiction,
        "inferred_noncyclic": v.inferred_noncyclic,
    }
    if v.refinement is not None:
        rec["refinement"] = {
            "d": v.refinement.d,
            "restricted_witnesses": list(v.refinement.restricted_witnesses),
            "class_bound": v.refinement.class_bound,
        }
    return rec


def _verdict_line(v: Verdict, exponent: int) -> str:
    head = f"{v.prime}^{exponent}" if exponent > 1 else str(v.prime)
    if not v.applicable:
        return f"{head}: inapplicable ({v.structure.value} component)"
    if v.contradiction:
        tail = "inferred non-cyclic" if v.inferred_noncyclic else "theorem contradiction"
        return f"{head}: no admissible case, {tail}"
    line = f"{head}: {' '.join(v.labels())}"
    if v.refinement is not None:
        line += f"  (refined by L_{v.refinement.d}, bound {v.refinement.class_bound:.6g})"
    return line


def _cmd_classify(args, out: TextIO) -> int:
    factors = []
    for expr in parse_factor_list(args.class_factors):
        factors.extend([expr.base] * expr.power)
    profile = make_profile(
        args.degree,
        factors,
        cyclic=args.cyclic,
        noncyclic=args.noncyclic,
        quad_disc=args.quad_disc,
        quad_h=args.quad_h,
        quad_divisors=args.quad_divisors,
        subfields=args.subfield,
        totally_real=True if args.real else None,
    )
    verdicts = classify_all(profile)
    if profile.intermediate_fields:
        for p, v in verdicts.items():
            try:
                verdicts[p] = apply_bound_refinement(profile, p)
            except BoundNotExceeded:
                pass
    exps = dict(profile.class_number.factors)
    if args.machine:
        _emit_machine(out, "classify", [_verdict_record(v, exps[p]) for p, v in verdicts.items()])
    else:
        for p, v in verdicts.items():
            out.write(_verdict_line(v, exps[p]) + "\n")
    return EXIT_CONTRADICTION if any(v.contradiction for v in verdicts.values()) else EXIT_OK


def _cmd_bounds(args, out: TextIO) -> int:
    shape = FieldShape(args.degree, args.r2, args.disc)
    report = class_number_upper_bound(shape)
    if args.machine:
        _emit_machine(
            out,
            "bounds",
            [
                {
                    "degree": shape.degree,
                    "r2": shape.r2,
                    "abs_discriminant": shape.abs_discriminant,
                    "minkowski_bound": report.minkowski_bound,
                    "class_number_bound": report.class_number_bound,
                    "applicable": report.applicable,
                }
            ],
        )
    else:
        out.write(f"B = {report.minkowski_bound!r}\n")
        out.write(f"H = {report.class_number_bound!r}\n")
        out.write("applicable (B > 17): " + ("yes" if report.applicable else "no") + "\n")
    return EXIT_OK


def _cmd_feasible(args, out: TextIO) -> int:
    alphas = feasible_alphas(args.g, args.hi)
    if args.machine:
        _emit_machine(out, "feasible", [{"g": args.g, "hi": args.hi, "alphas": list(alphas)}])
    else:
        out.write(" ".join(map(str, alphas)) + "\n")
    return EXIT_OK


def _cmd_cyclo(args, out: TextIO) -> int:
    inst = build_instance(args.p, args.a, args.b)
    checks = [{"q": c.q, "q_mod_p": c.q_mod_p, "passed": c.passed} for c in inst.congruence_checks]
    if args.machine:
        _emit_machine(
            out,
            "cyclo",
            [
                {
                    "p": inst.p,
                    "a": inst.a,
                    "b": inst.b,
                    "t1": inst.t1,
                    "n": inst.n,
                    "t1_factors": str(inst.t1_factors) if inst.t1_factors else None,
                    "phi_n": inst.phi_n,
                    "p_valuation_of_phi": inst.p_valuation_of_phi,
                    "congruence_checks": checks,
                    "n_is_odd": inst.n_is_odd,
                    "p_th_power_ideal": inst.p_th_power_ideal,
                    "prediction": inst.prediction,
                }
            ],
        )
        return EXIT_OK
    if inst.t1_factors is None:
        shown = " (not factored)"
    else:
        shown = "" if str(inst.t1_factors) == str(inst.t1) else f" = {inst.t1_factors}"
    out.write(f"t1 = {inst.t1}{shown}\n")
    out.write(f"n = {inst.n}\n")
    out.write(f"phi(n) = {inst.phi_n if inst.phi_n is not None else 'unknown'}\n")
    for c in inst.congruence_checks:
        out.write(f"  {c.q} = {c.q_mod_p} mod {inst.p}: {'ok' if c.passed else 'FAIL'}\n")
    out.write(f"n odd: {'yes' if inst.n_is_odd else 'no'}\n")
    out.write(f"prediction: {inst.prediction}\n")
    return EXIT_OK


def _cmd_verify_corpus(args, out: TextIO) -> int:
    entries = load_corpus(args.path)
    report = replay(entries, workers=args.workers)
    out.write(emit_report(report, "machine" if args.machine else "text"))
    return EXIT_OK if report.ok else EXIT_CONTRADICTION


def _cmd_factor(args, out: TextIO) -> int:
    if args.n < 1:
        raise UsageError(f"expected a positive integer, got {args.n}")
    f = factorize(args.n)
    if args.machine:
        _emit_machine(out, "factor", [{"n": f.value, "factors": [[p, e] for p, e in f]}])
    else:
        out.write(f"{f.value} = {f}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", action="store_true", help="emit JSON Lines")

    parser = argparse.ArgumentParser(
        prog="cyclicclass",
        description="Constraints on prime factors of class numbers of cyclic fields.",
        epilog=f"The factorization budget is read from {BUDGET_ENV_VAR} (milliseconds).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify every prime factor of h")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--class-factors", required=True, help="comma-separated factors, e.g. 3,2.29+1,2^3.29+1")
    p.add_argument("--cyclic", type=_int_list, default=[])
    p.add_argument("--noncyclic", type=_int_list, default=[])
    p.add_argument("--quad-disc", type=int)
    p.add_argument("--quad-h", type=int)
    p.add_argument("--quad-divisors", type=_int_list, default=[])
    p.add_argument("--subfield", type=_subfield, action="append", default=[], metavar="d:D")
    p.add_argument("--real", action="store_true", help="the field is totally real")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("bounds", parents=[common], help="Minkowski and class-number bounds")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--r2", type=int, required=True)
    p.add_argument("--disc", type=int, required=True)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("feasible", parents=[common], help="enumerate feasible generator exponents")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.set_defaults(func=_cmd_feasible)

    p = sub.add_parser("cyclo", parents=[common], help="build the t1 construction")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=_cmd_cyclo)

    p = sub.add_parser("verify-corpus", parents=[common], help="replay a corpus document")
    p.add_argument("path", nargs="?", help="corpus file; the embedded corpus when omitted")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_verify_corpus)

    p = sub.add_parser("factor", parents=[common], help="factor an integer")
    p.add_argument("n", type=int)
    p.set_defaults(func=_cmd_factor)
    return parser


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except FactorizationTimeout as exc:
        err.write(f"error: {exc}\n")
        return EXIT_BUDGET
    except DegreeViolatesGammaConstraint as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (CyclicClassError, ExpressionEvalError, UsageError, ValueError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)
