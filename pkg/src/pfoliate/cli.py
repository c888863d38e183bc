"""Command-line entry point: ``pfoliate <command> [options] [EXPR | -]``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import report
from .birational import blowup_chart, discrepancy_rank1
from .constants import kernel_truncated, toric_constants
from .corpus import run_corpus
from .derivation import NOT_P_CLOSED, Derivation, classify
from .errors import DegreeCapExceeded, MaxStepsExhausted, ParseError, PfoliateError
from .families import (
    FamilyDerivation,
    fiber_vs_quotient_compare,
    find_lift,
    lift_witness,
    noncommutativity_obstruction,
)
from .gfpoly import Poly, Ring
from .mmpledger import SingClass, explain_transfer, transfer_class, validate_transfer_table
from .parser import parse_derivation, parse_poly
from .singularity import (
    NOT_LC,
    REGULAR,
    REGULAR_CANONICAL,
    STRICTLY_LC,
    ann_foliation,
    ann_surface_classify,
    classify_rank1,
    fedder_f_pure,
    find_nonlc_divisor,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

CLASSES = [c.value for c in SingClass]
_DEFAULTS = {"p": 2, "vars": "x,y", "json": False, "degree": None, "seed": 0, "strict": False}


class UsageError(PfoliateError):
    pass


class Outcome:
    """What a command hands back: a result, a verdict and whether it is negative."""

    def __init__(self, result: Any, verdict: str | None = None, negative: bool = False):
        self.result = result
        self.verdict = verdict
        self.negative = negative


def _common(suppress: bool) -> argparse.ArgumentParser:
    d = argparse.SUPPRESS if suppress else None
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("-p", type=int, default=d, help="the prime (default 2)")
    g.add_argument("--vars", default=d, help="comma-separated ring variables (default x,y)")
    g.add_argument("--json", action="store_true", default=d, help="emit a JSON report")
    g.add_argument("--degree", type=int, default=d, help="truncation degree (default 3p)")
    g.add_argument("--seed", type=int, default=d, help="seed for randomised checks")
    g.add_argument("--strict", action="store_true", default=d, help="exit 1 on a negative verdict")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _common(True)
    ap = argparse.ArgumentParser(prog="pfoliate", parents=[common],
                                 description="Exact computations with derivations and foliations over F_p.")
    ap.add_argument("--schema", action="store_true", help="print the JSON report schema and exit")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")

    def cmd(name: str, help: str, expr: bool = True) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        if expr:
            sp.add_argument("expr", nargs="?", default="-", help="input expression, or - for stdin")
        return sp

    cmd("classify", "additive / p-closed / not p-closed, with the multiplier")
    sp = cmd("constants", "truncated ring of constants")
    sp.add_argument("--toric", metavar="A,B,..", help="weights of a toric derivation (replaces EXPR)")
    for name in ("blowup", "discrepancy"):
        sp = cmd(name, "pull back along a blow-up chart" if name == "blowup" else "a(E;F) and epsilon of a chart")
        sp.add_argument("--center", required=True, help="comma-separated centre variables")
        sp.add_argument("--chart", required=True, help="chart variable")
        sp.add_argument("--weight", action="append", default=[], metavar="VAR=K", help="weighted blow-up")
        sp.add_argument("--new-names", help="names for the chart variables")
    sp = cmd("lc-check", "log canonicity of a rank-one foliation at a point")
    sp.add_argument("--point", help="comma-separated coordinates (default origin)")
    sp = cmd("nonlc-cert", "divisor with a(E;F) < -epsilon(E)")
    sp.add_argument("--point", help="comma-separated coordinates (default origin)")
    sp.add_argument("--max-steps", type=int, help="blow-up budget (default 2n)")
    cmd("fedder", "F-purity of a hypersurface at the origin")
    sp = cmd("ann", "the foliation annihilating a polynomial")
    sp.add_argument("--point", help="comma-separated coordinates (default origin)")
    sp.add_argument("--x-class", choices=CLASSES, help="class of the ambient pair, for the quotient guarantee")
    sp = cmd("quotient-class", "guaranteed class of an infinitesimal quotient", expr=False)
    sp.add_argument("--x-class", required=True, choices=CLASSES)
    sp.add_argument("--f-class", required=True, choices=CLASSES)
    sp.add_argument("--explain", action="store_true", help="show the inequalities")
    sp.add_argument("--validate", type=int, metavar="N", help="also sample N cases per table cell")
    sp = cmd("family-fiber", "compare family and fibre constants")
    sp.add_argument("--base", required=True, help="the base variable")
    sp.add_argument("--at", type=int, default=0, help="base point (default 0)")
    sp.add_argument("--lift", metavar="POLY", help="find a family lift of this fibre constant")
    sp.add_argument("--obstruct", metavar="POLY", help="try to prove this fibre constant has no lift")
    sp = cmd("corpus", "run the regression corpus", expr=False)
    sp.add_argument("--filter", help="run only cases with this tag or id substring")
    return ap


def _read_expr(args) -> str:
    text = args.expr
    if text == "-":
        text = sys.stdin.read()
    text = text.strip()
    if not text:
        raise UsageError("empty input expression")
    return text


def _ring(args) -> Ring:
    names = tuple(n.strip() for n in args.vars.split(",") if n.strip())
    try:
        return Ring(names, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _point(text: str | None, ring: Ring) -> tuple[int, ...]:
    if not text:
        return (0,) * ring.nvars
    parts = [s.strip() for s in text.split(",")]
    if all("=" in s for s in parts):
        vals = dict.fromkeys(ring.names, 0)
        for s in parts:
            k, v = s.split("=", 1)
            if k not in vals:
                raise UsageError(f"unknown variable {k!r} in --point")
            vals[k] = int(v)
        return tuple(vals[n] % ring.p for n in ring.names)
    if len(parts) != ring.nvars:
        raise UsageError(f"--point needs {ring.nvars} coordinates")
    return tuple(int(s) % ring.p for s in parts)


def _degree(args) -> int:
    return args.degree if args.degree is not None else 3 * args.p


def _linear(lp) -> list | None:
    return [list(r) for r in lp.matrix] if lp is not None else None


def _record(rec) -> dict:
    return {
        "a_F": rec.a_F,
        "epsilon": rec.epsilon,
        "content": rec.content,
        "pullback": rec.saturated_pullback,
        "raw_pullback": rec.raw_pullback,
        "chart": rec.chart_path[-1],
    }


def do_classify(args) -> Outcome:
    D = parse_derivation(_read_expr(args), _ring(args))
    c = classify(D)
    res = {"status": c.status, "p_power": c.witness}
    if c.a_num is not None:
        res["multiplier"] = c.a_num if c.a_den == 1 else {"numerator": c.a_num, "denominator": c.a_den}
    return Outcome(res, c.status, c.status == NOT_P_CLOSED)


def _toric_weights(D: Derivation) -> list[int] | None:
    ws = []
    for n in D.ring.names:
        c = D.coeff(n)
        x = D.ring.var(n)
        if c.is_zero():
            ws.append(0)
        elif c.is_monomial() and c.leading()[0] == next(iter(x.terms)):
            ws.append(c.leading()[1])
        else:
            return None
    return ws


def do_constants(args) -> Outcome:
    ring = _ring(args)
    if args.toric:
        ws = [int(s) for s in args.toric.split(",")]
        if len(ws) != ring.nvars:
            raise UsageError(f"--toric needs {ring.nvars} weights")
        D = Derivation.toric(ring, ws)
    else:
        D = parse_derivation(_read_expr(args), ring)
    d = _degree(args)
    K = kernel_truncated([D], d)
    res = {"degree": d, "basis": K.basis, "dimension": len(K.basis), "touches_boundary": K.touches_boundary}
    ws = _toric_weights(D)
    if ws is not None:
        res["minimal_generators"] = toric_constants(ws, ring.p).as_polys(ring)
    return Outcome(res)


def _chart(args, ring: Ring):
    weights = {}
    for w in args.weight:
        k, _, v = w.partition("=")
        if not v:
            raise UsageError(f"--weight expects VAR=K, got {w!r}")
        weights[k.strip()] = int(v)
    names = tuple(args.new_names.split(",")) if args.new_names else None
    center = tuple(s.strip() for s in args.center.split(","))
    return blowup_chart(ring, center, args.chart, weights or None, names)


def do_blowup(args) -> Outcome:
    ring = _ring(args)
    D = parse_derivation(_read_expr(args), ring)
    chart = _chart(args, ring)
    return Outcome(_record(discrepancy_rank1(D, chart)))


def do_lc_check(args) -> Outcome:
    ring = _ring(args)
    D = parse_derivation(_read_expr(args), ring)
    v = classify_rank1(D, _point(args.point, ring))
    res = {
        "status": v.status,
        "point": list(v.point),
        "linear_part": _linear(v.linear_part),
        "multiplicative": v.multiplicative,
        "notes": list(v.notes),
    }
    return Outcome(res, v.status, v.status == NOT_LC)


def do_nonlc_cert(args) -> Outcome:
    ring = _ring(args)
    D = parse_derivation(_read_expr(args), ring)
    pt = _point(args.point, ring)
    v = classify_rank1(D, pt)
    if v.status != NOT_LC:
        return Outcome({"status": v.status, "linear_part": _linear(v.linear_part), "certificate": None},
                       v.status, True)
    cert = find_nonlc_divisor(D, pt, args.max_steps)
    res = {
        "status": v.status,
        "linear_part": _linear(v.linear_part),
        "certificate": {
            "a_F": cert.a_F,
            "epsilon": cert.epsilon,
            "order": cert.order,
            "blowups": cert.blowups,
            "path": list(cert.path),
            "pullback": cert.record.saturated_pullback,
        },
    }
    return Outcome(res, "certified")


def do_fedder(args) -> Outcome:
    f = parse_poly(_read_expr(args), _ring(args))
    ok = fedder_f_pure(f)
    return Outcome({"f_pure": ok}, "f_pure" if ok else "not_f_pure", not ok)


_FOLIATION_CLASS = {REGULAR: SingClass.CANONICAL, STRICTLY_LC: SingClass.LC, NOT_LC: SingClass.NOT_LC,
                    REGULAR_CANONICAL: SingClass.CANONICAL}


def do_ann(args) -> Outcome:
    ring = _ring(args)
    s = parse_poly(_read_expr(args), ring)
    gens = ann_foliation(s)
    res: dict = {"generators": gens}
    verdict, negative = None, False
    if ring.nvars == 2:
        v = ann_surface_classify(s, _point(args.point, ring))
        verdict, negative = v.status, v.status == NOT_LC
        res.update(status=v.status, linear_part=v.matrix and [list(r) for r in v.matrix],
                   cross_check=v.cross_check, agrees=v.agrees)
        if args.x_class:
            f_class = _FOLIATION_CLASS[v.status]
            res["foliation_class"] = f_class
            res["quotient_guarantee"] = (
                None if f_class == SingClass.NOT_LC else transfer_class(args.x_class, f_class)
            )
    elif args.x_class:
        raise UsageError("--x-class needs a two-variable input")
    return Outcome(res, verdict, negative)


def do_quotient_class(args) -> Outcome:
    g = transfer_class(args.x_class, args.f_class)
    res: dict = {"x_class": args.x_class, "f_class": args.f_class, "guaranteed": g}
    if args.explain:
        res["explain"] = explain_transfer(args.x_class, args.f_class, args.p)
    if args.validate:
        rep = validate_transfer_table(args.validate, (args.p,), args.seed)
        cell = next(c for c in rep.cells if c.x_class == args.x_class and c.f_class == args.f_class)
        res["validation"] = {"samples": cell.samples, "violations": len(cell.violations)}
    return Outcome(res, g.value, g == SingClass.NOT_LC)


def do_family_fiber(args) -> Outcome:
    ring = _ring(args)
    if args.base not in ring.names:
        raise UsageError(f"base variable {args.base!r} is not in --vars")
    F = FamilyDerivation(parse_derivation(_read_expr(args), ring, frozen=(args.base,)), (args.base,))
    d = _degree(args)
    if args.obstruct:
        g = parse_poly(args.obstruct, F.fiber_ring)
        ob = noncommutativity_obstruction(F, g, args.at)
        res = {"status": ob.status, "forcing": ob.forcing, "ideal": list(ob.ideal), "note": ob.note}
        return Outcome(res, ob.status, ob.status != "liftable")
    if args.lift:
        g = parse_poly(args.lift, F.fiber_ring)
        lift = find_lift(F, g, args.at, d)
        if lift is None:
            return Outcome({"degree": d, "lift": None, "witness": None}, "no_lift", True)
        h = lift_witness(F, g, lift, args.at)
        return Outcome({"degree": d, "lift": lift, "witness": h}, "lifted")
    rep = fiber_vs_quotient_compare(F, args.at, d)
    res = {
        "equal": rep.equal,
        "degree": d,
        "family_kernel_dim": rep.family_kernel_dim,
        "fiber_kernel_dim": rep.fiber_kernel_dim,
        "missing": rep.missing,
        "lifts": [{"fiber": g, "lift": L} for g, L in rep.lifts],
    }
    return Outcome(res, "equal" if rep.equal else "unequal", not rep.equal)


HANDLERS = {
    "classify": do_classify,
    "constants": do_constants,
    "blowup": do_blowup,
    "discrepancy": do_blowup,
    "lc-check": do_lc_check,
    "nonlc-cert": do_nonlc_cert,
    "fedder": do_fedder,
    "ann": do_ann,
    "quotient-class": do_quotient_class,
    "family-fiber": do_family_fiber,
}


def _print_text(value: Any, indent: str = "") -> None:
    enc = report.encode(value)
    if isinstance(enc, dict):
        for k, v in enc.items():
            if isinstance(v, (dict, list)) and v:
                print(f"{indent}{k}:")
                _print_text(v, indent + "  ")
            else:
                print(f"{indent}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    elif isinstance(enc, list):
        for v in enc:
            if isinstance(v, (dict, list)):
                print(f"{indent}-")
                _print_text(v, indent + "  ")
            else:
                print(f"{indent}- {v}")
    else:
        print(f"{indent}{enc}")


def _error_kind(exc: BaseException) -> int:
    if isinstance(exc, (DegreeCapExceeded, MaxStepsExhausted)):
        return EXIT_LIMIT
    return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    for k, v in _DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if getattr(args, "schema", False):
        print(json.dumps(report.schema(), indent=2))
        return EXIT_OK
    if not args.command:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command == "corpus":
        return run_corpus(args.filter)
    try:
        out = HANDLERS[args.command](args)
    except (PfoliateError, ValueError) as exc:
        code = _error_kind(exc)
        err = {"kind": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ParseError):
            err["offset"] = exc.offset
        if args.json:
            print(report.dumps(report.envelope(args.command, args.p, False, None, None, err)))
        else:
            print(f"pfoliate {args.command}: {exc}", file=sys.stderr)
        return code
    if args.json:
        print(report.dumps(report.envelope(args.command, args.p, True, out.result, out.verdict)))
    else:
        if out.verdict is not None:
            print(f"verdict: {out.verdict}")
        _print_text(out.result)
    return EXIT_NEGATIVE if (args.strict and out.negative) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
