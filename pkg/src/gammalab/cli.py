"""Command-line entry point: ``gammalab <subcommand> [options]``.

Subcommands
  eval         Gamma(z) with backend and error estimate
  fibers       solutions of Gamma(z) = c in a strip, or the certified one near -n
  trace-level  the curve |Gamma(x+iy)| = r from its real seed (json or csv)
  almost-int   exact almost-integer verdict for a Puiseux polynomial
  dim          relation rank / dimension estimate of a Gamma-image, or classify equations
  verify       run the acceptance suite (nonzero exit on any failure)
  demo         hypersurface residuals or the decay probe

Exit codes: 0 success, 1 computation error, 2 usage error.
The environment variable GAMMALAB_DIGITS sets the default working precision.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from . import almost_integer as ai
from . import bialgebraic_lab as bl
from . import fiber_solver as fs
from . import gamma_core as gc
from . import level_curves as lc
from . import verify as vf
from .errors import GammaLabError
from .report import ReportDocument, write_report

# options whose values may start with '-' (negative numbers, strips)
_VALUE_FLAGS = {"--z", "--c", "--strip", "--poly", "--variety", "--classify", "--branch", "--x-end", "--r"}


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Accept 2, -1.5, 3-2i, 2+0i, i, -i, 1e-3j."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    s = s.replace("+j", "+1j").replace("-j", "-1j")
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"not a complex number: {text!r}") from None


def parse_strip(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise UsageError(f"strip must look like LO:HI, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random draw (default 0)")
    common.add_argument("--digits", type=int, default=None,
                        help="working digits; > 15 switches to multiprecision (default from GAMMALAB_DIGITS or 15)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", "-o", default=None, help="write to this path instead of stdout")

    p = _Parser(prog="gammalab", description="Gamma function lab.", formatter_class=argparse.RawDescriptionHelpFormatter,
                epilog=__doc__.split("\n\n", 1)[1])
    p.add_argument("--version", action="version", version=f"gammalab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate Gamma(z)")
    e.add_argument("--z", required=True, help="complex point, e.g. 2+0i or -3.5+1i")

    f = sub.add_parser("fibers", parents=[common], help="solve Gamma(z) = c")
    f.add_argument("--c", required=True, help="target value (complex)")
    g = f.add_mutually_exclusive_group(required=True)
    g.add_argument("--strip", help="LO:HI, enumerate every solution with LO <= Re z <= HI")
    g.add_argument("--left", type=int, metavar="N", help="certified solution near the pole -N")
    f.add_argument("--m", type=int, default=fs.DEFAULT_M, help="contour samples per side (>= 256)")

    t = sub.add_parser("trace-level", parents=[common], help="trace |Gamma| = r")
    t.add_argument("--r", type=float, required=True)
    t.add_argument("--x-end", type=float, required=True)
    t.add_argument("--growth", action="store_true", help="add the growth-ratio report (needs >= 100 samples past x=10)")

    a = sub.add_parser("almost-int", parents=[common], help="exact almost-integer verdict")
    a.add_argument("--poly", required=True, help="e.g. 'x*(x-1)/2', 'x^(3/2) + 1', 'binomial(x, 3)'")

    d = sub.add_parser("dim", parents=[common], help="relation rank of a Gamma-image")
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--variety", help="'param: t1, t1+1' (coordinates in t1..tk)")
    g.add_argument("--classify", help="equations in X1..Xn separated by ';'")
    d.add_argument("--count", type=int, default=400)
    d.add_argument("--D", type=int, default=2, help="monomial degree bound")
    d.add_argument("--tol", type=float, default=bl.DEFAULT_TOL)
    d.add_argument("--no-gamma", action="store_true", help="rank the sampled points themselves")

    v = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    v.add_argument("--only", default=None, help="comma-separated criterion ids (1-9)")

    m = sub.add_parser("demo", parents=[common], help="demonstrations")
    m.add_argument("name", choices=("hypersurface", "probe"))
    m.add_argument("--count", type=int, default=100)
    m.add_argument("--branch", default="1 - x", help="probe: branch expression in x")
    m.add_argument("--curve", default="X1 + X2 - 1", help="probe: plane curve equation")
    m.add_argument("--n-max", type=int, default=30)
    m.add_argument("--C", type=float, default=1.0)
    return p


def _join_negative_values(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in ("-", "--") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _config(args) -> gc.PrecisionConfig:
    if args.digits is None:
        return gc.precision_from_env()
    return gc.DEFAULT.with_digits(args.digits)


def _cmd_eval(args, cfg):
    z = parse_complex(args.z)
    v = gc.eval_gamma(z, cfg)
    s = v.value
    return {"z": z, "value": v.complex, "log_abs": s.log_abs, "arg": s.arg_cont,
            "error_estimate": v.error_estimate, "backend": v.backend.value}, None, []


def _cmd_fibers(args, cfg):
    c = parse_complex(args.c)
    if args.left is not None:
        p = fs.left_fiber(c, args.left, cfg, m=args.m)
        return {"c": c, "n": args.left, "points": [p.to_dict()]}, None, []
    lo, hi = parse_strip(args.strip)
    pts = fs.fibers_in_strip(c, lo, hi, m=args.m)
    payload = {"c": c, "strip": [lo, hi], "y_bound": pts.y_bound, "total_winding": pts.total_winding,
               "cells": pts.cells, "points": [p.to_dict() for p in pts]}
    return payload, None, []


def _cmd_trace(args, cfg):
    tr = lc.trace_level_curve(args.r, args.x_end, cfg)
    payload = {"trace": tr.to_dict()}
    warnings = []
    if args.growth:
        try:
            payload["growth"] = lc.growth_ratio_report(tr).to_dict()
        except ValueError as exc:
            warnings.append(str(exc))
    return payload, tr.to_csv(), warnings


def _cmd_almost(args, cfg):
    try:
        parsed = ai.parse_puiseux(args.poly)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    verdict = ai.decide_text(args.poly)
    poly = None if parsed.irrational else str(parsed.poly)
    return {"input": args.poly, "normalized": poly, "verdict": verdict.to_dict()}, None, []


def _cmd_dim(args, cfg):
    if args.classify is not None:
        eqs = [s.strip() for s in args.classify.split(";") if s.strip()]
        try:
            return {"equations": eqs, "classification": bl.classify_trivially_bialgebraic(eqs).to_dict()}, None, []
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from None
    try:
        spec = bl.VarietySpec.from_text(args.variety)
    except (ValueError, TypeError, SyntaxError) as exc:
        raise UsageError(str(exc)) from None
    pts = bl.sample_variety(spec, args.count, bl.DEFAULT_REGION, args.seed)
    warnings = []
    if args.no_gamma:
        vals = pts
    else:
        push = bl.gamma_push(pts)
        vals = push.values
        if push.skipped:
            warnings.append(f"{len(push.skipped)} pole-adjacent points skipped")
        if push.jacobian_vanishing:
            warnings.append(f"Gamma' nearly vanishes at {len(push.jacobian_vanishing)} sampled coordinates")
    rep = bl.relation_rank(vals, args.D, args.tol, seed=args.seed)
    warnings.extend(rep.warnings)
    return {"variety": spec.description, "region": bl.DEFAULT_REGION.to_dict(), "gamma": not args.no_gamma,
            "report": rep.to_dict()}, None, warnings


def _cmd_verify(args, cfg):
    only = None
    if args.only:
        try:
            only = {int(s) for s in args.only.split(",")}
        except ValueError:
            raise UsageError(f"--only expects ids like 1,3,5; got {args.only!r}") from None
        if not only <= set(range(1, 10)):
            raise UsageError("criterion ids are 1..9")
    results = vf.run_all(args.seed, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    timings = {str(r.id): {"elapsed_s": round(r.elapsed_s, 3), "budget_s": r.budget_s, "within_budget": r.within_budget}
               for r in results}
    return vf.payload_for(results, args.seed), None, [], timings, all(r.ok for r in results)


def _cmd_demo(args, cfg):
    if args.name == "hypersurface":
        st = bl.hypersurface_demo(args.count, args.seed)
        return st.to_dict(), None, [] if st.passed else ["max residual above 1e-9"]
    curve = bl.VarietySpec.implicit([args.curve], ambient_dim=2)
    tab = bl.negative_integer_probe(curve, args.branch, range(1, args.n_max + 1), args.C)
    return {"curve": args.curve, "branch": args.branch, "table": tab.to_dict()}, tab.to_csv(), list(tab.notes)


_DISPATCH = {
    "eval": _cmd_eval, "fibers": _cmd_fibers, "trace-level": _cmd_trace, "almost-int": _cmd_almost,
    "dim": _cmd_dim, "verify": _cmd_verify, "demo": _cmd_demo,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
    except ValueError as exc:
        print(f"gammalab: error: {exc}", file=sys.stderr)
        return 2
    echo = ["gammalab", *argv]
    prec = {"working_digits": cfg.working_digits, "tol_residual": cfg.tol_residual}
    try:
        out = _DISPATCH[args.command](args, cfg)
    except UsageError as exc:
        print(f"gammalab: error: {exc}", file=sys.stderr)
        return 2
    except (GammaLabError, ArithmeticError) as exc:
        doc = ReportDocument(echo, args.seed, prec, {"error": {"type": type(exc).__name__, "message": str(exc)}})
        write_report(doc, "json", args.output)
        print(f"gammalab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    payload, csv_text, warnings = out[:3]
    timings = out[3] if len(out) > 3 else {}
    success = out[4] if len(out) > 4 else True
    doc = ReportDocument(echo, args.seed, prec, payload, list(warnings), timings=timings)
    try:
        write_report(doc, args.format, args.output, csv_text)
    except ValueError as exc:
        print(f"gammalab: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gammalab: cannot write report: {exc}", file=sys.stderr)
        return 1
    return 0 if success else 1


if __name__ == "__main__":
    sys.exit(main())
