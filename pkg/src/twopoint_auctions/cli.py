"""Command-line interface.

Subcommands: formulas, mechanism, certify, sweep, continuous.  All numeric
arguments are exact rationals ("1/2", "2"); decimal strings are rejected
unless --allow-decimal is given (they are then parsed exactly).  Exit codes:
0 success, 1 usage, 2 audit failure, 3 oracle mismatch, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import audit as audit_mod
from .core import (
    AuctionSpec,
    CapExceeded,
    DEFAULT_PROFILE_CAP,
    InvalidSpec,
    decimal_str,
    rat,
    rat_allow_decimal,
    rat_str,
)
from .continuous import ContinuousSpec, corollary_probe, lp_over_grid
from .formulas import revenue_report, sweep_high_value
from .mechanisms import (
    LABEL_BIC,
    LABEL_DIC,
    build_bic_mechanism,
    build_dic_mechanism,
    mechanism_to_json,
)
from .oracle import (
    DEFAULT_LP_PROFILE_CAP,
    build_bic_lp,
    build_dic_lp,
    certification_grid,
    certify_main_theorem,
)
from .simplex import lp_to_text

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_AUDIT = 2
EXIT_MISMATCH = 3
EXIT_CAP = 4

CAP_ENV_VAR = "TWOPOINT_AUCTIONS_CAP"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _pretty_type(t: str) -> str:
    return f"({t[0]},{t[1]})"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec_args(sub):
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", required=True)
    sub.add_argument("--a", required=True)
    sub.add_argument("--b", required=True)


def _parse_spec(args) -> AuctionSpec:
    conv = rat_allow_decimal if args.allow_decimal else rat
    return AuctionSpec(args.n, conv(args.p), conv(args.a), conv(args.b))


def _frac_cells(x: Fraction):
    return [str(x.numerator), str(x.denominator), decimal_str(x)]


# ---------------------------------------------------------------------------
# formulas
# ---------------------------------------------------------------------------


def cmd_formulas(args) -> int:
    spec = _parse_spec(args)
    rep = revenue_report(spec)
    if args.format == "json":
        doc = {
            "spec": spec.to_json(),
            "r_D": rat_str(rep.r_dic),
            "r_B": rat_str(rep.r_bic),
            "srev": rat_str(rep.srev),
            "s_b": rat_str(rep.s_b),
            "grand_bundle": rat_str(rep.bundle_rev),
            "flags": {
                "alpha": rep.flags.alpha,
                "beta": rep.flags.beta,
                "gamma": rep.flags.gamma,
            },
            "breakpoints": {
                "v1": rat_str(rep.breakpoints.v1),
                "v2": rat_str(rep.breakpoints.v2),
                "v3": rat_str(rep.breakpoints.v3),
            },
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [
        f"spec: n={spec.n} p={rat_str(spec.p)} a={rat_str(spec.a)} b={rat_str(spec.b)}",
        f"r_D          = {rat_str(rep.r_dic)} ({decimal_str(rep.r_dic)})",
        f"r_B          = {rat_str(rep.r_bic)} ({decimal_str(rep.r_bic)})",
        f"SREV         = {rat_str(rep.srev)} ({decimal_str(rep.srev)})",
        f"s_b          = {rat_str(rep.s_b)} ({decimal_str(rep.s_b)})",
        f"grand bundle = {rat_str(rep.bundle_rev)} ({decimal_str(rep.bundle_rev)})",
        f"flags: alpha={rep.flags.alpha} beta={rep.flags.beta} gamma={rep.flags.gamma}",
        "breakpoints: v1={} ({}) v2={} ({}) v3={} ({})".format(
            rat_str(rep.breakpoints.v1),
            decimal_str(rep.breakpoints.v1),
            rat_str(rep.breakpoints.v2),
            decimal_str(rep.breakpoints.v2),
            rat_str(rep.breakpoints.v3),
            decimal_str(rep.breakpoints.v3),
        ),
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# mechanism
# ---------------------------------------------------------------------------


def _violation_lines(report, limit: int = 8) -> list[str]:
    lines = []
    for v in report.violations[:limit]:
        others = (
            "averaged"
            if v.others == "averaged"
            else "[" + " ".join(_pretty_type(t) for t in v.others) + "]"
        )
        reported = _pretty_type(v.reported_type) if v.reported_type else "-"
        lines.append(
            f"  {report.condition} violation: buyer {v.buyer + 1} "
            f"true {_pretty_type(v.true_type)} report {reported} "
            f"others {others} lhs {rat_str(v.lhs)} < rhs {rat_str(v.rhs)}"
        )
    if len(report.violations) > limit:
        lines.append(f"  ... {len(report.violations) - limit} more")
    return lines


def _witness_line(report) -> str:
    v = report.violations[0]
    others = " ".join(_pretty_type(t) for t in v.others)
    return (
        f"buyer {v.buyer + 1} true {_pretty_type(v.true_type)} "
        f"report {_pretty_type(v.reported_type)} others [{others}] "
        f"lhs {rat_str(v.lhs)} < rhs {rat_str(v.rhs)}"
    )


def cmd_mechanism(args) -> int:
    spec = _parse_spec(args)
    builder = build_dic_mechanism if args.impl == "dic" else build_bic_mechanism
    mech = builder(spec)
    doc = mechanism_to_json(mech)

    status = EXIT_OK
    checks = {}
    lines = []
    if args.check:
        rep_formulas = revenue_report(spec)
        target = rep_formulas.r_dic if args.impl == "dic" else rep_formulas.r_bic
        target_name = "r_D" if args.impl == "dic" else "r_B"
        ir = audit_mod.check_ir(mech)
        checks["IR"] = ir.to_json()
        lines.append(f"IR: {'ok' if ir.passed else 'FAILED'}")
        suite_ok = ir.passed
        if args.impl == "dic":
            dic = audit_mod.check_dic(mech)
            checks["DIC"] = dic.to_json()
            lines.append(f"DIC: {'ok' if dic.passed else 'FAILED'}")
            suite_ok = suite_ok and dic.passed
        else:
            bic = audit_mod.check_bic(mech)
            bir = audit_mod.check_bir(mech)
            checks["BIC"] = bic.to_json()
            checks["BIR"] = bir.to_json()
            lines.append(f"BIC: {'ok' if bic.passed else 'FAILED'}")
            lines.append(f"BIR: {'ok' if bir.passed else 'FAILED'}")
            suite_ok = suite_ok and bic.passed and bir.passed
        revenue = audit_mod.expected_revenue(mech)
        rev_ok = revenue == target
        checks["revenue"] = {
            "expected_revenue": rat_str(revenue),
            target_name: rat_str(target),
            "equal": rev_ok,
        }
        lines.append(
            f"revenue {rat_str(revenue)} == {target_name} {rat_str(target)}: "
            f"{'ok' if rev_ok else 'FAILED'}"
        )
        suite_ok = suite_ok and rev_ok
        if args.impl == "bic":
            dic = audit_mod.check_dic(mech)
            checks["DIC_informational"] = dic.to_json()
            if dic.passed:
                lines.append("DIC (informational): ok")
            else:
                lines.append(
                    "DIC (informational): violated at " + _witness_line(dic)
                )
        if not suite_ok:
            status = EXIT_AUDIT

    if args.format == "json":
        if checks:
            doc["checks"] = checks
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        header = [f"mechanism: {mech.label} at n={spec.n} p={rat_str(spec.p)} "
                  f"a={rat_str(spec.a)} b={rat_str(spec.b)}"]
        _emit("\n".join(header + lines) + "\n", args.out)
    return status


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def _certify_line(report) -> str:
    spec = report.spec
    return (
        f"n={spec.n} p={rat_str(spec.p)} a={rat_str(spec.a)} b={rat_str(spec.b)} | "
        f"lp_D={rat_str(report.lp_dic)} r_D={rat_str(report.r_dic)} "
        f"{'ok' if report.equal_dic else 'MISMATCH'} | "
        f"lp_B={rat_str(report.lp_bic)} r_B={rat_str(report.r_bic)} "
        f"{'ok' if report.equal_bic else 'MISMATCH'}"
    )


def cmd_certify(args) -> int:
    symmetrize = {"auto": None, "on": True, "off": False}[args.symmetrize]
    cap = args.cap if args.cap else DEFAULT_LP_PROFILE_CAP
    if args.grid:
        specs = certification_grid()
    else:
        for name in ("n", "p", "a", "b"):
            if getattr(args, name) is None:
                raise SystemExit(EXIT_USAGE)
        specs = [_parse_spec(args)]
    reports = []
    for spec in specs:
        if args.lp_export:
            _emit(lp_to_text(build_dic_lp(spec, cap), "dominant-strategy program"),
                  args.lp_export + ".dic.lp")
            _emit(lp_to_text(build_bic_lp(spec, cap), "bayesian program"),
                  args.lp_export + ".bic.lp")
        reports.append(certify_main_theorem(spec, symmetrize=symmetrize, max_profiles=cap))
    if args.format == "json":
        _emit(json.dumps([r.to_json() for r in reports], indent=2) + "\n", args.out)
    else:
        lines = [_certify_line(r) for r in reports]
        ok = sum(1 for r in reports if r.all_equal)
        lines.append(f"certified {ok}/{len(reports)} specs")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r.all_equal for r in reports) else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

SWEEP_HEADER = [
    "b_num", "b_den", "b_dec",
    "rD_num", "rD_den", "rD_dec",
    "rB_num", "rB_den", "rB_dec",
    "srev_num", "srev_den", "srev_dec",
    "alpha", "beta", "gamma", "is_breakpoint",
]


def cmd_sweep(args) -> int:
    conv = rat_allow_decimal if args.allow_decimal else rat
    rows = sweep_high_value(
        args.n, conv(args.p), conv(args.a), conv(args.b_min), conv(args.b_max),
        args.steps,
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(
            _frac_cells(row.b)
            + _frac_cells(row.r_dic)
            + _frac_cells(row.r_bic)
            + _frac_cells(row.srev)
            + [row.flags.alpha, row.flags.beta, row.flags.gamma,
               int(row.is_breakpoint)]
        )
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# continuous
# ---------------------------------------------------------------------------

CONTINUOUS_HEADER = [
    "a", "grid_m", "impl",
    "optimum_num", "optimum_den", "optimum_decimal",
    "ratio_to_a", "within_band",
]


def cmd_continuous(args) -> int:
    conv = rat_allow_decimal if args.allow_decimal else rat
    a_values = [conv(x) for x in args.a_list.split(",")]
    lam = conv(args.lam)
    rows = corollary_probe(a_values, args.grid_m, lam=lam)
    impls = ("dic", "bic") if args.impl == "both" else (args.impl,)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONTINUOUS_HEADER)
    for row in rows:
        for impl in impls:
            opt = row.lp_dic if impl == "dic" else row.lp_bic
            ratio = row.ratio_dic if impl == "dic" else row.ratio_bic
            band = row.within_band_dic if impl == "dic" else row.within_band_bic
            writer.writerow(
                [rat_str(row.a), row.grid_m, impl,
                 str(opt.numerator), str(opt.denominator), decimal_str(opt),
                 decimal_str(ratio), "" if band is None else int(band)]
            )
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="twopoint-auctions")
    parser.add_argument(
        "--allow-decimal", action="store_true",
        help="accept decimal strings for rational arguments (parsed exactly)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_formulas = sub.add_parser("formulas", help="closed-form revenues and benchmarks")
    _spec_args(p_formulas)
    p_formulas.add_argument("--format", choices=("text", "json"), default="text")
    p_formulas.add_argument("--out")
    p_formulas.set_defaults(func=cmd_formulas)

    p_mech = sub.add_parser("mechanism", help="export an optimal mechanism's tables")
    _spec_args(p_mech)
    p_mech.add_argument("--impl", choices=("dic", "bic"), required=True)
    p_mech.add_argument("--check", action="store_true",
                        help="run the matching audit suite and revenue assertion")
    p_mech.add_argument("--format", choices=("json", "text"), default="json")
    p_mech.add_argument("--out")
    p_mech.set_defaults(func=cmd_mechanism)

    p_cert = sub.add_parser("certify", help="LP-oracle certification of the formulas")
    p_cert.add_argument("--n", type=int)
    p_cert.add_argument("--p")
    p_cert.add_argument("--a")
    p_cert.add_argument("--b")
    p_cert.add_argument("--grid", action="store_true", help="run the built-in grid")
    p_cert.add_argument("--symmetrize", choices=("auto", "on", "off"), default="auto")
    p_cert.add_argument("--lp-export", help="path prefix for textual LP export")
    p_cert.add_argument(
        "--cap", type=int,
        default=int(os.environ.get(CAP_ENV_VAR, 0)) or None,
        help="profile-count cap override for the LP oracle",
    )
    p_cert.add_argument("--format", choices=("text", "json"), default="text")
    p_cert.add_argument("--out")
    p_cert.set_defaults(func=cmd_certify)

    p_sweep = sub.add_parser("sweep", help="revenue curves against the high value b")
    p_sweep.add_argument("--n", type=int, required=True)
    p_sweep.add_argument("--p", required=True)
    p_sweep.add_argument("--a", required=True)
    p_sweep.add_argument("--b-min", required=True)
    p_sweep.add_argument("--b-max", required=True)
    p_sweep.add_argument("--steps", type=int, default=60)
    p_sweep.add_argument("--out")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cont = sub.add_parser("continuous",
                            help="discretized two-interval uniform exploration")
    p_cont.add_argument("--a-list", required=True,
                        help="comma-separated scales, e.g. 10,20,40")
    p_cont.add_argument("--lambda", dest="lam", default="2")
    p_cont.add_argument("--grid-m", type=int, default=1)
    p_cont.add_argument("--impl", choices=("dic", "bic", "both"), default="both")
    p_cont.add_argument("--out")
    p_cont.set_defaults(func=cmd_continuous)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvalidSpec, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
