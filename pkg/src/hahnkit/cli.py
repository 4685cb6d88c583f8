"""Command-line surface.

Subcommands: formula (print the definability formulas), eval (evaluate a
formula at series points), solve (root search for a univariate polynomial),
collapse (quantifier collapse of positive formulas), verify (run the
verification suites).

Exit codes: 0 on success, 1 on mathematical failure (a verify suite with
failures or unknowns), 2 on usage or parse errors.  `--json` switches every
subcommand to a stable structured output.  The environment variable
HAHN_SEED overrides the default verify seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction

from .errors import HahnkitError, ParseError
from .evaluator import EvalConfig, Evaluator
from .finite_field import factor_prime_power
from .formulas import (
    default_f,
    epsilon_display,
    fe_to_e,
    is_eplus,
    is_feplus,
    kochen_display,
    mk_epsilon,
    mk_eta,
    mk_kochen,
    mk_phi,
    mk_zeta,
    zeta_display,
)
from .hahn import INF, format_series
from .harness import SUITES, run_all
from .solver import BranchNode, BranchReport, puiseux_roots
from .syntax import (
    format_formula,
    parse_formula,
    parse_gf,
    parse_int_poly,
    parse_series,
    parse_upoly,
)

DEFAULT_QS = [2, 3, 4, 5, 8, 9]


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hahnkit",
        description="exact computation and definability formulas for Hahn "
        "series fields over finite residue fields",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p_formula = sub.add_parser("formula", help="print a definability formula")
    p_formula.add_argument(
        "kind", choices=["zeta", "epsilon", "eta", "kochen", "phi"]
    )
    p_formula.add_argument("--q", type=int, required=True, help="residue field size")
    p_formula.add_argument("--f", help="monic integer polynomial, e.g. 'x^2-x-1'")
    p_formula.add_argument("--a", type=int, default=0, help="point parameter for phi")
    p_formula.add_argument("--u", type=int, default=1, help="unit for kochen")
    p_formula.add_argument(
        "--two-witness", action="store_true", help="two-witness variant of phi"
    )
    p_formula.add_argument(
        "--simplify",
        action="store_true",
        help="print the rational field-language display form as well",
    )
    p_formula.add_argument("--json", action="store_true")

    p_eval = sub.add_parser("eval", help="evaluate a formula at series points")
    p_eval.add_argument("--field", required=True, help="e.g. GF(4) or GF(4;a^2+a+1)")
    group = p_eval.add_mutually_exclusive_group(required=True)
    group.add_argument("--formula", help="formula text")
    group.add_argument("--formula-file", help="path to a formula file")
    p_eval.add_argument(
        "--assign",
        action="append",
        default=[],
        metavar="VAR=SERIES",
        help="free variable assignment (repeatable)",
    )
    p_eval.add_argument("--prec", type=_fraction, default=Fraction(10))
    p_eval.add_argument("--budget", type=int, default=32)
    p_eval.add_argument("--mode", choices=["ring", "field"], default="ring")
    p_eval.add_argument("--json", action="store_true")

    p_solve = sub.add_parser("solve", help="find roots of a univariate polynomial")
    p_solve.add_argument("--field", required=True)
    p_solve.add_argument("--poly", required=True, help="e.g. 'y^2 - (1+t)*y + t^(1/2)'")
    p_solve.add_argument("--prec", type=_fraction, default=Fraction(10))
    p_solve.add_argument("--budget", type=int, default=32)
    p_solve.add_argument(
        "--all", action="store_true", help="enumerate branches instead of stopping early"
    )
    p_solve.add_argument("--plot", help="write a Newton polygon figure to this path")
    p_solve.add_argument("--json", action="store_true")

    p_col = sub.add_parser("collapse", help="collapse a positive formula to one existential")
    p_col.add_argument("--mode", choices=["sound", "paper"], default="sound")
    p_col.add_argument("--f", required=True, help="rootless monic polynomial, e.g. 'x^2-2'")
    p_col.add_argument("--input", required=True, help="formula text")
    p_col.add_argument("--json", action="store_true")

    p_ver = sub.add_parser("verify", help="run the verification suites")
    p_ver.add_argument(
        "--suite",
        default="all",
        help=f"comma list from {{{','.join(SUITES)}}} or 'all'",
    )
    p_ver.add_argument("--q", default=",".join(str(q) for q in DEFAULT_QS))
    p_ver.add_argument("--samples", type=int, default=200)
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--u", type=int, default=1)
    p_ver.add_argument("--prec", type=_fraction, default=Fraction(10))
    p_ver.add_argument("--json", action="store_true")
    p_ver.add_argument(
        "--report-dir", help="write per-suite CSV files and figures here"
    )
    return top


def cmd_formula(args) -> int:
    try:
        factor_prime_power(args.q)
    except HahnkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    f = parse_int_poly(args.f) if args.f else None
    warned: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.kind == "zeta":
            phi = mk_zeta(args.q, f)
        elif args.kind == "epsilon":
            phi = mk_epsilon(args.q, f)
        elif args.kind == "eta":
            phi = mk_eta(args.q, f)
        elif args.kind == "kochen":
            phi = mk_kochen(args.q, args.u)
        else:
            phi = mk_phi(f or default_f(args.q), args.a, args.two_witness)
        warned = [str(w.message) for w in caught]
    simplified = None
    if args.simplify:
        if args.kind == "zeta":
            simplified = format_formula(zeta_display(args.q))
        elif args.kind == "epsilon":
            simplified = format_formula(epsilon_display(args.q))
        elif args.kind == "kochen":
            simplified = kochen_display(args.q, args.u)
    if args.json:
        print(
            json.dumps(
                {
                    "kind": args.kind,
                    "q": args.q,
                    "formula": format_formula(phi),
                    "single_existential": is_eplus(phi),
                    "positive_fragment": is_feplus(phi),
                    "warnings": warned,
                    "simplified": simplified,
                }
            )
        )
    else:
        print(format_formula(phi))
        if simplified:
            print(f"simplified: {simplified}")
        for w in warned:
            print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    ctx = parse_gf(args.field)
    text = args.formula
    if text is None:
        with open(args.formula_file) as fh:
            text = fh.read().strip()
    phi = parse_formula(text, mode=args.mode)
    assign = {}
    for item in args.assign:
        if "=" not in item:
            raise ParseError(f"expected VAR=SERIES, got {item!r}", 0)
        name, _, literal = item.partition("=")
        assign[name.strip()] = parse_series(literal.strip(), ctx)
    cfg = EvalConfig(prec=args.prec, budget=args.budget, mode=args.mode)
    verdict = Evaluator(ctx, cfg).formula(phi, assign)
    if args.json:
        print(
            json.dumps(
                {
                    "verdict": verdict.kind,
                    "witnesses": {k: format_series(v) for k, v in verdict.witnesses},
                    "reason": verdict.reason,
                }
            )
        )
    else:
        print(verdict.kind)
        for name, value in verdict.witnesses:
            print(f"  witness {name} = {format_series(value)}")
        if verdict.reason:
            print(f"  reason: {verdict.reason}")
    return 0


def _tree_lines(node: BranchNode, depth: int = 0) -> list[str]:
    label = node.status or "branch"
    detail = f" root so far: {format_series(node.partial_root)}"
    if node.residual is not None:
        r = "+inf" if node.residual == INF else str(node.residual)
        detail += f", residual valuation {r}"
    if node.note:
        detail += f" ({node.note})"
    lines = ["  " * depth + f"- {label}:{detail}"]
    for child in node.children:
        lines.extend(_tree_lines(child, depth + 1))
    return lines


def _report_json(rep: BranchReport) -> dict:
    def node_dict(n: BranchNode) -> dict:
        return {
            "partial_root": format_series(n.partial_root),
            "status": n.status,
            "residual": None
            if n.residual is None
            else ("+inf" if n.residual == INF else str(n.residual)),
            "note": n.note,
            "children": [node_dict(c) for c in n.children],
        }

    return {
        "verdict": rep.verdict,
        "witnesses": [
            {
                "value": format_series(w.value),
                "residual": "+inf" if w.residual == INF else str(w.residual),
                "exact": w.exact,
            }
            for w in rep.witnesses
        ],
        "exact_input": rep.exact_input,
        "complete": rep.complete,
        "tree": node_dict(rep.root),
    }


def cmd_solve(args) -> int:
    ctx = parse_gf(args.field)
    g = parse_upoly(args.poly, ctx)
    rep = puiseux_roots(g, args.prec, args.budget, first_only=not args.all)
    if args.plot:
        from .report import newton_polygon_figure

        newton_polygon_figure(g, args.plot)
    if args.json:
        print(json.dumps(_report_json(rep)))
    else:
        print(rep.verdict)
        for w in rep.witnesses:
            r = "+inf" if w.residual == INF else str(w.residual)
            kind = "exact root" if w.exact else f"residual valuation {r}"
            print(f"  witness {format_series(w.value)} ({kind})")
        print("branch tree:")
        print("\n".join(_tree_lines(rep.root)))
    return 0


def cmd_collapse(args) -> int:
    f = parse_int_poly(args.f)
    phi = parse_formula(args.input, mode="ring")
    result = fe_to_e(phi, f, mode=args.mode)
    if args.json:
        print(
            json.dumps(
                {
                    "formula": format_formula(result.formula),
                    "mode": result.mode,
                    "single_existential": result.single_exists,
                    "binders_merged": result.binders_merged,
                    "notes": list(result.notes),
                }
            )
        )
    else:
        print(format_formula(result.formula))
        for note in result.notes:
            print(f"warning: {note}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    suites = list(SUITES) if args.suite == "all" else args.suite.split(",")
    for s in suites:
        if s not in SUITES:
            print(f"error: unknown suite {s!r}", file=sys.stderr)
            return 2
    qs = [int(q) for q in args.q.split(",")]
    for q in qs:
        factor_prime_power(q)
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("HAHN_SEED", "42"))
    reports = run_all(qs, count=args.samples, seed=seed, u=args.u, suites=suites,
                      prec=args.prec)
    if args.report_dir:
        from .report import write_reports

        written = write_reports(reports, args.report_dir)
        if not args.json:
            for path in written:
                print(f"wrote {path}", file=sys.stderr)
    ok = all(r.ok for r in reports)
    if args.json:
        print(json.dumps({"ok": ok, "reports": [r.to_dict() for r in reports]}))
    else:
        for r in reports:
            t = r.tally()
            flags = " ".join(f"{k}={v}" for k, v in t.items() if v)
            print(f"{r.suite:9s} q={r.q:<2d} {'ok' if r.ok else 'FAIL'}  {flags}")
        print("all suites passed" if ok else "suite failures detected")
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "formula":
            return cmd_formula(args)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "collapse":
            return cmd_collapse(args)
        if args.command == "verify":
            return cmd_verify(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except HahnkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
