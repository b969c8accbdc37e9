"""Command-line front end.

Commands:

    hyperq list                      show the corpus
    hyperq verify <id>|all [...]     verify one identity or the whole corpus
    hyperq eval "<dsl>" [...]        evaluate an ad-hoc series or closed form
    hyperq derive --id I --param P   operator-method derivative check
    hyperq pi --digits D             print digits of pi (cross-checked)

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 convergence or internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from . import corpus, dsl, series, verify
from .functions import pi_constant

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _q_list(text: str):
    return tuple(_fraction(part) for part in text.split(","))


def _add_verify_flags(p: argparse.ArgumentParser):
    p.add_argument("--digits", type=int, default=30, help="residual tolerance 10^-digits")
    p.add_argument("--work-digits", type=int, default=None,
                   help="working precision in digits (default digits+10)")
    p.add_argument("--samples", type=int, default=20, help="exact samples per identity")
    p.add_argument("--seed", type=int, default=0, help="sampler seed")
    p.add_argument("--q", type=_q_list, default=(Fraction(1, 2),),
                   help="comma-separated q values, e.g. 1/3,1/2,7/10")
    p.add_argument("--max-n", type=int, default=8, help="largest terminating order sampled")
    p.add_argument("--terms-budget", type=int, default=10 ** 6,
                   help="term budget before a series is declared non-geometric")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperq",
        description="verify hypergeometric and q-series identities, exactly or to n digits")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="list the identity corpus")
    p_list.add_argument("--format", choices=("text", "json"), default="text")

    p_verify = sub.add_parser("verify", help="verify one identity or 'all'")
    p_verify.add_argument("target", help="identity id, or 'all'")
    p_verify.add_argument("--include-variants", action="store_true",
                          help="also run deliberately wrong variant records")
    _add_verify_flags(p_verify)

    p_eval = sub.add_parser("eval", help="evaluate a DSL series or closed form")
    p_eval.add_argument("text", help="DSL text, e.g. 'sum k=0..n : 1'")
    p_eval.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                        help="bind a parameter to a rational (repeatable)")
    p_eval.add_argument("--digits", type=int, default=30)
    p_eval.add_argument("--terms-budget", type=int, default=10 ** 6)

    p_derive = sub.add_parser("derive", help="operator-method derivative check")
    p_derive.add_argument("--id", required=True, help="terminating identity id")
    p_derive.add_argument("--param", required=True, help="parameter to differentiate")
    p_derive.add_argument("--order", type=int, choices=(1, 2), default=1)
    p_derive.add_argument("--point", type=_fraction, default=None,
                          help="rational point for the lift (sampled when omitted)")
    p_derive.add_argument("--bind", action="append", default=[], metavar="NAME=EXPR",
                          help="substitution binding, e.g. c=2-b (repeatable)")
    p_derive.add_argument("--samples", type=int, default=10)
    p_derive.add_argument("--seed", type=int, default=0)
    p_derive.add_argument("--max-n", type=int, default=8)

    p_pi = sub.add_parser("pi", help="print digits of pi")
    p_pi.add_argument("--digits", type=int, default=30)

    return parser


def _check_common(args):
    digits = getattr(args, "digits", None)
    if digits is not None and digits < 4:
        raise argparse.ArgumentTypeError("--digits must be at least 4")
    samples = getattr(args, "samples", None)
    if samples is not None and samples < 1:
        raise argparse.ArgumentTypeError("--samples must be at least 1")


def _options_from(args) -> verify.VerifyOptions:
    return verify.VerifyOptions(
        digits=args.digits,
        samples=args.samples,
        seed=args.seed,
        q_values=args.q,
        max_n=args.max_n,
        terms_budget=args.terms_budget,
        work_digits=args.work_digits,
    )


def _cmd_list(args) -> int:
    records = corpus.list_identities()
    for rec in records:
        if args.format == "json":
            import json
            print(json.dumps({"id": rec.id, "kind": rec.kind, "anchor": rec.anchor,
                              "variant": rec.expect_fail}))
        else:
            mark = "  [expected-fail variant]" if rec.expect_fail else ""
            print(f"{rec.id:10s} {rec.kind:18s} {rec.anchor}{mark}")
    return EXIT_OK


def _print_report(report, fmt: str):
    print(report.machine_line() if fmt == "json" else report.text_line())


def _cmd_verify(args) -> int:
    options = _options_from(args)
    if args.target == "all":
        reports, summary = verify.verify_all(options, include_variants=args.include_variants)
        for rep in reports:
            _print_report(rep, args.format)
        if args.format == "text":
            print(f"summary: {summary['pass']} pass, {summary['fail']} fail, "
                  f"{summary['error']} error")
        if summary["error"]:
            return EXIT_INTERNAL
        return EXIT_OK if summary["fail"] == 0 else EXIT_FAIL
    try:
        rec = corpus.get_identity(args.target)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    report = verify.verify_identity(rec, options)
    _print_report(report, args.format)
    if report.verdict == "error":
        return EXIT_INTERNAL
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


def _parse_bindings(pairs, allow_expr: bool):
    bindings = {}
    for item in pairs:
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {item!r}")
        name, _, value = item.partition("=")
        name = name.strip()
        value = value.strip()
        try:
            bindings[name] = Fraction(value)
        except (ValueError, ZeroDivisionError):
            if not allow_expr:
                raise argparse.ArgumentTypeError(f"not a rational number: {value!r}")
            bindings[name] = value
    return bindings


def _cmd_eval(args) -> int:
    bindings = _parse_bindings(args.param, allow_expr=False)
    side = dsl.parse_side(args.text)
    if isinstance(side, dsl.SeriesSpec):
        if side.terminating:
            value = series.sum_terminating(side, bindings)
            print(value)
        else:
            prec = math.ceil((args.digits + 10) * math.log2(10)) + 32
            value, tail, terms = series.sum_infinite(side, bindings, prec,
                                                     terms_budget=args.terms_budget)
            print(value.to_decimal(args.digits))
            print(f"tail bound <= {tail.bound.to_decimal(3)} after {terms} terms "
                  f"(ratio {tail.ratio.to_decimal(3)} at k={tail.start_index})")
    else:
        exact_ok = True
        try:
            value = series.evaluate_closed(side, bindings)
            print(value)
        except series.EvalError:
            exact_ok = False
        if not exact_ok:
            prec = math.ceil((args.digits + 10) * math.log2(10)) + 32
            value = series.evaluate_closed(side, bindings, prec)
            print(value.to_decimal(args.digits))
    return EXIT_OK


def _cmd_derive(args) -> int:
    options = verify.VerifyOptions(seed=args.seed, samples=args.samples, max_n=args.max_n)
    bindings = _parse_bindings(args.bind, allow_expr=True)
    report = verify.operator_derive_check(args.id, args.param, args.order,
                                          point=args.point, bindings=bindings,
                                          options=options, samples=args.samples)
    print(report.text_line())
    if report.verdict == "error":
        return EXIT_INTERNAL
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


def _cmd_pi(args) -> int:
    prec = math.ceil(args.digits * math.log2(10)) + 32
    print(pi_constant(prec).to_decimal(args.digits))
    return EXIT_OK


_DISPATCH = {
    "list": _cmd_list,
    "verify": _cmd_verify,
    "eval": _cmd_eval,
    "derive": _cmd_derive,
    "pi": _cmd_pi,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        _check_common(args)
        return _DISPATCH[args.command](args)
    except dsl.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (corpus.CorpusError, argparse.ArgumentTypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, series.EvalError, verify.SampleExhaustedError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
