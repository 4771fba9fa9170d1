"""Command line interface: ``qnahm expand|dual|catalog|bailey|fit``.

Exit status: 0 success, 1 mathematical mismatch, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bailey
from .catalog import load_catalog, run_catalog
from .eta_fit import MixedWeights, SingleQuotient, classify, default_moduli, fit_eta
from .expr import eval_expr, expr_from_json
from .linalg import MatrixError
from .nahm import ModularTriple, dual_quadruple, dual_triple, gnahm_expand, load_form
from .products import EtaQuotient
from .series import QExp, SeriesError, agrees, as_fraction, format_rational

OK, MISMATCH, USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _rational_list(text: str) -> list:
    return [_rational(x) for x in text.split(",") if x.strip()]


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, indent=1, sort_keys=True))


def _matrix_text(M) -> str:
    return "[" + ", ".join("[" + ", ".join(format_rational(x) for x in row) + "]" for row in M) + "]"


def _vector_text(v) -> str:
    return "(" + ", ".join(format_rational(x) for x in v) + ")"


def describe_quotient(E: EtaQuotient) -> str:
    body = "{" + ", ".join(f"{format_rational(m)}:{e}" for m, e in E.exps) + "}"
    head = ""
    if E.scalar != 1:
        head += format_rational(E.scalar) + "*"
    if E.vshift:
        head += f"q^{{{format_rational(E.vshift)}}}*"
    return f"{head}{body}, weight {format_rational(E.weight)}"


def _describe_fit(r) -> str:
    if isinstance(r, EtaQuotient):
        return describe_quotient(r)
    return str(r)


# -- subcommands ---------------------------------------------------------


def cmd_expand(args) -> int:
    form = load_form(_read_json(args.input))
    f = gnahm_expand(form, args.order, args.spec)
    if args.json:
        _emit(f.to_json())
    else:
        print(f.format())
    return OK


def _print_form(form, star: str = "*") -> None:
    print(f"A{star} = {_matrix_text(form.A)}")
    print(f"B{star} = {_vector_text(form.B)}")
    print(f"C{star} = {format_rational(form.C)}")
    if hasattr(form, "D"):
        print(f"D{star} = {_vector_text(form.D)}")


def cmd_dual(args) -> int:
    data = _read_json(args.input)
    form = load_form(data)
    dual = dual_triple(form) if isinstance(form, ModularTriple) else dual_quadruple(form)
    if args.json:
        _emit(dual.to_json())
    else:
        _print_form(dual)
    if args.check is not None:
        T = args.check
        for label, x in (("input", form), ("dual", dual)):
            f = gnahm_expand(x, T)
            try:
                verdict = _describe_fit(fit_eta(f, None, T))
            except SeriesError as exc:
                verdict = f"cannot fit: {exc}"
            print(f"{label}: {f.format(8)}")
            print(f"{label} fit: {verdict}")
    return OK


def cmd_catalog(args) -> int:
    records = load_catalog(args.path)
    summary = run_catalog(records, args.order, args.filter, args.parallel)
    if args.json:
        _emit(summary.to_json())
    else:
        print(summary.text())
    return OK if summary.ok else MISMATCH


_TRANSFORM_SCALE = {"TBL": 2, "S2BL": 1, "T128": 1}


def cmd_bailey(args) -> int:
    if args.finite:
        res = bailey.finite_identity_check(args.finite, args.x_exp, args.nmax, args.order)
        print("PASS" if res is None else f"FAIL {res}")
        return OK if res is None else MISMATCH
    if not args.pair:
        raise InputError("--pair is required unless --finite is given")
    if args.transform:
        which = args.transform.upper()
        scale = args.scale if args.scale is not None else _TRANSFORM_SCALE.get(which, 1)
        p = bailey.builtin_pair(args.pair, scale)
        lhs, rhs = bailey.apply_transform(p, which, args.order)
        same = agrees(lhs, rhs, args.order)
        if args.json:
            _emit({"lhs": lhs.to_json(), "rhs": rhs.to_json(), "equal": same})
        else:
            print(f"lhs: {lhs.format(10)}")
            print(f"rhs: {rhs.format(10)}")
            print("EQUAL" if same else "DIFFERENT")
        return OK if same else MISMATCH
    p = bailey.builtin_pair(args.pair, args.scale if args.scale is not None else 1)
    res = bailey.verify_pair(p, args.nmax, args.order)
    print("PASS" if res is None else f"FAIL {res}")
    return OK if res is None else MISMATCH


def _load_series(path: str, order) -> QExp:
    data = _read_json(path)
    if isinstance(data, dict) and "tag" in data:
        if order is None:
            raise InputError("an expression needs --order")
        return eval_expr(expr_from_json(data), order)
    if isinstance(data, dict) and "coeffs" in data:
        f = QExp.from_json(data)
        return f if order is None else f.truncate(order)
    raise InputError(f"{path}: expected a series or a tagged expression")


def cmd_fit(args) -> int:
    f = _load_series(args.input, args.order)
    T = f.order if args.order is None else args.order
    moduli = args.moduli if args.moduli else default_moduli(f, T)
    if args.terms:
        parts = [(1, _load_series(p, args.order)) for p in [args.input] + args.terms]
        r = classify(parts, moduli, T)
        print(r)
        return OK if isinstance(r, (SingleQuotient, MixedWeights)) else MISMATCH
    r = fit_eta(f, moduli, T)
    if args.json:
        _emit(r.to_json() | {"weight": format_rational(r.weight)} if isinstance(r, EtaQuotient)
              else {"not_quotient": format_rational(r.exponent)})
    else:
        print(_describe_fit(r))
    return OK if isinstance(r, EtaQuotient) else MISMATCH


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qnahm", description="Exact q-series checks for Nahm sums.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="expand a Nahm sum from a triple/quadruple file")
    p.add_argument("input", help="JSON file with A, B, C and optional D ('-' for stdin)")
    p.add_argument("--order", type=_rational, required=True)
    p.add_argument("--spec", type=_rational_list, help="extra linear exponents, comma separated")
    p.add_argument("--json", action="store_true", help="print the series as JSON")
    p.set_defaults(run=cmd_expand)

    p = sub.add_parser("dual", help="print the dual triple or quadruple")
    p.add_argument("input")
    p.add_argument("--check", type=_rational, metavar="ORDER",
                   help="also expand both sums and try an eta-quotient fit")
    p.add_argument("--json", action="store_true", help="print the dual in the input format")
    p.set_defaults(run=cmd_dual)

    p = sub.add_parser("catalog", help="verify a catalog of identities")
    p.add_argument("path", nargs="?", help="catalog JSON (default: built-in)")
    p.add_argument("--order", type=_rational, help="override every record's order")
    p.add_argument("--filter", help="keep records whose name or a tag contains this text")
    p.add_argument("--parallel", type=int, help="worker processes (default: all cores)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_catalog)

    p = sub.add_parser("bailey", help="check a Bailey pair, a transform, or a finite identity")
    p.add_argument("--pair", help="BP1, BP2, BP3 or BP4")
    p.add_argument("--scale", type=_rational)
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--order", type=_rational, default=Fraction(25))
    p.add_argument("--transform", choices=["TBL", "S2BL", "T128", "tbl", "s2bl", "t128"])
    p.add_argument("--finite", choices=["even-finite", "odd-finite"])
    p.add_argument("--x-exp", type=_rational, default=Fraction(1), help="x = q^X for --finite")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_bailey)

    p = sub.add_parser("fit", help="fit a series (or expression) as an eta quotient")
    p.add_argument("input", help="series JSON or tagged expression JSON")
    p.add_argument("--moduli", type=_rational_list)
    p.add_argument("--order", type=_rational)
    p.add_argument("--terms", nargs="+", help="further summands: classify the sum by weights")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_fit)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (InputError, SeriesError, MatrixError, KeyError, TypeError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"qnahm {args.command}: error: {msg}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
