"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
import tempfile
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Sequence

from . import analysis, contfrac, linforms, numkit, sequences

DEFAULT_P = 60
SEQUENCES = ("gamma", "aptekarev", "rivoal", "stieltjes", "delta-cap", "discrepancy")
SUITES = ("integrality", "telescope", "cf-consistency", "asymptotics", "lemma-i", "all")
CF_NAMES = {
    "gamma": "gamma",
    "stieltjes": "stieltjes-delta",
    "stieltjes-delta": "stieltjes-delta",
    "gauss-limit": "gauss-limit",
    "laplace": "laplace",
    "evenpart": "evenpart",
    "delta-ones": "delta-ones",
}


class UsageError(Exception):
    pass


def _fmt(x: object) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def _jsonable(x: object) -> object:
    if isinstance(x, (Fraction, numkit.Dec)):
        return _fmt(x)
    return x


def render(header: Sequence[str], rows: Sequence[Sequence[object]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([[_fmt(v) for v in row] for row in rows])
        return buf.getvalue()
    if fmt == "json":
        objs = [{h: _jsonable(v) for h, v in zip(header, row)} for row in rows]
        return json.dumps(objs, indent=1) + "\n"
    lines = [" ".join(header)]
    lines += [" ".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_output(text: str, out: str | None) -> None:
    """Write to ``out`` atomically (temp file + rename), or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def _parse_ns(text: str) -> list[int]:
    try:
        ns = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n list {text!r}")
    if not ns or ns[0] < 0:
        raise argparse.ArgumentTypeError("n list must be non-empty and non-negative")
    return ns


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _precision(text: str) -> int:
    v = _nonneg(text)
    if v < 10:
        raise argparse.ArgumentTypeError("precision must be >= 10")
    return v


# ---------------------------------------------------------------------------
# commands


def cmd_seq(args: argparse.Namespace) -> int:
    N = args.max_n
    name = args.name
    if name == "gamma":
        header = ["n", "q", "p"]
        rows = [(r.n, r.q, r.p) for r in sequences.gamma_table_rec(N)][: N + 1]
    elif name == "aptekarev":
        header = ["n", "qt", "pt"]
        rows = [(r.n, r.qt, r.pt) for r in sequences.aptekarev_table_rec(max(N, 2))][: N + 1]
    elif name == "rivoal":
        header = ["n", "Q", "P"]
        rows = [(r.n, r.Q, r.P) for r in sequences.rivoal_table(max(N, 2))][: N + 1]
    elif name == "stieltjes":
        header = ["n", "s"]
        rows = list(enumerate(sequences.stieltjes_s(N)))
    elif name == "delta-cap":
        header = ["n", "delta_cap"]
        rows = list(enumerate(sequences.delta_cap_rec(max(N, 4))))[: N + 1]
    else:
        header = ["n", "frak_d", "delta_cap"]
        rows = [(r.n, r.frak_d, r.delta_cap) for r in sequences.discrepancy_table(N)]
    write_output(render(header, rows, args.format), args.out)
    return 0


def cmd_cf(args: argparse.Namespace) -> int:
    if args.family not in CF_NAMES:
        raise UsageError(f"unknown continued fraction family {args.family!r}")
    try:
        a, z = Fraction(args.a), Fraction(args.z)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad parameter: {exc}")
    cf = contfrac.cf_family(CF_NAMES[args.family], a, z)
    if args.format == "csv" and args.elements_only:
        write_output(contfrac.dump_elements_csv(cf, args.N), args.out)
        return 0
    convs = contfrac.convergents(cf, args.N)
    rows = []
    for c in convs:
        el = cf.element(c.n) if c.n else None
        value = c.value if not c.degenerate else "inf"
        rows.append((c.n, el.a if el else "", el.b if el else cf.b0, c.A, c.B, value))
    write_output(render(["n", "a", "b", "A", "B", "value"], rows, args.format), args.out)
    return 0


def cmd_linform(args: argparse.Namespace) -> int:
    if args.spec is None:
        raise UsageError("--spec FILE is required")
    try:
        text = Path(args.spec).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read spec: {exc}")
    spec = linforms.TermSpec.from_json(text)
    if not spec.proper:
        print("warning: improper: gamma coefficient is zero", file=sys.stderr)
    if not linforms.spec_wellformed(spec, args.n):
        print(f"spec is not well formed at n={args.n}", file=sys.stderr)
        return 1
    lf = linforms.linform(spec, args.n)
    value = linforms.linform_value(spec, args.n, args.precision)
    write_output(render(["n", "q", "p", "F"], [(lf.n, lf.q, lf.p, value)], args.format), args.out)
    return 0


def cmd_table(args: argparse.Namespace) -> int:
    report = analysis.error_table(args.family, args.ns, args.precision)
    if args.format == "csv":
        text = report.to_csv()
    elif args.format == "json":
        text = report.to_json() + "\n"
    else:
        rows = [(r.n, r.err, r.predicted, r.ratio) for r in report.rows]
        text = render(["n", "err", "predicted", "ratio"], rows, "text") + f"trend {report.trend}\n"
    write_output(text, args.out)
    return 0


def cmd_constants(args: argparse.Namespace) -> int:
    P = args.precision
    rows = [
        ("gamma", analysis.gamma_reference(P)),
        ("delta", analysis.delta_reference(P)),
        ("pi", numkit.const_pi(P)),
        ("e", numkit.const_e(P)),
    ]
    write_output(render(["name", "value"], rows, args.format), args.out)
    return 0


# ---------------------------------------------------------------------------
# verification suites: each yields (check name, passed, detail)

Result = tuple[str, bool, str]


def suite_integrality(N: int, P: int, ns: list[int]) -> Iterator[Result]:
    report = analysis.integrality_report(N)
    for c in report.claims:
        detail = "" if c.passed else f"first counterexample n={c.counterexample}"
        yield f"{c.claim} (n<={N})", c.passed, detail


def suite_telescope(N: int, P: int, ns: list[int]) -> Iterator[Result]:
    chk = linforms.telescope_verify(N)
    yield f"telescoping identity 0<=n<={N}", chk.ok, "" if chk else f"witness (n, t) = {chk.witness}"
    mutant = linforms.telescope_verify(N, lambda n, t: linforms.certificate(n, t) + 1)
    yield "mutated certificate rejected", not mutant.ok, ""


def suite_cf(N: int, P: int, ns: list[int]) -> Iterator[Result]:
    convs = contfrac.convergents(contfrac.cf_family("gamma"), N)
    bad = [c.n for c in convs[1:] if not c.same_value(sequences.gamma_p(c.n) / sequences.gamma_q(c.n))]
    yield f"gamma CF convergents = p_n/q_n (n<={N})", not bad, f"n={bad[:1]}" if bad else ""
    ok, at = contfrac.stieltjes_convergent_check(N)
    yield f"Stieltjes CF convergents = s_n/q_n (n<={N})", ok, f"n={at}" if at else ""
    for label, A, B in (
        ("(p_n, q_n)", [sequences.gamma_p(n) for n in range(N + 1)],
         [sequences.gamma_q(n) for n in range(N + 1)]),
        ("(p~_n, q~_n)", *zip(*[(a.pt, a.qt) for a in map(sequences.aptekarev_closed, range(min(N, 100) + 1))])),
    ):
        rebuilt = contfrac.convergents(contfrac.elements_from_convergents(A, B), len(A) - 1)
        good = all(c.A == A[c.n] and c.B == B[c.n] for c in rebuilt[1:])
        yield f"convergent inversion roundtrip on {label}", good, ""
    for a, z in ((1, 1), (2, 3), (Fraction(1, 2), 5)):
        base = contfrac.cf_family("laplace", a, z)
        even = contfrac.convergents(contfrac.even_contraction(base), 30)
        full = contfrac.convergents(base, 60)
        good = all(c.same_value(full[2 * c.n]) for c in even)
        yield f"even contraction of laplace({a},{z})", good, ""


def suite_asymptotics(N: int, P: int, ns: list[int]) -> Iterator[Result]:
    top = max(ns)
    main = analysis.error_table("gamma-main", ns, P)
    dev = [abs(r.ratio - 1).to_fraction() for r in main.rows]
    yield "gamma-main |ratio-1| strictly decreasing", main.trend == "decreasing", str([float(d) for d in dev])
    yield f"gamma-main |ratio-1| < 0.2 at n={top}", dev[-1] < Fraction(1, 5), f"{float(dev[-1]):.4f}"
    consts = analysis.linform_asymptotics(ns, P)
    last = consts.rows[-1]
    rel_q = abs(last.c_denom.to_fraction() / consts.target_denom.to_fraction() - 1)
    rel_f = abs(last.c_form.to_fraction() / consts.target_form.to_fraction() - 1)
    yield f"q_n constant within 10% at n={top}", rel_q < Fraction(1, 10), f"{float(rel_q):.4f}"
    yield f"F_n constant within 10% at n={top}", rel_f < Fraction(1, 10), f"{float(rel_f):.4f}"
    apt = analysis.error_table("aptekarev", ns, P)
    d = abs(apt.rows[-1].ratio - 1).to_fraction()
    yield f"aptekarev |ratio-1| < 0.2 at n={top}", d < Fraction(1, 5), f"{float(d):.4f}"


def suite_lemma(N: int, P: int, ns: list[int]) -> Iterator[Result]:
    chk = analysis.lemma_i_check(range(N + 1), P)
    yield f"|F_n - I_n| <= e/(n+1)^2 for n<={N}", chk.ok, "" if chk else str(chk.witness)
    W = P + numkit.GUARD_DIGITS
    i0 = linforms.i_value(0, W).to_fraction()
    ref = analysis.delta_reference(W).to_fraction() / numkit.const_e(W).to_fraction()
    yield "I_0 = delta/e within 1e-8", abs(i0 - ref) < Fraction(1, 10**8), ""


SUITE_FUNCS: dict[str, tuple[Callable[..., Iterator[Result]], int, int]] = {
    # name: (runner, default max-n, default precision)
    "integrality": (suite_integrality, 200, DEFAULT_P),
    "telescope": (suite_telescope, 50, DEFAULT_P),
    "cf-consistency": (suite_cf, 200, DEFAULT_P),
    "asymptotics": (suite_asymptotics, 0, 0),
    "lemma-i": (suite_lemma, 100, DEFAULT_P),
}


def cmd_verify(args: argparse.Namespace) -> int:
    names = list(SUITE_FUNCS) if args.suite == "all" else [args.suite]
    ns = args.ns or [100, 400, 900, 1600]
    rows = []
    for name in names:
        runner, default_n, default_p = SUITE_FUNCS[name]
        N = default_n if args.max_n is None else args.max_n
        P = args.precision
        if P is None:
            P = analysis.required_precision("gamma-main", ns) if name == "asymptotics" else default_p
            P = max(P, DEFAULT_P)
        for check, passed, detail in runner(N, P, ns):
            rows.append((name, check, "PASS" if passed else "FAIL", detail))
    if args.format == "text":
        text = "".join(f"[{s}] {name}: {check}{'  ' + d if d else ''}\n" for name, check, s, d in rows)
    else:
        text = render(["suite", "check", "status", "detail"], rows, args.format)
    write_output(text, args.out)
    return 0 if all(r[2] == "PASS" for r in rows) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-P", "--precision", type=_precision, default=None,
                        help=f"digits after the decimal point (default {DEFAULT_P}, raised "
                        "to the minimum an asymptotic table needs)")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--gamma-digits", default=None, help="file overriding the embedded gamma table")

    parser = argparse.ArgumentParser(prog="eulercf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seq", parents=[common], help="exact sequence tables")
    p.add_argument("name", choices=SEQUENCES)
    p.add_argument("--max-n", type=_nonneg, default=10)
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("cf", parents=[common], help="continued fraction elements and convergents")
    p.add_argument("family")
    p.add_argument("-N", type=_nonneg, default=10)
    p.add_argument("--a", default="1")
    p.add_argument("--z", default="1")
    p.add_argument("--elements-only", action="store_true",
                   help="with --format csv: dump index,a_num,a_den,b_num,b_den")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--max-n", type=_nonneg, default=None)
    p.add_argument("--ns", type=_parse_ns, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("linform", parents=[common], help="linear form from a term specification")
    p.add_argument("--spec", default=None, help="JSON {num, den, m}")
    p.add_argument("-n", "--n", type=_nonneg, required=True)
    p.set_defaults(func=cmd_linform)

    p = sub.add_parser("table", parents=[common], help="error table for an approximation family")
    p.add_argument("family", choices=analysis.FAMILIES)
    p.add_argument("--ns", type=_parse_ns, default=[100, 400, 900, 1600])
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("constants", parents=[common], help="reference constants")
    p.set_defaults(func=cmd_constants)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "table" and args.precision is None:
        args.precision = max(DEFAULT_P, analysis.required_precision(args.family, args.ns))
    elif args.command != "verify" and args.precision is None:
        args.precision = DEFAULT_P
    try:
        with contextlib.ExitStack() as stack:
            if args.gamma_digits:
                try:
                    text = Path(args.gamma_digits).read_text()
                except OSError as exc:
                    raise UsageError(f"cannot read gamma digits: {exc}")
                try:
                    stack.enter_context(numkit.gamma_table(text))
                except ValueError as exc:
                    raise UsageError(str(exc))
            with warnings.catch_warnings():
                warnings.simplefilter("default")
                return args.func(args)
    except (UsageError, linforms.IllFormedSpecError, numkit.PrecisionError, analysis.TableCorruptError) as exc:
        print(f"eulercf: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
