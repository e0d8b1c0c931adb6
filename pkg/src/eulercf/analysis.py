"""Reference constants, error tables and empirical checks of the asymptotic
and arithmetic claims about the sequences.

All tables are computed at a working precision of P + 10 digits and
reported at P digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from . import linforms
from .linforms import Check
from .numkit import (
    GUARD_DIGITS,
    Dec,
    PrecisionError,
    const_e,
    const_gamma,
    const_pi,
    dec_exp,
    dec_ln,
    dec_sqrt,
    factorial,
    gamma_digits,
    lcm_upto,
    rat_to_dec,
)
from .sequences import (
    aptekarev_closed,
    discrepancy_table,
    gamma_p,
    gamma_q,
    gamma_table_rec,
    rivoal_table,
    stieltjes_s,
)


class TableCorruptError(ValueError):
    """The gamma digit table disagrees with the sequence's own approximants."""


class InsufficientPrecisionError(PrecisionError):
    def __init__(self, required: int, given: int):
        super().__init__(f"precision {given} too small, need P >= {required}")
        self.required = required


# ---------------------------------------------------------------------------
# reference constants

GATE_N = 400
GATE_P = 60


@lru_cache(maxsize=4)
def _gate(digits: str) -> Fraction:
    """Returns |p_400/q_400 - gamma_table| / (2 pi e^-80); raises when >= 3.

    A table shorter than GATE_P digits is compared at its own length, with
    its truncation error 10^-W added to the tolerance.
    """
    W = min(GATE_P, len(digits) - 2)
    approx = rat_to_dec(gamma_p(GATE_N) / gamma_q(GATE_N), GATE_P)
    err = abs(approx.to_fraction() - Dec.parse(digits[: 2 + W]).to_fraction())
    bound = (const_pi(GATE_P) * 2 * dec_exp(Dec.from_int(-4 * math.isqrt(GATE_N), GATE_P))).to_fraction()
    slack = Fraction(1, 10**W) if W < GATE_P else Fraction(0)
    ratio = (err - slack) / bound
    if ratio >= 3:
        raise TableCorruptError(
            f"|p_{GATE_N}/q_{GATE_N} - gamma| = {float(err):.3e} exceeds 3 * 2pi e^-80 = {float(3 * bound):.3e}"
        )
    return ratio


def gamma_reference(P: int) -> Dec:
    """gamma to P digits from the digit table, after the self-consistency gate."""
    value = const_gamma(P)
    _gate(gamma_digits())
    return value


def delta_reference(P: int) -> Dec:
    """Euler-Gompertz constant from  -delta = e gamma + e sum_{k>=1} (-1)^k / (k! k)."""
    W = P + GUARD_DIGITS
    one = 10**W
    inv_fact = one
    total = 0
    k = 1
    while True:
        inv_fact //= k
        term = inv_fact // k
        if term == 0:
            break
        total += -term if k % 2 else term
        k += 1
    s = Dec(total, W)
    return (-(const_e(W) * (gamma_reference(W) + s))).rescale(P)


# ---------------------------------------------------------------------------
# error tables


@dataclass(frozen=True)
class ErrorRow:
    n: int
    approx: Fraction
    err: Dec
    predicted: Dec
    ratio: Dec


@dataclass(frozen=True)
class AsymptoticReport:
    family: str
    rows: tuple[ErrorRow, ...]
    trend: str = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(sorted(self.rows, key=lambda r: r.n)))
        dev = [abs(r.ratio - 1) for r in self.rows]
        decreasing = all(b < a for a, b in zip(dev, dev[1:]))
        object.__setattr__(self, "trend", "decreasing" if decreasing else "non-monotone")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "n", "approx_num", "approx_den", "err", "predicted", "ratio"])
        for r in self.rows:
            w.writerow(
                [self.family, r.n, r.approx.numerator, r.approx.denominator, r.err, r.predicted, r.ratio]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [
            {
                "family": self.family,
                "n": r.n,
                "approx_num": str(r.approx.numerator),
                "approx_den": str(r.approx.denominator),
                "err": str(r.err),
                "predicted": str(r.predicted),
                "ratio": str(r.ratio),
            }
            for r in self.rows
        ]
        return json.dumps({"family": self.family, "trend": self.trend, "rows": rows}, indent=1)


def _root(n: int, k: int, W: int) -> Dec:
    """n**(1/k) for k in {2, 3, 4} (cube root via exp/ln)."""
    x = Dec.from_int(n, W)
    if k == 2:
        return dec_sqrt(x)
    if k == 4:
        return dec_sqrt(dec_sqrt(x))
    return dec_exp(dec_ln(x) / k)


def _decay_rate(family: str, n: int) -> float:
    """Natural-log decay of the error, used for the precision precondition."""
    if family == "aptekarev":
        return 2 * math.sqrt(2 * n)
    if family == "rivoal":
        return 4.5 * n ** (2 / 3)
    return 4 * math.sqrt(n)


def _predicted(family: str, n: int, W: int) -> Dec:
    two_pi = const_pi(W) * 2
    if family == "gamma-main":
        return two_pi * dec_exp(-(_root(n, 2, W) * 4))
    if family == "aptekarev":
        return two_pi * dec_exp(-(_root(2 * n, 2, W) * 2))
    if family == "delta-stieltjes":
        return dec_exp(-(_root(n, 2, W) * 4))
    if family == "rivoal":
        c = _root(n, 3, W)
        return dec_exp(-(c * c * 9) / 2 + c * 3 / 2)
    raise KeyError(family)


FAMILIES = ("gamma-main", "aptekarev", "delta-stieltjes", "rivoal")


def _approximants(family: str, ns: Sequence[int]) -> dict[int, Fraction]:
    if family == "gamma-main":
        return {n: gamma_p(n) / gamma_q(n) for n in ns}
    if family == "aptekarev":
        out = {}
        for n in ns:
            a = aptekarev_closed(n)
            out[n] = Fraction(a.pt, a.qt)
        return out
    if family == "delta-stieltjes":
        s = stieltjes_s(max(ns))
        return {n: Fraction(s[n], gamma_q(n)) for n in ns}
    if family == "rivoal":
        table = rivoal_table(max(max(ns), 2))
        return {n: table[n].P / table[n].Q for n in ns}
    raise KeyError(family)


def required_precision(family: str, ns: Iterable[int]) -> int:
    return math.floor(_decay_rate(family, max(ns)) / math.log(10) + 20) + 1


def error_table(family: str, ns: Sequence[int], P: int) -> AsymptoticReport:
    """Error rows |approx - target| against the predicted decay for ``family``.

    gamma-main:       p_n/q_n vs gamma, predicted 2 pi e^{-4 sqrt n}
    aptekarev:        p~_n/q~_n vs gamma, predicted 2 pi e^{-2 sqrt(2n)}
    delta-stieltjes:  s_n/q_n vs delta, predicted e^{-4 sqrt n} (ratio is the fitted constant)
    rivoal:           P_n/Q_n vs gamma, predicted e^{-9/2 n^{2/3} + 3/2 n^{1/3}} (ratio is c_0)
    """
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}")
    ns = sorted(set(ns))
    if not ns:
        raise ValueError("ns must be non-empty")
    need = required_precision(family, ns)
    if P < need:
        raise InsufficientPrecisionError(need, P)
    W = P + GUARD_DIGITS
    target = delta_reference(W) if family == "delta-stieltjes" else gamma_reference(W)
    rows = []
    for n, approx in _approximants(family, ns).items():
        err = abs(rat_to_dec(approx, W) - target)
        pred = _predicted(family, n, W)
        ratio = err / pred
        rows.append(ErrorRow(n, approx, err.rescale(P), pred.rescale(P), ratio.rescale(P)))
    return AsymptoticReport(family, tuple(rows))


def fit_envelope(report: AsymptoticReport, train: range) -> Fraction:
    """Largest err/envelope quotient over the training indices."""
    return max(r.ratio.to_fraction() for r in report.rows if r.n in train)


def rivoal_envelope_check(
    train: range = range(10, 51), test: range = range(51, 151), P: int = 120
) -> tuple[Check, Fraction]:
    """Fit c_0 on ``train`` and require err <= c_0 * envelope on ``test``."""
    report = error_table("rivoal", list(train) + list(test), P)
    c0 = fit_envelope(report, train)
    for r in report.rows:
        if r.n in test and r.err.to_fraction() > c0 * r.predicted.to_fraction():
            return Check(False, (r.n, r.ratio)), c0
    return Check(True), c0


# ---------------------------------------------------------------------------
# normalised constants of the linear form and the denominators


@dataclass(frozen=True)
class ConstantRow:
    n: int
    c_form: Dec  # F_n n^{1/4} e^{2 sqrt n} / n!
    c_denom: Dec  # q_n n^{1/4} e^{-2 sqrt n} / n!


@dataclass(frozen=True)
class ConstantReport:
    rows: tuple[ConstantRow, ...]
    target_form: Dec  # sqrt(pi/e)
    target_denom: Dec  # 1 / (2 sqrt(pi e))


def linform_asymptotics(ns: Sequence[int], P: int) -> ConstantReport:
    ns = sorted(set(ns))
    need = required_precision("gamma-main", ns)
    if P < need:
        raise InsufficientPrecisionError(need, P)
    W = P + GUARD_DIGITS
    pi, e = const_pi(W), const_e(W)
    target_form = dec_sqrt(pi / e)
    target_denom = Dec.from_int(1, W) / (dec_sqrt(pi * e) * 2)
    gamma = gamma_reference(W)
    rows = []
    for n in ns:
        q, p = gamma_q(n), gamma_p(n)
        nf = factorial(n)
        F = rat_to_dec(p, W) - gamma * q
        root4 = _root(n, 4, W)
        grow = dec_exp(_root(n, 2, W) * 2)
        shrink = dec_exp(-(_root(n, 2, W) * 2))
        c_form = (F / nf) * grow * root4
        c_denom = rat_to_dec(Fraction(q, nf), W) * shrink * root4
        rows.append(ConstantRow(n, c_form.rescale(P), c_denom.rescale(P)))
    return ConstantReport(tuple(rows), target_form.rescale(P), target_denom.rescale(P))


def laguerre_q(n: int) -> int:
    """n! L_n(-1) = sum_k C(n,k) n!/k!."""
    total = 0
    term = 1  # n!/k! * C(n,k) at k = n
    for k in range(n, -1, -1):
        total += term
        if k:
            term = term * k * k // (n - k + 1)
    return total


# ---------------------------------------------------------------------------
# F_n versus I_n


def lemma_i_check(
    ns: Iterable[int],
    P: int,
    f_value: Callable[[int, int], Dec] | None = None,
) -> Check:
    """|I_n - F_n| <= e/(n+1)^2 + 10^(1-P) for every n in ns."""
    if f_value is None:
        def f_value(n: int, P: int) -> Dec:
            return linforms.linform_value(linforms.GAMMA_SPEC, n, P)
    slack = Dec(10, P)
    for n in ns:
        diff = abs(linforms.i_value(n, P) - f_value(n, P))
        bound = linforms.tail_bound(n, P) + slack
        if diff > bound:
            return Check(False, (n, diff, bound))
    return Check(True)


# ---------------------------------------------------------------------------
# integrality claims


@dataclass(frozen=True)
class ClaimResult:
    claim: str
    passed: bool
    counterexample: int | None = None
    checked: int = 0


@dataclass(frozen=True)
class IntegralityReport:
    N: int
    claims: tuple[ClaimResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def lines(self) -> list[str]:
        out = []
        for c in self.claims:
            status = "PASS" if c.passed else f"FAIL at n={c.counterexample}"
            out.append(f"{c.claim}: {status} ({c.checked} values)")
        return out


def _claim(name: str, ns: Iterable[int], pred: Callable[[int], bool]) -> ClaimResult:
    count = 0
    for n in ns:
        count += 1
        if not pred(n):
            return ClaimResult(name, False, n, count)
    return ClaimResult(name, True, None, count)


def integrality_report(N: int) -> IntegralityReport:
    rec = gamma_table_rec(N)
    p = [gamma_p(n) for n in range(N + 1)]
    apt = [aptekarev_closed(n) for n in range(N + 1)]
    riv = rivoal_table(max(N, 2))
    disc = discrepancy_table(N)
    D = [1] + [lcm_upto(n) for n in range(1, N + 1)]
    fact = [factorial(n) for n in range(N + 1)]

    def is_int(x: Fraction) -> bool:
        return Fraction(x).denominator == 1

    claims = (
        _claim("q_n integer (closed form = recurrence)", range(N + 1),
               lambda n: isinstance(rec[n].q, int) and rec[n].q == gamma_q(n)),
        _claim("D_n p_n integer", range(1, N + 1), lambda n: is_int(D[n] * p[n])),
        _claim("n! divides q~_n", range(N + 1), lambda n: apt[n].qt % fact[n] == 0),
        _claim("D_n p~_n divisible by n!", range(1, N + 1),
               lambda n: (D[n] * apt[n].pt) % fact[n] == 0),
        _claim("n! Q_n integer", range(N + 1), lambda n: is_int(fact[n] * riv[n].Q)),
        _claim("n! D_n P_n integer", range(N + 1), lambda n: is_int(fact[n] * D[n] * riv[n].P)),
        _claim("d_n nonzero", range(N + 1), lambda n: disc[n].frak_d != 0),
        _claim("Delta_n = n d_n integer", range(1, N + 1),
               lambda n: is_int(n * disc[n].frak_d) and disc[n].delta_cap == n * disc[n].frak_d),
        _claim("Delta_n > 0 for n >= 4", range(4, N + 1), lambda n: disc[n].delta_cap > 0),
        _claim("Delta_2n even", range(1, N // 2 + 1), lambda n: disc[2 * n].delta_cap % 2 == 0),
    )
    return IntegralityReport(N, claims)


# ---------------------------------------------------------------------------
# log-domain helpers for astronomically sized quantities


def log_abs(x: Fraction, P: int) -> Dec:
    """ln|x| for a non-zero rational, split as mantissa * 10**k before taking ln."""
    x = abs(Fraction(x))
    if x == 0:
        raise ValueError("log of zero")
    k = len(str(x.numerator)) - len(str(x.denominator))
    W = P + GUARD_DIGITS
    mant = rat_to_dec(x / Fraction(10) ** k, W)
    return (dec_ln(mant) + dec_ln(Dec.from_int(10, W)) * k).rescale(P)


def aptekarev_integer_form_growth(ns: Sequence[int], P: int) -> list[tuple[int, Dec]]:
    """ln of |p~_n - gamma q~_n| D_n/n!  divided by  4^n n^(n-1/4) e^(-sqrt(2n)).

    Bounded values support the reading that the displayed order estimate
    concerns the gamma-form D_n/n! (p~_n - gamma q~_n).
    """
    W = P + GUARD_DIGITS + 10
    gamma = gamma_reference(W)
    out = []
    for n in ns:
        a = aptekarev_closed(n)
        form = (Dec.from_int(a.pt, W) - gamma * a.qt).to_fraction() * lcm_upto(n) / factorial(n)
        ln_form = log_abs(form, W)
        ln_n = dec_ln(Dec.from_int(n, W))
        ln_ref = (
            dec_ln(Dec.from_int(4, W)) * n
            + ln_n * n
            - ln_n / 4
            - dec_sqrt(Dec.from_int(2 * n, W))
        )
        out.append((n, (ln_form - ln_ref).rescale(P)))
    return out
