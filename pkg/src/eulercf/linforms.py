"""Linear forms p_n - gamma q_n from products of gamma factors.

A term F(n, t) = prod Gamma(a n + b t + 1) / prod Gamma(c n + d t + 1),
summed in its t-derivative over 0 <= t <= M(n), equals p_n - gamma q_n
with

    q_n = (sum b - sum d) * sum_k F(n, k)
    p_n = sum_k F(n, k) (sum b H_{a n + b k} - sum d H_{c n + d k})

because psi(m + 1) = H_m - gamma at non-negative integers.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .numkit import Dec, GUARD_DIGITS, const_e, const_gamma, harmonic_scaled, lcm_upto, rat_to_dec


class IllFormedSpecError(ValueError):
    """A term specification cannot be evaluated at the requested n."""


class ZeroTermWarning(UserWarning):
    """A denominator gamma factor hit a pole, so the summand was taken as 0."""


@dataclass(frozen=True)
class TermSpec:
    """Gamma-factor product with summation range 0 <= t <= m_slope*n + m_offset."""

    numerator: tuple[tuple[int, int], ...]
    denominator: tuple[tuple[int, int], ...]
    m_slope: int = 1
    m_offset: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "numerator", tuple(tuple(x) for x in self.numerator))
        object.__setattr__(self, "denominator", tuple(tuple(x) for x in self.denominator))
        for pair in self.numerator + self.denominator:
            if len(pair) != 2 or not all(isinstance(v, int) for v in pair):
                raise IllFormedSpecError(f"gamma factor must be an integer pair, got {pair!r}")
        if self.m_slope < 0 or self.m_offset < 0:
            raise IllFormedSpecError("M(n) must be a non-negative affine form")

    @property
    def gamma_coefficient(self) -> int:
        return sum(b for _, b in self.numerator) - sum(d for _, d in self.denominator)

    @property
    def proper(self) -> bool:
        return self.gamma_coefficient != 0

    def M(self, n: int) -> int:
        return self.m_slope * n + self.m_offset

    @classmethod
    def from_json(cls, text: str) -> TermSpec:
        """Parse ``{"num": [[a,b],...], "den": [[c,d],...], "m": [slope, offset]}``."""
        try:
            obj = json.loads(text)
            m = obj.get("m", [1, 0])
            return cls(
                tuple(map(tuple, obj["num"])),
                tuple(map(tuple, obj["den"])),
                int(m[0]),
                int(m[1]),
            )
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            raise IllFormedSpecError(f"bad term specification: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(
            {
                "num": [list(x) for x in self.numerator],
                "den": [list(x) for x in self.denominator],
                "m": [self.m_slope, self.m_offset],
            }
        )


# F(n,t) = n!^2 / (t! (n-t)!^2)
GAMMA_SPEC = TermSpec(((1, 0), (1, 0)), ((0, 1), (1, -1), (1, -1)))
# F(n,t) = n!^2 (n+t)! / (t!^2 (n-t)!^2)
APTEKAREV_SPEC = TermSpec(((1, 0), (1, 0), (1, 1)), ((0, 1), (0, 1), (1, -1), (1, -1)))


@dataclass(frozen=True)
class LinForm:
    n: int
    q: Fraction
    p: Fraction
    zero_terms: tuple[int, ...] = field(default=(), compare=False)


def _numerator_ok(spec: TermSpec, n: int) -> bool:
    return all(a * n + b * t + 1 >= 1 for a, b in spec.numerator for t in range(spec.M(n) + 1))


def spec_wellformed(spec: TermSpec, n: int) -> bool:
    """Numerator arguments are positive and denominator arguments avoid poles on 0..M(n)."""
    return _numerator_ok(spec, n) and all(
        c * n + d * t + 1 >= 1 for c, d in spec.denominator for t in range(spec.M(n) + 1)
    )


def linform(spec: TermSpec, n: int) -> LinForm:
    """Exact (q_n, p_n) for the term specification at n.

    Summands whose denominator has a gamma pole are 0 (reciprocal gamma
    vanishes there); their indices are recorded in ``zero_terms`` and a
    :class:`ZeroTermWarning` is issued.
    """
    if not _numerator_ok(spec, n):
        raise IllFormedSpecError(f"numerator gamma factor at a pole for n={n}")
    M = spec.M(n)
    args_num = [[a * n + b * k for a, b in spec.numerator] for k in range(M + 1)]
    args_den = [[c * n + d * k for c, d in spec.denominator] for k in range(M + 1)]
    top = max([x for row in args_num + args_den for x in row] + [1])
    facts = [1]
    for j in range(1, top + 1):
        facts.append(facts[-1] * j)
    scale = lcm_upto(top)
    h = harmonic_scaled(top, scale)

    q_sum = Fraction(0)
    p_num = Fraction(0)
    zero = []
    for k in range(M + 1):
        if any(x < 0 for x in args_den[k]):
            zero.append(k)
            continue
        num = 1
        for x in args_num[k]:
            num *= facts[x]
        den = 1
        for x in args_den[k]:
            den *= facts[x]
        F = Fraction(num, den)
        weight = sum(b * h[x] for (_, b), x in zip(spec.numerator, args_num[k])) - sum(
            d * h[x] for (_, d), x in zip(spec.denominator, args_den[k])
        )
        q_sum += F
        p_num += F * weight
    if zero:
        warnings.warn(
            f"n={n}: summands {zero} have a denominator pole and were taken as 0",
            ZeroTermWarning,
            stacklevel=2,
        )
    return LinForm(n, spec.gamma_coefficient * q_sum, p_num / scale, tuple(zero))


def linform_value(spec: TermSpec, n: int, P: int) -> Dec:
    """p_n - gamma q_n at P digits.

    gamma is taken with guard digits plus as many digits as q_n has, since
    the product gamma*q_n must be accurate to 10^-P in absolute terms; a
    :class:`PrecisionError` follows when the digit table is too short.
    """
    lf = linform(spec, n)
    W = P + GUARD_DIGITS + len(str(abs(lf.q.numerator)))
    value = rat_to_dec(lf.p, W) - _mul_rat(const_gamma(W), lf.q)
    return value.rescale(P)


def _mul_rat(x: Dec, r: Fraction) -> Dec:
    # exact multiply by the numerator, one truncation for the denominator
    return (x * r.numerator) / r.denominator


# ---------------------------------------------------------------------------
# creative telescoping certificate for the gamma spec


def certificate(n: Fraction, t: Fraction) -> Fraction:
    """r(n, t) = t (t^2 - (2n+3) t + n(n+2))."""
    return t * (t * t - (2 * n + 3) * t + n * (n + 2))


TELESCOPE_POINTS = tuple(Fraction(x) for x in ("0", "1/2", "1", "2", "7/3", "5"))


@dataclass(frozen=True)
class Check:
    """Outcome of a verification; falsy on failure, with the failing witness."""

    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def telescope_verify(
    n_max: int, r: Callable[[Fraction, Fraction], Fraction] = certificate
) -> Check:
    """Check the gamma-cleared telescoping identity for 0 <= n <= n_max.

    Both sides are polynomials of degree <= 4 in t, so agreement at the six
    rational points :data:`TELESCOPE_POINTS` proves the identity in t.
    """
    for ni in range(n_max + 1):
        n = Fraction(ni)
        for t in TELESCOPE_POINTS:
            u = n - t + 2
            lhs = (n + 2) ** 2 - 2 * (n + 2) * u**2 + u**2 * (u - 1) ** 2
            rhs = u**2 / (t + 1) * r(n, t + 1) - r(n, t)
            if lhs != rhs:
                return Check(False, (ni, t))
    return Check(True)


def boundary_term(n: int) -> Fraction:
    """G'(n, 0) = n/(n+2), the negated right side of the inhomogeneous recurrence."""
    return Fraction(n, n + 2)


def recurrence_residuals(n: int) -> tuple[Fraction, Fraction]:
    """Residuals of (q, p) from :func:`linform` on the gamma spec in the
    second-order recurrence at n; expected (0, -boundary_term(n))."""
    f = [linform(GAMMA_SPEC, n + j) for j in range(3)]
    def res(y: list[Fraction]) -> Fraction:
        return y[2] - 2 * (n + 2) * y[1] + (n + 1) ** 2 * y[0]
    return res([x.q for x in f]), res([x.p for x in f])


# ---------------------------------------------------------------------------
# the residue-sum tail linking F_n with the Meijer-G integral I_n


def tail_terms(n: int, P: int) -> list[Fraction]:
    """Summands (-1)^k k! / (n+2)_k^2 until their magnitude drops below 10^-(P+2)."""
    eps = Fraction(1, 10 ** (P + 2))
    out = []
    term = Fraction(1)
    k = 0
    while abs(term) >= eps:
        out.append(term)
        term = -term * (k + 1) / (n + 2 + k) ** 2
        k += 1
    return out


def tail_T(n: int, P: int) -> Dec:
    """T_n = (1/(n+1)^2) sum_k (-1)^k k! / (n+2)_k^2.

    The series alternates with decreasing terms, so the truncation error is
    below the first omitted term, < 10^-(P+2) / (n+1)^2.
    """
    s = sum(tail_terms(n, P + GUARD_DIGITS), Fraction(0))
    return rat_to_dec(s / (n + 1) ** 2, P)


def tail_bound(n: int, P: int) -> Dec:
    """e / (n+1)^2, the bound on |T_n|."""
    return (const_e(P + GUARD_DIGITS) / (n + 1) ** 2).rescale(P)


def i_value(n: int, P: int) -> Dec:
    """I_n = F_n + T_n for the gamma spec."""
    W = P + GUARD_DIGITS
    return (linform_value(GAMMA_SPEC, n, W) + tail_T(n, W)).rescale(P)

