"""Exact integer and rational sequences behind the approximations to gamma.

Each sequence is available by its closed binomial-sum form and by the
linear recurrence it satisfies; the two routes are cross-checked in the
test-suite and by :mod:`eulercf.analysis`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .numkit import harmonic_scaled, lcm_upto


class IntegralityError(ArithmeticError):
    """A recurrence produced a non-integer where an integer is expected."""


class MismatchError(ArithmeticError):
    """Two independent routes to the same value disagree."""


@dataclass(frozen=True)
class GammaPair:
    n: int
    q: int
    p: Fraction


@dataclass(frozen=True)
class AptekarevPair:
    n: int
    qt: int
    pt: int


@dataclass(frozen=True)
class RivoalPair:
    n: int
    Q: Fraction
    P: Fraction


@dataclass(frozen=True)
class DiscrepancyRow:
    n: int
    frak_d: Fraction
    delta_cap: int


def _as_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise IntegralityError(f"{what} = {x} is not an integer")
    return x.numerator


# ---------------------------------------------------------------------------
# q_n = sum C(n,k)^2 k!,  p_n = sum C(n,k)^2 k! (2 H_{n-k} - H_k)


def _gamma_terms(n: int) -> list[int]:
    # C(n,k)^2 k!  ->  ratio (n-k)^2 / (k+1) to the next term
    terms = [1]
    for k in range(n):
        terms.append(terms[-1] * (n - k) ** 2 // (k + 1))
    return terms


def gamma_q(n: int) -> int:
    return sum(_gamma_terms(n))


def gamma_p(n: int) -> Fraction:
    if n == 0:
        return Fraction(0)
    d = lcm_upto(n)
    h = harmonic_scaled(n, d)
    terms = _gamma_terms(n)
    num = sum(t * (2 * h[n - k] - h[k]) for k, t in enumerate(terms))
    return Fraction(num, d)


def gamma_table_rec(N: int) -> list[GammaPair]:
    """(q_n, p_n) for 0 <= n <= N from the second-order recurrences.

    y_{n+2} = 2(n+2) y_{n+1} - (n+1)^2 y_n, with right-hand side -n/(n+2)
    added for p.
    """
    q = [1, 2]
    p = [Fraction(0), Fraction(1)]
    for n in range(N - 1):
        q.append(2 * (n + 2) * q[n + 1] - (n + 1) ** 2 * q[n])
        p.append(2 * (n + 2) * p[n + 1] - (n + 1) ** 2 * p[n] - Fraction(n, n + 2))
    return [GammaPair(n, q[n], p[n]) for n in range(N + 1)]


def stieltjes_s(N: int) -> list[int]:
    """s_0..s_N: the homogeneous gamma recurrence with s_0 = 0, s_1 = 1."""
    s = [0, 1]
    for n in range(N - 1):
        s.append(2 * (n + 2) * s[n + 1] - (n + 1) ** 2 * s[n])
    return s[: N + 1]


# ---------------------------------------------------------------------------
# Aptekarev's approximations


def aptekarev_closed(n: int) -> AptekarevPair:
    """q~_n = sum C(n,k)^2 (n+k)!,  p~_n = sum C(n,k)^2 (n+k)! (H_{n+k} + 2H_{n-k} - 2H_k)."""
    if n == 0:
        return AptekarevPair(0, 1, 0)
    d = lcm_upto(2 * n)
    h = harmonic_scaled(2 * n, d)
    term = 1
    for j in range(2, n + 1):
        term *= j
    q = 0
    num = 0
    for k in range(n + 1):
        q += term
        num += term * (h[n + k] + 2 * h[n - k] - 2 * h[k])
        # C(n,k+1)^2 (n+k+1)! = C(n,k)^2 (n+k)! (n-k)^2 (n+k+1) / (k+1)^2
        term = term * (n - k) ** 2 * (n + k + 1) // (k + 1) ** 2
    return AptekarevPair(n, q, _as_int(Fraction(num, d), f"p~_{n}"))


def _aptekarev_step(n: int, y2: Fraction, y1: Fraction, y0: Fraction) -> Fraction:
    """y_{n+1} from y_n, y_{n-1}, y_{n-2}."""
    rhs = (
        (128 * n**3 + 40 * n**2 - 82 * n - 45) * y2
        - n**2 * (256 * n**3 - 240 * n**2 + 64 * n - 7) * y1
        + n**2 * (n - 1) ** 2 * (16 * n + 1) * y0
    )
    return Fraction(rhs, 16 * n - 15)


def aptekarev_table_rec(N: int) -> list[AptekarevPair]:
    """(q~_n, p~_n) for 0 <= n <= N from the third-order recurrence.

    Every step divides by 16n - 15 in exact rationals, and each new value is
    required to be an integer equal to the closed form.
    """
    if N < 2:
        raise ValueError("aptekarev_table_rec needs N >= 2")
    q = [Fraction(1), Fraction(3), Fraction(50)]
    p = [Fraction(0), Fraction(2), Fraction(31)]
    out = [AptekarevPair(n, int(q[n]), int(p[n])) for n in range(3)]
    for n in range(2, N):
        q.append(_aptekarev_step(n, q[n], q[n - 1], q[n - 2]))
        p.append(_aptekarev_step(n, p[n], p[n - 1], p[n - 2]))
        row = AptekarevPair(
            n + 1, _as_int(q[-1], f"q~_{n + 1}"), _as_int(p[-1], f"p~_{n + 1}")
        )
        closed = aptekarev_closed(n + 1)
        if row != closed:
            raise MismatchError(f"recurrence {row} != closed form {closed}")
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# Rivoal's approximations


def rivoal_table(N: int) -> list[RivoalPair]:
    """(Q_n, P_n) for 0 <= n <= N; step n produces y_{n+3} from y_{n+2}, y_{n+1}, y_n."""
    if N < 2:
        raise ValueError("rivoal_table needs N >= 2")
    Q = [Fraction(1), Fraction(7), Fraction(65, 2)]
    P = [Fraction(-1), Fraction(4), Fraction(77, 4)]
    for n in range(N - 2):
        lead = (n + 3) ** 2 * (8 * n + 11) * (8 * n + 19)
        c2 = (n + 3) * (8 * n + 11) * (24 * n**2 + 145 * n + 215)
        c1 = (8 * n + 27) * (24 * n**3 + 105 * n**2 + 124 * n + 25)
        c0 = (n + 2) ** 2 * (8 * n + 19) * (8 * n + 27)
        for y in (Q, P):
            y.append((c2 * y[n + 2] - c1 * y[n + 1] + c0 * y[n]) / lead)
    return [RivoalPair(n, Q[n], P[n]) for n in range(N + 1)]


# ---------------------------------------------------------------------------
# the cross-product discrepancy d_n = p_{n-1} q_n - p_n q_{n-1} and Delta_n = n d_n


def discrepancy_table(N: int) -> list[DiscrepancyRow]:
    """d_n for 0 <= n <= N by definition (p_{-1} = 1, q_{-1} = 0) and by the
    first-order recurrence d_n = (n-1)^2 d_{n-1} + (n-2)/n q_{n-1}."""
    q = [gamma_q(n) for n in range(N + 1)]
    p = [gamma_p(n) for n in range(N + 1)]
    prev_p, prev_q = Fraction(1), 0
    rows = []
    rec = Fraction(1)
    for n in range(N + 1):
        direct = prev_p * q[n] - p[n] * prev_q
        if n >= 1:
            rec = (n - 1) ** 2 * rec + Fraction(n - 2, n) * q[n - 1]
        if direct != rec:
            raise MismatchError(f"d_{n}: definition gives {direct}, recurrence gives {rec}")
        if direct == 0:
            raise MismatchError(f"d_{n} vanishes")
        rows.append(DiscrepancyRow(n, direct, _as_int(n * direct, f"Delta_{n}")))
        prev_p, prev_q = p[n], q[n]
    return rows


def delta_cap_rec(N: int, check: bool = True) -> list[int]:
    """[Delta_0, ..., Delta_N] from the four-term recurrence (valid for n >= 3)

        (n-1)(n-2) D_{n+2} = (n-2)(n+1)(n^2+3n-2) D_{n+1}
                             - n^2(2n^3+n^2-7n-4) D_n + (n-1)^2 n^4 D_{n-1}

    seeded with Delta_1..Delta_4 = -1, -2, -5, 8 (Delta_0 = 0). With
    ``check`` the result is compared against :func:`discrepancy_table`.
    """
    if N < 4:
        raise ValueError("delta_cap_rec needs N >= 4")
    D = [Fraction(0), Fraction(-1), Fraction(-2), Fraction(-5), Fraction(8)]
    for n in range(3, N - 1):
        rhs = (
            (n - 2) * (n + 1) * (n**2 + 3 * n - 2) * D[n + 1]
            - n**2 * (2 * n**3 + n**2 - 7 * n - 4) * D[n]
            + (n - 1) ** 2 * n**4 * D[n - 1]
        )
        D.append(rhs / ((n - 1) * (n - 2)))
    out = [_as_int(x, f"Delta_{n}") for n, x in enumerate(D[: N + 1])]
    if check:
        for row in discrepancy_table(N):
            if row.delta_cap != out[row.n]:
                raise MismatchError(
                    f"Delta_{row.n}: recurrence {out[row.n]} != n*d_n {row.delta_cap}"
                )
    return out
