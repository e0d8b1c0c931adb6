"""Continued fractions b0 + K(a_n / b_n) in exact rational arithmetic.

Streams are lazily extended and memoised. Convergent values are always
compared by cross-multiplication, never through a decimal approximation.
"""

from __future__ import annotations

import csv
import io
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .numkit import Rational
from .sequences import delta_cap_rec, gamma_q, stieltjes_s


class DeterminantZeroError(ZeroDivisionError):
    def __init__(self, index: int):
        super().__init__(f"A_n B_(n-1) - A_(n-1) B_n vanishes at n={index}")
        self.index = index


class ZeroMultiplierError(ValueError):
    pass


class ContractionError(ZeroDivisionError):
    def __init__(self, index: int):
        super().__init__(f"even contraction undefined: partial denominator b_{index} is zero")
        self.index = index


class UnknownFamilyError(KeyError):
    pass


@dataclass(frozen=True)
class CFElement:
    index: int
    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class Convergent:
    n: int
    A: Fraction
    B: Fraction

    @property
    def degenerate(self) -> bool:
        return self.B == 0

    @property
    def value(self) -> Fraction:
        if self.B == 0:
            raise ZeroDivisionError(f"convergent {self.n} has zero denominator")
        return self.A / self.B

    def same_value(self, other: Convergent | Fraction) -> bool:
        if isinstance(other, Convergent):
            return self.A * other.B == other.A * self.B and not (self.B == 0 and other.B == 0)
        return self.A == other * self.B


class CFStream:
    """b0 plus a rule ``n -> (a_n, b_n)`` for n >= 1.

    ``length`` bounds finite streams; the rule is never called beyond it.
    """

    def __init__(
        self,
        b0: Rational,
        rule: Callable[[int], tuple[Rational, Rational]],
        length: int | None = None,
        name: str = "",
    ):
        self.b0 = Fraction(b0)
        self._rule = rule
        self.length = length
        self.name = name
        self._cache: list[CFElement] = []
        self._lock = threading.Lock()

    def element(self, n: int) -> CFElement:
        if n < 1 or (self.length is not None and n > self.length):
            raise IndexError(f"element {n} outside stream of length {self.length}")
        with self._lock:
            while len(self._cache) < n:
                k = len(self._cache) + 1
                a, b = self._rule(k)
                a, b = Fraction(a), Fraction(b)
                if a == 0:
                    raise ValueError(f"partial numerator a_{k} is zero")
                self._cache.append(CFElement(k, a, b))
            return self._cache[n - 1]

    def elements(self, N: int) -> list[CFElement]:
        return [self.element(n) for n in range(1, N + 1)]

    def __repr__(self) -> str:
        return f"CFStream({self.name or 'anonymous'}, b0={self.b0})"


def from_elements(b0: Rational, elements: Sequence[tuple[Rational, Rational]], name: str = "") -> CFStream:
    elems = list(elements)
    return CFStream(b0, lambda n: elems[n - 1], length=len(elems), name=name)


def convergents(cf: CFStream, N: int) -> list[Convergent]:
    """Convergents 0..N by A_n = b_n A_(n-1) + a_n A_(n-2) (likewise B)."""
    A_prev, A = Fraction(1), cf.b0
    B_prev, B = Fraction(0), Fraction(1)
    out = [Convergent(0, A, B)]
    for el in cf.elements(N):
        A_prev, A = A, el.b * A + el.a * A_prev
        B_prev, B = B, el.b * B + el.a * B_prev
        out.append(Convergent(el.index, A, B))
    return out


def elements_from_convergents(A: Sequence[Rational], B: Sequence[Rational]) -> CFStream:
    """The unique continued fraction whose n-th numerator/denominator are A[n]/B[n].

    Index 0 is normalised to B_0 = 1 (this keeps the value A_0/B_0); from
    n >= 1 the numerators and denominators are reproduced exactly.
    """
    if len(A) != len(B) or not A:
        raise ValueError("A and B must be non-empty and of equal length")
    A = [Fraction(x) for x in A]
    B = [Fraction(x) for x in B]
    if B[0] == 0:
        raise DeterminantZeroError(0)
    A[0], B[0] = A[0] / B[0], Fraction(1)
    Ax = [Fraction(1)] + A  # Ax[n+1] = A_n, Ax[0] = A_{-1}
    Bx = [Fraction(0)] + B

    def det(n: int) -> Fraction:
        # A_n B_(n-1) - A_(n-1) B_n
        return Ax[n + 1] * Bx[n] - Ax[n] * Bx[n + 1]

    for n in range(len(A)):
        if det(n) == 0:
            raise DeterminantZeroError(n)
    elements = []
    for n in range(1, len(A)):
        prev = det(n - 1)
        a = -det(n) / prev
        b = (Ax[n + 1] * Bx[n - 1] - Ax[n - 1] * Bx[n + 1]) / prev
        elements.append((a, b))
    return from_elements(A[0], elements, name="from-convergents")


def equivalence_transform(cf: CFStream, rho: Callable[[int], Rational]) -> CFStream:
    """a*_n = rho_n rho_(n-1) a_n, b*_n = rho_n b_n with rho_0 = 1."""

    def r(n: int) -> Fraction:
        if n == 0:
            return Fraction(1)
        v = Fraction(rho(n))
        if v == 0:
            raise ZeroMultiplierError(f"rho_{n} is zero")
        return v

    def rule(n: int) -> tuple[Fraction, Fraction]:
        el = cf.element(n)
        rn = r(n)
        return rn * r(n - 1) * el.a, rn * el.b

    return CFStream(cf.b0, rule, cf.length, name=f"{cf.name}*")


def even_contraction(cf: CFStream) -> CFStream:
    """Even part: the n-th convergent of the result is the 2n-th of ``cf``.

        a'_1 = a_1 b_2,   b'_1 = b_1 b_2 + a_2
        a'_n = -a_(2n-2) a_(2n-1) b_(2n) / b_(2n-2)
        b'_n = a_(2n) + b_(2n-1) b_(2n) + a_(2n-1) b_(2n) / b_(2n-2)
    """

    def rule(n: int) -> tuple[Fraction, Fraction]:
        # b_(2n) = 0 would zero a'_n and leave a'_(n+1) dividing by it
        if cf.element(2 * n).b == 0:
            raise ContractionError(2 * n)
        if n == 1:
            e1, e2 = cf.element(1), cf.element(2)
            return e1.a * e2.b, e1.b * e2.b + e2.a
        e_pp, e_p, e = cf.element(2 * n - 2), cf.element(2 * n - 1), cf.element(2 * n)
        a = -e_pp.a * e_p.a * e.b / e_pp.b
        b = e.a + e_p.b * e.b + e_p.a * e.b / e_pp.b
        return a, b

    length = None if cf.length is None else cf.length // 2
    return CFStream(cf.b0, rule, length, name=f"even({cf.name})")


# ---------------------------------------------------------------------------
# named families


class _GrowingSeq:
    """Memoised integer sequence regrown by doubling when an index is missed."""

    def __init__(self, build: Callable[[int], list[int]], start: int = 16):
        self._build = build
        self._values = build(start)
        self._lock = threading.Lock()

    def __getitem__(self, n: int) -> int:
        with self._lock:
            if n >= len(self._values):
                self._values = self._build(max(2 * len(self._values), n + 1))
            return self._values[n]


def _gamma_family() -> CFStream:
    delta = _GrowingSeq(lambda N: delta_cap_rec(max(N, 4), check=False))
    q = _GrowingSeq(lambda N: [gamma_q(n) for n in range(N + 1)])
    table = {1: (1, 2), 2: (-1, 4), 3: (-5, 16), 4: (36, 59), 5: (-15740, 404)}

    def rule(n: int) -> tuple[Fraction, Fraction]:
        if n in table:
            return table[n]
        a = -Fraction((n - 1) ** 2, 4) * delta[n] * delta[n - 2]
        b = n * n * delta[n - 1] + Fraction((n - 1) * (n - 2), 2) * q[n - 2]
        return a, b

    return CFStream(0, rule, name="gamma")


def _stieltjes() -> CFStream:
    return CFStream(0, lambda n: (1 if n == 1 else -((n - 1) ** 2), 2 * n), name="stieltjes-delta")


def _gauss_limit(a: Fraction, z: Fraction) -> CFStream:
    def rule(n: int) -> tuple[Fraction, int]:
        if n == 1:
            return Fraction(1), 1
        k, odd = divmod(n, 2)
        return ((k if odd else a + k - 1) * z), 1

    return CFStream(0, rule, name=f"gauss-limit({a},{z})")


def _laplace(a: Fraction, z: Fraction) -> CFStream:
    def rule(n: int) -> tuple[Fraction, Fraction]:
        if n == 1:
            return Fraction(1), z
        k, odd = divmod(n, 2)
        return (Fraction(k), z) if odd else (a + k - 1, Fraction(1))

    return CFStream(0, rule, name=f"laplace({a},{z})")


def _evenpart(a: Fraction, z: Fraction) -> CFStream:
    def rule(n: int) -> tuple[Fraction, Fraction]:
        if n == 1:
            return Fraction(1), z + a
        return -(n - 1) * (n - 2 + a), z + a + 2 * (n - 1)

    return CFStream(0, rule, name=f"evenpart({a},{z})")


FAMILIES = ("gamma", "stieltjes-delta", "gauss-limit", "laplace", "evenpart", "delta-ones")


def cf_family(name: str, a: Rational = 1, z: Rational = 1) -> CFStream:
    """Named continued fraction; ``a`` and ``z`` parametrise the Gauss-limit kin."""
    a, z = Fraction(a), Fraction(z)
    if name == "gamma":
        return _gamma_family()
    if name == "stieltjes-delta":
        return _stieltjes()
    if name == "gauss-limit":
        return _gauss_limit(a, z)
    if name == "laplace":
        return _laplace(a, z)
    if name == "evenpart":
        return _evenpart(a, z)
    if name == "delta-ones":
        s = _gauss_limit(Fraction(1), Fraction(1))
        s.name = "delta-ones"
        return s
    raise UnknownFamilyError(name)


def gamma_rho(n: int, delta: Sequence[int]) -> Fraction:
    """Multipliers taking the fraction rebuilt from (p_n, q_n) to the integer one."""
    fixed = {0: 1, 1: 1, 2: 1, 3: 3, 4: 10}
    if n in fixed:
        return Fraction(fixed[n])
    return Fraction(n * delta[n - 1], 2)


def stieltjes_convergent_check(N: int) -> tuple[bool, int | None]:
    """conv_n(stieltjes-delta) == s_n / q_n for 1 <= n <= N."""
    s = stieltjes_s(N)
    for c in convergents(_stieltjes(), N)[1:]:
        if not c.same_value(Fraction(s[c.n], gamma_q(c.n))):
            return False, c.n
    return True, None


def dump_elements_csv(cf: CFStream, N: int) -> str:
    """CSV with header index,a_num,a_den,b_num,b_den."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "a_num", "a_den", "b_num", "b_den"])
    for el in cf.elements(N):
        w.writerow([el.index, el.a.numerator, el.a.denominator, el.b.numerator, el.b.denominator])
    return buf.getvalue()
