"""Exact integer/rational helpers and a truncating fixed-point decimal kernel.

Integers are plain Python ``int`` and rationals are :class:`fractions.Fraction`.
:class:`Dec` is a fixed-point decimal ``mantissa / 10**scale``; every
operation truncates toward zero and the error bound of each one is stated
in its docstring in units in the last place (ulp = ``10**-scale``).
"""

from __future__ import annotations

import contextlib
import contextvars
import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from importlib import resources
from typing import Iterator, Union

Rational = Union[int, Fraction]

GUARD_DIGITS = 10


class DomainError(ValueError):
    """Argument outside the domain of an elementary function."""


class PrecisionError(ValueError):
    """Requested precision cannot be honoured."""


def _tdiv(a: int, b: int) -> int:
    """Integer division truncating toward zero (b > 0)."""
    q = abs(a) // b
    return q if a >= 0 else -q


# ---------------------------------------------------------------------------
# integer / rational primitives


def factorial(n: int) -> int:
    return math.factorial(n)


def binomial(n: int, k: int) -> int:
    """C(n, k); zero when k > n."""
    return math.comb(n, k)


@lru_cache(maxsize=64)
def lcm_upto(n: int) -> int:
    """D_n = lcm(1, ..., n), built from the largest prime powers <= n."""
    if n < 1:
        raise ValueError("lcm_upto needs n >= 1")
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    result = 1
    for p in range(2, n + 1):
        if not sieve[p]:
            continue
        sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
        pk = p
        while pk * p <= n:
            pk *= p
        result *= pk
    return result


def harmonic_scaled(n: int, scale: int) -> list[int]:
    """[scale * H_0, ..., scale * H_n] as integers; scale must be divisible by D_n."""
    out = [0]
    acc = 0
    for k in range(1, n + 1):
        q, r = divmod(scale, k)
        if r:
            raise ValueError(f"scale is not divisible by {k}")
        acc += q
        out.append(acc)
    return out


def harmonic(n: int) -> Fraction:
    """H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0."""
    if n == 0:
        return Fraction(0)
    d = lcm_upto(n)
    return Fraction(harmonic_scaled(n, d)[-1], d)


def pochhammer(x: Rational, k: int) -> Fraction:
    """Rising factorial x(x+1)...(x+k-1); the empty product is 1."""
    x = Fraction(x)
    out = Fraction(1)
    for j in range(k):
        out *= x + j
        if not out:
            break
    return out


# ---------------------------------------------------------------------------
# fixed-point decimal


@total_ordering
@dataclass(frozen=True)
class Dec:
    """Fixed-point decimal ``mantissa / 10**scale``.

    Addition, subtraction and multiplication by an integer are exact.
    Multiplication and division of two Decs truncate toward zero and are
    within 1 ulp of the exact result.
    """

    mantissa: int
    scale: int

    @classmethod
    def from_int(cls, value: int, scale: int) -> Dec:
        return cls(value * 10**scale, scale)

    @classmethod
    def parse(cls, text: str) -> Dec:
        text = text.strip()
        sign = -1 if text.startswith("-") else 1
        text = text.lstrip("+-")
        whole, _, frac = text.partition(".")
        if not (whole or frac) or not (whole + frac).isdigit():
            raise ValueError(f"not a decimal literal: {text!r}")
        return cls(sign * int((whole or "0") + frac), len(frac))

    def _coerce(self, other: object) -> Dec:
        if isinstance(other, Dec):
            if other.scale != self.scale:
                raise ValueError(f"scale mismatch: {self.scale} vs {other.scale}")
            return other
        if isinstance(other, int):
            return Dec.from_int(other, self.scale)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Dec | int) -> Dec:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Dec(self.mantissa + o.mantissa, self.scale)

    __radd__ = __add__

    def __sub__(self, other: Dec | int) -> Dec:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Dec(self.mantissa - o.mantissa, self.scale)

    def __rsub__(self, other: int) -> Dec:
        return -(self - other)

    def __neg__(self) -> Dec:
        return Dec(-self.mantissa, self.scale)

    def __abs__(self) -> Dec:
        return Dec(abs(self.mantissa), self.scale)

    def __mul__(self, other: Dec | int) -> Dec:
        if isinstance(other, int):
            return Dec(self.mantissa * other, self.scale)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Dec(_tdiv(self.mantissa * o.mantissa, 10**self.scale), self.scale)

    __rmul__ = __mul__

    def __truediv__(self, other: Dec | int) -> Dec:
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("Dec division by zero")
            q = _tdiv(self.mantissa, abs(other))
            return Dec(q if other > 0 else -q, self.scale)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.mantissa == 0:
            raise ZeroDivisionError("Dec division by zero")
        num = self.mantissa * 10**self.scale
        q = _tdiv(num, abs(o.mantissa))
        return Dec(q if o.mantissa > 0 else -q, self.scale)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dec):
            return self.to_fraction() == other.to_fraction()
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, Dec):
            return self.to_fraction() < other.to_fraction()
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __bool__(self) -> bool:
        return self.mantissa != 0

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    def rescale(self, scale: int) -> Dec:
        """Change the scale, truncating toward zero when digits are dropped."""
        if scale >= self.scale:
            return Dec(self.mantissa * 10 ** (scale - self.scale), scale)
        return Dec(_tdiv(self.mantissa, 10 ** (self.scale - scale)), scale)

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 10**self.scale)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __str__(self) -> str:
        digits = str(abs(self.mantissa)).rjust(self.scale + 1, "0")
        sign = "-" if self.mantissa < 0 else ""
        if self.scale == 0:
            return sign + digits
        return f"{sign}{digits[:-self.scale]}.{digits[-self.scale:]}"

    def __repr__(self) -> str:
        return f"Dec('{self}')"


def rat_to_dec(x: Rational, P: int) -> Dec:
    """Truncation of the exact rational x toward zero at P fractional digits."""
    x = Fraction(x)
    return Dec(_tdiv(x.numerator * 10**P, x.denominator), P)


# ---------------------------------------------------------------------------
# elementary functions. Each works at scale P + guard on integer mantissas
# and truncates once at the end, so the result is within 2 ulp.


def _atanh_inv_fixed(x: int, W: int) -> int:
    """atanh(1/x) * 10**W for integer x >= 2, error below a few units."""
    one = 10**W
    power = one // x
    x2 = x * x
    total = 0
    j = 1
    while power:
        total += power // j
        power //= x2
        j += 2
    return total


def _atan_inv_fixed(x: int, W: int) -> int:
    one = 10**W
    power = one // x
    x2 = x * x
    total = 0
    j = 1
    sign = 1
    while power:
        total += sign * (power // j)
        power //= x2
        j += 2
        sign = -sign
    return total


@lru_cache(maxsize=32)
def _ln2_fixed(W: int) -> int:
    return 2 * _atanh_inv_fixed(3, W)


def dec_sqrt(x: Dec) -> Dec:
    """Floor of sqrt(x) at x's scale, via integer Newton (math.isqrt); error < 1 ulp."""
    if x.mantissa < 0:
        raise DomainError("sqrt of a negative number")
    return Dec(math.isqrt(x.mantissa * 10**x.scale), x.scale)


def dec_ln(x: Dec) -> Dec:
    """Natural logarithm, error < 2 ulp.

    The argument is reduced to y = x / 2**k in [1, 2); then
    ln x = k ln 2 + 2 atanh((y - 1)/(y + 1)) with the atanh series.
    """
    if x.mantissa <= 0:
        raise DomainError("ln of a non-positive number")
    P = x.scale
    m = x.mantissa
    k = m.bit_length() - (10**P).bit_length()
    # fix k so that 10**P <= m / 2**k < 2 * 10**P
    while (m << max(-k, 0)) < (10**P << max(k, 0)):
        k -= 1
    while (m << max(-k, 0)) >= (2 * 10**P << max(k, 0)):
        k += 1
    G = GUARD_DIGITS + len(str(abs(k)))
    W = P + G
    one = 10**W
    y = (m * 10**G << max(-k, 0)) >> max(k, 0)
    # s = (y - 1)/(y + 1) in [0, 1/3)
    s = (y - one) * one // (y + one)
    s2 = s * s // one
    total = 0
    power = s
    j = 1
    while power:
        total += power // j
        power = power * s2 // one
        j += 2
    result = k * _ln2_fixed(W) + 2 * total
    return Dec(_tdiv(result, 10**G), P)


def dec_exp(x: Dec) -> Dec:
    """Exponential, error < 2 ulp.

    Reduces x = k ln 2 + r with |r| <= ln 2 / 2 and sums the Taylor series
    of e**r. Guard digits grow with the magnitude of the result so the
    relative error of e**r does not swamp the last place.
    """
    P = x.scale
    xf = x.to_fraction()
    mag = max(0, math.ceil(float(xf) / math.log(10))) if xf > 0 else 0
    k = math.floor(float(xf) / math.log(2) + 0.5)
    G = GUARD_DIGITS + mag + len(str(abs(k)))
    W = P + G
    one = 10**W
    r = x.mantissa * 10**G - k * _ln2_fixed(W)
    total = 0
    term = one
    j = 1
    while term:
        total += term
        term = _tdiv(term * r, one * j)
        j += 1
    if k >= 0:
        total <<= k
    else:
        total >>= -k
    return Dec(_tdiv(total, 10**G), P)


# ---------------------------------------------------------------------------
# constants


@lru_cache(maxsize=32)
def const_pi(P: int) -> Dec:
    """pi by Machin's formula 16 atan(1/5) - 4 atan(1/239)."""
    W = P + GUARD_DIGITS
    val = 16 * _atan_inv_fixed(5, W) - 4 * _atan_inv_fixed(239, W)
    return Dec(val // 10**GUARD_DIGITS, P)


@lru_cache(maxsize=32)
def const_e(P: int) -> Dec:
    """e = sum 1/k!; the tail after the last kept term 1/K! is below 2/(K+1)!."""
    W = P + GUARD_DIGITS
    term = 10**W
    total = 0
    k = 1
    while term:
        total += term
        term //= k
        k += 1
    return Dec(total // 10**GUARD_DIGITS, P)


GAMMA_TABLE_SHA256 = "39de48419a7b58d66c51d3481ff776652a5fb37dffd62a384d366a96beeb798b"

_gamma_override: contextvars.ContextVar[str | None] = contextvars.ContextVar(
    "gamma_digits_override", default=None
)


def parse_gamma_digits(text: str) -> str:
    """Validate a digit-table body: one line '0.577215664901...', no whitespace."""
    line = text.strip().splitlines()[0] if text.strip() else ""
    if not line.startswith("0.57721566490") or not line[2:].isdigit():
        raise ValueError("gamma digit table must start with '0.57721566490' and hold digits only")
    return line


@lru_cache(maxsize=1)
def _embedded_gamma() -> str:
    text = resources.files("eulercf").joinpath("data/gamma_digits.txt").read_text()
    line = parse_gamma_digits(text)
    if hashlib.sha256(line.encode()).hexdigest() != GAMMA_TABLE_SHA256:
        raise ValueError("embedded gamma table fails its checksum")
    return line


def gamma_digits() -> str:
    """The active gamma digit string (override if one is set in this context)."""
    return _gamma_override.get() or _embedded_gamma()


@contextlib.contextmanager
def gamma_table(text: str) -> Iterator[str]:
    """Temporarily replace the embedded gamma table within the current context."""
    token = _gamma_override.set(parse_gamma_digits(text))
    try:
        yield _gamma_override.get()  # type: ignore[misc]
    finally:
        _gamma_override.reset(token)


def gamma_capacity() -> int:
    return len(gamma_digits()) - 2


def const_gamma(P: int) -> Dec:
    """Euler's constant truncated to P digits, read from the digit table."""
    digits = gamma_digits()
    if P > len(digits) - 2:
        raise PrecisionError(f"gamma table holds {len(digits) - 2} digits, {P} requested")
    return Dec.parse(digits[: 2 + P])
