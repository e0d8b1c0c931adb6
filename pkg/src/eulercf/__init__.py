"""Rational approximations and continued fractions for Euler's constant
and the Euler-Gompertz constant, in exact arithmetic."""

__version__ = "0.1.0"
