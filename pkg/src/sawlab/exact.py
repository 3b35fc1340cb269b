"""Exact rational probabilities and exact comparisons against power thresholds.

Every probability produced by enumeration is an ``ExactProb`` (an exact
rational in [0, 1], always in lowest terms).  Thresholds of the form
``n**x`` with irrational exponent are compared against rationals without
floating-point ties, by interval refinement with directed rounding.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import iv


class ExactProb(Fraction):
    """An exact rational probability: 0 <= value <= 1, lowest terms."""

    def __new__(cls, numerator=0, denominator=None):
        self = super().__new__(cls, numerator, denominator)
        if self < 0 or self > 1:
            raise ValueError(f"probability out of range [0, 1]: {Fraction(self)}")
        return self

    @property
    def num(self) -> int:
        return self.numerator

    @property
    def den(self) -> int:
        return self.denominator

    def as_pair(self) -> tuple[int, int]:
        return (self.numerator, self.denominator)


def integer_root(n: int, k: int) -> int | None:
    """Return the exact integer k-th root of n, or None if n is not a k-th power."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0, k >= 1")
    if n in (0, 1) or k == 1:
        return n if (n in (0, 1) or k == 1) else None
    # m >= 2 forces n >= 2**k; cheap cutoff for huge k.
    if n.bit_length() <= k:
        return None
    root = round(n ** (1.0 / k))
    for m in (root - 1, root, root + 1):
        if m >= 2 and m**k == n:
            return m
    return None


def rational_power(n: int, exponent: Fraction) -> Fraction | None:
    """Return n**exponent as an exact Fraction when it is rational, else None."""
    if n <= 0:
        raise ValueError("base must be a positive integer")
    if n == 1 or exponent == 0:
        return Fraction(1)
    p, s = exponent.numerator, exponent.denominator
    root = integer_root(n, s)
    if root is None:
        return None
    return Fraction(root**p) if p >= 0 else Fraction(1, root**-p)


_MAX_PREC = 1 << 16


def cmp_fraction_to_power(value: Fraction, n: int, exponent) -> int:
    """Exact sign of ``value - n**exponent`` for a rational value and integer n >= 1.

    ``exponent`` may be a float (interpreted exactly as the dyadic rational it
    is) or a Fraction.  When ``n**exponent`` is irrational the comparison is
    decided by interval arithmetic at increasing precision; a tie is then
    impossible, so the loop terminates.
    """
    if n < 1:
        raise ValueError("base must be a positive integer")
    expo = exponent if isinstance(exponent, Fraction) else Fraction(exponent)
    value = Fraction(value)
    exact = rational_power(n, expo)
    if exact is not None:
        return (value > exact) - (value < exact)
    if value <= 0:
        return -1  # n**expo > 0 always
    prec = 64
    saved = iv.prec
    try:
        while prec <= _MAX_PREC:
            iv.prec = prec
            diff = iv.log(iv.mpf(value.numerator) / iv.mpf(value.denominator)) - (
                iv.mpf(expo.numerator) / iv.mpf(expo.denominator)
            ) * iv.log(iv.mpf(n))
            if diff.a > 0:
                return 1
            if diff.b < 0:
                return -1
            prec *= 2
    finally:
        iv.prec = saved
    raise ArithmeticError(
        f"could not separate {value} from {n}**{expo} below {_MAX_PREC} bits"
    )


def exceeds_power(value: Fraction, n: int, exponent) -> bool:
    """Decide ``value > n**exponent`` exactly."""
    return cmp_fraction_to_power(value, n, exponent) > 0


def at_least_power(value: Fraction, n: int, exponent) -> bool:
    """Decide ``value >= n**exponent`` exactly."""
    return cmp_fraction_to_power(value, n, exponent) >= 0
