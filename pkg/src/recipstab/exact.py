"""Exact integer/rational arithmetic and the high-precision real channel.

Rationals are :class:`fractions.Fraction` values, which are always kept in
lowest terms with a positive denominator, so equality is structural.  Real
numbers that cannot stay rational (l-th roots of perturbed samples, real
exponents) live in a private mpmath context ``hp`` whose precision defaults
to 128 mantissa bits.
"""

from __future__ import annotations

import contextlib
import math
from fractions import Fraction
from numbers import Rational as _RationalABC

import mpmath

from .errors import DivisionByZero, DomainError

Rational = Fraction

DEFAULT_PRECISION_BITS = 128

hp = mpmath.MPContext()
hp.prec = DEFAULT_PRECISION_BITS

HighPrecisionReal = type(hp.mpf(0))


def set_precision(bits: int) -> None:
    if bits < 64:
        raise DomainError(f"precision must be at least 64 bits, got {bits}")
    hp.prec = int(bits)


@contextlib.contextmanager
def precision(bits: int):
    """Temporarily run the high-precision channel at ``bits`` mantissa bits."""
    old = hp.prec
    set_precision(bits)
    try:
        yield
    finally:
        hp.prec = old


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions, ``"num/den"`` strings and decimal floats to a Fraction.

    Floats go through their shortest ``repr`` so ``0.01`` becomes ``1/100``
    rather than its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def to_real(value):
    """Convert any supported scalar to an ``hp`` real."""
    if isinstance(value, Fraction):
        return hp.mpf(value.numerator) / value.denominator
    return hp.mpf(value)


def is_integral(value) -> bool:
    if isinstance(value, int):
        return True
    if isinstance(value, Fraction):
        return value.denominator == 1
    if isinstance(value, float):
        return value.is_integer()
    try:
        return hp.isint(value)
    except TypeError:
        return False


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise DomainError(f"binomial needs nonnegative arguments, got ({n}, {k})")
    if k > n:
        raise DomainError(f"binomial({n}, {k}): k exceeds n")
    return math.comb(n, k)


def even_binomial_sum(l: int) -> int:
    """Sum of ``2**(l-k) * C(l, k)`` over even ``k`` in ``0..l``, by literal summation."""
    if l < 0:
        raise DomainError(f"degree must be nonnegative, got {l}")
    total = 0
    for k in range(0, l + 1, 2):
        total += 2 ** (l - k) * binomial(l, k)
    return total


def rational_pow(base, exp: int) -> Fraction:
    base = as_rational(base)
    if not isinstance(exp, int):
        raise TypeError("rational_pow needs an integer exponent")
    if base == 0 and exp < 0:
        raise DivisionByZero("zero base with negative exponent")
    return base**exp


def power(base, exp):
    """``base ** exp`` for ``base > 0``; exact when both are rational and ``exp`` is integral."""
    if is_exact(base) and is_integral(exp):
        return rational_pow(base, int(exp))
    if base == 0:
        if exp > 0:
            return hp.mpf(0)
        if exp == 0:
            return hp.mpf(1)
        raise DomainError("zero magnitude with negative exponent")
    return to_real(base) ** to_real(exp)


def unify(*values):
    """Return ``values`` all exact, or all converted to ``hp`` reals if any is inexact."""
    if all(is_exact(v) for v in values):
        return tuple(Fraction(v) for v in values)
    return tuple(to_real(v) for v in values)
