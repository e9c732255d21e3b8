"""Control functions Q(x, y) bounding the residual, and their stability series.

The real-field bound for a control ``Q`` is the series::

    sum_{s>=0} 3^(-l s) Q(|x| / 3^(s+1), |x| / 3^(s+1))

For the power families the terms are geometric with ratio ``3^-(e + l)``
where ``e`` is the homogeneity exponent of the control, so tails are exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import DomainError, ParameterExclusion
from .exact import as_rational, hp, is_exact, power, to_real, unify


class ControlKind(enum.Enum):
    CONSTANT = "CONSTANT"
    SUM_POWER = "SUM_POWER"
    MIXED_POWER = "MIXED_POWER"
    PRODUCT_POWER = "PRODUCT_POWER"
    SUBMULTIPLICATIVE = "SUBMULTIPLICATIVE"


POWER_FAMILIES = frozenset(
    {ControlKind.CONSTANT, ControlKind.SUM_POWER, ControlKind.MIXED_POWER, ControlKind.PRODUCT_POWER}
)


@dataclass(frozen=True)
class PowerAlpha:
    """``alpha(t) = coefficient * t ** exponent``: a serializable submultiplicative weight."""

    exponent: Fraction
    coefficient: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_rational(self.exponent))
        object.__setattr__(self, "coefficient", as_rational(self.coefficient))
        if self.coefficient <= 0:
            raise DomainError("alpha coefficient must be positive")

    def __call__(self, t):
        return self.coefficient * power(t, self.exponent)

    def to_dict(self) -> dict:
        return {"kind": "power", "exponent": _num(self.exponent), "coefficient": _num(self.coefficient)}


@dataclass(frozen=True)
class ControlFunction:
    """A nonnegative control.

    ``epsilon`` is the overall magnitude (the ``delta`` of the submultiplicative
    family).  ``alpha`` is the exponent of the sum/mixed families, ``p_exp``
    and ``q_exp`` those of the product family.
    """

    kind: ControlKind
    epsilon: object
    alpha: object = 0
    p_exp: object = 0
    q_exp: object = 0
    alpha_fn: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.epsilon < 0:
            raise DomainError(f"control magnitude must be nonnegative, got {self.epsilon}")
        if self.kind is ControlKind.SUBMULTIPLICATIVE and self.alpha_fn is None:
            raise DomainError("submultiplicative control needs alpha_fn")

    @classmethod
    def constant(cls, epsilon):
        return cls(ControlKind.CONSTANT, epsilon)

    @classmethod
    def sum_power(cls, epsilon, alpha):
        return cls(ControlKind.SUM_POWER, epsilon, alpha=alpha)

    @classmethod
    def mixed_power(cls, epsilon, alpha):
        return cls(ControlKind.MIXED_POWER, epsilon, alpha=alpha)

    @classmethod
    def product_power(cls, epsilon, p_exp, q_exp):
        return cls(ControlKind.PRODUCT_POWER, epsilon, p_exp=p_exp, q_exp=q_exp)

    @classmethod
    def submultiplicative(cls, delta, alpha_fn):
        return cls(ControlKind.SUBMULTIPLICATIVE, delta, alpha_fn=alpha_fn)

    @property
    def exponent(self):
        """Homogeneity degree ``e`` with ``Q(t x, t y) = t^e Q(x, y)``; ``None`` if not a power family."""
        if self.kind is ControlKind.CONSTANT:
            return 0
        if self.kind in (ControlKind.SUM_POWER, ControlKind.MIXED_POWER):
            return self.alpha
        if self.kind is ControlKind.PRODUCT_POWER:
            return self.p_exp + self.q_exp
        return None

    def with_magnitude(self, epsilon) -> "ControlFunction":
        return ControlFunction(self.kind, epsilon, self.alpha, self.p_exp, self.q_exp, self.alpha_fn)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "epsilon": _num(self.epsilon)}
        if self.kind in (ControlKind.SUM_POWER, ControlKind.MIXED_POWER):
            d["alpha"] = _num(self.alpha)
        elif self.kind is ControlKind.PRODUCT_POWER:
            d["p_exp"] = _num(self.p_exp)
            d["q_exp"] = _num(self.q_exp)
        elif self.kind is ControlKind.SUBMULTIPLICATIVE:
            to_dict = getattr(self.alpha_fn, "to_dict", None)
            d["alpha_fn"] = to_dict() if to_dict else repr(self.alpha_fn)
        return d

    def __call__(self, x_abs, y_abs):
        return eval_control(self, x_abs, y_abs)


def _num(v):
    """JSON-friendly scalar: ints stay ints, other rationals become ``"num/den"``."""
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return v
    return float(v)


def eval_control(q: ControlFunction, x_abs, y_abs):
    """``Q(x, y)``; depends only on the magnitudes. Exact when every input is rational with integral exponents."""
    if x_abs < 0 or y_abs < 0:
        raise DomainError("control arguments are magnitudes and must be nonnegative")
    kind, eps = q.kind, q.epsilon
    if kind is ControlKind.CONSTANT:
        return eps
    if kind is ControlKind.SUM_POWER:
        parts = (power(x_abs, q.alpha), power(y_abs, q.alpha))
    elif kind is ControlKind.MIXED_POWER:
        half = q.alpha / 2 if is_exact(q.alpha) else to_real(q.alpha) / 2
        a, b = unify(power(x_abs, half), power(y_abs, half))
        parts = (a * b, power(x_abs, q.alpha), power(y_abs, q.alpha))
    elif kind is ControlKind.PRODUCT_POWER:
        a, b = unify(power(x_abs, q.p_exp), power(y_abs, q.q_exp))
        return _scale(eps, a * b)
    else:
        parts = (q.alpha_fn(x_abs), q.alpha_fn(y_abs))
    return _scale(eps, sum(unify(*parts)))


def _scale(eps, value):
    eps, value = unify(eps, value)
    return eps * value


@dataclass(frozen=True)
class SeriesEvaluation:
    """Partial sum of the stability series after ``terms_used`` terms.

    ``tail_bound`` is ``math.inf`` when the series diverges or no tail bound is available.
    """

    partial_sum: object
    terms_used: int
    tail_bound: object
    converged: bool
    ratio: object = None

    @property
    def upper(self):
        """``partial_sum + tail_bound``: an upper bracket for the series limit."""
        return self.partial_sum + self.tail_bound


def _term(q: ControlFunction, l: int, x_abs, s: int):
    t = x_abs / hp.mpf(3) ** (s + 1)
    return to_real(eval_control(q, t, t)) / hp.mpf(3) ** (l * s)


def geometric_ratio(q: ControlFunction, l: int):
    """Exact ratio of consecutive series terms for power families, ``3^-(e + l)``."""
    e = q.exponent
    if e is None:
        return None
    return hp.mpf(3) ** (-(to_real(e) + l))


def series_bound(
    q: ControlFunction,
    l: int,
    x_abs,
    max_terms: int = 4000,
    tol: float = 1e-30,
) -> SeriesEvaluation:
    """Sum the stability series until the tail is below ``tol`` relative to the partial sum.

    Power families use the exact geometric tail; a ratio ``>= 1`` (for instance
    exponent ``<= -l``) reports ``converged=False`` with an infinite tail.  The
    submultiplicative family bounds the ratio by ``3^-l alpha(1/3)``, which is
    valid when ``alpha(t/3) <= alpha(1/3) alpha(t)``, and never by less than the
    observed term ratios.
    """
    if max_terms < 1:
        raise DomainError("max_terms must be at least 1")
    if l < 1:
        raise DomainError("degree must be a positive integer")
    x_abs = to_real(x_abs)
    if x_abs <= 0:
        raise DomainError("series bound needs |x| > 0")
    tol = to_real(tol)

    if q.kind in POWER_FAMILIES:
        ratio = geometric_ratio(q, l)
    else:
        ratio = hp.mpf(3) ** (-l) * to_real(q.alpha_fn(hp.mpf(1) / 3))

    partial = hp.mpf(0)
    term = _term(q, l, x_abs, 0)
    tail = hp.inf
    for s in range(max_terms):
        partial += term
        nxt = _term(q, l, x_abs, s + 1)
        if q.kind not in POWER_FAMILIES and term > 0:
            ratio = max(ratio, nxt / term)
        term = nxt
        if ratio >= 1:
            tail = hp.inf
            continue
        tail = nxt / (1 - ratio)
        if tail == 0 or tail <= tol * partial:
            return SeriesEvaluation(partial, s + 1, tail, True, ratio)
    return SeriesEvaluation(partial, max_terms, tail, False, ratio)


def _check_exclusion(q: ControlFunction, l: int) -> None:
    e = q.exponent
    if e is not None and q.kind is not ControlKind.CONSTANT and e == -l:
        raise ParameterExclusion(f"exponent {e} equals -l = {-l}")


def closed_form_bound(q: ControlFunction, l: int, x_abs):
    """Closed-form real-field bound for the power families; ``None`` for submultiplicative.

    Below the excluded exponent (``e < -l``) the series diverges and the
    result is ``inf`` instead of the (negative) formula value.

    CONSTANT:      3^l eps / (3^l - 1)
    SUM_POWER:     2 * 3^l eps |x|^a / (3^(a+l) - 1)
    MIXED_POWER:   3^(l+1) eps |x|^a / (3^(a+l) - 1)
    PRODUCT_POWER: 3^l eps |x|^(p+q) / (3^(p+q+l) - 1)
    """
    if q.kind is ControlKind.SUBMULTIPLICATIVE:
        return None
    _check_exclusion(q, l)
    eps = to_real(q.epsilon)
    three_l = hp.mpf(3) ** l
    if q.kind is ControlKind.CONSTANT:
        return three_l * eps / (three_l - 1)
    if q.exponent < -l:
        return hp.inf
    a = to_real(q.exponent)
    xa = to_real(x_abs) ** a
    denom = hp.mpf(3) ** (a + l) - 1
    if q.kind is ControlKind.SUM_POWER:
        return 2 * three_l * eps * xa / denom
    if q.kind is ControlKind.MIXED_POWER:
        return 3 * three_l * eps * xa / denom
    return three_l * eps * xa / denom


def hypothesis_holds(q: ControlFunction, l: int) -> bool:
    """Whether the stability series converges for this power-family control (exponent > -l)."""
    e = q.exponent
    if e is None:
        return True
    return math.isfinite(float(e)) and e > -l
