"""p-adic valuations and norms on the rationals, and the non-Archimedean stability bounds.

For the p-adic norm every integer has ``|n|_p <= 1``; in particular
``|1/3^l|_p = 3^l`` for ``p = 3`` and ``1`` otherwise.  Contracting an
argument by 3 therefore *enlarges* (p = 3) or preserves (p != 3) its norm,
which governs whether the decay condition

    lim_m |1/3^l|^m G(x/3^(m+1), y/3^(m+1)) = 0

can hold at all.  Controls ``G`` are real-valued and are evaluated at p-adic
magnitudes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .controls import POWER_FAMILIES, ControlFunction, ControlKind, eval_control
from .equation import EquationVariant, EvalPoint, ReciprocalParams, lambda_residual
from .errors import DomainError, ParameterExclusion
from .exact import as_rational, hp, is_exact, power, to_real, unify

INFINITY = math.inf
DEFAULT_PROBE_DEPTH = 32
DEFAULT_PROBE_M = 8
MATCH_RTOL = Fraction(1, 10**12)


@dataclass(frozen=True)
class PadicContext:
    prime: int

    def __post_init__(self):
        from sympy import isprime

        if not isinstance(self.prime, int) or self.prime < 2 or not isprime(self.prime):
            raise DomainError(f"{self.prime!r} is not a prime")

    def valuation(self, q):
        return valuation(self, q)

    def norm(self, q) -> Fraction:
        return padic_norm(self, q)

    @property
    def norm3(self) -> Fraction:
        """``|3|_p``."""
        return padic_norm(self, 3)

    @property
    def norm2(self) -> Fraction:
        return padic_norm(self, 2)

    def inverse_power_norm(self, l: int) -> Fraction:
        """``|1/3^l|_p``."""
        return padic_norm(self, Fraction(1, 3**l))


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(ctx: PadicContext, q):
    """``v_p(numerator) - v_p(denominator)``; ``math.inf`` for zero."""
    q = as_rational(q)
    if q == 0:
        return INFINITY
    return _int_valuation(abs(q.numerator), ctx.prime) - _int_valuation(q.denominator, ctx.prime)


def padic_norm(ctx: PadicContext, q) -> Fraction:
    v = valuation(ctx, q)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(ctx.prime) ** (-v)


class C0Status(enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    UNKNOWN = "UNKNOWN"


def _contracted_norm(ctx: PadicContext, t_norm, steps: int):
    """``|t / 3^steps|_p`` from ``|t|_p``."""
    if is_exact(t_norm):
        return as_rational(t_norm) * ctx.norm3 ** (-steps)
    return to_real(t_norm) * to_real(ctx.norm3) ** (-steps)


def c0_terms(ctx: PadicContext, g_ctrl: ControlFunction, l: int, x_norm, y_norm, count: int) -> list:
    """``|1/3^l|^m G(|x/3^(m+1)|, |y/3^(m+1)|)`` for ``m = 0..count-1``."""
    w = ctx.inverse_power_norm(l)
    out = []
    for m in range(count):
        g = eval_control(
            g_ctrl,
            _contracted_norm(ctx, x_norm, m + 1),
            _contracted_norm(ctx, y_norm, m + 1),
        )
        a, b = unify(w**m, g)
        out.append(a * b)
    return out


def growth_exponent(ctx: PadicContext, g_ctrl: ControlFunction, l: int):
    """Per-step growth of the decay and max-bound terms, as a power of 3; ``None`` outside the power families.

    Terms scale like ``3^(step * (l + e))`` when ``p = 3`` and are constant otherwise.
    """
    e = g_ctrl.exponent
    if e is None:
        return None
    if ctx.prime != 3:
        return 0
    return l + e


def trend(terms: list) -> C0Status:
    """HOLDS if the terms shrink by a uniform factor < 1, FAILS if nondecreasing, else UNKNOWN.

    Inexact terms get a few ulps of slack so a constant sequence reads as constant.
    """
    if all(t == 0 for t in terms):
        return C0Status.HOLDS
    if any(t == 0 for t in terms):
        return C0Status.UNKNOWN
    ratios = [b / a for a, b in zip(terms, terms[1:])]
    slack = 0 if all(is_exact(t) for t in terms) else hp.mpf(2) ** (16 - hp.prec)
    if max(ratios) < 1 - slack:
        return C0Status.HOLDS
    if min(ratios) >= 1 - slack:
        return C0Status.FAILS
    return C0Status.UNKNOWN


def c0_condition_check(
    ctx: PadicContext,
    g_ctrl: ControlFunction,
    l: int,
    x_norm,
    y_norm,
    probe_m: int = DEFAULT_PROBE_M,
    method: str = "auto",
) -> C0Status:
    """Decide the decay condition.

    ``method="auto"`` uses the exponent test for power families and the
    numeric trend probe otherwise; ``"analytic"`` and ``"numeric"`` force one
    of the two.
    """
    if probe_m < 4:
        raise DomainError("probe_m must be at least 4")
    if x_norm <= 0 or y_norm <= 0:
        raise DomainError("norms of nonzero points are positive")
    analytic = method == "analytic" or (method == "auto" and g_ctrl.kind in POWER_FAMILIES)
    if analytic:
        if g_ctrl.kind not in POWER_FAMILIES:
            raise DomainError("analytic decision is only available for power-family controls")
        if g_ctrl.epsilon == 0:
            return C0Status.HOLDS
        return C0Status.HOLDS if growth_exponent(ctx, g_ctrl, l) < 0 else C0Status.FAILS
    return trend(c0_terms(ctx, g_ctrl, l, x_norm, y_norm, probe_m + 1))


@dataclass(frozen=True)
class MaxBound:
    """The max over ``k = 0..K`` of the max-bound terms, and where it is attained."""

    value: object
    k_argmax: int | None
    diverging: bool
    terms: tuple = ()


def max_bound_terms(ctx: PadicContext, g_ctrl: ControlFunction, l: int, x_norm, K: int) -> list:
    """``|1/3^l|^(k+1) G(|x/3^(k+1)|, |x/3^(k+1)|)`` for ``k = 0..K``."""
    w = ctx.inverse_power_norm(l)
    out = []
    for k in range(K + 1):
        t = _contracted_norm(ctx, x_norm, k + 1)
        a, b = unify(w ** (k + 1), eval_control(g_ctrl, t, t))
        out.append(a * b)
    return out


def theorem41_bound(
    ctx: PadicContext, g_ctrl: ControlFunction, l: int, x_norm, K: int = DEFAULT_PROBE_DEPTH
) -> MaxBound:
    """Literal max of the max-bound terms over ``k = 0..K``.

    Divergence is decided by the exponent test for power families (positive
    growth) and otherwise by the terms being nondecreasing with net growth
    over the probe.  A diverging result still carries the probed max.
    """
    if K < 1:
        raise DomainError("K must be at least 1")
    if x_norm <= 0:
        raise DomainError("norm of a nonzero point is positive")
    terms = max_bound_terms(ctx, g_ctrl, l, x_norm, K)
    best = max(terms)
    k_best = terms.index(best)
    growth = growth_exponent(ctx, g_ctrl, l)
    if growth is not None:
        diverging = g_ctrl.epsilon != 0 and growth > 0
    else:
        diverging = all(b >= a for a, b in zip(terms, terms[1:])) and terms[-1] > terms[0]
    return MaxBound(best, None if diverging else k_best, diverging, tuple(terms))


def corollary_closed_form(
    ctx: PadicContext,
    g_ctrl: ControlFunction,
    l: int,
    x_norm,
    coefficients: str = "padic",
):
    """Closed-form corollary bound for ``G``.

    ``coefficients="padic"`` reads the ``|2|`` and ``|3|`` multiplying the
    magnitude as p-adic norms (literal reading); ``"real"`` reads them as the
    real coefficients 2 and 3 that ``G(x, x)`` actually carries.  The ``|3|^a``
    and ``|3|^l`` factors coming from contracted arguments are p-adic in both.
    """
    if coefficients not in ("padic", "real"):
        raise ValueError("coefficients must be 'padic' or 'real'")
    x_norm = as_rational(x_norm) if is_exact(x_norm) else to_real(x_norm)
    mu = g_ctrl.epsilon
    n3 = ctx.norm3
    if g_ctrl.kind is ControlKind.CONSTANT:
        return mu
    if g_ctrl.kind is ControlKind.SUBMULTIPLICATIVE:
        arg = x_norm / n3 if is_exact(x_norm) else x_norm / to_real(n3)
        a, b = unify(2 * mu, g_ctrl.alpha_fn(arg))
        return a * b
    a = g_ctrl.exponent
    if a == -l:
        raise ParameterExclusion(f"exponent {a} equals -l = {-l}")
    if g_ctrl.kind is ControlKind.SUM_POWER:
        coeff = ctx.norm2 if coefficients == "padic" else 2
    elif g_ctrl.kind is ControlKind.MIXED_POWER:
        coeff = n3 if coefficients == "padic" else 3
    else:
        coeff = 1
    factor = power(n3, -a) if a > -l else n3**l
    parts = unify(coeff, mu, factor, power(x_norm, a))
    return parts[0] * parts[1] * parts[2] * parts[3]


class Agreement(enum.Enum):
    MATCH = "MATCH"
    MISMATCH = "MISMATCH"
    NOT_COMPARED = "NOT_COMPARED"


def _agreement(direct: MaxBound, corollary, c0: C0Status):
    if corollary is None or direct.diverging or c0 is not C0Status.HOLDS:
        return Agreement.NOT_COMPARED, None
    d, c = unify(direct.value, corollary)
    if c == 0:
        ratio = None if d != 0 else Fraction(1)
    else:
        ratio = d / c
    scale = max(abs(c), abs(d))
    if abs(d - c) <= (MATCH_RTOL if is_exact(scale) else to_real(MATCH_RTOL)) * scale:
        return Agreement.MATCH, ratio
    return Agreement.MISMATCH, ratio


@dataclass(frozen=True)
class NonArchVerdict:
    prime: int
    degree: int
    control: ControlFunction
    x_norm: object
    c0_status: C0Status
    direct: MaxBound
    corollary_bound: object
    agreement: Agreement
    ratio: object
    corollary_bound_real: object
    agreement_real: Agreement
    ratio_real: object

    @property
    def direct_bound(self):
        return "DIVERGING" if self.direct.diverging else self.direct.value

    @property
    def k_argmax(self):
        return self.direct.k_argmax

    def to_dict(self) -> dict:
        from .reporting import json_real

        def scalar(v):
            if v is None:
                return None
            if is_exact(v):
                v = Fraction(v)
                return f"{v.numerator}/{v.denominator}"
            return json_real(v)

        return {
            "prime": self.prime,
            "degree": self.degree,
            "control": self.control.to_dict(),
            "x_norm": scalar(self.x_norm),
            "c0_status": self.c0_status.value,
            "direct_bound": "DIVERGING" if self.direct.diverging else scalar(self.direct.value),
            "direct_probe_max": scalar(self.direct.value),
            "k_argmax": self.direct.k_argmax,
            "corollary_bound": "NOT_APPLICABLE" if self.corollary_bound is None else scalar(self.corollary_bound),
            "agreement": self.agreement.value,
            "ratio": scalar(self.ratio),
            "corollary_bound_real_coefficients": scalar(self.corollary_bound_real),
            "agreement_real_coefficients": self.agreement_real.value,
            "ratio_real_coefficients": scalar(self.ratio_real),
        }


def compare_bounds(
    ctx: PadicContext,
    g_ctrl: ControlFunction,
    l: int,
    x_norm,
    K: int = DEFAULT_PROBE_DEPTH,
    probe_m: int = DEFAULT_PROBE_M,
) -> NonArchVerdict:
    """Join the decay condition, the literal max bound and the corollary closed forms.

    Comparisons are only made when the decay condition holds and the direct
    bound is finite; a mismatch is reported with ``direct / corollary``.
    """
    status = c0_condition_check(ctx, g_ctrl, l, x_norm, x_norm, probe_m)
    direct = theorem41_bound(ctx, g_ctrl, l, x_norm, K)
    cor = corollary_closed_form(ctx, g_ctrl, l, x_norm, "padic")
    cor_real = corollary_closed_form(ctx, g_ctrl, l, x_norm, "real")
    agreement, ratio = _agreement(direct, cor, status)
    agreement_real, ratio_real = _agreement(direct, cor_real, status)
    return NonArchVerdict(
        ctx.prime, l, g_ctrl, x_norm, status, direct,
        cor, agreement, ratio, cor_real, agreement_real, ratio_real,
    )


@dataclass(frozen=True)
class SubmultiplicativeCheck:
    property_holds: bool
    contraction_holds: bool
    contraction_factor: object
    worst_t: object = None


def submultiplicative_check(
    ctx: PadicContext, alpha_fn: Callable, l: int, sample_grid: Iterable
) -> SubmultiplicativeCheck:
    """Check ``alpha(t/|3|) <= alpha(1/|3|) alpha(t)`` on the grid and ``|1/3^l| alpha(1/|3|) < 1``."""
    grid = list(sample_grid)
    if not grid:
        raise DomainError("sample grid must be nonempty")
    inv3 = 1 / ctx.norm3
    a_inv3 = alpha_fn(inv3)
    holds = True
    worst = None
    for t in grid:
        if t <= 0:
            raise DomainError("sample points must be positive")
        scaled = inv3 * t if is_exact(t) else to_real(inv3) * t
        a, b = unify(a_inv3, alpha_fn(t))
        lhs, rhs = unify(alpha_fn(scaled), a * b)
        if lhs > rhs:
            holds = False
            worst = t
            break
    w, a = unify(ctx.inverse_power_norm(l), a_inv3)
    factor = w * a
    return SubmultiplicativeCheck(holds, bool(factor < 1), factor, worst)


def nonarch_lambda_norm(ctx: PadicContext, params: ReciprocalParams, pt: EvalPoint) -> Fraction:
    """p-adic norm of the exact residual of ``(r/x)^l`` for the primary equation."""
    return padic_norm(ctx, lambda_residual(EquationVariant.primary(params.degree), params, pt))
