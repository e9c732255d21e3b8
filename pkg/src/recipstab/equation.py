"""Both sides of the reciprocal-type functional equations and their residual.

Two families are supported:

* ``PRIMARY_2X_Y`` (degree ``l``)::

      f(2x+y) + f(2x-y) = 2 f(x) f(y) S(x, y) / (4 f(y)^(2/l) - f(x)^(2/l))^l

  with ``S = sum over even k of 2^(l-k) C(l,k) f(x)^(k/l) f(y)^((l-k)/l)``.

* ``GENERALIZED_X2Y`` (degree ``n``)::

      f(2x+y) + f(x+2y) = f(x) f(y) T(x, y) / (2 f(x)^(2/n) + 5 f(x)^(1/n) f(y)^(1/n) + 2 f(y)^(2/n))^n

  with ``T = sum over k of (2^(n-k) + 2^k) C(n,k) f(x)^(k/n) f(y)^((n-k)/n)``.

Every fractional power is written through the l-th root ``u = f^(1/l)``, so the
whole right-hand side is a polynomial/rational expression in ``u(x), u(y)``.
The exact channel takes ``u(t) = r/t`` (``f(t) = (r/t)^l``) and stays rational;
the numeric channel takes the positive real root of sampled values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .errors import DegenerateDenominator, DomainError, RootBranchError
from .exact import as_rational, binomial, hp, is_exact, to_real


class Variant(enum.Enum):
    PRIMARY_2X_Y = "primary"
    GENERALIZED_X2Y = "generalized"


@dataclass(frozen=True)
class EquationVariant:
    tag: Variant
    degree: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 1:
            raise DomainError(f"degree must be a positive integer, got {self.degree!r}")

    @classmethod
    def primary(cls, l: int) -> "EquationVariant":
        return cls(Variant.PRIMARY_2X_Y, l)

    @classmethod
    def generalized(cls, n: int) -> "EquationVariant":
        return cls(Variant.GENERALIZED_X2Y, n)


@dataclass(frozen=True)
class ReciprocalParams:
    """``f(x) = (root_coeff / x) ** degree``; ``c = root_coeff ** degree``."""

    root_coeff: Fraction
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "root_coeff", as_rational(self.root_coeff))
        if self.root_coeff == 0:
            raise DomainError("root coefficient must be nonzero")
        if not isinstance(self.degree, int) or self.degree < 1:
            raise DomainError(f"degree must be a positive integer, got {self.degree!r}")

    @property
    def c(self) -> Fraction:
        return self.root_coeff**self.degree

    def root(self, x) -> Fraction:
        """``f(x) ** (1/l)`` in the root representation, i.e. ``r / x``."""
        x = as_rational(x)
        if x == 0:
            raise DomainError("f is undefined at 0")
        return self.root_coeff / x


@dataclass(frozen=True)
class EvalPoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", as_rational(self.x))
        object.__setattr__(self, "y", as_rational(self.y))


def shifted_arguments(tag: Variant, x, y) -> tuple:
    """The two arguments of ``f`` on the left-hand side."""
    if tag is Variant.PRIMARY_2X_Y:
        return 2 * x + y, 2 * x - y
    return 2 * x + y, x + 2 * y


def check_admissible(tag: Variant, x, y) -> None:
    if x == 0:
        raise DegenerateDenominator("x == 0", x, y)
    if y == 0:
        raise DegenerateDenominator("y == 0", x, y)
    if tag is Variant.PRIMARY_2X_Y:
        if y == 2 * x:
            raise DegenerateDenominator("y == 2x", x, y)
        if y == -2 * x:
            raise DegenerateDenominator("y == -2x", x, y)
    else:
        if 2 * x + y == 0:
            raise DegenerateDenominator("2x + y == 0", x, y)
        if x + 2 * y == 0:
            raise DegenerateDenominator("x + 2y == 0", x, y)


def is_admissible(tag: Variant, x, y) -> bool:
    try:
        check_admissible(tag, x, y)
    except DegenerateDenominator:
        return False
    return True


def specialize_coefficients(variant: EquationVariant) -> dict[int, int]:
    """Coefficient of ``f(x)^(k/l) f(y)^((l-k)/l)`` in the right-hand numerator sum."""
    n = variant.degree
    if variant.tag is Variant.PRIMARY_2X_Y:
        return {k: 2 ** (n - k) * binomial(n, k) for k in range(0, n + 1, 2)}
    return {k: (2 ** (n - k) + 2**k) * binomial(n, k) for k in range(n + 1)}


def _rhs(tag: Variant, n: int, coeffs: Mapping[int, int], fx, fy, ux, uy):
    total = 0
    for k, c in coeffs.items():
        total += c * ux**k * uy ** (n - k)
    if tag is Variant.PRIMARY_2X_Y:
        return 2 * fx * fy * total / (4 * uy**2 - ux**2) ** n
    return fx * fy * total / (2 * ux**2 + 5 * ux * uy + 2 * uy**2) ** n


def residual_from_root(
    variant: EquationVariant,
    root: Callable,
    pt: EvalPoint,
    coefficients: Mapping[int, int] | None = None,
):
    """Residual LHS - RHS for ``f = root**l``, using ``root`` for every fractional power.

    ``coefficients`` overrides the numerator sum (used to test literature
    variants of the equation); by default the variant's own expansion is used.
    """
    tag, n = variant.tag, variant.degree
    x, y = pt.x, pt.y
    check_admissible(tag, x, y)
    a, b = shifted_arguments(tag, x, y)
    ux, uy = root(x), root(y)
    lhs = root(a) ** n + root(b) ** n
    coeffs = specialize_coefficients(variant) if coefficients is None else coefficients
    return lhs - _rhs(tag, n, coeffs, ux**n, uy**n, ux, uy)


def _check_degree(variant: EquationVariant, params: ReciprocalParams) -> None:
    if variant.degree != params.degree:
        raise DomainError(
            f"variant degree {variant.degree} does not match function degree {params.degree}"
        )


def eval_f(params: ReciprocalParams, x) -> Fraction:
    return params.root(x) ** params.degree


def eval_fractional_power(params: ReciprocalParams, x, j: int) -> Fraction:
    """``f(x) ** (j/l)`` computed as ``(r/x) ** j``."""
    if j < 0 or j > params.degree:
        raise DomainError(f"fractional index must lie in 0..{params.degree}, got {j}")
    return params.root(x) ** j


def lambda_residual(variant: EquationVariant, params: ReciprocalParams, pt: EvalPoint) -> Fraction:
    """Exact residual of ``f(x) = (r/x)^l``; zero for every admissible point."""
    _check_degree(variant, params)
    return residual_from_root(variant, params.root, pt)


def lambda_residual_numeric(
    variant: EquationVariant,
    f: Callable,
    pt: EvalPoint,
    root: Callable | None = None,
):
    """Residual of a sampled function, using positive real l-th roots.

    ``f`` is evaluated at the rational points ``x, y`` and the two shifted
    arguments; every value must be strictly positive.  When ``root`` is
    given it supplies ``f^(1/l)`` directly (exact samples stay exact).
    The result is an ``hp`` real.
    """
    tag, n = variant.tag, variant.degree
    x, y = pt.x, pt.y
    check_admissible(tag, x, y)
    a, b = shifted_arguments(tag, x, y)
    values = {}
    for t in (x, y, a, b):
        v = f(t)
        if not v > 0:
            raise RootBranchError(f"f({t}) = {v} is not strictly positive")
        values[t] = v
    if root is None:
        ux, uy = hp.root(to_real(values[x]), n), hp.root(to_real(values[y]), n)
        fx, fy, fa, fb = (to_real(values[t]) for t in (x, y, a, b))
    else:
        ux, uy = root(x), root(y)
        fx, fy, fa, fb = values[x], values[y], values[a], values[b]
        if not all(is_exact(v) for v in (ux, uy, fx, fy, fa, fb)):
            ux, uy, fx, fy, fa, fb = (to_real(v) for v in (ux, uy, fx, fy, fa, fb))
    result = fa + fb - _rhs(tag, n, specialize_coefficients(variant), fx, fy, ux, uy)
    return to_real(result)


def scaling_check(params: ReciprocalParams, x) -> tuple[Fraction, Fraction]:
    """``(f(3x), f(x) / 3^l)``; the two components are equal for every exact solution."""
    x = as_rational(x)
    return eval_f(params, 3 * x), eval_f(params, x) / 3**params.degree


# Literature instances, transcribed term by term as printed.  Each entry maps
# the index k of ``f(x)^(k/l) f(y)^((l-k)/l)`` to its coefficient, times an
# overall scale factored out in front of the bracket.
LITERATURE_FORMS = {
    (Variant.PRIMARY_2X_Y, 2): ("quadratic reciprocal", 1, {0: 4, 2: 1}),
    (Variant.PRIMARY_2X_Y, 4): ("reciprocal-quartic", 1, {4: 1, 0: 16, 2: 24}),
    (Variant.PRIMARY_2X_Y, 7): ("reciprocal-septic", 1, {7: 128, 2: 672, 4: 280, 6: 14}),
    (Variant.PRIMARY_2X_Y, 8): (
        "reciprocal-octic",
        1,
        {8: 1, 2: 1792, 4: 1120, 6: 112, 0: 256},
    ),
    (Variant.GENERALIZED_X2Y, 2): ("reciprocal-quadratic (x+2y form)", 1, {2: 5, 0: 5, 1: 8}),
    (Variant.GENERALIZED_X2Y, 3): ("reciprocal-cubic", 9, {3: 1, 0: 1, 2: 2, 1: 2}),
}


@dataclass(frozen=True)
class LiteratureComparison:
    variant: EquationVariant
    coefficients: dict[int, int]
    reference_name: str | None
    reference_coefficients: dict[int, int] | None
    verdict: str
    note: str = ""
    expansion_residual: Fraction | None = None
    reference_residual: Fraction | None = None

    def to_dict(self) -> dict:
        def fmt(c):
            return None if c is None else {str(k): v for k, v in sorted(c.items())}

        def rat(v):
            return None if v is None else f"{v.numerator}/{v.denominator}"

        return {
            "variant": self.variant.tag.value,
            "degree": self.variant.degree,
            "coefficients": fmt(self.coefficients),
            "reference": self.reference_name,
            "reference_coefficients": fmt(self.reference_coefficients),
            "verdict": self.verdict,
            "note": self.note,
            "expansion_residual": rat(self.expansion_residual),
            "reference_residual": rat(self.reference_residual),
        }


# Probe point for literal literature forms; admissible for both families.
_PROBE = EvalPoint(Fraction(1), Fraction(3))


def compare_with_literature(variant: EquationVariant) -> LiteratureComparison:
    """Compare the expanded numerator with the published instance of the same degree.

    Verdicts: ``MATCH`` (identical term-by-term), ``MATCH-WITH-NOTE`` (same
    coefficient multiset, some coefficient attached to a different term),
    ``MISMATCH``, or ``NO-REFERENCE``.  For anything but an exact match, the
    exact solution ``f = 1/x^l`` is substituted into both forms at (1, 3) to
    show which one it satisfies.
    """
    coeffs = specialize_coefficients(variant)
    entry = LITERATURE_FORMS.get((variant.tag, variant.degree))
    if entry is None:
        return LiteratureComparison(variant, coeffs, None, None, "NO-REFERENCE")
    name, scale, terms = entry
    reference = {k: scale * c for k, c in terms.items()}
    if reference == coeffs:
        return LiteratureComparison(variant, coeffs, name, reference, "MATCH")

    params = ReciprocalParams(Fraction(1), variant.degree)
    expansion_res = residual_from_root(variant, params.root, _PROBE)
    reference_res = residual_from_root(variant, params.root, _PROBE, coefficients=reference)
    moved = sorted(set(reference.items()) ^ set(coeffs.items()))
    if sorted(reference.values()) == sorted(coeffs.values()):
        verdict = "MATCH-WITH-NOTE"
        note = (
            "published coefficients agree as a multiset but are attached to different "
            f"terms {moved}; the exact solution satisfies the expansion "
            f"(residual {expansion_res}) and not the published attribution "
            f"(residual {reference_res})"
        )
    else:
        verdict = "MISMATCH"
        note = f"differing (k, coefficient) entries {moved}"
    return LiteratureComparison(
        variant, coeffs, name, reference, verdict, note, expansion_res, reference_res
    )
