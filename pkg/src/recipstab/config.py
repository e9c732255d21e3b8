"""JSON experiment configuration for the command-line harness.

Every document is a single JSON object; unknown fields are rejected.  Rational
quantities accept an integer, a decimal number (read as its decimal value,
so ``0.01`` is ``1/100``) or a ``"num/den"`` string.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Literal, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from .controls import ControlFunction, ControlKind, PowerAlpha
from .equation import ReciprocalParams
from .errors import ConfigError
from .exact import as_rational
from .hyers import (
    DEFAULT_CONTRACTION_DEPTH,
    DEFAULT_MAX_M,
    DEFAULT_REPORT_TOLERANCE,
    PerturbedReciprocal,
    contraction_chain,
    tabulate,
)

U64_MAX = 2**64 - 1


def _rational(v):
    try:
        return as_rational(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {v!r}") from exc


Rat = Annotated[Fraction, BeforeValidator(_rational)]
Seed = Annotated[int, Field(ge=0, le=U64_MAX)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True, frozen=True)


class AlphaSpec(_Strict):
    kind: Literal["power"] = "power"
    exponent: Rat
    coefficient: Rat = Fraction(1)

    def build(self) -> PowerAlpha:
        return PowerAlpha(self.exponent, self.coefficient)


class ControlSpec(_Strict):
    kind: ControlKind
    epsilon: Rat = Fraction(1)
    alpha: Rat = Fraction(0)
    p_exp: Rat = Fraction(0)
    q_exp: Rat = Fraction(0)
    alpha_fn: Optional[AlphaSpec] = None

    @model_validator(mode="after")
    def _check(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.kind is ControlKind.SUBMULTIPLICATIVE and self.alpha_fn is None:
            raise ValueError("SUBMULTIPLICATIVE control needs alpha_fn")
        return self

    def build(self) -> ControlFunction:
        fn = self.alpha_fn.build() if self.alpha_fn else None
        return ControlFunction(self.kind, self.epsilon, self.alpha, self.p_exp, self.q_exp, fn)


class CheckSolutionConfig(_Strict):
    rng_seed: Seed = 42
    instances: int = Field(500, ge=1)
    max_degree_primary: int = Field(8, ge=1)
    max_degree_generalized: int = Field(6, ge=1)
    max_numerator: int = Field(12, ge=1)
    max_denominator: int = Field(12, ge=1)
    inadmissible_fraction: float = Field(0.0, ge=0.0, le=1.0)


class GridSpec(_Strict):
    min: Rat
    max: Rat
    count: int = Field(8, ge=1)
    spacing: Literal["LINEAR", "GEOMETRIC"] = "GEOMETRIC"

    @model_validator(mode="after")
    def _check(self):
        if self.min <= 0:
            raise ValueError("grid min must be positive")
        if self.max < self.min:
            raise ValueError("grid max must be at least grid min")
        return self

    def points(self) -> list[Fraction]:
        """Grid points as rationals; geometric points are rounded to denominators <= 10^6."""
        if self.count == 1:
            return [self.min]
        n = self.count - 1
        if self.spacing == "LINEAR":
            step = (self.max - self.min) / n
            return [self.min + i * step for i in range(self.count)]
        ratio = float(self.max / self.min) ** (1.0 / n)
        pts = [self.min]
        for i in range(1, n):
            pts.append(Fraction(repr(float(self.min) * ratio**i)).limit_denominator(10**6))
        pts.append(self.max)
        return pts


class PerturbationSpec(_Strict):
    kind: Literal["ZERO", "POWER_ENVELOPE", "TABULATED"]
    root_coeff: Rat = Fraction(1)
    degree: int = Field(1, ge=1)
    epsilon: Rat = Fraction(0)
    beta: Rat = Fraction(1)
    table: Optional[dict[str, float]] = None
    additive_constant: Optional[Rat] = None

    @model_validator(mode="after")
    def _check(self):
        if self.root_coeff == 0:
            raise ValueError("root_coeff must be nonzero")
        if self.kind == "POWER_ENVELOPE" and self.beta <= 0:
            raise ValueError("POWER_ENVELOPE needs beta > 0")
        if self.kind == "TABULATED" and (self.table is None) == (self.additive_constant is None):
            raise ValueError("TABULATED needs exactly one of table / additive_constant")
        return self

    def build(self, grid: list[Fraction], depth: int) -> PerturbedReciprocal:
        base = ReciprocalParams(self.root_coeff, self.degree)
        if self.kind == "ZERO":
            return PerturbedReciprocal.exact(base)
        if self.kind == "POWER_ENVELOPE":
            return PerturbedReciprocal.power_envelope(base, self.epsilon, self.beta)
        if self.table is not None:
            return PerturbedReciprocal.tabulated(base, {as_rational(k): v for k, v in self.table.items()})
        c = self.additive_constant
        points = {t for x in grid for t in contraction_chain(x, depth)}
        return PerturbedReciprocal.tabulated(
            base, tabulate(lambda t: base.root(t) ** base.degree + c, sorted(points))
        )


class StabilityControlSpec(_Strict):
    mode: Literal["empirical", "declared"] = "empirical"
    family: ControlKind = ControlKind.CONSTANT
    epsilon: Optional[Rat] = None
    alpha: Rat = Fraction(0)
    p_exp: Rat = Fraction(0)
    q_exp: Rat = Fraction(0)
    alpha_fn: Optional[AlphaSpec] = None

    @model_validator(mode="after")
    def _check(self):
        if self.mode == "declared" and self.epsilon is None:
            raise ValueError("declared control needs epsilon")
        if self.mode == "empirical" and self.epsilon is not None:
            raise ValueError("empirical control is fitted; do not give epsilon")
        if self.family is ControlKind.SUBMULTIPLICATIVE and self.alpha_fn is None:
            raise ValueError("SUBMULTIPLICATIVE control needs alpha_fn")
        return self


class StabilityRunConfig(_Strict):
    rng_seed: Seed = 42
    perturbation: PerturbationSpec
    grid: GridSpec
    control: StabilityControlSpec = StabilityControlSpec()
    max_m: int = Field(DEFAULT_MAX_M, ge=2)
    tolerance_log2: int = Field(-60, le=-1)
    report_tolerance: float = Field(DEFAULT_REPORT_TOLERANCE, gt=0)
    contraction_depth: int = Field(DEFAULT_CONTRACTION_DEPTH, ge=1)


class PadicRunConfig(_Strict):
    rng_seed: Seed = 42
    primes: list[int] = Field(min_length=1)
    degrees: list[int] = Field(min_length=1)
    controls: list[ControlSpec] = Field(min_length=1)
    x_norms: list[Rat] = [Fraction(1)]
    probe_depth: int = Field(32, ge=1)
    probe_m: int = Field(8, ge=4)
    submultiplicative_grid: list[Rat] = [Fraction(1, 9), Fraction(1, 3), Fraction(1), Fraction(3), Fraction(9)]

    @model_validator(mode="after")
    def _check(self):
        from sympy import isprime

        for p in self.primes:
            if p < 2 or not isprime(p):
                raise ValueError(f"{p} is not a prime")
        if any(l < 1 for l in self.degrees):
            raise ValueError("degrees must be positive")
        if any(x <= 0 for x in self.x_norms + self.submultiplicative_grid):
            raise ValueError("norms and sample points must be positive")
        return self


def load_config(path: Path | str, model: type[BaseModel]):
    """Parse ``path`` into ``model``; every failure becomes ConfigError naming the line or field."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data, model, source=str(path))


def parse_config(data, model: type[BaseModel], source: str = "<config>"):
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"{source}: {problems}") from exc
