"""Direct-method approximation of a perturbed reciprocal function.

For ``f`` with ``|Lambda(x, y)| <= Q(x, y)``, the iterates
``g_m(x) = 3^(-l m) f(x / 3^m)`` form a Cauchy sequence whose limit ``g`` is an
exact reciprocal solution, and ``|f(x) - g(x)|`` is bounded by the stability
series of ``Q``.  This module builds the iterates, fits a control from
observed residuals, and checks the bound on a grid of positive rationals.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .controls import ControlFunction, ControlKind, SeriesEvaluation, eval_control, series_bound
from .equation import (
    EquationVariant,
    EvalPoint,
    ReciprocalParams,
    Variant,
    is_admissible,
    lambda_residual_numeric,
)
from .errors import DegenerateDenominator, DomainError, HypothesisViolation, RootBranchError
from .exact import as_rational, hp, is_exact, power, to_real

DEFAULT_TOLERANCE = hp.mpf(2) ** -60
DEFAULT_MAX_M = 200
DEFAULT_REPORT_TOLERANCE = 1e-9
DEFAULT_CONTRACTION_DEPTH = 16


class Perturbation(enum.Enum):
    ZERO = "ZERO"
    POWER_ENVELOPE = "POWER_ENVELOPE"
    TABULATED = "TABULATED"


@dataclass(frozen=True)
class PerturbedReciprocal:
    """A function near ``(r/x)^l``.

    * ``ZERO``: the exact solution itself (values stay rational).
    * ``POWER_ENVELOPE``: ``(1 + epsilon |x|^beta) (r/x)^l`` with ``beta > 0``.
    * ``TABULATED``: values looked up in ``table``; missing points raise DomainError.
    """

    base: ReciprocalParams
    kind: Perturbation = Perturbation.ZERO
    epsilon: Fraction = Fraction(0)
    beta: Fraction = Fraction(1)
    table: Mapping[Fraction, object] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))
        object.__setattr__(self, "beta", as_rational(self.beta))
        if self.epsilon < 0:
            raise DomainError("perturbation size must be nonnegative")
        if self.kind is Perturbation.POWER_ENVELOPE and self.beta <= 0:
            raise DomainError("power envelope needs beta > 0")
        if self.kind is Perturbation.TABULATED:
            if self.table is None:
                raise DomainError("tabulated perturbation needs a table")
            table = {as_rational(k): v for k, v in self.table.items()}
            for k, v in table.items():
                if not v > 0:
                    raise DomainError(f"tabulated value at {k} is not positive")
            object.__setattr__(self, "table", table)

    @classmethod
    def exact(cls, base: ReciprocalParams) -> "PerturbedReciprocal":
        return cls(base)

    @classmethod
    def power_envelope(cls, base: ReciprocalParams, epsilon, beta) -> "PerturbedReciprocal":
        return cls(base, Perturbation.POWER_ENVELOPE, epsilon, beta)

    @classmethod
    def tabulated(cls, base: ReciprocalParams, table: Mapping) -> "PerturbedReciprocal":
        return cls(base, Perturbation.TABULATED, table=table)

    @property
    def degree(self) -> int:
        return self.base.degree

    def __call__(self, x):
        x = as_rational(x)
        if x == 0:
            raise DomainError("f is undefined at 0")
        if self.kind is Perturbation.TABULATED:
            try:
                return self.table[x]
            except KeyError:
                raise DomainError(f"no tabulated sample at x = {x}") from None
        exact = self.base.root(x) ** self.base.degree
        if self.kind is Perturbation.ZERO or self.epsilon == 0:
            return exact
        return (1 + to_real(self.epsilon) * power(abs(x), self.beta)) * to_real(exact)

    def root(self, x):
        """``f(x) ** (1/l)``; exact for the unperturbed solution, positive real root otherwise."""
        if self.kind is Perturbation.ZERO or (
            self.kind is Perturbation.POWER_ENVELOPE and self.epsilon == 0
        ):
            return self.base.root(x)
        v = self(x)
        if not v > 0:
            raise RootBranchError(f"f({x}) = {v} is not strictly positive")
        return hp.root(to_real(v), self.base.degree)


def tabulate(fn: Callable, points: Iterable) -> dict:
    """Sample ``fn`` on ``points``, keyed by exact rationals."""
    return {as_rational(t): fn(as_rational(t)) for t in points}


def contraction_chain(x, depth: int) -> list[Fraction]:
    """``[x, x/3, ..., x/3^depth]``: the points the direct method visits."""
    x = as_rational(x)
    return [x / 3**m for m in range(depth + 1)]


def direct_method_iterate(f: PerturbedReciprocal, x, m: int):
    """``3^(-l m) f(x / 3^m)``; exact whenever the sample is rational."""
    x = as_rational(x)
    if x <= 0:
        raise DomainError("direct-method iterates are taken at positive x")
    if m < 0:
        raise DomainError("iteration index must be nonnegative")
    value = f(x / 3**m)
    scale = Fraction(1, 3 ** (f.degree * m))
    if is_exact(value):
        return scale * value
    return to_real(value) * to_real(scale)


@dataclass
class ApproximationSequence:
    point: Fraction
    iterates: list[tuple[int, object]]
    cauchy_defects: list
    limit_estimate: object
    converged: bool
    tolerance: object = DEFAULT_TOLERANCE

    def defect_ratios(self) -> list:
        """``defect[m+1] / defect[m]`` for consecutive nonzero defects."""
        return [
            to_real(b) / to_real(a)
            for a, b in zip(self.cauchy_defects, self.cauchy_defects[1:])
            if a != 0
        ]


def build_sequence(
    f: PerturbedReciprocal,
    x,
    max_m: int = DEFAULT_MAX_M,
    tol=DEFAULT_TOLERANCE,
) -> ApproximationSequence:
    """Iterate until two successive Cauchy defects are below ``tol`` relative to the iterate.

    Running out of iterations is not an error: the sequence comes back with
    ``converged=False``.
    """
    if max_m < 2:
        raise DomainError("max_m must be at least 2")
    x = as_rational(x)
    tol = to_real(tol)
    iterates = [(0, direct_method_iterate(f, x, 0))]
    defects = []
    converged = False
    for m in range(1, max_m + 1):
        g = direct_method_iterate(f, x, m)
        prev = iterates[-1][1]
        iterates.append((m, g))
        defects.append(abs(g - prev))
        if len(defects) >= 2 and all(
            to_real(d) <= tol * abs(to_real(g)) for d in defects[-2:]
        ):
            converged = True
            break
    return ApproximationSequence(x, iterates, defects, iterates[-1][1], converged, tol)


def _sample_pairs(grid: list[Fraction], depth: int) -> list[tuple[Fraction, Fraction]]:
    pairs = list(itertools.product(grid, repeat=2))
    for x in grid:
        for t in contraction_chain(x, depth + 1)[1:]:
            pairs.append((t, t))
    seen = set()
    out = []
    for p in pairs:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


@dataclass(frozen=True)
class ResidualSample:
    x: Fraction
    y: Fraction
    residual: object


def observed_residuals(
    f: PerturbedReciprocal,
    variant: EquationVariant,
    pairs: Iterable[tuple],
) -> tuple[list[ResidualSample], int]:
    """``|Lambda(x, y)|`` at every usable pair, plus the number of pairs skipped.

    Pairs are skipped when inadmissible, outside a tabulated domain, or when
    a sampled value is not positive.
    """
    samples = []
    skipped = 0
    for x, y in pairs:
        x, y = as_rational(x), as_rational(y)
        if not is_admissible(variant.tag, x, y):
            skipped += 1
            continue
        try:
            res = lambda_residual_numeric(variant, f, EvalPoint(x, y), root=f.root)
        except (DomainError, RootBranchError, DegenerateDenominator):
            skipped += 1
            continue
        samples.append(ResidualSample(x, y, abs(res)))
    return samples, skipped


def empirical_control(
    f: PerturbedReciprocal,
    variant: EquationVariant,
    grid: Iterable,
    family: ControlKind,
    *,
    alpha=0,
    p_exp=0,
    q_exp=0,
    alpha_fn: Callable | None = None,
    pairs: Iterable[tuple] | None = None,
    contraction_depth: int = DEFAULT_CONTRACTION_DEPTH,
) -> ControlFunction:
    """Smallest control of ``family`` (shape exponents fixed) dominating every sampled residual.

    The sampled set is every ordered pair of grid points plus the diagonal
    pairs ``(x/3^s, x/3^s)`` for ``s = 1..contraction_depth+1``, which are the
    points the stability series evaluates.  ``pairs`` replaces that set.
    """
    shape = ControlFunction(family, 1, alpha, p_exp, q_exp, alpha_fn)
    if pairs is None:
        grid = sorted({as_rational(t) for t in grid})
        pairs = _sample_pairs(grid, contraction_depth)
    samples, _ = observed_residuals(f, variant, pairs)
    if not samples:
        raise DomainError("no admissible sample pairs")
    epsilon = hp.mpf(0)
    for s in samples:
        unit = to_real(eval_control(shape, abs(s.x), abs(s.y)))
        if unit == 0:
            if s.residual > 0:
                raise DomainError(f"control shape vanishes at ({s.x}, {s.y}) but residual does not")
            continue
        epsilon = max(epsilon, to_real(s.residual) / unit)
    if epsilon == 0:
        epsilon = Fraction(0)
    return shape.with_magnitude(epsilon)


def check_domination(
    f: PerturbedReciprocal,
    variant: EquationVariant,
    q: ControlFunction,
    pairs: Iterable[tuple],
) -> tuple[int, int]:
    """Raise HypothesisViolation unless ``|Lambda| <= Q`` on every usable pair.

    Returns ``(pairs_checked, pairs_skipped)``.
    """
    samples, skipped = observed_residuals(f, variant, pairs)
    slack = hp.mpf(2) ** (16 - hp.prec)
    worst = None
    worst_excess = hp.mpf(0)
    for s in samples:
        bound = to_real(eval_control(q, abs(s.x), abs(s.y)))
        res = to_real(s.residual)
        if res > bound * (1 + slack):
            excess = res - bound
            if worst is None or excess > worst_excess:
                worst, worst_excess = (s.x, s.y, res, bound), excess
    if worst is not None:
        raise HypothesisViolation(worst)
    return len(samples), skipped


@dataclass
class PointRecord:
    x: Fraction
    f_value: object
    g_value: object
    deviation: object
    bound: object
    ratio: object
    converged: bool
    violation: bool
    iterations: int


@dataclass
class StabilityReport:
    grid: list[Fraction]
    residual_bound_used: ControlFunction
    degree: int
    records: list[PointRecord]
    max_ratio: object
    violations: int
    flagged: int
    scaling_probe_max_error: object
    pairs_checked: int
    pairs_skipped: int
    report_tolerance: float = DEFAULT_REPORT_TOLERANCE
    contraction_depth: int = DEFAULT_CONTRACTION_DEPTH

    CSV_HEADER = ("x", "f_x", "g_x", "abs_f_minus_g", "bound", "ratio", "converged")

    def csv_rows(self) -> list[tuple]:
        from .reporting import fmt_rational, fmt_real

        return [
            (
                fmt_rational(r.x),
                fmt_real(r.f_value),
                fmt_real(r.g_value),
                fmt_real(r.deviation),
                fmt_real(r.bound),
                fmt_real(r.ratio),
                "true" if r.converged else "false",
            )
            for r in self.records
        ]

    def to_dict(self) -> dict:
        from .reporting import fmt_rational, json_real

        return {
            "degree": self.degree,
            "control": self.residual_bound_used.to_dict(),
            "sampled_domain": {
                "grid": [fmt_rational(x) for x in self.grid],
                "pairs": "grid x grid, plus (x/3^s, x/3^s) for grid x and s = 1..depth+1",
                "depth": self.contraction_depth,
                "pairs_checked": self.pairs_checked,
                "pairs_skipped": self.pairs_skipped,
            },
            "records": [
                {
                    "x": fmt_rational(r.x),
                    "f_x": json_real(r.f_value),
                    "g_x": json_real(r.g_value),
                    "abs_f_minus_g": json_real(r.deviation),
                    "bound": json_real(r.bound),
                    "ratio": json_real(r.ratio),
                    "converged": r.converged,
                    "violation": r.violation,
                    "iterations": r.iterations,
                }
                for r in self.records
            ],
            "max_ratio": json_real(self.max_ratio),
            "violations": self.violations,
            "flagged": self.flagged,
            "scaling_probe_max_error": json_real(self.scaling_probe_max_error),
            "report_tolerance": self.report_tolerance,
        }


def _bound_value(series: SeriesEvaluation):
    return series.upper if series.converged else hp.inf


def verify_stability(
    f: PerturbedReciprocal,
    q: ControlFunction,
    grid: Iterable,
    max_m: int = DEFAULT_MAX_M,
    tol=DEFAULT_TOLERANCE,
    *,
    report_tolerance: float = DEFAULT_REPORT_TOLERANCE,
    contraction_depth: int = DEFAULT_CONTRACTION_DEPTH,
) -> StabilityReport:
    """Compare ``|f - g|`` with the stability series of ``q`` on ``grid``.

    ``q`` must first dominate the observed residual on the sampled pairs (grid
    products and contracted diagonal points), otherwise HypothesisViolation is
    raised.  Each grid point is flagged when its sequence does not converge;
    a violation is a ratio ``|f - g| / bound`` above ``1 + report_tolerance``.
    """
    grid = sorted({as_rational(t) for t in grid})
    if not grid or grid[0] <= 0:
        raise DomainError("stability grid must be a nonempty set of positive rationals")
    l = f.degree
    variant = EquationVariant(Variant.PRIMARY_2X_Y, l)
    checked, skipped = check_domination(f, variant, q, _sample_pairs(grid, contraction_depth))

    records = []
    scaling_err = hp.mpf(0)
    for x in grid:
        seq = build_sequence(f, x, max_m, tol)
        fx = f(x)
        g = seq.limit_estimate
        dev = abs(to_real(fx) - to_real(g)) if not (is_exact(fx) and is_exact(g)) else abs(fx - g)
        bound = _bound_value(series_bound(q, l, to_real(x)))
        if bound == 0:
            ratio = hp.mpf(0) if dev == 0 else hp.inf
        else:
            ratio = to_real(dev) / to_real(bound)
        converged = seq.converged
        if converged:
            seq3 = build_sequence(f, x / 3, max_m, tol)
            converged = seq3.converged
            target = to_real(g) * 3**l
            scaling_err = max(scaling_err, abs(to_real(seq3.limit_estimate) - target) / abs(target))
        records.append(
            PointRecord(
                x, fx, g, dev, bound, ratio, converged,
                bool(ratio > 1 + report_tolerance), len(seq.iterates) - 1,
            )
        )
    return StabilityReport(
        grid=grid,
        residual_bound_used=q,
        degree=l,
        records=records,
        max_ratio=max(to_real(r.ratio) for r in records),
        violations=sum(r.violation for r in records),
        flagged=sum(not r.converged for r in records),
        scaling_probe_max_error=scaling_err,
        pairs_checked=checked,
        pairs_skipped=skipped,
        report_tolerance=report_tolerance,
        contraction_depth=contraction_depth,
    )
