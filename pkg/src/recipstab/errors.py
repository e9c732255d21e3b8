"""Exception hierarchy shared by every layer of the toolkit."""

from __future__ import annotations


class RecipStabError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RecipStabError, ValueError):
    """An argument lies outside the domain of the operation."""


class DivisionByZero(RecipStabError, ZeroDivisionError):
    """Zero raised to a negative power."""


class DegenerateDenominator(RecipStabError, ValueError):
    """The evaluation point annihilates a denominator or a shifted argument.

    ``guard`` names the structural condition that failed, e.g. ``"y == 2x"``.
    """

    def __init__(self, guard: str, x=None, y=None):
        self.guard = guard
        self.x = x
        self.y = y
        where = "" if x is None else f" at (x={x}, y={y})"
        super().__init__(f"inadmissible point: {guard}{where}")


class RootBranchError(RecipStabError, ValueError):
    """A sampled function value is not strictly positive, so no real root branch is chosen."""


class ParameterExclusion(RecipStabError, ValueError):
    """A control exponent hits the excluded value (exponent == -l)."""


class HypothesisViolation(RecipStabError):
    """The declared control does not dominate the observed residual.

    ``worst`` is ``(x, y, |residual|, control_value)`` for the worst sampled pair.
    """

    def __init__(self, worst, message: str | None = None):
        self.worst = worst
        x, y, residual, bound = worst
        super().__init__(
            message
            or f"control does not dominate the residual at (x={x}, y={y}): "
            f"|residual|={float(residual):.6e} > control={float(bound):.6e}"
        )


class ConfigError(RecipStabError, ValueError):
    """Malformed or invalid experiment configuration."""
