"""Exception hierarchy shared by all bath-separability modules."""

from typing import Any


class SeparabilityError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(SeparabilityError, ValueError):
    """Bad parameters, dimensions, indices, ranges or configuration files."""


class NumericError(SeparabilityError):
    """A numerical procedure failed; ``diagnostics`` carries the details."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{base} ({details})"


class PoleProximityError(NumericError):
    """A frequency fell inside the exclusion window of a rest-space pole."""

    def __init__(self, omega: float, pole: float, window: float):
        super().__init__(
            "frequency inside pole window",
            {"omega": omega, "pole": pole, "window": window},
        )
        self.omega = omega
        self.pole = pole
        self.window = window


class ConvergenceError(NumericError):
    """An iterative solver ran out of iterations."""


class NoFixedPointError(NumericError):
    """No sign change of ω_R(ω) − ω was found on the sampled grid."""


class EmptyGridError(NumericError):
    """Every grid sample lies inside a pole window."""


class DegenerateKernelError(NumericError):
    """The coupling block vanishes or is rank deficient where a kernel is required."""


class NumericConsistencyError(NumericError):
    """Two independent evaluations of the same quantity disagree."""
