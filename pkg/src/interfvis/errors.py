"""Exception types shared across the package."""

from __future__ import annotations


class DimensionMismatch(ValueError):
    """Raised when array shapes disagree with the declared number of paths."""


class StateValidationError(ValueError):
    """Base class for density-operator invariant failures.

    ``deviation`` is the measured size of the violation; ``violations`` lists
    every failed invariant as ``(name, deviation)`` pairs, not just the first.
    """

    invariant = "state"

    def __init__(self, deviation: float, violations=None, message: str | None = None):
        self.deviation = float(deviation)
        self.violations = list(violations) if violations else [(self.invariant, self.deviation)]
        if message is None:
            items = ", ".join(f"{name} (deviation {dev:.3e})" for name, dev in self.violations)
            message = f"invalid density operator: {items}"
        super().__init__(message)


class HermiticityViolation(StateValidationError):
    invariant = "hermiticity"


class TraceViolation(StateValidationError):
    invariant = "trace"


class PositivityViolation(StateValidationError):
    invariant = "positivity"


class NonUnitaryError(ValueError):
    """Raised when a matrix that must be unitary is not, within tolerance."""


class NonHermitianError(ValueError):
    """Raised when a Hermitian-only routine receives a non-Hermitian matrix."""


class InvalidDistribution(ValueError):
    """Raised for probability vectors/tables with negative mass or wrong total."""


class InternalConsistencyError(ArithmeticError):
    """A quantity left its mathematically guaranteed range by more than round-off."""


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive grid would exceed its evaluation budget."""


class InternalInequalityViolation(RuntimeError):
    """Raised by front ends when a visibility margin falls below -1e-6."""
