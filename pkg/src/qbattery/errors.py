"""Exception hierarchy shared by every module."""

from __future__ import annotations


class QBatteryError(Exception):
    """Base class for all package errors."""


class ValidationError(QBatteryError, ValueError):
    """Bad user input: parameters, shapes, configs. CLI exit code 2."""


class NumericalInvariantError(QBatteryError, ArithmeticError):
    """A physical invariant broke during a computation. CLI exit code 3."""


class DimensionMismatch(ValidationError):
    pass


class NonHermitianInput(ValidationError):
    pass


class ImaginaryResidue(NumericalInvariantError):
    pass


class DensityMatrixViolation(ValidationError):
    """A matrix failed one of the density-matrix invariants.

    ``invariant`` names the failed check and ``residual`` carries the measured
    violation so callers can report it.
    """

    invariant = "density matrix"

    def __init__(self, residual: float, message: str | None = None):
        self.residual = float(residual)
        super().__init__(message or f"{self.invariant} violated (residual {self.residual:.3e})")


class TraceViolation(DensityMatrixViolation):
    invariant = "unit trace"


class HermiticityViolation(DensityMatrixViolation):
    invariant = "hermiticity"


class PositivityViolation(DensityMatrixViolation):
    invariant = "positivity"


class CPViolation(ValidationError):
    pass


class StepTooLarge(ValidationError):
    pass


class DomainError(ValidationError):
    pass
