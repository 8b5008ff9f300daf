"""Exception hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI maps it to.
"""

from __future__ import annotations


class CrestlineError(Exception):
    """Base class; ``kind`` is the machine-readable tag written to stderr."""

    exit_code = 1
    kind = "error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self), "exit_code": self.exit_code}


class InvalidInputError(CrestlineError, ValueError):
    kind = "invalid_input"


class DegenerateFitError(InvalidInputError):
    kind = "degenerate_fit"


class ConfigurationError(InvalidInputError):
    kind = "configuration"


class AdmissibilityError(CrestlineError):
    """A constraint such as u < c, psi_y < 0 or h_p > 0 is violated."""

    kind = "admissibility"


class InconsistentDataError(CrestlineError):
    """Measured data contradict each other beyond quadrature tolerance."""

    kind = "inconsistent_data"


class OutOfDiskError(CrestlineError):
    """Series evaluation requested where the truncated sum is not trusted."""

    kind = "out_of_disk"


class NonconvergenceError(CrestlineError):
    exit_code = 3
    kind = "nonconvergence"

    def __init__(self, message: str, last_residual: float | None = None):
        super().__init__(message)
        self.last_residual = last_residual

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["last_residual"] = self.last_residual
        return out


class LeftAdmissibleSetError(NonconvergenceError):
    """Newton iterate produced h_p <= 0 somewhere on the grid."""

    kind = "left_admissible_set"


class DivergenceWarning(UserWarning):
    """Series tail is not decreasing at the requested point."""


class ExperimentalWarning(UserWarning):
    """Emitted whenever an experimental code path is used."""
