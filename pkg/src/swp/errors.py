"""Exception hierarchy with stable CLI exit codes.

Every error the toolkit raises deliberately derives from :class:`SwpError`
and carries a short machine-readable ``code`` plus, for scenario problems,
the ``path`` of the offending field (e.g. ``$.profiles.hiring``).
"""

from __future__ import annotations


class SwpError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, message: str, *, code: str = "error", path: str | None = None):
        self.code = code
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class ValidationError(SwpError):
    """Bad input data: shapes, signs, schema, units."""

    exit_code = 1

    def __init__(self, message: str, *, code: str = "invalid", path: str | None = None):
        super().__init__(message, code=code, path=path)


class GridError(ValidationError):
    """Grid construction failed (non-divisible span, bad bounds)."""

    def __init__(self, message: str, *, path: str | None = None):
        super().__init__(message, code="grid", path=path)


class InfeasibleCalibrationError(SwpError):
    """Requested a positive equilibrium where none exists."""

    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message, code="infeasible-calibration")


class StepSizeError(SwpError):
    """Time step violates the stability bound of a scheme."""

    exit_code = 3

    def __init__(self, message: str):
        super().__init__(message, code="cfl")


class DegenerateScenarioError(ValidationError):
    """Scenario data makes the model ill-posed (e.g. zero hiring weight)."""

    def __init__(self, message: str, *, path: str | None = None):
        super().__init__(message, code="degenerate", path=path)
