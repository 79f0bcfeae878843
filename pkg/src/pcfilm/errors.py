"""Exception types shared across the solver."""


class PcfilmError(Exception):
    """Base class for all solver errors."""


class InvalidArgumentError(PcfilmError, ValueError):
    """An argument violates a documented precondition."""


class SingularArgumentError(InvalidArgumentError):
    """Evaluation requested exactly at a singular point (e.g. h_l at z = 0)."""


class ConvergenceError(PcfilmError):
    """An iterative summation or refinement failed to converge.

    Carries a ``diagnostics`` dict with whatever the failing routine knew.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SingularSolveError(PcfilmError):
    """A dense linear solve hit (near-)singularity.

    ``condition`` holds the estimated condition number when available.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConfigError(PcfilmError):
    """Scene configuration text failed to validate.

    ``issues`` is a list of (line_number, message) pairs; line_number is None
    for whole-file problems.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "; ".join(
            f"line {ln}: {msg}" if ln is not None else msg for ln, msg in self.issues
        )
        super().__init__(lines)
