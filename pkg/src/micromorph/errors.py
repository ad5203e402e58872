"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems, violations of
the well-posedness hypotheses, and numerical solver failures are reported
as distinct classes.
"""


class MicromorphError(Exception):
    """Base class for package-specific failures."""


class ConfigError(MicromorphError):
    """Invalid run configuration; carries (line, key, reason) entries."""

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "; ".join(
            f"line {ln}: {key}: {reason}" for ln, key, reason in self.issues
        )
        super().__init__(lines or "invalid configuration")


class HypothesisError(MicromorphError):
    """A well-posedness hypothesis is violated where one is required."""


class SolverError(MicromorphError):
    """Base class for numerical solver failures."""


class NonConvergenceError(SolverError):
    """Iteration budget exhausted; carries the final residual or ratios."""

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = list(history) if history is not None else None


class DefinitenessError(SolverError):
    """An operator required to be definite turned out not to be."""
