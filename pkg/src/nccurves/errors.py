"""Exception types shared across the package; the CLI maps them to exit codes."""


class ValidationError(ValueError):
    """Malformed input or a violated structural invariant (exit code 1)."""


class ResourceGuardError(RuntimeError):
    """A construction was refused because it would exceed the size guard (exit code 2)."""


class HarnessFailure(RuntimeError):
    """A cross-check assertion failed inside a verification harness (exit code 3)."""


class NotInvertibleError(ArithmeticError):
    """Element inversion hit a zero divisor (or zero)."""

