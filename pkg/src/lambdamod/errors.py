"""Exception hierarchy shared by every module of the package."""


class LambdaError(Exception):
    """Base class for all errors raised by lambdamod."""


class PrecisionError(LambdaError):
    """Working precision (p-adic or T-adic) is too small for the request.

    ``kind`` is one of ``"insufficient-p-precision"``,
    ``"insufficient-T-precision"`` or ``"precision-exhausted"``.
    """

    def __init__(self, kind, message):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class LevelTooDeep(LambdaError):
    """omega_n is not representable at the configured T-adic degree."""


class InvalidInput(LambdaError, ValueError):
    """Malformed module data, file content or argument."""

    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class NoIntegerFit(LambdaError):
    """A size sequence does not follow mu*p^(n-1) + lambda*n + nu."""


class InvalidLimit(LambdaError):
    """A tower limit violates the finiteness hypothesis (cyclotomic torsion)."""


class NoConsistentFit(LambdaError):
    """Tower data cannot be absorbed by the configured defect slack."""
