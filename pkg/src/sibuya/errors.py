"""Exception hierarchy shared by the numerical modules and the CLI."""


class SibuyaError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""

    exit_code = 3


class DegenerateInputError(SibuyaError, ValueError):
    exit_code = 2


class IntegrationError(SibuyaError, RuntimeError):
    """Ray integration or seeding failed (step exhaustion, overflow, bad radius)."""


class NearZeroError(SibuyaError, ArithmeticError):
    """A divisor such as ``f0`` is too close to zero for the requested path."""


class ContourError(SibuyaError, RuntimeError):
    """Argument-principle contour passes (numerically) through a zero."""


class VerificationError(SibuyaError, AssertionError):
    exit_code = 1
