"""Exception types shared across the package."""


class CredsetError(Exception):
    """Base class for all errors raised by credset."""


class InputError(CredsetError, ValueError):
    """Malformed or inconsistent user input (bad shapes, labels, levels)."""


class ModelError(CredsetError, ArithmeticError):
    """Numerical or model failure: unnormalized weights, failed fits, inconsistent thresholds."""
