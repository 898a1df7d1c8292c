"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class ConsistencyError(AssertionError):
    """Raised when two routes that must agree (e.g. the Z and Y rank tests) disagree."""
