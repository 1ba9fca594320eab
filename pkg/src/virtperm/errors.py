"""Exception hierarchy shared by all modules."""


class VirtpermError(Exception):
    """Base class for library errors."""


class PreconditionError(VirtpermError, ValueError):
    """An argument violates an operation's documented precondition."""


class ValidationError(VirtpermError, ValueError):
    """Input data failed validation (bad lambda, bad test function, ...)."""


class NotEquivalentError(VirtpermError, ValueError):
    """Two elements do not lie in a common cycle / circle.

    Kept distinct from PreconditionError so callers can branch on x ~ y.
    """


class DegenerateInputError(VirtpermError, RuntimeError):
    """An experiment cannot produce its sample from the given input."""
