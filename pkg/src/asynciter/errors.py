"""Exception hierarchy shared by all modules."""


class AsyncIterError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(AsyncIterError):
    pass


class NonFiniteEntries(AsyncIterError, ValueError):
    pass


class NotSquare(AsyncIterError, ValueError):
    pass


class DimensionMismatch(AsyncIterError, ValueError):
    pass


class DegenerateDraw(AsyncIterError):
    pass


class LengthMismatch(AsyncIterError, ValueError):
    pass


class NotContractive(AsyncIterError):
    """The iteration matrix could not be certified to have spectral radius < 1."""


class NonFiniteState(AsyncIterError):
    """An iterate blew past the divergence guard."""


class NoIdleNode(AsyncIterError, ValueError):
    pass


class DomainError(AsyncIterError, ValueError):
    pass


class InsufficientData(AsyncIterError, ValueError):
    pass


class NonPositiveError(AsyncIterError, ValueError):
    pass
