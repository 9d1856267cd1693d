class GresError(Exception):
    """Base class for all errors raised by gres."""


class InvalidArgument(GresError, ValueError):
    pass


class SingularState(GresError, ValueError):
    """A matrix that must be inverted (usually gamma + I) is singular."""


class Unsupported(GresError):
    """Input lies outside the families this package can handle."""


class Nonexistence(GresError):
    """The conjugated operator sigma^-1/2 rho sigma^-1/2 is unbounded."""


class RootNotFound(GresError):
    pass
