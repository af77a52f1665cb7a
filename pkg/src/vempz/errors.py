"""Exception hierarchy shared by all modules."""


class VempzError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(VempzError, ValueError):
    """Array shapes or orders are incompatible."""


class NumericalError(VempzError, ArithmeticError):
    """A factorization or iterative solve failed."""


class RankError(VempzError, ArithmeticError):
    """A least-squares design matrix is (numerically) rank deficient."""


class InvalidInput(VempzError, ValueError):
    """Input values violate a precondition (e.g. an all-zero frame)."""


class FormatError(VempzError, ValueError):
    """A file could not be decoded (unsupported WAV, unknown schema, ...)."""


class UsageError(VempzError):
    """Invalid command-line flag combination."""
