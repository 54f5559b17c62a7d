"""Exception types raised across the package."""


class EppmError(Exception):
    """Base class for all package errors."""


class InvalidParameters(EppmError, ValueError):
    """Design parameters violate a basic constraint."""


class NotPrime(InvalidParameters):
    pass


class WrongResidueClass(InvalidParameters):
    pass


class NotTwinPrimes(InvalidParameters):
    pass


class NotFound(EppmError):
    """Search exhausted its budget or no design exists."""


class ParseError(EppmError, ValueError):
    pass


class VerificationFailed(EppmError):
    """A difference set failed verification; the report is attached."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class TooLarge(EppmError, ValueError):
    pass


class BadLength(EppmError, ValueError):
    pass


class IndexOutOfRange(EppmError, IndexError):
    pass


class SchemeMismatch(EppmError, ValueError):
    pass


class NonPositive(EppmError, ValueError):
    pass


class NotBracketed(EppmError, ValueError):
    pass
