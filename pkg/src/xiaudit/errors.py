"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so the split between "the input is
outside the function's domain" and "we ran out of precision" matters.
"""


class XiAuditError(Exception):
    """Base class for all errors raised by xiaudit."""


class InvalidArgument(XiAuditError, ValueError):
    pass


class DomainViolation(XiAuditError, ValueError):
    """The argument enclosure leaves the domain of the function."""


class DivisionByZeroEnclosure(DomainViolation, ZeroDivisionError):
    """Divisor enclosure contains zero."""


class PoleEnclosure(DomainViolation):
    """Argument enclosure contains a pole (e.g. zeta at 1, gamma at 0, -1, ...)."""


class PrecisionExhausted(XiAuditError):
    """Requested output radius not reached before the precision cap."""

    def __init__(self, message, achieved=None, precision_bits=None):
        super().__init__(message)
        self.achieved = achieved
        self.precision_bits = precision_bits


# -- zero catalog -----------------------------------------------------------


class CatalogError(XiAuditError):
    pass


class MalformedLine(CatalogError):
    def __init__(self, lineno, line, reason="cannot parse ordinate"):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class NonMonotonicOrdinates(CatalogError):
    pass


class OrdinateTooSmall(CatalogError):
    pass


class EmptyCatalog(CatalogError):
    pass


class OffLineZerosPresent(CatalogError):
    pass


class TBeyondCatalog(CatalogError):
    pass


class NoSignChange(CatalogError):
    pass


class VersionMismatch(CatalogError):
    pass


class ChecksumMismatch(CatalogError):
    pass


# -- sums -------------------------------------------------------------------


class TTooSmall(DomainViolation):
    pass


class TailValidationError(XiAuditError):
    """The counting-function envelope failed on the catalog range."""
