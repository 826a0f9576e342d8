"""Exception types shared across the package."""


class QReverseError(ValueError):
    """Base class for all errors raised by this package."""


class ValidationError(QReverseError):
    """A value violates a structural invariant (shape, hermiticity, normalization...)."""


class AnnihilationError(QReverseError):
    """An operation maps the given state (or code) to zero, so nothing can be computed."""


class SupportViolationError(QReverseError):
    """An operator is not a scaled isometry on the requested support."""


class NotReversibleError(QReverseError):
    """A reversal was requested for an operation that is not reversible on the code."""


class InputDocumentError(QReverseError):
    """A JSON input document is malformed or internally inconsistent."""
