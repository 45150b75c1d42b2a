"""Structured errors raised by the kernel, the meta-operations and the frontend."""


class CattError(Exception):
    """Base class. ``code`` is the machine-readable name shown by the CLI."""

    user_error = True

    def __init__(self, message="", span=None, **fields):
        super().__init__(message)
        self.message = message
        self.span = span
        self.fields = fields
        for key, value in fields.items():
            setattr(self, key, value)

    @property
    def code(self):
        return type(self).__name__

    def with_span(self, span):
        if self.span is None:
            self.span = span
        return self

    def __str__(self):
        return self.message or self.code


class DuplicateVariable(CattError):
    pass


class IllTypedEntry(CattError):
    """Raised with ``position`` (entry index) and ``cause`` (the inner error)."""


class NotParallel(CattError):
    pass


class UnboundVariable(CattError):
    pass


class NotAPastingContext(CattError):
    """Raised with ``position``, the index of the first entry breaking the scan."""


class NotFull(CattError):
    """Raised with ``detail`` naming the variable equation that fails."""


class SubstitutionArity(CattError):
    pass


class SubstitutionOrder(CattError):
    pass


class TypeMismatch(CattError):
    pass


class BoundaryMismatch(CattError):
    pass


class IndexOutOfRange(CattError):
    pass


class NotUpClosed(CattError):
    pass


class XNotUpClosed(NotUpClosed):
    pass


class DepthExceeded(CattError):
    pass


class FacesMismatch(CattError):
    pass


class ShapeMismatch(CattError):
    pass


class UnsupportedIndices(CattError):
    pass


class UnknownName(CattError):
    pass


class SyntaxError(CattError):  # noqa: A001 - mirrors the error name of the file format
    """Raised with ``expected``, a short description of the missing token."""


class InferenceFailed(CattError):
    pass


class InternalError(CattError):
    """An invariant of the construction was violated; this is a bug."""

    user_error = False


class PhasesNotComposable(InternalError):
    pass


class RecheckFailed(InternalError):
    pass


class DuplicateDefinition(CattError):
    pass


class FileNotFound(CattError):
    pass
