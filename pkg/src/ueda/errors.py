"""Exception hierarchy.

Domain errors (a mathematical obstruction was found, the input is outside
the theory's hypotheses) are kept apart from input errors (malformed data,
window mismatches) so the CLI can map them to different exit codes.
"""

from __future__ import annotations


class UedaError(Exception):
    """Base class for every error raised by the package."""


class InputError(UedaError):
    """Malformed or inconsistent input data."""


class WindowMismatchError(InputError):
    pass


class OutOfWindowError(InputError):
    pass


class CompositionDomainError(InputError):
    pass


class NormalizationError(InputError):
    """A series that must start with ``t`` (unit linear term) does not."""


class ParseError(InputError):
    pass


class ConfigError(InputError):
    pass


class StagingError(InputError):
    """An operation was called at the wrong stage of an iteration."""


class DomainError(UedaError):
    """Mathematical precondition violated."""


class ObstructionError(DomainError):
    """A cocycle that had to be a coboundary is not.

    ``value`` is the image of the cocycle under the S-functional and
    ``report`` (when available) the full obstruction report.
    """

    def __init__(self, message, value=None, report=None):
        super().__init__(message)
        self.value = value
        self.report = report


class FiniteTypeDetected(ObstructionError):
    """Raised by the linearization when it meets a nonzero Ueda class."""


class DegenerateNormalBundleError(DomainError):
    pass


class NotApplicableError(DomainError):
    """The normal bundle is not holomorphically trivial."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class AtlasInconsistencyError(DomainError):
    pass


class ConstantsEstimationError(DomainError):
    pass


class PreconditionError(DomainError):
    pass


class ContractionStuckError(DomainError):
    pass
