"""Exception hierarchy for the editsketch package."""


class EditSketchError(Exception):
    """Base class for all package errors."""


class MalformedEditInfoError(EditSketchError):
    """Edit information is inconsistent with the stated endpoints."""


class CompositionMismatchError(EditSketchError):
    """Alignment composition attempted across mismatched fragments."""


class InvalidPeriodError(EditSketchError):
    """A periodic-extension distance was queried with an empty period string."""


class InvariantViolationError(EditSketchError):
    """A structural invariant failed; signals a bug, never expected on valid input."""


class ProtocolMisuseError(EditSketchError):
    """A protocol-level precondition (window shape, prefix/suffix occurrence) was violated."""


class EncoderInvariantError(EditSketchError):
    """The encoder reached a state its construction lemmas rule out."""


class CorruptSketchError(EditSketchError):
    """A sketch byte stream failed validation or internal consistency checks."""


class UnsupportedSketchError(CorruptSketchError):
    """Bad magic bytes or an unknown format version."""


class ExperimentFailureError(EditSketchError):
    """A lower-bound experiment cell failed its decode check."""
