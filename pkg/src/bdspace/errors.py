"""Exception hierarchy.

Every exception carries a stable textual ``code`` so that the CLI and report
files can identify failures without parsing messages.
"""


class BDError(Exception):
    code = "E_INTERNAL"


class ParseError(BDError, ValueError):
    code = "E_PARSE"

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class PreconditionError(BDError, ValueError):
    code = "E_PRECONDITION"


class ResourceCapError(BDError):
    code = "E_RESOURCE_CAP"


class AlphaNotFoundError(BDError):
    code = "E_ALPHA_NOT_FOUND"


class UnresolvedReferenceError(BDError):
    code = "E_UNRESOLVED_REFERENCE"


class MissingCoordinateError(BDError):
    code = "E_MISSING_COORDINATE"


class InvalidNodeError(BDError):
    code = "E_INVALID_NODE"


class DecompositionError(BDError):
    code = "E_NOT_SKIPPED"


class BoundViolationError(BDError):
    """A sampled coordinate exceeded a proven bound: an implementation bug."""

    code = "E_BOUND_VIOLATION"


class VerificationError(BDError):
    code = "E_VERIFY_FAILED"


class BlockFactoryExhausted(BDError):
    code = "E_BLOCKS_EXHAUSTED"
