"""Exception hierarchy shared across the engine.

Every error carries a short machine-readable ``code`` so the service layer
can report which failure occurred without parsing messages.
"""


class EmoAdaptError(Exception):
    code = "error"


class InvalidParameterError(EmoAdaptError):
    code = "invalid-parameter"


class TransportError(EmoAdaptError):
    """Malformed Base64 in a frame payload."""

    code = "transport"


class DecodeError(EmoAdaptError):
    """Valid Base64 but an unsupported or corrupt image payload."""

    code = "decode"


class BoundsError(EmoAdaptError):
    code = "bounds"


class ParseError(EmoAdaptError):
    """A model/cascade/rules file does not conform to its format."""

    code = "parse"


class ShapeMismatchError(EmoAdaptError):
    code = "shape-mismatch"


class EmptyWindowError(EmoAdaptError):
    code = "empty-window"


class OrderingError(EmoAdaptError):
    """Event appended with a timestamp older than the last stored one."""

    code = "ordering"


class PersistenceError(EmoAdaptError):
    code = "persistence"


class UnknownSessionError(EmoAdaptError):
    code = "unknown-session"


class ValidationError(EmoAdaptError):
    """Invalid preference or request fields; ``fields`` names the offenders."""

    code = "validation"

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = list(fields)
