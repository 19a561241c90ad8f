"""Exception hierarchy shared across the engine."""


class TileEngineError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TileEngineError):
    """A value violates an operation's contract (out of range, wrong order, ...)."""


class EmptyGeometryError(DomainError):
    """A polygon rasterized to an empty cell set at the requested order."""


class ParseError(TileEngineError):
    """Malformed input text.

    ``offset`` is a byte offset into the source when known, ``line`` a
    1-based line number for record files.
    """

    def __init__(self, message, offset=None, line=None):
        self.offset = offset
        self.line = line
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif offset is not None:
            where = f" (offset {offset})"
        super().__init__(f"{message}{where}")


class UnsupportedGeometryError(ParseError):
    """Parsed geometry is not a polygon."""


class ValidationError(TileEngineError):
    """Structurally valid input with inconsistent content."""


class UnsupportedFormatError(TileEngineError):
    """An unsupported format: unknown tile extension, bad magic, or version."""


class CorruptionError(TileEngineError):
    """A persisted file's content does not match its own header."""


class RotationUnsupportedError(TileEngineError):
    """Tile request asked for a rotation other than 0."""


class UnknownIdentifierError(TileEngineError):
    """Request referenced an identifier or layer the server does not know."""
