"""Exception types shared across the package."""


class GfcError(Exception):
    """Base class for user-facing errors raised by the engine."""


class SpaceError(GfcError):
    """Raised for ill-typed spaces, maps or presentations."""


class TermError(GfcError):
    """Raised for ill-formed functor words or transformation terms."""


class StructureError(GfcError):
    """Raised for inconsistent geometric structure declarations."""


class OracleError(GfcError):
    """Raised when a finite model cannot support a requested evaluation."""


class DecideError(GfcError):
    """Raised when a decision procedure is used outside its theorem class."""

    def __init__(self, message, hypothesis=None, layer=None):
        self.hypothesis = hypothesis
        self.layer = layer
        super().__init__(message)


class ParseError(GfcError):
    """Syntax or resolution error in a session file."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = "line %d, column %d: %s" % (line, col, message)
        super().__init__(message)
