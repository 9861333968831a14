"""Symbolic calculus of pushforward and pullback functors.

The package decides equality of composite natural transformations built
from the unit, counit, composition and base-change cells of the
push/pull adjunctions over a user-declared diagram of spaces.  Verdicts
are backed either by normalisation theorems or by exact counterexamples
found in finite models; the two routes are kept independent so that one
can cross-check the other.
"""

from .errors import (GfcError, OracleError, ParseError, SpaceError,
                     StructureError, TermError)
from .spaces import FlatMap, PullbackSquare, Session, SpaceObj

__version__ = "0.1.0"

__all__ = [
    "FlatMap",
    "GfcError",
    "OracleError",
    "ParseError",
    "PullbackSquare",
    "Session",
    "SpaceError",
    "SpaceObj",
    "StructureError",
    "TermError",
    "__version__",
]
