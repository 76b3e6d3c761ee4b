"""Exception hierarchy shared by all modules."""


class CubeKappaError(Exception):
    """Base class for every error raised by this package."""


class ComplexError(CubeKappaError, ValueError):
    """The input does not describe a valid finite CAT(0) cube complex."""


class DisconnectedGraphError(ComplexError):
    pass


class DuplicateEdgeError(ComplexError):
    pass


class MedianViolationError(ComplexError):
    """The 1-skeleton is not a median graph."""


class HalfspaceError(MedianViolationError):
    """An edge class does not split the graph into exactly two halfspaces."""


class UnknownVertexError(CubeKappaError, KeyError):
    pass


class NotConvexError(CubeKappaError, ValueError):
    pass


class HyperplaneRelationError(CubeKappaError, ValueError):
    """Hyperplane arguments violate a precondition (equal, crossing, not disjoint)."""


class FacingTripleError(CubeKappaError, ValueError):
    pass


class GeodesicError(CubeKappaError, ValueError):
    """A vertex sequence is not a combinatorial geodesic from the basepoint."""


class KappaError(CubeKappaError, ValueError):
    pass


class NoAdmissibleParameterError(CubeKappaError, ValueError):
    """The segment is too short for the requested divergence radius."""
