"""Exception types shared across the toolkit."""


class PolycurvError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(PolycurvError):
    """A geometric precondition or invariant failed."""


class ZeroVector(GeometryError):
    """An input vector has (numerically) zero length."""


class NotConvexSpherical(GeometryError):
    """Spherical polygon is not convex or not inside an open hemisphere."""


class UnrealizableMetric(GeometryError):
    """Edge lengths admit no nondegenerate Euclidean realization."""

    def __init__(self, message, vertices=None):
        super().__init__(message)
        self.vertices = vertices  # offending sub-simplex, when known


class BadFace(GeometryError):
    """The given vertex tuple is not a face of the simplex."""


class DegenerateVertex(GeometryError):
    """Two consecutive polygon vertices coincide (within tolerance)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ReversalVertex(GeometryError):
    """The polygon reverses direction exactly at a vertex."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class AntipodalDirections(GeometryError):
    """Consecutive spherical vertices are antipodal; the minor arc is ambiguous."""


class NotClosedToMultiple(GeometryError):
    """Total signed turning angle is not numerically a multiple of 2*pi."""


class NonManifold(GeometryError):
    """Surface or complex violates the closed (pseudo-)manifold requirements."""


class DegenerateNormal(GeometryError):
    """A face normal could not be computed (zero area)."""


class NotConvex(GeometryError):
    """Convexity verification failed."""


class OddDimension(GeometryError):
    """Operation requires an even-dimensional manifold."""


class UnrealizableStep(GeometryError):
    """A candidate relaxation step left the space of realizable metrics."""


class StallError(GeometryError):
    """Relaxation line search could not reduce the energy.

    The partial result (trajectory so far) is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ParseError(PolycurvError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingLength(ParseError):
    """An edge of the complex has no assigned length."""

    def __init__(self, message, edge=None, line=None):
        super().__init__(message, line=line)
        self.edge = edge


class IndexOutOfRange(ParseError):
    """A face references a vertex index that does not exist."""
