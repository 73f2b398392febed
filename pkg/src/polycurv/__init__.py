"""Discrete curvature toolkit.

Curvature of polygons, embedded polyhedral surfaces, and abstract
polyhedral manifolds: turning angles, angle defects, Steiner polynomials,
Regge energies, Lipschitz-Killing curvatures, and the integral-geometry
estimators that cross-check them.
"""

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    AntipodalDirections,
    BadFace,
    DegenerateNormal,
    DegenerateVertex,
    GeometryError,
    IndexOutOfRange,
    MissingLength,
    NonManifold,
    NotClosedToMultiple,
    NotConvex,
    NotConvexSpherical,
    OddDimension,
    ParseError,
    PolycurvError,
    ReversalVertex,
    StallError,
    UnrealizableMetric,
    UnrealizableStep,
    ZeroVector,
)
from .geom import (
    EmbeddedSimplex,
    MetricSimplex,
    SphericalPolygon,
    angle_between,
    dihedral_angle,
    embed_simplex,
    external_angle,
    simplex_volume,
    simplex_volume_gradient,
    spherical_polygon_area,
)
from .montecarlo import (
    DEFAULT_SEED,
    EstimateWithError,
    MCConfig,
    combine_estimates,
    split_seeds,
)

__version__ = "0.1.0"
