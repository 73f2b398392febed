"""Extrinsic and intrinsic curvature of embedded polyhedral surfaces.

Two surface types: :class:`TriangleMesh` (closed oriented 2-manifold made
of triangles; exterior angles carry a sign) and :class:`ConvexPolyhedron`
(planar polygonal faces, outward normals, convexity verified).  On top of
them: Euler characteristics, angle defects, edge/vertex exterior angles,
the Gauss-Bonnet check, total mean curvature, Steiner polynomials of the
r-neighborhood, projection areas, and the width/projection estimators
from integral geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .config import Tolerances, resolve
from .errors import DegenerateNormal, NonManifold, NotConvex
from .geom import SphericalPolygon, spherical_polygon_area
from .montecarlo import DEFAULT_SEED, EstimateWithError, unit_sphere_samples

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


def _check_vertices(vertices) -> np.ndarray:
    V = np.array(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 3 or len(V) < 4:
        raise ValueError("expected at least 4 vertices in R^3")
    if not np.all(np.isfinite(V)):
        raise ValueError("vertex coordinates must be finite")
    return V


def _pair_undirected_edges(directed: np.ndarray):
    """Group directed edges into undirected pairs with opposite orientation.

    Returns (edges, first, second): ``edges`` sorted (E, 2) vertex pairs,
    ``first[i]``/``second[i]`` the positions in ``directed`` traversing
    edge i as (a, b) with a < b, respectively (b, a).
    """
    und = np.sort(directed, axis=1)
    if len(np.unique(directed, axis=0)) != len(directed):
        raise NonManifold("a directed edge appears twice (orientation flip "
                          "or duplicated face)")
    order = np.lexsort((und[:, 1], und[:, 0]))
    su = und[order]
    if len(su) % 2 != 0 or not np.array_equal(su[::2], su[1::2]):
        raise NonManifold("every edge must bound exactly 2 faces")
    flipped = directed[order][:, 0] != su[:, 0]
    a = flipped[::2]
    b = flipped[1::2]
    if not np.all(a ^ b):
        raise NonManifold("edge traversed twice in the same direction")
    pos = order.reshape(-1, 2)
    first = np.where(a, pos[:, 1], pos[:, 0])
    second = np.where(a, pos[:, 0], pos[:, 1])
    return su[::2], first, second


class TriangleMesh:
    """Closed oriented triangle mesh.

    Parameters
    ----------
    vertices : (n, 3) float array-like
    triangles : (m, 3) int array-like
        Oriented vertex triples; all triangles wound consistently.

    Validation rejects degenerate triangles, unreferenced vertices, and
    any edge not shared by exactly two triangles with opposite induced
    orientations.  The number of connected components is reported in
    ``n_components``.
    """

    def __init__(self, vertices, triangles, tol: Tolerances | None = None):
        tol = resolve(tol)
        V = _check_vertices(vertices)
        T = np.array(triangles, dtype=np.int64)
        if T.ndim != 2 or T.shape[1] != 3 or len(T) < 4:
            raise ValueError("expected at least 4 triangles")
        if T.min() < 0 or T.max() >= len(V):
            raise ValueError("triangle index out of range")
        if np.any(T[:, 0] == T[:, 1]) or np.any(T[:, 1] == T[:, 2]) \
                or np.any(T[:, 0] == T[:, 2]):
            raise ValueError("triangle repeats a vertex")
        if len(np.unique(T)) != len(V):
            raise ValueError("mesh has unreferenced vertices")
        self.vertices = V
        self.triangles = T
        self._tol = tol
        scale = float(np.linalg.norm(V.max(axis=0) - V.min(axis=0)))
        cr = np.cross(V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]])
        areas2 = np.linalg.norm(cr, axis=1)
        if np.any(areas2 <= tol.eps_degenerate * scale ** 2):
            raise ValueError("mesh contains a degenerate triangle")
        self._face_normals = cr / areas2[:, None]
        self._face_areas = 0.5 * areas2
        directed = np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]])
        edges, first, second = _pair_undirected_edges(directed)
        m = len(T)
        self.edges = edges
        self._tri_plus = first % m   # triangle traversing the edge as (a, b)
        self._tri_minus = second % m
        adj = coo_matrix((np.ones(len(edges)), (self._tri_plus, self._tri_minus)),
                         shape=(m, m))
        self.n_components = int(connected_components(adj, directed=False)[0])

    # -- queries --------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.triangles)

    def face_normals(self) -> np.ndarray:
        return self._face_normals

    def face_areas(self) -> np.ndarray:
        return self._face_areas

    def surface_area(self) -> float:
        return float(self._face_areas.sum())

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.vertices[self.edges[:, 1]]
                              - self.vertices[self.edges[:, 0]], axis=1)

    def enclosed_volume(self) -> float:
        """Signed volume by the divergence theorem (positive if outward)."""
        V, T = self.vertices, self.triangles
        return float(np.einsum("ij,ij->i", V[T[:, 0]],
                               np.cross(V[T[:, 1]], V[T[:, 2]])).sum()) / 6.0


class ConvexPolyhedron:
    """Convex polyhedron with planar polygonal faces and outward normals.

    Faces are oriented cyclic vertex lists (counterclockwise seen from
    outside).  Construction verifies planarity of every face, that the
    winding produces outward normals, convexity (every vertex on the
    inner side of every face plane), and the closed-manifold property.
    """

    def __init__(self, vertices, faces, tol: Tolerances | None = None):
        tol = resolve(tol)
        V = _check_vertices(vertices)
        faces = [tuple(int(i) for i in f) for f in faces]
        if len(faces) < 4:
            raise ValueError("expected at least 4 faces")
        for f in faces:
            if len(f) < 3 or len(set(f)) != len(f):
                raise ValueError(f"bad face {f}")
            if min(f) < 0 or max(f) >= len(V):
                raise ValueError("face index out of range")
        if len({i for f in faces for i in f}) != len(V):
            raise ValueError("polyhedron has unreferenced vertices")
        self.vertices = V
        self.faces = faces
        self._tol = tol
        diam = float(np.linalg.norm(V.max(axis=0) - V.min(axis=0)))
        self._diameter = diam

        normals = np.empty((len(faces), 3))
        areas = np.empty(len(faces))
        centroids = np.empty((len(faces), 3))
        for k, f in enumerate(faces):
            P = V[list(f)]
            n = np.cross(P, np.roll(P, -1, axis=0)).sum(axis=0)  # Newell
            nn = float(np.linalg.norm(n))
            if nn <= tol.eps_degenerate * diam ** 2:
                raise DegenerateNormal(f"face {k} has no usable normal")
            n = n / nn
            c = P.mean(axis=0)
            if np.max(np.abs((P - c) @ n)) > tol.eps_planar * diam:
                raise NotConvex(f"face {k} is not planar")
            height = V @ n - float(c @ n)
            if np.max(height) > tol.eps_convex * diam:
                if np.min(height) < -tol.eps_convex * diam:
                    raise NotConvex(f"vertices on both sides of face {k}")
                raise NotConvex(f"face {k} wound inward (normals must point out)")
            normals[k] = n
            areas[k] = 0.5 * nn
            centroids[k] = c
        self._face_normals = normals
        self._face_areas = areas
        self._face_centroids = centroids

        directed = np.array([(f[i], f[(i + 1) % len(f)])
                             for f in faces for i in range(len(f))])
        owner = np.array([k for k, f in enumerate(faces) for _ in f])
        edges, first, second = _pair_undirected_edges(directed)
        self.edges = edges
        self._face_plus = owner[first]
        self._face_minus = owner[second]
        self._dir_edge_face = {(int(a), int(b)): int(k)
                               for (a, b), k in zip(directed, owner)}

    # -- queries --------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def diameter(self) -> float:
        return self._diameter

    def face_normals(self) -> np.ndarray:
        return self._face_normals

    def face_areas(self) -> np.ndarray:
        return self._face_areas

    def surface_area(self) -> float:
        return float(self._face_areas.sum())

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.vertices[self.edges[:, 1]]
                              - self.vertices[self.edges[:, 0]], axis=1)

    def enclosed_volume(self) -> float:
        V = self.vertices
        total = 0.0
        for f in self.faces:
            P = V[list(f)]
            for i in range(1, len(f) - 1):
                total += float(np.dot(P[0], np.cross(P[i], P[i + 1])))
        return total / 6.0

    def support_value(self, direction) -> float:
        d = np.asarray(direction, dtype=float)
        return float(np.max(self.vertices @ d))

    def width(self, direction) -> float:
        d = np.asarray(direction, dtype=float)
        return self.support_value(d) + self.support_value(-d)

    def faces_around_vertex(self, v: int) -> list[int]:
        """Incident faces in cyclic order around ``v`` (via edge walking)."""
        incident = [k for k, f in enumerate(self.faces) if v in f]
        if not incident:
            raise ValueError(f"vertex {v} unreferenced")
        start = incident[0]
        cycle = [start]
        k = start
        while True:
            f = self.faces[k]
            succ = f[(f.index(v) + 1) % len(f)]
            k = self._dir_edge_face[(succ, v)]
            if k == start:
                break
            cycle.append(k)
            if len(cycle) > len(incident):
                raise NonManifold(f"vertex {v} has a pinched face fan")
        if len(cycle) != len(incident):
            raise NonManifold(f"vertex {v} has a disconnected face fan")
        return cycle

    @classmethod
    def from_triangle_mesh(cls, mesh: TriangleMesh,
                           tol: Tolerances | None = None) -> "ConvexPolyhedron":
        return cls(mesh.vertices, [tuple(t) for t in mesh.triangles],
                   tol=tol if tol is not None else mesh._tol)


SurfaceLike = TriangleMesh | ConvexPolyhedron


# ---------------------------------------------------------------------------
# combinatorics and curvature


def euler_characteristic(m: SurfaceLike) -> int:
    return m.n_vertices - m.n_edges + m.n_faces


def edge_exterior_angles(m: SurfaceLike) -> dict[tuple[int, int], tuple[float, float]]:
    """Per edge: (exterior angle between adjacent outward normals, length).

    For triangle meshes the angle is signed, positive where the surface is
    locally convex; for a verified convex polyhedron all angles are
    positive.
    """
    if isinstance(m, TriangleMesh):
        f_plus, f_minus = m._tri_plus, m._tri_minus
    else:
        f_plus, f_minus = m._face_plus, m._face_minus
    normals = m.face_normals()
    n1 = normals[f_plus]
    n2 = normals[f_minus]
    d = m.vertices[m.edges[:, 1]] - m.vertices[m.edges[:, 0]]
    lengths = np.linalg.norm(d, axis=1)
    d = d / lengths[:, None]
    # the edge is traversed as (a, b) inside face_plus; the sign of the
    # triple product <n1 x n2, d> distinguishes convex from reflex edges
    sin_part = np.einsum("ij,ij->i", np.cross(n1, n2), d)
    cos_part = np.einsum("ij,ij->i", n1, n2)
    beta = np.arctan2(sin_part, cos_part)
    return {(int(a), int(b)): (float(bb), float(ll))
            for (a, b), bb, ll in zip(m.edges, beta, lengths)}


def _mesh_angle_sums(m: TriangleMesh) -> np.ndarray:
    V, T = m.vertices, m.triangles
    sums = np.zeros(len(V))
    for c in range(3):
        a = V[T[:, (c + 1) % 3]] - V[T[:, c]]
        b = V[T[:, (c + 2) % 3]] - V[T[:, c]]
        cr = np.linalg.norm(np.cross(a, b), axis=1)
        ang = np.arctan2(cr, np.einsum("ij,ij->i", a, b))
        np.add.at(sums, T[:, c], ang)
    return sums


def _polyhedron_angle_sums(p: ConvexPolyhedron) -> np.ndarray:
    # polygonal faces are fanned from their first vertex; corner angles of
    # the fan triangles add up to the interior face angles
    V = p.vertices
    sums = np.zeros(len(V))
    for f in p.faces:
        for i in range(1, len(f) - 1):
            tri = (f[0], f[i], f[i + 1])
            P = V[list(tri)]
            for c in range(3):
                a = P[(c + 1) % 3] - P[c]
                b = P[(c + 2) % 3] - P[c]
                ang = math.atan2(float(np.linalg.norm(np.cross(a, b))),
                                 float(np.dot(a, b)))
                sums[tri[c]] += ang
    return sums


def vertex_angle_defects(m: SurfaceLike) -> dict[int, float]:
    """Intrinsic curvature 2*pi minus the sum of incident face angles."""
    if isinstance(m, TriangleMesh):
        sums = _mesh_angle_sums(m)
    else:
        sums = _polyhedron_angle_sums(m)
    return {v: float(TWO_PI - s) for v, s in enumerate(sums)}


def vertex_exterior_angles(p: ConvexPolyhedron) -> dict[int, float]:
    """Spherical area of the normal cone at each vertex (extrinsic curvature).

    The cone is spanned by the outward normals of the incident faces taken
    in cyclic order; its cross-section with the unit sphere is a convex
    spherical polygon.
    """
    if not isinstance(p, ConvexPolyhedron):
        raise NotConvex("vertex exterior angles need a verified convex polyhedron")
    normals = p.face_normals()
    out = {}
    for v in range(p.n_vertices):
        cycle = p.faces_around_vertex(v)
        poly = SphericalPolygon(normals[cycle], tol=p._tol)
        out[v] = spherical_polygon_area(poly, p._tol)
    return out


@dataclass(frozen=True)
class GaussBonnetReport:
    total_defect: float
    expected: float          # 2*pi*chi
    residual: float
    euler_characteristic: int

    @property
    def passed(self) -> bool:
        return self.residual <= 1e-8 * (1.0 + abs(self.total_defect))


def gauss_bonnet_check(m: SurfaceLike) -> GaussBonnetReport:
    """Compare the total angle defect against 2*pi times the Euler number."""
    chi = euler_characteristic(m)
    total = float(sum(vertex_angle_defects(m).values()))
    expected = TWO_PI * chi
    return GaussBonnetReport(total_defect=total, expected=expected,
                             residual=abs(total - expected),
                             euler_characteristic=chi)


def total_mean_curvature(m: SurfaceLike) -> float:
    """Half the length-weighted sum of (signed) edge exterior angles."""
    return 0.5 * sum(beta * ell for beta, ell in edge_exterior_angles(m).values())


# ---------------------------------------------------------------------------
# Steiner polynomials


@dataclass(frozen=True)
class SteinerCoefficients:
    """Coefficients of vol(N_r) = V0 + V1 r + V2 r^2 + V3 r^3."""

    V0: float  # volume
    V1: float  # surface area
    V2: float  # total mean curvature
    V3: float  # one third of the total vertex exterior angle

    def __post_init__(self):
        if not (self.V0 > 0 and self.V1 > 0 and self.V2 > 0):
            raise NotConvex("Steiner coefficients must be positive")
        if abs(self.V3 - FOUR_PI / 3.0) > 1e-9:
            raise NotConvex(
                f"cubic Steiner coefficient {self.V3!r} differs from 4*pi/3")


class SteinerPolynomials:
    """Evaluators for the area and volume of the outer r-neighborhood.

    area(r) = A + r * sum(beta_e * l_e) + r^2 * sum(beta_v)
    vol(r)  = V + r * A + r^2/2 * sum(beta_e * l_e) + r^3/3 * sum(beta_v)
    """

    def __init__(self, volume: float, area: float, edge_term: float,
                 vertex_term: float):
        self.volume = volume
        self.area = area
        self.edge_term = edge_term        # sum over edges of beta_e * l_e
        self.vertex_term = vertex_term    # sum over vertices of beta_v

    @property
    def coefficients(self) -> SteinerCoefficients:
        return SteinerCoefficients(V0=self.volume, V1=self.area,
                                   V2=0.5 * self.edge_term,
                                   V3=self.vertex_term / 3.0)

    def area_at(self, r: float) -> float:
        return self.area + r * self.edge_term + r * r * self.vertex_term

    def volume_at(self, r: float) -> float:
        return (self.volume + r * self.area + 0.5 * r * r * self.edge_term
                + r ** 3 / 3.0 * self.vertex_term)

    def volume_coefficients(self) -> tuple[float, float, float, float]:
        return (self.volume, self.area, 0.5 * self.edge_term,
                self.vertex_term / 3.0)

    def area_coefficients(self) -> tuple[float, float, float]:
        return (self.area, self.edge_term, self.vertex_term)


def steiner_polynomials(p: ConvexPolyhedron) -> SteinerPolynomials:
    """Steiner area/volume polynomials of a convex polyhedron."""
    if not isinstance(p, ConvexPolyhedron):
        raise NotConvex("Steiner polynomials need a verified convex polyhedron")
    edge_term = sum(beta * ell for beta, ell in edge_exterior_angles(p).values())
    vertex_term = sum(vertex_exterior_angles(p).values())
    return SteinerPolynomials(volume=p.enclosed_volume(),
                              area=p.surface_area(),
                              edge_term=edge_term, vertex_term=vertex_term)


# ---------------------------------------------------------------------------
# projections and widths


def projection_area(p: ConvexPolyhedron, direction) -> float:
    """Area of the shadow on the plane orthogonal to ``direction``.

    The projections of the faces cover the shadow exactly twice, so the
    area is half the sum of |<n_F, v>| * area(F).
    """
    v = np.asarray(direction, dtype=float)
    v = v / np.linalg.norm(v)
    return 0.5 * float(np.abs(p.face_normals() @ v) @ p.face_areas())


def mean_projection_area(p: ConvexPolyhedron, samples: int = 100_000,
                         seed: int = DEFAULT_SEED) -> EstimateWithError:
    """Monte Carlo average of the shadow area over uniform directions."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    dirs = unit_sphere_samples(rng, samples)
    vals = 0.5 * np.abs(dirs @ p.face_normals().T) @ p.face_areas()
    return EstimateWithError(mean=float(vals.mean()),
                             stderr=float(vals.std(ddof=1)) / math.sqrt(samples),
                             samples=samples, seed=seed)


def mean_width(p: ConvexPolyhedron, samples: int = 100_000,
               seed: int = DEFAULT_SEED) -> EstimateWithError:
    """Monte Carlo average of support(v) + support(-v) over uniform directions."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    dirs = unit_sphere_samples(rng, samples)
    heights = dirs @ p.vertices.T           # (samples, n_vertices)
    widths = heights.max(axis=1) - heights.min(axis=1)
    return EstimateWithError(mean=float(widths.mean()),
                             stderr=float(widths.std(ddof=1)) / math.sqrt(samples),
                             samples=samples, seed=seed)


# ---------------------------------------------------------------------------
# planar analogues (used by the 2D Crofton identity: perimeter = pi * width)


def planar_polygon_perimeter(points) -> float:
    P = np.asarray(points, dtype=float)
    return float(np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1).sum())


def planar_mean_width(points, samples: int = 100_000,
                      seed: int = DEFAULT_SEED) -> EstimateWithError:
    """Mean width of a planar convex polygon over uniform directions in S^1."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    P = np.asarray(points, dtype=float)
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((samples, 2))
    d /= np.linalg.norm(d, axis=1)[:, None]
    heights = d @ P.T
    widths = heights.max(axis=1) - heights.min(axis=1)
    return EstimateWithError(mean=float(widths.mean()),
                             stderr=float(widths.std(ddof=1)) / math.sqrt(samples),
                             samples=samples, seed=seed)
