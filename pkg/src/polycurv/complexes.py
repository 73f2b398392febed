"""Abstract polyhedral manifolds: pure simplicial complexes with edge lengths.

A :class:`SimplicialComplex` stores the top-dimensional simplices of a
closed pseudo-manifold (every codimension-1 face in exactly two of them);
a :class:`PolyhedralMetric` adds an edge-length assignment under which
every top simplex is a realizable Euclidean simplex.  On top of these:
cone angles and deficits around codimension-2 faces, Euler
characteristics, and barycentric subdivision with induced lengths.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import Tolerances, resolve
from .errors import MissingLength, NonManifold, UnrealizableMetric
from .geom import MetricSimplex, dihedral_angle, embed_simplex, simplex_volume
from .surfaces import TriangleMesh

TWO_PI = 2.0 * math.pi

Edge = tuple[int, int]
Face = tuple[int, ...]


class SimplicialComplex:
    """Pure simplicial complex given by its top-dimensional simplices.

    Vertex ids are arbitrary nonnegative integers.  The complex must be a
    closed pseudo-manifold: every (dim-1)-face belongs to exactly two top
    simplices, and no top simplex repeats.  Facet-connectivity is checked
    and reported, not enforced.
    """

    def __init__(self, dim: int, top_simplices):
        if dim < 1:
            raise ValueError("complex dimension must be >= 1")
        tops = []
        seen = set()
        for t in top_simplices:
            tup = tuple(sorted(int(v) for v in t))
            if len(tup) != dim + 1 or len(set(tup)) != dim + 1:
                raise ValueError(f"top simplex {t} does not have {dim + 1} "
                                 "distinct vertices")
            if tup in seen:
                raise NonManifold(f"repeated top simplex {tup}")
            seen.add(tup)
            tops.append(tup)
        if not tops:
            raise ValueError("empty complex")
        self.dim = dim
        self.top_simplices: list[Face] = sorted(tops)

        faces_by_dim: list[set[Face]] = [set() for _ in range(dim + 1)]
        for t in self.top_simplices:
            for k in range(1, dim + 2):
                for f in itertools.combinations(t, k):
                    faces_by_dim[k - 1].add(f)
        self._faces_by_dim: list[list[Face]] = [sorted(s) for s in faces_by_dim]

        cofacets: dict[Face, list[int]] = {}
        for ti, t in enumerate(self.top_simplices):
            for f in itertools.combinations(t, dim):
                cofacets.setdefault(f, []).append(ti)
        bad = sorted(f for f, ts in cofacets.items() if len(ts) != 2)
        if bad:
            raise NonManifold(
                f"{len(bad)} codimension-1 faces not shared by exactly two "
                f"top simplices (first: {bad[0]})")
        self._facet_cofacets = cofacets

        top_of_vertex: dict[int, list[int]] = {}
        for ti, t in enumerate(self.top_simplices):
            for v in t:
                top_of_vertex.setdefault(v, []).append(ti)
        self._top_of_vertex = top_of_vertex
        self.n_components = self._count_components()

    def _count_components(self) -> int:
        n = len(self.top_simplices)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self._facet_cofacets.values():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        return len({find(i) for i in range(n)})

    # -- queries --------------------------------------------------------

    def faces(self, k: int) -> list[Face]:
        """All k-dimensional faces (k+1 vertices), sorted."""
        if not 0 <= k <= self.dim:
            raise ValueError(f"no faces of dimension {k}")
        return self._faces_by_dim[k]

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(fs) for fs in self._faces_by_dim)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(fs) for k, fs in enumerate(self._faces_by_dim))

    def vertices(self) -> list[int]:
        return [f[0] for f in self._faces_by_dim[0]]

    def edges(self) -> list[Edge]:
        return self._faces_by_dim[1]

    def star_tops(self, face) -> list[int]:
        """Indices of the top simplices containing the given face."""
        face = tuple(sorted(face))
        tops = self._top_of_vertex.get(face[0], [])
        out = [ti for ti in tops if set(face) <= set(self.top_simplices[ti])]
        if not out:
            raise ValueError(f"{face} is not a face of the complex")
        return out

    def cofaces(self, face) -> list[Face]:
        """All faces of the complex containing ``face`` (including itself)."""
        face = tuple(sorted(face))
        fset = set(face)
        out = set()
        for ti in self.star_tops(face):
            rest = [v for v in self.top_simplices[ti] if v not in fset]
            for k in range(len(rest) + 1):
                for extra in itertools.combinations(rest, k):
                    out.add(tuple(sorted(face + extra)))
        return sorted(out, key=lambda f: (len(f), f))


def euler_characteristic(c) -> int:
    """Alternating sum of the face counts."""
    complex_ = c.complex if isinstance(c, PolyhedralMetric) else c
    return complex_.euler_characteristic()


class PolyhedralMetric:
    """A simplicial complex together with positive edge lengths.

    Every top simplex with its induced lengths must be realizable; this is
    verified on construction (see :func:`validate` for a non-raising
    report).
    """

    def __init__(self, complex_: SimplicialComplex, lengths,
                 tol: Tolerances | None = None, validate_metric: bool = True):
        tol = resolve(tol)
        norm: dict[Edge, float] = {}
        for key, value in dict(lengths).items():
            i, j = key
            pair = (int(i), int(j)) if i < j else (int(j), int(i))
            norm[pair] = float(value)
        expected = set(complex_.edges())
        missing = sorted(expected - set(norm))
        if missing:
            raise MissingLength(f"missing length for edge {missing[0]} "
                                f"({len(missing)} missing in total)",
                                edge=missing[0])
        extra = sorted(set(norm) - expected)
        if extra:
            raise ValueError(f"length given for non-edge {extra[0]}")
        for e, v in norm.items():
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"edge {e} must have positive finite length")
        self.complex = complex_
        self.lengths = norm
        self._tol = tol
        self._top_cache: dict[int, MetricSimplex] = {}
        if validate_metric:
            for ti in range(len(complex_.top_simplices)):
                self.top_simplex(ti)  # raises UnrealizableMetric with locus

    # -- simplex extraction ---------------------------------------------

    def length(self, i: int, j: int) -> float:
        return self.lengths[(i, j) if i < j else (j, i)]

    def _induced(self, face: Face) -> MetricSimplex:
        k = len(face) - 1
        lens = {(a, b): self.length(face[a], face[b])
                for a in range(k + 1) for b in range(a + 1, k + 1)}
        try:
            return MetricSimplex(k, lens, tol=self._tol)
        except UnrealizableMetric as exc:
            offenders = face if exc.vertices is None else \
                tuple(face[v] for v in exc.vertices)
            raise UnrealizableMetric(
                f"simplex {face} is not realizable: {exc}",
                vertices=offenders) from exc

    def top_simplex(self, ti: int) -> MetricSimplex:
        """Metric simplex of top simplex ``ti`` (vertex k = k-th smallest id)."""
        if ti not in self._top_cache:
            self._top_cache[ti] = self._induced(self.complex.top_simplices[ti])
        return self._top_cache[ti]

    def face_simplex(self, face) -> MetricSimplex:
        return self._induced(tuple(sorted(face)))

    def face_volume(self, face) -> float:
        face = tuple(sorted(face))
        if len(face) == 1:
            return 1.0  # counting measure for vertices
        return simplex_volume(self._induced(face))

    def total_volume(self) -> float:
        return sum(simplex_volume(self.top_simplex(ti))
                   for ti in range(len(self.complex.top_simplices)))

    def with_lengths(self, lengths) -> "PolyhedralMetric":
        return PolyhedralMetric(self.complex, lengths, tol=self._tol)

    def scaled(self, factor: float) -> "PolyhedralMetric":
        return self.with_lengths({e: factor * v for e, v in self.lengths.items()})

    @classmethod
    def from_triangle_mesh(cls, mesh: TriangleMesh,
                           tol: Tolerances | None = None) -> "PolyhedralMetric":
        """Underlying abstract surface of an embedded triangle mesh."""
        complex_ = SimplicialComplex(2, [tuple(t) for t in mesh.triangles])
        lengths = {(int(a), int(b)): float(np.linalg.norm(
            mesh.vertices[b] - mesh.vertices[a])) for a, b in mesh.edges}
        return cls(complex_, lengths, tol=tol)


# ---------------------------------------------------------------------------
# validation reports


@dataclass(frozen=True)
class ValidationReport:
    dim: int
    f_vector: tuple[int, ...]
    euler_characteristic: int
    n_components: int
    pseudo_manifold: bool
    realizable: bool
    issues: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return self.pseudo_manifold and self.realizable


def validate(c, tol: Tolerances | None = None) -> ValidationReport:
    """Non-raising pseudo-manifold and realizability report.

    Accepts a :class:`PolyhedralMetric`, or a (dim, top_simplices, lengths)
    triple packaged as a metric built with ``validate_metric=False``.
    """
    issues: list[str] = []
    complex_ = c.complex
    realizable = True
    for ti in range(len(complex_.top_simplices)):
        try:
            c.top_simplex(ti)
        except UnrealizableMetric as exc:
            realizable = False
            issues.append(str(exc))
    return ValidationReport(
        dim=complex_.dim,
        f_vector=complex_.f_vector(),
        euler_characteristic=complex_.euler_characteristic(),
        n_components=complex_.n_components,
        pseudo_manifold=True,  # enforced by SimplicialComplex construction
        realizable=realizable,
        issues=tuple(issues),
    )


# ---------------------------------------------------------------------------
# cone angles


@dataclass(frozen=True)
class CurvatureRow:
    face: Face
    cone_angle: float
    deficit: float     # 2*pi - cone angle
    volume: float


class CurvatureTable:
    """Cone angle, deficit, and volume for every codimension-2 face."""

    def __init__(self, rows: list[CurvatureRow]):
        self.rows = rows
        self._by_face = {r.face: r for r in rows}

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, face) -> CurvatureRow:
        return self._by_face[tuple(sorted(face))]

    def deficits(self) -> np.ndarray:
        return np.array([r.deficit for r in self.rows])

    def volumes(self) -> np.ndarray:
        return np.array([r.volume for r in self.rows])

    def max_abs_deficit(self) -> float:
        return float(np.max(np.abs(self.deficits())))

    def singular_faces(self, threshold: float = 1e-9) -> list[Face]:
        return [r.face for r in self.rows if abs(r.deficit) > threshold]


def cone_angles(c: PolyhedralMetric) -> CurvatureTable:
    """Sum of dihedral angles around every codimension-2 face.

    The deficit 2*pi minus the cone angle is the discrete curvature
    carried by the face; it may have either sign.
    """
    complex_ = c.complex
    n = complex_.dim
    rows = []
    for face in complex_.faces(n - 2):
        theta = 0.0
        for ti in complex_.star_tops(face):
            top = complex_.top_simplices[ti]
            local = tuple(top.index(v) for v in face)
            theta += dihedral_angle(c.top_simplex(ti), local)
        rows.append(CurvatureRow(face=face, cone_angle=theta,
                                 deficit=TWO_PI - theta,
                                 volume=c.face_volume(face)))
    return CurvatureTable(rows)


# ---------------------------------------------------------------------------
# barycentric subdivision


def subdivide_simplex(s: MetricSimplex):
    """Barycentric subdivision of one metric simplex.

    Returns (tops, lengths): the (d+1)! sub-simplices as tuples of faces
    (each face a sorted vertex tuple of the parent, standing for its
    barycenter) and the distances between barycenters measured in an
    embedding of the parent.
    """
    d = s.dim
    pts = embed_simplex(s).points
    verts = list(range(d + 1))
    bary: dict[Face, np.ndarray] = {}
    for k in range(1, d + 2):
        for f in itertools.combinations(verts, k):
            bary[f] = pts[list(f)].mean(axis=0)
    tops = []
    for perm in itertools.permutations(verts):
        chain = tuple(tuple(sorted(perm[:k])) for k in range(1, d + 2))
        tops.append(chain)
    lengths: dict[tuple[Face, Face], float] = {}
    for chain in tops:
        for a, b in itertools.combinations(chain, 2):
            key = (a, b) if a <= b else (b, a)
            if key not in lengths:
                lengths[key] = float(np.linalg.norm(bary[a] - bary[b]))
    return tops, lengths


def barycentric_subdivide(c: PolyhedralMetric) -> PolyhedralMetric:
    """Barycentric subdivision with lengths induced by the input metric.

    New vertices are the barycenters of all faces; every new edge lies in
    some top simplex, where its length is the barycenter distance in an
    embedding.  The result is path-isometric to the input.
    """
    complex_ = c.complex
    n = complex_.dim
    ids: dict[Face, int] = {}
    for k in range(n + 1):
        for f in complex_.faces(k):
            ids[f] = len(ids)
    new_tops: list[tuple[int, ...]] = []
    new_lengths: dict[Edge, float] = {}
    for ti, top in enumerate(complex_.top_simplices):
        tops, lengths = subdivide_simplex(c.top_simplex(ti))
        to_global = lambda local: tuple(sorted(top[v] for v in local))
        for chain in tops:
            new_tops.append(tuple(ids[to_global(f)] for f in chain))
        for (a, b), ell in lengths.items():
            ia, ib = ids[to_global(a)], ids[to_global(b)]
            key = (ia, ib) if ia < ib else (ib, ia)
            prev = new_lengths.get(key)
            if prev is not None and abs(prev - ell) > 1e-9 * (1.0 + ell):
                raise UnrealizableMetric(
                    f"inconsistent induced length on subdivision edge {key}")
            new_lengths[key] = ell
    return PolyhedralMetric(SimplicialComplex(n, new_tops), new_lengths,
                            tol=c._tol)


# ---------------------------------------------------------------------------
# builders


def boundary_of_simplex(n: int, edge: float = 1.0,
                        tol: Tolerances | None = None) -> PolyhedralMetric:
    """Boundary of the regular n-simplex: an (n-1)-sphere with n+1 vertices."""
    if n < 2:
        raise ValueError("need n >= 2")
    tops = list(itertools.combinations(range(n + 1), n))
    complex_ = SimplicialComplex(n - 1, tops)
    lengths = {e: edge for e in complex_.edges()}
    return PolyhedralMetric(complex_, lengths, tol=tol)


def flat_torus_3d(k: int = 3, size: float = 1.0,
                  tol: Tolerances | None = None) -> PolyhedralMetric:
    """Flat 3-torus: k^3 periodic grid of cubes, six tetrahedra each.

    Each cube is cut along its main diagonal into the six permutation
    tetrahedra; lengths come from the flat covering metric, so every cone
    angle is exactly 2*pi.  ``k >= 3`` keeps the quotient simplicial.
    """
    if k < 3:
        raise ValueError("k >= 3 is required for a simplicial quotient")
    h = size / k

    def vid(x: int, y: int, z: int) -> int:
        return ((x % k) * k + (y % k)) * k + (z % k)

    axes = (np.array([1, 0, 0]), np.array([0, 1, 0]), np.array([0, 0, 1]))
    tops = []
    lengths: dict[Edge, float] = {}
    for x, y, z in itertools.product(range(k), repeat=3):
        base = np.array([x, y, z])
        for perm in itertools.permutations(range(3)):
            corners = [base.copy()]
            for axis in perm:
                corners.append(corners[-1] + axes[axis])
            ids = [vid(*c) for c in corners]
            tops.append(tuple(ids))
            for a, b in itertools.combinations(range(4), 2):
                ia, ib = ids[a], ids[b]
                key = (ia, ib) if ia < ib else (ib, ia)
                ell = h * float(np.linalg.norm(corners[a] - corners[b]))
                prev = lengths.get(key)
                if prev is not None and abs(prev - ell) > 1e-12:
                    raise NonManifold("ambiguous edge length in torus grid")
                lengths[key] = ell
    complex_ = SimplicialComplex(3, set(tops))
    return PolyhedralMetric(complex_, lengths, tol=tol)


def flat_torus_2d(m: int = 3, n: int = 3, size: float = 1.0,
                  tol: Tolerances | None = None) -> PolyhedralMetric:
    """Flat 2-torus on a periodic m x n grid with diagonal splits."""
    if m < 3 or n < 3:
        raise ValueError("m, n >= 3 are required for a simplicial quotient")
    hx = size / m
    hy = size / n

    def vid(i: int, j: int) -> int:
        return (i % m) * n + (j % n)

    tops = []
    lengths: dict[Edge, float] = {}
    offsets = {(1, 0): hx, (0, 1): hy, (1, 1): math.hypot(hx, hy)}
    for i in range(m):
        for j in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            cc, d = vid(i + 1, j + 1), vid(i, j + 1)
            tops += [(a, b, cc), (a, cc, d)]
            for (p, q), (di, dj) in (((a, b), (1, 0)), ((a, d), (0, 1)),
                                     ((b, cc), (0, 1)), ((d, cc), (1, 0)),
                                     ((a, cc), (1, 1))):
                key = (p, q) if p < q else (q, p)
                lengths[key] = offsets[(di, dj)]
    complex_ = SimplicialComplex(2, set(tops))
    return PolyhedralMetric(complex_, lengths, tol=tol)
