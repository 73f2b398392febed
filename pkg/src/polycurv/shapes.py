"""Mesh and polyhedron generators used as fixtures and experiment inputs."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull

from .config import Tolerances
from .surfaces import ConvexPolyhedron, TriangleMesh


def cube(edge: float = 1.0, tol: Tolerances | None = None) -> ConvexPolyhedron:
    """Axis-aligned cube [0, edge]^3 with quadrilateral faces."""
    e = float(edge)
    V = np.array([(x, y, z) for x in (0, e) for y in (0, e) for z in (0, e)])
    # vertex index = 4*x + 2*y + z (in units of e); faces wound outward
    F = [
        (0, 1, 3, 2),  # x = 0
        (4, 6, 7, 5),  # x = e
        (0, 4, 5, 1),  # y = 0
        (2, 3, 7, 6),  # y = e
        (0, 2, 6, 4),  # z = 0
        (1, 5, 7, 3),  # z = e
    ]
    return ConvexPolyhedron(V, F, tol=tol)


def regular_tetrahedron_mesh(edge: float = 1.0,
                             tol: Tolerances | None = None) -> TriangleMesh:
    s = float(edge) / (2.0 * math.sqrt(2.0))
    V = s * np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float)
    T = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    return TriangleMesh(V, T, tol=tol)


def regular_tetrahedron(edge: float = 1.0,
                        tol: Tolerances | None = None) -> ConvexPolyhedron:
    return ConvexPolyhedron.from_triangle_mesh(regular_tetrahedron_mesh(edge, tol))


def icosahedron(radius: float = 1.0, tol: Tolerances | None = None) -> TriangleMesh:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = np.array([
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ], dtype=float)
    V = raw / np.linalg.norm(raw, axis=1)[:, None] * radius
    T = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return TriangleMesh(V, T, tol=tol)


def icosphere(radius: float = 1.0, level: int = 0,
              tol: Tolerances | None = None) -> TriangleMesh:
    """Icosahedron refined ``level`` times (4-to-1 splits), reprojected to
    the sphere of the given radius after every split."""
    if level < 0:
        raise ValueError("subdivision level must be >= 0")
    mesh = icosahedron(radius, tol)
    V = [tuple(p) for p in mesh.vertices]
    T = [tuple(t) for t in mesh.triangles]
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}
        newT = []

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                p = 0.5 * (np.asarray(V[a]) + np.asarray(V[b]))
                p = p / np.linalg.norm(p) * radius
                cache[key] = len(V)
                V.append(tuple(p))
            return cache[key]

        for a, b, c in T:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            newT += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        T = newT
    return TriangleMesh(np.asarray(V), T, tol=tol)


def torus_mesh(R: float = 2.0, r: float = 0.5, m: int = 16, n: int = 16,
               tol: Tolerances | None = None) -> TriangleMesh:
    """Torus of revolution triangulated on an m x n grid (diagonal split)."""
    if not (R > r > 0):
        raise ValueError("need R > r > 0")
    if m < 3 or n < 3:
        raise ValueError("need at least 3 segments in each direction")
    V = np.empty((m * n, 3))
    for i in range(m):
        theta = 2.0 * math.pi * i / m
        for j in range(n):
            phi = 2.0 * math.pi * j / n
            rho = R + r * math.cos(phi)
            V[i * n + j] = (rho * math.cos(theta), rho * math.sin(theta),
                            r * math.sin(phi))
    T = []
    for i in range(m):
        for j in range(n):
            a = i * n + j
            b = ((i + 1) % m) * n + j
            c = ((i + 1) % m) * n + (j + 1) % n
            d = i * n + (j + 1) % n
            T += [(a, b, c), (a, c, d)]
    return TriangleMesh(V, T, tol=tol)


def subdivided_cube_mesh(k: int = 4, edge: float = 1.0,
                         tol: Tolerances | None = None) -> TriangleMesh:
    """Cube surface with each face split into a k x k triangulated grid.

    Vertices interior to a face are flat (zero angle defect); vertices
    interior to an edge see two quarter-turns (defect 0 as well).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    e = float(edge)
    index: dict[tuple[float, float, float], int] = {}
    verts: list[tuple[float, float, float]] = []

    def vid(p) -> int:
        key = (round(p[0], 12), round(p[1], 12), round(p[2], 12))
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    tris = []
    # each cube face parametrized by (u, v) with a fixed coordinate
    faces = [
        (0, 0.0, False), (0, e, True),   # x = 0 / x = e
        (1, 0.0, False), (1, e, True),   # y = 0 / y = e
        (2, 0.0, False), (2, e, True),   # z = 0 / z = e
    ]
    for axis, level, flip in faces:
        for i in range(k):
            for j in range(k):
                corners_uv = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
                ids = []
                for u, v in corners_uv:
                    p = [0.0, 0.0, 0.0]
                    p[axis] = level
                    p[(axis + 1) % 3] = e * u / k
                    p[(axis + 2) % 3] = e * v / k
                    ids.append(vid(p))
                a, b, c, d = ids
                if flip:
                    tris += [(a, b, c), (a, c, d)]
                else:
                    tris += [(a, c, b), (a, d, c)]
    return TriangleMesh(np.asarray(verts, dtype=float), tris, tol=tol)


def voxel_surface(cells, scale: float = 1.0,
                  tol: Tolerances | None = None) -> TriangleMesh:
    """Boundary surface of a union of unit voxels, triangulated outward.

    ``cells`` is an iterable of integer (i, j, k) positions.  The solid
    must have a manifold boundary (no two cells touching only along an
    edge or corner across empty space); validation catches violations.
    """
    solid = {tuple(int(c) for c in cell) for cell in cells}
    if not solid:
        raise ValueError("no cells")
    index: dict[tuple[int, int, int], int] = {}
    verts: list[tuple[int, int, int]] = []

    def vid(p) -> int:
        if p not in index:
            index[p] = len(verts)
            verts.append(p)
        return index[p]

    # outward quad corners (counterclockwise from outside) per face direction
    quads = {
        (1, 0, 0): ((1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)),
        (-1, 0, 0): ((0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)),
        (0, 1, 0): ((0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)),
        (0, -1, 0): ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)),
        (0, 0, 1): ((0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)),
        (0, 0, -1): ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)),
    }
    tris = []
    for cell in sorted(solid):
        for d, corners in quads.items():
            if (cell[0] + d[0], cell[1] + d[1], cell[2] + d[2]) in solid:
                continue
            ids = [vid((cell[0] + c[0], cell[1] + c[1], cell[2] + c[2]))
                   for c in corners]
            a, b, c, dd = ids
            tris += [(a, b, c), (a, c, dd)]
    V = np.asarray(verts, dtype=float) * scale
    return TriangleMesh(V, tris, tol=tol)


def genus2_mesh(tol: Tolerances | None = None) -> TriangleMesh:
    """Closed oriented surface of genus 2: a 5x3x1 slab with two square
    tunnels (Euler characteristic -2)."""
    cells = [(x, y, 0) for x in range(5) for y in range(3)]
    cells.remove((1, 1, 0))
    cells.remove((3, 1, 0))
    return voxel_surface(cells, tol=tol)


def random_convex_hull_mesh(n: int = 50, seed: int = 0,
                            radius: float = 1.0,
                            tol: Tolerances | None = None) -> TriangleMesh:
    """Convex hull of random points on a sphere, triangles oriented outward."""
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((n, 3))
    P = P / np.linalg.norm(P, axis=1)[:, None] * radius
    hull = ConvexHull(P)
    center = P[hull.vertices].mean(axis=0)
    tris = []
    for simplex in hull.simplices:
        a, b, c = (P[k] for k in simplex)
        if np.dot(np.cross(b - a, c - a), a - center) < 0:
            simplex = simplex[::-1]
        tris.append(tuple(int(i) for i in simplex))
    used = sorted({i for t in tris for i in t})
    remap = {old: new for new, old in enumerate(used)}
    tris = [tuple(remap[i] for i in t) for t in tris]
    return TriangleMesh(P[used], tris, tol=tol)


def regular_hexagon(side: float = 1.0) -> np.ndarray:
    """Vertices of a regular hexagon in the plane (for 2D width identities)."""
    ang = np.arange(6) * math.pi / 3.0
    return np.column_stack([side * np.cos(ang), side * np.sin(ang)])
