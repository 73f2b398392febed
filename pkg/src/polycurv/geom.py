"""Exact low-level geometry.

Angles, spherical polygon areas, metric simplices (edge lengths), their
realization in Euclidean space, volumes and volume gradients, dihedral
angles, and normalized external angles of simplicial cones.

Angles are always computed through the two-argument arctangent; arccos of
a normalized dot product is avoided everywhere for stability near 0 and pi.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog

from .config import Tolerances, resolve
from .errors import (
    BadFace,
    NotConvexSpherical,
    UnrealizableMetric,
    ZeroVector,
)
from .montecarlo import EstimateWithError, MCConfig

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

# local vertex pairs of a tetrahedron, in reporting order
TET_EDGE_SLOTS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


# ---------------------------------------------------------------------------
# angles


def angle_between(u, v, tol: Tolerances | None = None) -> float:
    """Angle in [0, pi] between two vectors in R^2 or R^3.

    Computed as atan2(|u x v|, <u, v>).  Raises :class:`ZeroVector` if an
    input is numerically zero.
    """
    tol = resolve(tol)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.shape not in ((2,), (3,)):
        raise ValueError("expected two vectors of equal dimension 2 or 3")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu < tol.eps_degenerate or nv < tol.eps_degenerate:
        raise ZeroVector("angle of a zero vector is undefined")
    if u.shape == (2,):
        cross_mag = abs(u[0] * v[1] - u[1] * v[0])
    else:
        cross_mag = float(np.linalg.norm(np.cross(u, v)))
    return math.atan2(cross_mag, float(np.dot(u, v)))


def _angle_nd(u: np.ndarray, v: np.ndarray) -> float:
    # dimension-agnostic stable angle (Kahan): 2*atan2(|u'-v'|, |u'+v'|)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("angle of a zero vector is undefined")
    a = u / nu
    b = v / nv
    return 2.0 * math.atan2(float(np.linalg.norm(a - b)), float(np.linalg.norm(a + b)))


# ---------------------------------------------------------------------------
# spherical polygons


class SphericalPolygon:
    """Vertex cycle (or open chain) on the unit sphere, joined by minor arcs.

    Consecutive vertices must be neither equal nor antipodal, otherwise the
    minor great-circle arc is degenerate or ambiguous.
    """

    def __init__(self, vertices, closed: bool = True, tol: Tolerances | None = None):
        tol = resolve(tol)
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 3:
            raise ValueError("expected an (n, 3) array of unit vectors")
        n = len(V)
        if closed and n < 3:
            raise ValueError("a closed spherical polygon needs at least 3 vertices")
        if not closed and n < 2:
            raise ValueError("an open spherical chain needs at least 2 vertices")
        norms = np.linalg.norm(V, axis=1)
        if np.any(np.abs(norms - 1.0) > tol.eps_unit):
            raise ValueError("vertices must lie on the unit sphere")
        from .errors import AntipodalDirections, DegenerateVertex  # cycle-free

        for i, j in _arc_pairs(n, closed):
            if np.linalg.norm(V[i] - V[j]) < tol.eps_unit:
                raise DegenerateVertex(
                    f"consecutive spherical vertices {i} and {j} coincide", index=i)
            if np.linalg.norm(V[i] + V[j]) < tol.eps_unit:
                raise AntipodalDirections(
                    f"consecutive spherical vertices {i} and {j} are antipodal")
        self.vertices = V
        self.closed = bool(closed)
        self._tol = tol

    @classmethod
    def from_directions(cls, dirs, closed: bool = True,
                        tol: Tolerances | None = None) -> "SphericalPolygon":
        """Normalize a list of nonzero vectors onto the sphere first."""
        tol = resolve(tol)
        D = np.asarray(dirs, dtype=float)
        norms = np.linalg.norm(D, axis=1)
        if np.any(norms < tol.eps_degenerate):
            raise ZeroVector("cannot normalize a zero direction")
        return cls(D / norms[:, None], closed=closed, tol=tol)

    def __len__(self) -> int:
        return len(self.vertices)

    def arc_pairs(self) -> list[tuple[int, int]]:
        return _arc_pairs(len(self.vertices), self.closed)

    def arc_lengths(self) -> np.ndarray:
        V = self.vertices
        return np.array([angle_between(V[i], V[j], self._tol)
                         for i, j in self.arc_pairs()])

    def length(self) -> float:
        return float(self.arc_lengths().sum())


def _arc_pairs(n: int, closed: bool) -> list[tuple[int, int]]:
    pairs = [(i, i + 1) for i in range(n - 1)]
    if closed:
        pairs.append((n - 1, 0))
    return pairs


def open_hemisphere_witness_points(points: np.ndarray,
                                   tol: Tolerances | None = None) -> np.ndarray | None:
    """Direction v with <p, v> > 0 for all points, or None if none exists.

    Decided by a small linear feasibility solve: maximize t subject to
    <p_i, v> >= t with v in the unit box.  A strictly positive optimum
    certifies an open hemisphere containing all points.
    """
    tol = resolve(tol)
    P = np.asarray(points, dtype=float)
    # fast path: the mean direction usually works for genuinely convex input
    c = P.mean(axis=0)
    nc = np.linalg.norm(c)
    if nc > tol.eps_degenerate:
        c = c / nc
        if float(np.min(P @ c)) > 1e-9:
            return c
    n = len(P)
    res = linprog(
        c=[0.0, 0.0, 0.0, -1.0],
        A_ub=np.hstack([-P, np.ones((n, 1))]),
        b_ub=np.zeros(n),
        bounds=[(-1, 1), (-1, 1), (-1, 1), (-2, 2)],
        method="highs",
    )
    if not res.success or res.x[3] <= 1e-9:
        return None
    v = res.x[:3]
    nv = np.linalg.norm(v)
    if nv < tol.eps_degenerate:
        return None
    v = v / nv
    if float(np.min(P @ v)) <= 0.0:
        return None
    return v


def spherical_polygon_area(polygon: SphericalPolygon,
                           tol: Tolerances | None = None) -> float:
    """Area of a convex spherical polygon: sum of interior angles - (n-2)*pi.

    The polygon must be closed, contained in an open hemisphere, and in
    convex position; otherwise :class:`NotConvexSpherical` is raised.
    Interior angles are measured between the tangent vectors of the two
    incident arcs at each vertex.  The result lies in (0, 2*pi).
    """
    tol = resolve(tol)
    if not polygon.closed:
        raise NotConvexSpherical("area is defined for closed polygons only")
    V = polygon.vertices
    n = len(V)
    if open_hemisphere_witness_points(V, tol) is None:
        raise NotConvexSpherical("vertices are not contained in an open hemisphere")
    _check_convex_position(V, tol)
    total = 0.0
    for i in range(n):
        prev = V[(i - 1) % n]
        nxt = V[(i + 1) % n]
        t_prev = prev - np.dot(prev, V[i]) * V[i]
        t_next = nxt - np.dot(nxt, V[i]) * V[i]
        total += angle_between(t_prev, t_next, tol)
    return total - (n - 2) * math.pi


def _check_convex_position(V: np.ndarray, tol: Tolerances) -> None:
    # every great circle through an edge must keep all other vertices on
    # one side, with a consistent side across edges
    n = len(V)
    band = tol.eps_unit
    overall = 0
    for i in range(n):
        j = (i + 1) % n
        nrm = np.cross(V[i], V[j])
        mag = np.linalg.norm(nrm)
        if mag < tol.eps_degenerate:
            raise NotConvexSpherical("degenerate edge in convexity test")
        nrm = nrm / mag
        pos = neg = False
        for k in range(n):
            if k in (i, j):
                continue
            s = float(np.dot(nrm, V[k]))
            if s > band:
                pos = True
            elif s < -band:
                neg = True
        if pos and neg:
            raise NotConvexSpherical("vertices are not in convex position")
        side = 1 if pos else (-1 if neg else 0)
        if side != 0:
            if overall == 0:
                overall = side
            elif side != overall:
                raise NotConvexSpherical("vertices are not in convex position")


# ---------------------------------------------------------------------------
# metric simplices


class MetricSimplex:
    """A d-simplex given by its edge lengths.

    ``lengths`` maps unordered vertex pairs (i, j), 0 <= i < j <= dim, to
    positive reals.  Construction verifies that the metric is realizable in
    R^d (Gram matrix positive definite beyond the degeneracy threshold).
    """

    def __init__(self, dim: int, lengths, tol: Tolerances | None = None,
                 validate: bool = True):
        tol = resolve(tol)
        if dim < 1:
            raise ValueError("simplex dimension must be >= 1")
        normalized: dict[tuple[int, int], float] = {}
        for key, value in dict(lengths).items():
            i, j = key
            if i == j:
                raise ValueError(f"length key ({i}, {j}) is not an edge")
            if not (0 <= i <= dim and 0 <= j <= dim):
                raise ValueError(f"length key ({i}, {j}) out of range for dim {dim}")
            pair = (i, j) if i < j else (j, i)
            value = float(value)
            if pair in normalized and normalized[pair] != value:
                raise ValueError(f"conflicting lengths for edge {pair}")
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"edge {pair} must have positive finite length")
            normalized[pair] = value
        expected = {(i, j) for i in range(dim + 1) for j in range(i + 1, dim + 1)}
        if set(normalized) != expected:
            missing = sorted(expected - set(normalized))
            raise ValueError(f"missing edge lengths: {missing}")
        self.dim = dim
        self.lengths = normalized
        self._tol = tol
        self._points: np.ndarray | None = None
        if validate:
            self._realize()  # raises UnrealizableMetric on failure

    # -- constructors -------------------------------------------------

    @classmethod
    def from_points(cls, points, tol: Tolerances | None = None) -> "MetricSimplex":
        P = np.asarray(points, dtype=float)
        d = len(P) - 1
        lengths = {(i, j): float(np.linalg.norm(P[i] - P[j]))
                   for i in range(d + 1) for j in range(i + 1, d + 1)}
        return cls(d, lengths, tol=tol)

    @classmethod
    def regular(cls, dim: int, edge: float = 1.0,
                tol: Tolerances | None = None) -> "MetricSimplex":
        lengths = {(i, j): edge for i in range(dim + 1) for j in range(i + 1, dim + 1)}
        return cls(dim, lengths, tol=tol)

    # -- accessors ----------------------------------------------------

    def length(self, i: int, j: int) -> float:
        return self.lengths[(i, j) if i < j else (j, i)]

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.lengths)

    def scale(self) -> float:
        return max(self.lengths.values())

    def vertex_tuple(self) -> tuple[int, ...]:
        return tuple(range(self.dim + 1))

    def face(self, vertices) -> "MetricSimplex":
        """Induced sub-simplex on the given vertices, re-indexed 0..k."""
        vs = tuple(sorted(vertices))
        _require_face(self.dim, vs, min_len=2)
        lengths = {(a, b): self.length(vs[a], vs[b])
                   for a in range(len(vs)) for b in range(a + 1, len(vs))}
        return MetricSimplex(len(vs) - 1, lengths, tol=self._tol, validate=False)

    # -- realization --------------------------------------------------

    def _gram(self) -> np.ndarray:
        d = self.dim
        G = np.empty((d, d))
        for i in range(1, d + 1):
            for j in range(i, d + 1):
                v = 0.5 * (self.length(0, i) ** 2 + self.length(0, j) ** 2
                           - (self.length(i, j) ** 2 if i != j else 0.0))
                G[i - 1, j - 1] = v
                G[j - 1, i - 1] = v
        return G

    def _realize(self) -> np.ndarray:
        if self._points is None:
            L, perm = _pivoted_cholesky(self._gram(), self._tol.eps_degenerate)
            points = np.zeros((self.dim + 1, self.dim))
            for row, orig in enumerate(perm):
                points[orig + 1] = L[row]
            self._points = points
        return self._points


def _pivoted_cholesky(G: np.ndarray, eps_rel: float) -> tuple[np.ndarray, list[int]]:
    """Cholesky with diagonal pivoting; raises on loss of positive definiteness.

    Returns (L, perm) with (P G P^T) = L L^T and perm the vertex order
    (0-based offsets into rows of G).  The failure report names the
    sub-simplex spanned by vertex 0 and the pivoted vertices so far.
    """
    n = len(G)
    A = G.astype(float, copy=True)
    L = np.zeros((n, n))
    perm = list(range(n))
    threshold = eps_rel * max(float(np.max(np.diag(A))), 0.0)
    if threshold <= 0.0:
        raise UnrealizableMetric("all edge lengths degenerate", vertices=(0,))
    for k in range(n):
        rem = np.diag(A)[k:]
        m = k + int(np.argmax(rem))
        if A[m, m] <= threshold:
            offenders = tuple([0] + sorted(p + 1 for p in perm[:k] + [perm[m]]))
            raise UnrealizableMetric(
                f"metric not realizable: sub-simplex {offenders} degenerates "
                f"(pivot {A[m, m]:.3e})", vertices=offenders)
        if m != k:
            A[[k, m], :] = A[[m, k], :]
            A[:, [k, m]] = A[:, [m, k]]
            L[[k, m], :k] = L[[m, k], :k]
            perm[k], perm[m] = perm[m], perm[k]
        L[k, k] = math.sqrt(A[k, k])
        if k + 1 < n:
            L[k + 1:, k] = A[k + 1:, k] / L[k, k]
            A[k + 1:, k + 1:] -= np.outer(L[k + 1:, k], L[k + 1:, k])
            np.fill_diagonal(A[k + 1:, k + 1:],
                             np.maximum(np.diag(A[k + 1:, k + 1:]), 0.0))
    return L, perm


class EmbeddedSimplex:
    """A d-simplex realized by d+1 points in R^d."""

    def __init__(self, dim: int, points, tol: Tolerances | None = None):
        tol = resolve(tol)
        P = np.array(points, dtype=float)
        if P.shape != (dim + 1, dim):
            raise ValueError(f"expected {dim + 1} points in R^{dim}")
        E = P[1:] - P[0]
        vol = abs(float(np.linalg.det(E))) / math.factorial(dim)
        scale = max(float(np.max(np.abs(E))), 1.0)
        if vol <= tol.eps_degenerate * scale ** dim:
            raise UnrealizableMetric("embedded simplex is degenerate")
        self.dim = dim
        self.points = P

    def volume(self) -> float:
        E = self.points[1:] - self.points[0]
        return abs(float(np.linalg.det(E))) / math.factorial(self.dim)


def embed_simplex(s: MetricSimplex, tol: Tolerances | None = None) -> EmbeddedSimplex:
    """Realize a metric simplex in R^d with vertex 0 at the origin.

    The Gram matrix of the edge vectors is factored by pivoted Cholesky;
    the resulting coordinates reproduce every input length to eps_embed.
    """
    tol = resolve(tol) if tol is not None else s._tol
    points = s._realize()
    for (i, j), ell in s.lengths.items():
        got = float(np.linalg.norm(points[i] - points[j]))
        if abs(got - ell) > tol.eps_embed * (1.0 + ell):
            raise UnrealizableMetric(
                f"embedding failed to reproduce edge ({i}, {j}): "
                f"{got!r} vs {ell!r}")
    return EmbeddedSimplex(s.dim, points, tol=tol)


# ---------------------------------------------------------------------------
# volumes


def _cayley_menger_matrix(s: MetricSimplex) -> np.ndarray:
    d = s.dim
    B = np.ones((d + 2, d + 2))
    B[0, 0] = 0.0
    for i in range(d + 1):
        B[i + 1, i + 1] = 0.0
        for j in range(i + 1, d + 1):
            sq = s.length(i, j) ** 2
            B[i + 1, j + 1] = sq
            B[j + 1, i + 1] = sq
    return B


def _cm_coefficient(d: int) -> float:
    return ((-1.0) ** (d + 1)) / (2.0 ** d * math.factorial(d) ** 2)


def simplex_volume(s: MetricSimplex) -> float:
    """d-volume from the Cayley-Menger determinant of the edge lengths."""
    if s.dim == 1:
        return s.length(0, 1)
    B = _cayley_menger_matrix(s)
    vol_sq = _cm_coefficient(s.dim) * float(np.linalg.det(B))
    if vol_sq <= 0.0:
        raise UnrealizableMetric("Cayley-Menger determinant has the wrong sign")
    return math.sqrt(vol_sq)


def simplex_volume_gradient(s: MetricSimplex) -> dict[tuple[int, int], float]:
    """Exact derivative of the simplex volume with respect to each edge length.

    Differentiates the Cayley-Menger determinant: d(det)/d(l_ij) is four
    times l_ij times the corresponding cofactor.
    """
    if s.dim == 1:
        return {(0, 1): 1.0}
    B = _cayley_menger_matrix(s)
    det = float(np.linalg.det(B))
    coeff = _cm_coefficient(s.dim)
    vol_sq = coeff * det
    if vol_sq <= 0.0:
        raise UnrealizableMetric("Cayley-Menger determinant has the wrong sign")
    vol = math.sqrt(vol_sq)
    adj = det * np.linalg.inv(B)  # adjugate; symmetric since B is
    grad = {}
    for (i, j), ell in s.lengths.items():
        ddet = 4.0 * ell * adj[i + 1, j + 1]
        grad[(i, j)] = float(coeff * ddet / (2.0 * vol))
    return grad


# ---------------------------------------------------------------------------
# dihedral and external angles


def _require_face(dim: int, face: tuple[int, ...], min_len: int = 1) -> None:
    if (len(face) < min_len or len(set(face)) != len(face)
            or any(not (0 <= v <= dim) for v in face)
            or list(face) != sorted(face)):
        raise BadFace(f"{face} is not a face of a {dim}-simplex")


def dihedral_angle(s: MetricSimplex, q) -> float:
    """Dihedral angle of ``s`` at the codimension-2 face ``q``, in (0, pi).

    Measured between the two facets containing ``q``, inside the plane
    orthogonal to ``q``; for a triangle this is the angle at the vertex.
    """
    if s.dim < 2:
        raise BadFace("dihedral angles need dim >= 2")
    q = tuple(sorted(q))
    _require_face(s.dim, q)
    if len(q) != s.dim - 1:
        raise BadFace(f"{q} is not a codimension-2 face of a {s.dim}-simplex")
    points = s._realize()
    a, b = [v for v in range(s.dim + 1) if v not in q]
    anchor = points[q[0]]
    u = points[a] - anchor
    v = points[b] - anchor
    if len(q) > 1:
        dirs = points[list(q[1:])] - anchor
        Q, _ = np.linalg.qr(dirs.T)
        u = u - Q @ (Q.T @ u)
        v = v - Q @ (Q.T @ v)
    return _angle_nd(u, v)


def _normal_complement_basis(points: np.ndarray, q: tuple[int, ...]) -> np.ndarray:
    # orthonormal basis (rows) of the orthocomplement of aff(q) in R^d
    d = points.shape[1]
    if len(q) == 1:
        return np.eye(d)
    dirs = points[list(q[1:])] - points[q[0]]
    _, _, vt = np.linalg.svd(dirs)
    return vt[len(q) - 1:]


def _projected_cone_generators(s: MetricSimplex, q: tuple[int, ...]) -> np.ndarray:
    # columns: projections of the off-face vertices into the normal space of q
    points = s._realize()
    basis = _normal_complement_basis(points, q)
    off = [v for v in range(s.dim + 1) if v not in q]
    anchor = points[q[0]]
    return basis @ (points[off] - anchor).T


def external_angle(s: MetricSimplex, q, mc: MCConfig | None = None):
    """Normalized external angle of the simplex ``s`` at its face ``q``.

    The value is the fraction of the unit sphere of the normal space of
    ``q`` (inside ``s``'s affine hull) occupied by the polar of the cone
    of ``s`` at ``q``.  With d = dim(s) - dim(q):

    * d = 0 -> 1, d = 1 -> 1/2, both exact;
    * d = 2 -> (pi - dihedral angle)/(2*pi), exact;
    * d = 3 -> polar-cone solid angle / (4*pi) via spherical excess, exact;
    * d >= 4 -> seeded Gaussian Monte Carlo over the normal space,
      returned as :class:`EstimateWithError` (membership test: nonnegative
      coefficients in the polar generator basis).
    """
    q = tuple(sorted(q))
    _require_face(s.dim, q)
    d = s.dim - (len(q) - 1)
    if d == 0:
        return 1.0
    if d == 1:
        return 0.5
    if d == 2:
        return (math.pi - dihedral_angle(s, q)) / TWO_PI
    W = _projected_cone_generators(s, q)
    polar = -np.linalg.inv(W).T  # columns n_i with <n_i, w_j> = -delta_ij
    if d == 3:
        units = polar / np.linalg.norm(polar, axis=0)
        tri = SphericalPolygon(units.T, closed=True, tol=s._tol)
        return spherical_polygon_area(tri, s._tol) / FOUR_PI
    cfg = mc if mc is not None else MCConfig()
    return _external_angle_mc(W, d, cfg)


def _external_angle_mc(W: np.ndarray, d: int, cfg: MCConfig) -> EstimateWithError:
    # membership: y = sum c_i n_i with c >= 0, where N = -inv(W)^T; the
    # coefficient vector is c = -W^T y
    rng = np.random.default_rng(cfg.seed)
    n = int(cfg.samples)
    hits = 0
    remaining = n
    chunk = 1 << 18
    while remaining > 0:
        m = min(chunk, remaining)
        Y = rng.standard_normal((m, d))
        C = -(Y @ W)
        hits += int(np.count_nonzero(np.all(C >= 0.0, axis=1)))
        remaining -= m
    p = hits / n
    stderr = math.sqrt(max(p * (1.0 - p), 0.0) / n)
    return EstimateWithError(mean=p, stderr=stderr, samples=n, seed=cfg.seed)


# ---------------------------------------------------------------------------
# batched tetrahedron geometry (hot paths: relaxation, property sweeps)


def tetra_embed_batch(L: np.ndarray) -> np.ndarray:
    """Embed tetrahedra from a (T, 6) length array; NaNs where unrealizable.

    Column order follows TET_EDGE_SLOTS.  Returns points of shape (T, 4, 3).
    """
    L = np.asarray(L, dtype=float)
    l01, l02, l03, l12, l13, l23 = (L[:, k] for k in range(6))
    with np.errstate(invalid="ignore", divide="ignore"):
        x1 = l01
        x2 = (l01 ** 2 + l02 ** 2 - l12 ** 2) / (2.0 * l01)
        y2sq = l02 ** 2 - x2 ** 2
        y2 = np.sqrt(np.where(y2sq > 0, y2sq, np.nan))
        x3 = (l01 ** 2 + l03 ** 2 - l13 ** 2) / (2.0 * l01)
        y3 = (l02 ** 2 + l03 ** 2 - l23 ** 2 - 2.0 * x2 * x3) / (2.0 * y2)
        z3sq = l03 ** 2 - x3 ** 2 - y3 ** 2
        z3 = np.sqrt(np.where(z3sq > 0, z3sq, np.nan))
    P = np.zeros((len(L), 4, 3))
    P[:, 1, 0] = x1
    P[:, 2, 0] = x2
    P[:, 2, 1] = y2
    P[:, 3, 0] = x3
    P[:, 3, 1] = y3
    P[:, 3, 2] = z3
    return P


def tetra_volumes_batch(L: np.ndarray) -> np.ndarray:
    P = tetra_embed_batch(L)
    return P[:, 1, 0] * P[:, 2, 1] * P[:, 3, 2] / 6.0


def tetra_dihedral_angles_batch(L: np.ndarray) -> np.ndarray:
    """Dihedral angles of tetrahedra at their six edges, shape (T, 6).

    Slot k holds the angle at edge TET_EDGE_SLOTS[k].  Rows of NaN signal
    unrealizable length assignments.
    """
    P = tetra_embed_batch(L)
    out = np.empty((len(P), 6))
    for slot, (i, j) in enumerate(TET_EDGE_SLOTS):
        k, l = [v for v in range(4) if v not in (i, j)]
        u = P[:, j] - P[:, i]
        a = P[:, k] - P[:, i]
        b = P[:, l] - P[:, i]
        un = u / np.linalg.norm(u, axis=1)[:, None]
        a = a - np.einsum("ij,ij->i", a, un)[:, None] * un
        b = b - np.einsum("ij,ij->i", b, un)[:, None] * un
        cr = np.cross(a, b)
        out[:, slot] = np.arctan2(np.linalg.norm(cr, axis=1),
                                  np.einsum("ij,ij->i", a, b))
    return out


def regular_simplex_volume(dim: int, edge: float = 1.0) -> float:
    return math.sqrt((dim + 1) / 2.0 ** dim) / math.factorial(dim) * edge ** dim


def random_realizable_simplex(rng: np.random.Generator, dim: int,
                              quality: float = 0.2) -> MetricSimplex:
    """Random well-conditioned metric simplex (rejection sampling on points).

    ``quality`` is the minimum volume relative to the regular simplex with
    the same longest edge; slivers make finite differences of volumes and
    angles untrustworthy, so tests reject them.
    """
    while True:
        pts = rng.uniform(-1.0, 1.0, size=(dim + 1, dim))
        E = pts[1:] - pts[0]
        vol = abs(float(np.linalg.det(E))) / math.factorial(dim)
        lmax = max(float(np.linalg.norm(pts[i] - pts[j]))
                   for i in range(dim + 1) for j in range(i + 1, dim + 1))
        if vol > quality * regular_simplex_volume(dim, lmax):
            return MetricSimplex.from_points(pts)
