"""Curvature of planar and space polygons.

Signed turning angles and the turning number in the plane; nonnegative
turning angles, total curvature and the Fenchel bound in space; the
tangent indicatrix, the open-hemisphere test, great-circle (Crofton)
length estimation, and inscribed-polygon total curvature for curves.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .config import Tolerances, resolve
from .errors import DegenerateVertex, NotClosedToMultiple, ReversalVertex
from .geom import SphericalPolygon, angle_between, open_hemisphere_witness_points
from .montecarlo import DEFAULT_SEED, EstimateWithError

TWO_PI = 2.0 * math.pi


class PlanarPolygon:
    """Closed vertex cycle in the plane; consecutive vertices distinct and
    the direction never reverses exactly."""

    def __init__(self, vertices, tol: Tolerances | None = None):
        tol = resolve(tol)
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
            raise ValueError("expected at least 3 vertices in R^2")
        self.vertices = V
        self._tol = tol
        _signed_turning(V, tol)  # validates: raises on degeneracy/reversal

    def __len__(self) -> int:
        return len(self.vertices)

    def reversed(self) -> "PlanarPolygon":
        return PlanarPolygon(self.vertices[::-1], tol=self._tol)


class SpacePolygon:
    """Vertex polyline in R^3 (closed by default; indices wrap modulo n)."""

    def __init__(self, vertices, closed: bool = True, tol: Tolerances | None = None):
        tol = resolve(tol)
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 3 or len(V) < 3:
            raise ValueError("expected at least 3 vertices in R^3")
        self.vertices = V
        self.closed = bool(closed)
        self._tol = tol
        _space_turning(V, self.closed, tol)  # validates

    def __len__(self) -> int:
        return len(self.vertices)


def _edge_vectors(V: np.ndarray, closed: bool, tol: Tolerances) -> np.ndarray:
    nxt = np.roll(V, -1, axis=0) if closed else V[1:]
    cur = V if closed else V[:-1]
    E = nxt - cur
    scale = max(float(np.max(np.abs(V)) - np.min(V)), 1.0)
    norms = np.linalg.norm(E, axis=1)
    small = norms < tol.eps_degenerate * scale
    if np.any(small):
        i = int(np.argmax(small))
        raise DegenerateVertex(f"vertices {i} and {i + 1} coincide", index=i)
    return E


def _signed_turning(V: np.ndarray, tol: Tolerances) -> np.ndarray:
    E = _edge_vectors(V, closed=True, tol=tol)
    prev = np.roll(E, 1, axis=0)
    cross = prev[:, 0] * E[:, 1] - prev[:, 1] * E[:, 0]
    dot = np.einsum("ij,ij->i", prev, E)
    angles = np.arctan2(cross, dot)
    bad = np.abs(angles) >= math.pi - tol.eps_angle
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ReversalVertex(f"direction reverses at vertex {i}", index=i)
    return angles


def _space_turning(V: np.ndarray, closed: bool, tol: Tolerances) -> np.ndarray:
    E = _edge_vectors(V, closed, tol)
    if closed:
        prev = np.roll(E, 1, axis=0)
        pairs = zip(prev, E)
    else:
        pairs = zip(E[:-1], E[1:])
    angles = np.array([angle_between(a, b, tol) for a, b in pairs])
    bad = angles >= math.pi - tol.eps_angle
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ReversalVertex(f"direction reverses at vertex {i}", index=i)
    return angles


def signed_turning_angles(p: PlanarPolygon) -> np.ndarray:
    """Signed turning angle at each vertex, in (-pi, pi); positive = left turn."""
    return _signed_turning(p.vertices, p._tol)


def turning_number(p: PlanarPolygon) -> int:
    """Total signed turning divided by 2*pi, verified to be near an integer."""
    total = float(signed_turning_angles(p).sum())
    k = round(total / TWO_PI)
    if abs(total - TWO_PI * k) > p._tol.eps_turning:
        raise NotClosedToMultiple(
            f"total turning {total!r} is not a multiple of 2*pi")
    return int(k)


def turning_angles(p: SpacePolygon) -> np.ndarray:
    """Nonnegative turning angles (pi minus the interior vertex angle).

    For open polygons only interior vertices contribute.
    """
    return _space_turning(p.vertices, p.closed, p._tol)


class TotalCurvature(NamedTuple):
    total: float
    fenchel_equality: bool


def total_curvature(p: SpacePolygon, tol: Tolerances | None = None) -> TotalCurvature:
    """Sum of turning angles, with a flag for the equality case total = 2*pi.

    Equality holds exactly for planar convex polygons (Fenchel bound).
    """
    tol = resolve(tol) if tol is not None else p._tol
    if not p.closed:
        raise ValueError("total curvature with the Fenchel flag needs a closed polygon")
    total = float(turning_angles(p).sum())
    return TotalCurvature(total, abs(total - TWO_PI) <= tol.eps_turning)


def tangent_indicatrix(p: SpacePolygon) -> SphericalPolygon:
    """Spherical polygon of the normalized edge directions of ``p``."""
    E = _edge_vectors(p.vertices, p.closed, p._tol)
    return SphericalPolygon.from_directions(E, closed=p.closed, tol=p._tol)


def open_hemisphere_witness(s: SphericalPolygon) -> np.ndarray | None:
    """A direction whose open hemisphere contains all vertices, if one exists.

    The indicatrix of a closed polygon never has one: the weighted edge
    directions sum to zero.
    """
    return open_hemisphere_witness_points(s.vertices, s._tol)


def crofton_length_estimate(s: SphericalPolygon, samples: int = 1_000_000,
                            seed: int = DEFAULT_SEED) -> EstimateWithError:
    """Length of a spherical polygon as pi times the mean number of
    intersections with random great circles.

    Circles are sampled through uniform poles (normalized Gaussians); an
    arc is crossed when the endpoint inner products with the pole change
    sign.  Poles nearly orthogonal to a vertex are resampled.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    V = s.vertices
    pairs = s.arc_pairs()
    ii = np.array([i for i, _ in pairs])
    jj = np.array([j for _, j in pairs])
    rng = np.random.default_rng(seed)
    counts = np.empty(samples)
    filled = 0
    chunk = 1 << 16
    tie = 1e-12
    while filled < samples:
        m = min(chunk, samples - filled)
        dirs = rng.standard_normal((m, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        ips = dirs @ V.T
        ok = np.all(np.abs(ips) >= tie, axis=1)
        while not np.all(ok):
            bad = ~ok
            nb = int(bad.sum())
            redraw = rng.standard_normal((nb, 3))
            redraw /= np.linalg.norm(redraw, axis=1)[:, None]
            dirs[bad] = redraw
            ips[bad] = redraw @ V.T
            ok = np.all(np.abs(ips) >= tie, axis=1)
        crossings = (ips[:, ii] * ips[:, jj]) < 0.0
        counts[filled:filled + m] = crossings.sum(axis=1)
        filled += m
    mean = math.pi * float(counts.mean())
    stderr = math.pi * float(counts.std(ddof=1)) / math.sqrt(samples)
    return EstimateWithError(mean=mean, stderr=stderr, samples=samples, seed=seed)


def inscribed_total_curvature(sampler: Callable[[float], np.ndarray], ts,
                              closed: bool = True,
                              tol: Tolerances | None = None) -> float:
    """Total curvature of the polygon inscribed at parameters ``ts``.

    ``sampler`` maps a parameter to a point in R^2 or R^3.  For closed
    curves the grid must cover one period without repeating the endpoint;
    the polygon closes itself.
    """
    tol = resolve(tol)
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or len(ts) < 3:
        raise ValueError("need a grid of at least 3 parameters")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("parameter grid must be strictly increasing")
    pts = np.array([np.asarray(sampler(float(t)), dtype=float) for t in ts])
    return float(_space_turning(pts, closed, tol).sum())
