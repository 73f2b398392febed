"""Discrete total scalar curvature: the Regge functional, its exact
gradient, and relaxation toward flat metrics.

F(c) sums deficit times codimension-2 volume over the singular set; its
first variation has no angle-derivative term (the Schlaefli identity
cancels it), so the exact gradient only needs volume derivatives.  In
dimension 3 the gradient at an edge is the deficit of that edge.

The relaxation solver descends the squared-deficit energy
E = sum K_Q^2 vol(Q) -- flat metrics are its global minima, while F
itself is scale-degenerate with saddle critical points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .complexes import CurvatureTable, PolyhedralMetric, cone_angles
from .errors import StallError, UnrealizableMetric, UnrealizableStep
from .geom import (
    TET_EDGE_SLOTS,
    MetricSimplex,
    dihedral_angle,
    simplex_volume_gradient,
    tetra_dihedral_angles_batch,
)

TWO_PI = 2.0 * math.pi

Edge = tuple[int, int]


def regge_functional(c: PolyhedralMetric,
                     table: CurvatureTable | None = None) -> float:
    """Total scalar curvature: sum of deficit * volume over codim-2 faces."""
    if table is None:
        table = cone_angles(c)
    return float(sum(r.deficit * r.volume for r in table))


def regge_gradient(c: PolyhedralMetric,
                   table: CurvatureTable | None = None) -> dict[Edge, float]:
    """Exact derivative of the Regge functional with respect to edge lengths.

    dF = sum over codim-2 faces of K_Q d vol(Q); in dimension 3 the
    component at edge e is exactly the deficit K_e.
    """
    if table is None:
        table = cone_angles(c)
    grad: dict[Edge, float] = {e: 0.0 for e in c.complex.edges()}
    if c.complex.dim == 3:
        for r in table:
            grad[r.face] = r.deficit
        return grad
    if c.complex.dim == 2:
        return grad  # vertex volumes do not depend on lengths
    for r in table:
        face = r.face
        vol_grad = simplex_volume_gradient(c.face_simplex(face))
        for (a, b), g in vol_grad.items():
            ia, ib = face[a], face[b]
            key = (ia, ib) if ia < ib else (ib, ia)
            grad[key] += r.deficit * g
    return grad


# ---------------------------------------------------------------------------
# relaxation


@dataclass(frozen=True)
class RelaxationStep:
    iteration: int
    energy: float
    max_abs_deficit: float
    total_volume: float


@dataclass
class RelaxationResult:
    metric: PolyhedralMetric
    steps: list[RelaxationStep] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    rejected_steps: int = 0

    @property
    def final_energy(self) -> float:
        return self.steps[-1].energy if self.steps else math.nan

    @property
    def final_max_deficit(self) -> float:
        return self.steps[-1].max_abs_deficit if self.steps else math.nan


class _ConeAngleEngine:
    """Deficits, volumes, and energy of a metric as functions of the edge
    length vector, with a finite-difference Jacobian of the dihedral
    angles per top simplex.  Dimension 3 runs on batched arrays."""

    def __init__(self, c: PolyhedralMetric):
        complex_ = c.complex
        self.dim = complex_.dim
        self.edges = complex_.edges()
        self.edge_index = {e: k for k, e in enumerate(self.edges)}
        self.codim2 = complex_.faces(self.dim - 2)
        self.codim2_index = {f: k for k, f in enumerate(self.codim2)}
        self.tops = complex_.top_simplices
        # per top simplex: global edge ids of its local edges, and the
        # (local codim-2 face, global codim-2 id) list
        self.top_edges = []
        self.top_faces = []
        for top in self.tops:
            k = len(top)
            pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
            self.top_edges.append([self.edge_index[
                (top[a], top[b]) if top[a] < top[b] else (top[b], top[a])]
                for a, b in pairs])
            local_faces = []
            for lf in itertools.combinations(range(k), k - 2):
                gf = tuple(sorted(top[v] for v in lf))
                local_faces.append((lf, self.codim2_index[gf]))
            self.top_faces.append(local_faces)
        if self.dim == 3:
            self.tet_edges = np.array(self.top_edges)  # (T, 6)
            # dihedral slot k of TET_EDGE_SLOTS belongs to local edge k;
            # map each slot to the global codim-2 (edge) id
            self.tet_face_ids = self.tet_edges

    # -- dimension 3, batched -----------------------------------------

    def _deficits_3d(self, ell: np.ndarray) -> np.ndarray | None:
        A = tetra_dihedral_angles_batch(ell[self.tet_edges])
        if np.any(np.isnan(A)):
            return None
        theta = np.zeros(len(self.edges))
        np.add.at(theta, self.tet_face_ids, A)
        return TWO_PI - theta

    def energy_3d(self, ell: np.ndarray) -> tuple[float, np.ndarray] | None:
        K = self._deficits_3d(ell)
        if K is None:
            return None
        return float(np.sum(K * K * ell)), K

    def energy_gradient_3d(self, ell: np.ndarray, K: np.ndarray,
                           h: float) -> np.ndarray:
        # dE/dl_f = K_f^2 - 2 sum_e K_e l_e sum_{T,slot) dalpha/dl_f
        L = ell[self.tet_edges]
        weight = 2.0 * (K * ell)[self.tet_face_ids]  # (T, 6)
        grad = K * K
        for s in range(6):
            Lp = L.copy()
            Lm = L.copy()
            Lp[:, s] += h
            Lm[:, s] -= h
            dA = (tetra_dihedral_angles_batch(Lp)
                  - tetra_dihedral_angles_batch(Lm)) / (2.0 * h)
            contrib = -np.einsum("tq,tq->t", weight, dA)
            np.add.at(grad, self.tet_edges[:, s], contrib)
        return grad

    def volume_3d(self, ell: np.ndarray) -> float:
        from .geom import tetra_volumes_batch
        return float(np.nansum(tetra_volumes_batch(ell[self.tet_edges])))

    # -- generic (any dimension), per-simplex loops --------------------

    def _top_angles(self, ell: np.ndarray, ti: int) -> list[float] | None:
        top = self.tops[ti]
        k = len(top)
        pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
        lens = {pairs[j]: float(ell[self.top_edges[ti][j]])
                for j in range(len(pairs))}
        try:
            ms = MetricSimplex(self.dim, lens)
        except UnrealizableMetric:
            return None
        return [dihedral_angle(ms, lf) for lf, _ in self.top_faces[ti]]

    def deficits_generic(self, ell: np.ndarray) -> np.ndarray | None:
        theta = np.zeros(len(self.codim2))
        for ti in range(len(self.tops)):
            angles = self._top_angles(ell, ti)
            if angles is None:
                return None
            for (_, fid), a in zip(self.top_faces[ti], angles):
                theta[fid] += a
        return TWO_PI - theta

    def face_volumes_generic(self, ell: np.ndarray, c: PolyhedralMetric):
        vols = np.empty(len(self.codim2))
        grads: list[dict[int, float]] = []
        for fi, face in enumerate(self.codim2):
            if len(face) == 1:
                vols[fi] = 1.0
                grads.append({})
                continue
            k = len(face) - 1
            lens = {}
            gmap = {}
            for a in range(k + 1):
                for b in range(a + 1, k + 1):
                    e = (face[a], face[b]) if face[a] < face[b] \
                        else (face[b], face[a])
                    lens[(a, b)] = float(ell[self.edge_index[e]])
                    gmap[(a, b)] = self.edge_index[e]
            ms = MetricSimplex(k, lens, validate=False)
            from .geom import simplex_volume
            vols[fi] = simplex_volume(ms)
            grads.append({gmap[p]: g for p, g in
                          simplex_volume_gradient(ms).items()})
        return vols, grads

    def energy_generic(self, ell: np.ndarray,
                       c: PolyhedralMetric) -> tuple[float, np.ndarray] | None:
        K = self.deficits_generic(ell)
        if K is None:
            return None
        vols, _ = self.face_volumes_generic(ell, c)
        return float(np.sum(K * K * vols)), K

    def energy_gradient_generic(self, ell: np.ndarray, K: np.ndarray,
                                c: PolyhedralMetric, h: float) -> np.ndarray:
        vols, vol_grads = self.face_volumes_generic(ell, c)
        grad = np.zeros(len(self.edges))
        for fi in range(len(self.codim2)):
            for ei, g in vol_grads[fi].items():
                grad[ei] += K[fi] ** 2 * g
        # angle Jacobian by central differences, per top simplex
        for ti in range(len(self.tops)):
            eids = self.top_edges[ti]
            fids = [fid for _, fid in self.top_faces[ti]]
            w = 2.0 * K[fids] * vols[fids]
            for j, ei in enumerate(eids):
                ep = ell.copy()
                em = ell.copy()
                ep[ei] += h
                em[ei] -= h
                ap = self._top_angles(ep, ti)
                am = self._top_angles(em, ti)
                if ap is None or am is None:
                    raise UnrealizableStep(
                        "finite-difference step left the realizable set")
                dA = (np.asarray(ap) - np.asarray(am)) / (2.0 * h)
                grad[ei] -= float(np.dot(w, dA))
        return grad


def regge_relax(c: PolyhedralMetric, tolerance: float = 1e-6,
                max_iters: int = 10_000, volume_normalization: bool = False,
                initial_step: float | None = None,
                record_every: int = 1) -> RelaxationResult:
    """Descend E = sum K_Q^2 vol(Q) by gradient steps with backtracking.

    Steps use a Barzilai-Borwein initial step length, halved until the
    energy decreases and the metric stays realizable.  Optionally rescales
    all lengths after each step to hold the total volume fixed.  Stops
    when max |K_Q| < tolerance or after ``max_iters`` iterations; raises
    :class:`StallError` (carrying the partial result) if the line search
    cannot make progress.
    """
    engine = _ConeAngleEngine(c)
    dim = c.complex.dim
    edges = engine.edges
    ell = np.array([c.lengths[e] for e in edges])
    target_volume = c.total_volume()

    def evaluate(x):
        if np.any(x <= 0.0):
            return None
        if dim == 3:
            return engine.energy_3d(x)
        return engine.energy_generic(x, c)

    def gradient(x, K):
        h = 1e-6 * float(np.mean(x))
        if dim == 3:
            return engine.energy_gradient_3d(x, K, h)
        return engine.energy_gradient_generic(x, K, c, h)

    def volume(x):
        if dim == 3:
            return engine.volume_3d(x)
        return c.with_lengths(dict(zip(edges, x))).total_volume()

    def renormalize(x):
        if not volume_normalization:
            return x
        v = volume(x)
        return x * (target_volume / v) ** (1.0 / dim)

    def make_metric(x) -> PolyhedralMetric:
        return c.with_lengths({e: float(v) for e, v in zip(edges, x)})

    result = RelaxationResult(metric=c)
    state = evaluate(ell)
    if state is None:
        raise UnrealizableMetric("starting metric is not realizable")
    energy, K = state
    maxdef = float(np.max(np.abs(K)))
    result.steps.append(RelaxationStep(0, energy, maxdef, volume(ell)))
    if maxdef < tolerance:
        result.metric = make_metric(ell)
        result.converged = True
        return result

    prev_ell = None
    prev_grad = None
    step = initial_step
    for it in range(1, max_iters + 1):
        grad = gradient(ell, K)
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            break
        if prev_grad is not None:
            d_ell = ell - prev_ell
            d_grad = grad - prev_grad
            denom = float(np.dot(d_ell, d_grad))
            step = (float(np.dot(d_ell, d_ell)) / denom
                    if denom > 0 else 1.0 / gnorm)
        elif step is None:
            step = 0.1 * float(np.mean(ell)) / gnorm
        prev_ell = ell.copy()
        prev_grad = grad

        accepted = False
        t = step
        for _ in range(60):
            cand = renormalize(ell - t * grad)
            state = evaluate(cand)
            if state is not None and state[0] < energy - 1e-4 * t * gnorm ** 2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            result.metric = make_metric(ell)
            result.iterations = it - 1
            raise StallError(
                f"line search stalled at iteration {it} "
                f"(energy {energy:.3e}, max deficit {maxdef:.3e})",
                result=result)
        ell = cand
        energy, K = state
        maxdef = float(np.max(np.abs(K)))
        if it % record_every == 0 or maxdef < tolerance or it == max_iters:
            result.steps.append(RelaxationStep(it, energy, maxdef, volume(ell)))
        if maxdef < tolerance:
            result.converged = True
            result.iterations = it
            break
        result.iterations = it

    result.metric = make_metric(ell)
    return result
