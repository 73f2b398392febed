"""Discrete Lipschitz-Killing curvatures and the Chern-Gauss-Bonnet check.

The curvature of a face Q is the alternating sum, over all faces T
containing Q (Q itself included), of the normalized external angle of T
at Q.  Whenever every dim T - dim Q is at most 3 the value is exact;
otherwise the codimension >= 4 cones are estimated by seeded Monte Carlo
and the standard errors propagate through the sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .complexes import Face, PolyhedralMetric
from .errors import OddDimension
from .geom import external_angle
from .montecarlo import EstimateWithError, MCConfig, derived_seed


def _cone_config(mc: MCConfig, q: Face, t: Face) -> MCConfig:
    # one deterministic child seed per (face, coface) cone
    seed = derived_seed(mc.seed, len(q), *q, len(t), *t)
    return MCConfig(samples=mc.samples, seed=seed)


def lk_curvature(c: PolyhedralMetric, face,
                 mc: MCConfig | None = None) -> float | EstimateWithError:
    """Normalized curvature at a face: alternating sum of external angles.

    Returns a float when all the cones are exact (codimension <= 3), an
    :class:`EstimateWithError` when Monte Carlo enters.
    """
    mc = mc if mc is not None else MCConfig()
    face = tuple(sorted(face))
    complex_ = c.complex
    total = 0.0
    variance = 0.0
    used_mc = False
    samples = 0
    for t in complex_.cofaces(face):
        sign = (-1.0) ** (len(t) - len(face))
        if t == face:
            total += 1.0  # beta(Q, Q) = 1
            continue
        ms = c.face_simplex(t)
        local = tuple(t.index(v) for v in face)
        beta = external_angle(ms, local, _cone_config(mc, face, t))
        if isinstance(beta, EstimateWithError):
            used_mc = True
            samples = max(samples, beta.samples)
            total += sign * beta.mean
            variance += beta.stderr ** 2
        else:
            total += sign * beta
    if used_mc:
        return EstimateWithError(mean=total, stderr=math.sqrt(variance),
                                 samples=samples, seed=mc.seed)
    return total


@dataclass(frozen=True)
class LKRow:
    face: Face
    curvature: float
    stderr: float          # 0 for exact values
    volume: float


@dataclass(frozen=True)
class LKReport:
    """Total k-th Lipschitz-Killing curvature with its per-face table."""

    k: int
    rows: tuple[LKRow, ...]
    total: float
    stderr: float
    exact: bool

    def __iter__(self):
        return iter(self.rows)


def lk_total(c: PolyhedralMetric, k: int,
             mc: MCConfig | None = None) -> LKReport:
    """S_2k: sum of K_Q vol(Q) over the faces of dimension n - 2k."""
    n = c.complex.dim
    if k < 0 or 2 * k > n:
        raise ValueError(f"k must satisfy 0 <= 2k <= {n}")
    mc = mc if mc is not None else MCConfig()
    rows = []
    total = 0.0
    variance = 0.0
    exact = True
    for face in c.complex.faces(n - 2 * k):
        value = lk_curvature(c, face, mc)
        vol = c.face_volume(face)
        if isinstance(value, EstimateWithError):
            exact = False
            rows.append(LKRow(face, value.mean, value.stderr, vol))
            total += value.mean * vol
            variance += (value.stderr * vol) ** 2
        else:
            rows.append(LKRow(face, value, 0.0, vol))
            total += value * vol
    return LKReport(k=k, rows=tuple(rows), total=total,
                    stderr=math.sqrt(variance), exact=exact)


@dataclass(frozen=True)
class CGBReport:
    """Total vertex curvature against the Euler characteristic."""

    total: float
    stderr: float
    euler_characteristic: int
    residual: float
    exact: bool

    def within(self, n_sigma: float = 3.0, exact_tol: float = 1e-10) -> bool:
        if self.exact:
            return self.residual <= exact_tol
        return self.residual <= n_sigma * self.stderr


def cgb_check(c: PolyhedralMetric, mc: MCConfig | None = None) -> CGBReport:
    """Sum of normalized vertex curvatures versus the Euler characteristic.

    Defined for closed even-dimensional polyhedral manifolds; exact for
    dimension 2, Monte Carlo error bars appear from dimension 4 on.
    """
    n = c.complex.dim
    if n % 2 != 0:
        raise OddDimension(f"dimension {n} is odd; the check needs even dimension")
    mc = mc if mc is not None else MCConfig()
    total = 0.0
    variance = 0.0
    exact = True
    for v in c.complex.vertices():
        value = lk_curvature(c, (v,), mc)
        if isinstance(value, EstimateWithError):
            exact = False
            total += value.mean
            variance += value.stderr ** 2
        else:
            total += value
    chi = c.complex.euler_characteristic()
    return CGBReport(total=total, stderr=math.sqrt(variance),
                     euler_characteristic=chi, residual=abs(total - chi),
                     exact=exact)
