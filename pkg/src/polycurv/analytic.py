"""Analytic smooth-geometry oracles and convergence experiments.

Closed-form total curvatures of model curves, exact area/curvature totals
of model surfaces, and report builders that pit the discrete quantities
against their smooth limits over a refinement schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curves import inscribed_total_curvature
from .shapes import icosphere
from .surfaces import gauss_bonnet_check, total_mean_curvature

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class AnalyticCurve:
    """Parametrized curve with a closed-form total curvature."""

    name: str
    sampler: Callable[[float], np.ndarray]
    domain: tuple[float, float]
    closed: bool
    total_curvature: float
    dim: int

    def grid(self, n: int) -> np.ndarray:
        """Parameter grid with n points.

        Closed curves get a uniform grid over one period (endpoint
        excluded; the polygon closes itself).  Open curves get a
        smoothstep-clustered grid: the endpoints of an open curve carry
        no turning angle, so clustering there recovers the quadratic
        convergence of the inscribed-polygon supremum.
        """
        a, b = self.domain
        if self.closed:
            return np.linspace(a, b, n, endpoint=False)
        s = np.linspace(0.0, 1.0, n)
        return a + (b - a) * (3.0 * s ** 2 - 2.0 * s ** 3)

    def inscribed_total_curvature(self, n: int) -> float:
        return inscribed_total_curvature(self.sampler, self.grid(n),
                                         closed=self.closed)


def circle(radius: float = 1.0) -> AnalyticCurve:
    def f(t: float) -> np.ndarray:
        return np.array([radius * math.cos(t), radius * math.sin(t)])

    return AnalyticCurve("circle", f, (0.0, TWO_PI), True, TWO_PI, 2)


def ellipse(a: float = 2.0, b: float = 1.0) -> AnalyticCurve:
    def f(t: float) -> np.ndarray:
        return np.array([a * math.cos(t), b * math.sin(t)])

    # any simple closed convex plane curve has total curvature 2*pi
    return AnalyticCurve("ellipse", f, (0.0, TWO_PI), True, TWO_PI, 2)


def helix(pitch: float = 1.0, turns: float = 1.0) -> AnalyticCurve:
    def f(t: float) -> np.ndarray:
        return np.array([math.cos(t), math.sin(t), pitch * t])

    # kappa = 1/(1+h^2) on length 2*pi*turns*sqrt(1+h^2)
    total = TWO_PI * turns / math.sqrt(1.0 + pitch * pitch)
    return AnalyticCurve("helix", f, (0.0, TWO_PI * turns), False, total, 3)


def builtin_curves() -> dict[str, AnalyticCurve]:
    return {c.name: c for c in (circle(), ellipse(), helix())}


@dataclass(frozen=True)
class AnalyticSurfaceOracle:
    """Closed-form totals for a model smooth surface."""

    name: str
    analytic_area: float
    analytic_total_mean_curvature: float
    analytic_total_gauss: float
    euler_characteristic: int

    def __post_init__(self):
        expected = TWO_PI * self.euler_characteristic
        if abs(self.analytic_total_gauss - expected) > 1e-9:
            raise ValueError("total Gauss curvature must equal 2*pi*chi")


def sphere_oracle(radius: float = 1.0) -> AnalyticSurfaceOracle:
    return AnalyticSurfaceOracle(
        name=f"sphere(R={radius})",
        analytic_area=FOUR_PI * radius ** 2,
        analytic_total_mean_curvature=FOUR_PI * radius,
        analytic_total_gauss=FOUR_PI,
        euler_characteristic=2,
    )


def torus_oracle(R: float = 2.0, r: float = 0.5) -> AnalyticSurfaceOracle:
    return AnalyticSurfaceOracle(
        name=f"torus(R={R},r={r})",
        analytic_area=FOUR_PI * math.pi * R * r,
        analytic_total_mean_curvature=2.0 * math.pi ** 2 * R,
        analytic_total_gauss=0.0,
        euler_characteristic=0,
    )


# ---------------------------------------------------------------------------
# convergence reports


@dataclass(frozen=True)
class ConvergenceRow:
    refinement: float
    discrete: float
    analytic: float
    abs_err: float
    rel_err: float


@dataclass(frozen=True)
class ConvergenceReport:
    quantity: str
    rows: tuple[ConvergenceRow, ...]
    monotone: bool   # errors decrease along the schedule

    def __iter__(self):
        return iter(self.rows)

    def final_rel_err(self) -> float:
        return self.rows[-1].rel_err


def convergence_report(quantity: str, discrete: Callable[[float], float],
                       analytic: float, schedule: Sequence[float]) -> ConvergenceReport:
    """Evaluate a discrete quantity along a refinement schedule.

    The report records absolute and relative errors against the analytic
    value and whether the error decreases monotonically; non-monotone
    schedules are flagged, not rejected.
    """
    rows = []
    for param in schedule:
        value = float(discrete(param))
        err = abs(value - analytic)
        rows.append(ConvergenceRow(
            refinement=float(param), discrete=value, analytic=analytic,
            abs_err=err,
            rel_err=err / abs(analytic) if analytic != 0.0 else math.inf))
    errors = [r.abs_err for r in rows]
    monotone = all(b <= a for a, b in zip(errors, errors[1:]))
    return ConvergenceReport(quantity=quantity, rows=tuple(rows),
                             monotone=monotone)


def icosphere_mean_curvature_report(levels: Sequence[int] = (1, 2, 3, 4, 5),
                                    radius: float = 1.0) -> ConvergenceReport:
    oracle = sphere_oracle(radius)
    return convergence_report(
        "total_mean_curvature(icosphere)",
        lambda level: total_mean_curvature(icosphere(radius, int(level))),
        oracle.analytic_total_mean_curvature, list(levels))


def icosphere_area_report(levels: Sequence[int] = (1, 2, 3, 4, 5),
                          radius: float = 1.0) -> ConvergenceReport:
    oracle = sphere_oracle(radius)
    return convergence_report(
        "area(icosphere)",
        lambda level: icosphere(radius, int(level)).surface_area(),
        oracle.analytic_area, list(levels))


def icosphere_gauss_report(levels: Sequence[int] = (0, 1, 2, 3),
                           radius: float = 1.0) -> ConvergenceReport:
    oracle = sphere_oracle(radius)
    return convergence_report(
        "total_defect(icosphere)",
        lambda level: gauss_bonnet_check(icosphere(radius, int(level))).total_defect,
        oracle.analytic_total_gauss, list(levels))


def helix_curvature_report(ns: Sequence[int] = (10, 100, 1000, 10_000),
                           pitch: float = 1.0) -> ConvergenceReport:
    curve = helix(pitch)
    return convergence_report(
        "inscribed_total_curvature(helix)",
        lambda n: curve.inscribed_total_curvature(int(n)),
        curve.total_curvature, list(ns))


def circle_curvature_report(ns: Sequence[int] = (3, 10, 100)) -> ConvergenceReport:
    curve = circle()
    return convergence_report(
        "inscribed_total_curvature(circle)",
        lambda n: curve.inscribed_total_curvature(int(n)),
        curve.total_curvature, list(ns))


EXPERIMENTS: dict[str, Callable[[Sequence[float]], ConvergenceReport]] = {
    "icosphere-mean-curvature": icosphere_mean_curvature_report,
    "icosphere-area": icosphere_area_report,
    "icosphere-gauss": icosphere_gauss_report,
    "helix-curvature": helix_curvature_report,
    "circle-curvature": circle_curvature_report,
}
