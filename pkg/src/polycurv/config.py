"""Numerical tolerances, overridable per call site."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle used throughout the package.

    Degeneracy thresholds are understood relative to the scale of the
    object at hand (bounding size, largest edge, ...), not absolutely.
    """

    eps_unit: float = 1e-9         # |norm - 1| bound for unit vectors
    eps_degenerate: float = 1e-12  # relative degeneracy threshold
    eps_embed: float = 1e-9        # length reproduction bound after embedding
    eps_angle: float = 1e-9        # exclusion zone around turning angle pi
    eps_turning: float = 1e-8      # distance to the nearest multiple of 2*pi
    eps_planar: float = 1e-9       # face planarity, relative to diameter
    eps_convex: float = 1e-9       # supporting-plane slack, relative to diameter

    def updated(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT_TOLERANCES = Tolerances()

#: keys accepted by configuration overrides (CLI --tol, RunConfig)
TOLERANCE_KEYS = tuple(Tolerances.__dataclass_fields__)


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT_TOLERANCES if tol is None else tol
