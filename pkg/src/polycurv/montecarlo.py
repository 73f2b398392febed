"""Monte Carlo plumbing: result records, sphere sampling, seed derivation.

Every randomized routine in the package takes an explicit seed and is
deterministic for a fixed seed and sample count.  Sharded runs must split
the sample budget across seeds from :func:`split_seeds` and pool the
shards with :func:`combine_estimates`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: default seed for every randomized command (documented, never wall clock)
DEFAULT_SEED = 0xDD6C


@dataclass(frozen=True)
class EstimateWithError:
    """A Monte Carlo mean with its standard error."""

    mean: float
    stderr: float
    samples: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.samples < 1:
            raise ValueError("samples must be positive")

    def sigmas_from(self, value: float) -> float:
        """Distance from ``value`` in units of the standard error."""
        diff = abs(self.mean - value)
        if self.stderr == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.stderr


@dataclass(frozen=True)
class MCConfig:
    """Sample budget and seed for one Monte Carlo evaluation."""

    samples: int = 200_000
    seed: int = DEFAULT_SEED


def unit_sphere_samples(rng: np.random.Generator, n: int, dim: int = 3) -> np.ndarray:
    """``n`` points uniform on the unit sphere in R^dim (normalized Gaussians)."""
    x = rng.standard_normal((n, dim))
    norms = np.linalg.norm(x, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        x[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(x, axis=1)
    return x / norms[:, None]


def split_seeds(seed: int, n: int) -> list[int]:
    """Derive ``n`` independent child seeds for sharded runs."""
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(n)]


def derived_seed(seed: int, *tokens: int) -> int:
    """Deterministic seed for a labelled subtask (e.g. one normal cone)."""
    entropy = [int(seed)] + [int(t) for t in tokens]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def combine_estimates(parts: Sequence[EstimateWithError],
                      seed: int | None = None) -> EstimateWithError:
    """Pool shard estimates by sample-weighted mean.

    Shards must be statistically independent (distinct seeds); the pooled
    variance is then the weighted sum of the shard variances.
    """
    if not parts:
        raise ValueError("nothing to combine")
    total = sum(p.samples for p in parts)
    mean = sum(p.samples * p.mean for p in parts) / total
    var = sum((p.samples / total) ** 2 * p.stderr ** 2 for p in parts)
    if seed is None:
        seed = parts[0].seed
    return EstimateWithError(mean=mean, stderr=math.sqrt(var), samples=total, seed=seed)
