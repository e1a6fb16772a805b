"""Candidate-solution representation: 128 reals decoding to an LQT/CQT pair.

Genotypes stay continuous so real-coded variation operators are unbiased;
integrality appears only at decode time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec.stream import QuantTables
from .codec.transform import round_half_away


@dataclass(frozen=True)
class Bounds:
    lower: float = 1.0
    upper: float = 255.0
    dimension: int = 128

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("lower bound must be below upper bound")


DEFAULT_BOUNDS = Bounds()

# Standard luminance/chrominance tables (the fixed defaults every mainstream
# encoder ships); the search baseline.
ANNEX_K_LUMA = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int32,
)

ANNEX_K_CHROMA = np.array(
    [
        [17, 18, 24, 47, 99, 99, 99, 99],
        [18, 21, 26, 66, 99, 99, 99, 99],
        [24, 26, 56, 99, 99, 99, 99, 99],
        [47, 66, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
    ],
    dtype=np.int32,
)


def annex_k_baseline() -> QuantTables:
    """The standard table pair used by the deterministic baseline encoder."""
    return QuantTables(ANNEX_K_LUMA.copy(), ANNEX_K_CHROMA.copy())


def decode(genotype: np.ndarray) -> QuantTables:
    """Round half away from zero, clamp to [1, 255]; positions 0-63 form the
    LQT row-major, 64-127 the CQT.  Total for any real-valued input."""
    g = np.asarray(genotype, dtype=np.float64)
    if g.shape != (128,):
        raise ValueError(f"genotype must have 128 values, got shape {g.shape}")
    entries = np.clip(round_half_away(g), 1, 255).astype(np.int32)
    return QuantTables(entries[:64].reshape(8, 8), entries[64:].reshape(8, 8))


def as_genotype(tables: QuantTables) -> np.ndarray:
    """Embed integer tables back into genotype space (decode round-trips)."""
    return np.concatenate([tables.lqt.ravel(), tables.cqt.ravel()]).astype(np.float64)


def random_population(n: int, bounds: Bounds = DEFAULT_BOUNDS, rng: np.random.Generator | None = None) -> np.ndarray:
    """(n, dimension) array of i.i.d. uniform genotypes within bounds."""
    if n < 1:
        raise ValueError(f"population size must be >= 1, got {n}")
    if rng is None:
        rng = np.random.default_rng()
    return rng.uniform(bounds.lower, bounds.upper, size=(n, bounds.dimension))


def quality_scale(tables: QuantTables, q: int) -> QuantTables:
    """Conventional linear quality scaling of a base table pair.

    scale = 5000/q below 50 else 200 - 2q; each entry becomes
    clamp((base*scale + 50) // 100, 1, 255), so q=50 is the identity and
    q=100 collapses to all-ones.
    """
    if not 1 <= q <= 100:
        raise ValueError(f"quality must be in [1, 100], got {q}")
    scale = 5000 // q if q < 50 else 200 - 2 * q
    def apply(base):
        scaled = (base.astype(np.int64) * scale + 50) // 100
        return np.clip(scaled, 1, 255).astype(np.int32)
    return QuantTables(apply(tables.lqt), apply(tables.cqt))
