"""Real-coded variation operators shared by the optimizers.

Every operator clamps its output to the genotype bounds (simple deterministic
repair) and takes an explicit numpy Generator so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from .qtable import Bounds, DEFAULT_BOUNDS


def clamp(x: np.ndarray, bounds: Bounds = DEFAULT_BOUNDS) -> np.ndarray:
    return np.clip(x, bounds.lower, bounds.upper)


def tournament_select(values: np.ndarray, k: int, rng: np.random.Generator) -> int:
    """Index of the best (lowest) value among k members drawn with replacement."""
    n = len(values)
    if n == 0:
        raise ValueError("tournament over an empty population")
    if k < 1:
        raise ValueError(f"tournament size must be >= 1, got {k}")
    idx = rng.integers(0, n, size=k)
    return int(idx[np.argmin(np.asarray(values)[idx])])


def sbx_pair_values(p1, p2, u, eta: float):
    """Closed-form simulated binary crossover for given uniform draw(s) u.

    beta(u) = (2u)^(1/(eta+1)) for u <= 0.5, else (1/(2(1-u)))^(1/(eta+1));
    children are 0.5*((1±beta)p1 + (1∓beta)p2), so u = 0.5 reproduces the
    parents and the child mean always equals the parent mean.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    exponent = 1.0 / (eta + 1.0)
    beta = np.where(u <= 0.5, (2.0 * u) ** exponent, (0.5 / (1.0 - u)) ** exponent)
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1, c2


def sbx_crossover(
    p1: np.ndarray,
    p2: np.ndarray,
    prob: float,
    eta: float,
    bounds: Bounds = DEFAULT_BOUNDS,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """SBX: with probability ``prob`` the pair crosses; within a crossing pair
    each variable participates with probability 1/2 (the real-coded GA
    convention), the rest are copied.  Children are clamped to bounds."""
    if rng is None:
        rng = np.random.default_rng()
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    if rng.random() >= prob:
        return p1.copy(), p2.copy()
    take = rng.random(p1.shape) < 0.5
    u = rng.random(p1.shape)
    x1, x2 = sbx_pair_values(p1, p2, u, eta)
    c1 = np.where(take, x1, p1)
    c2 = np.where(take, x2, p2)
    return clamp(c1, bounds), clamp(c2, bounds)


def polynomial_mutation(
    g: np.ndarray,
    prob: float,
    eta: float,
    bounds: Bounds = DEFAULT_BOUNDS,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Per-variable polynomial mutation with probability ``prob``; the
    perturbation shrinks toward the nearer bound so results stay in range."""
    if rng is None:
        rng = np.random.default_rng()
    x = np.asarray(g, dtype=np.float64).copy()
    mutate = rng.random(x.shape) < prob
    u = rng.random(x.shape)
    span = bounds.upper - bounds.lower
    d1 = np.clip((x - bounds.lower) / span, 0.0, 1.0)
    d2 = np.clip((bounds.upper - x) / span, 0.0, 1.0)
    power = 1.0 / (eta + 1.0)
    low = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)) ** power - 1.0
    high = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)) ** power
    delta = np.where(u < 0.5, low, high)
    x = np.where(mutate, x + delta * span, x)
    return clamp(x, bounds)


def de_mutant(
    r1: np.ndarray,
    r2: np.ndarray,
    r3: np.ndarray,
    sf: float,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> np.ndarray:
    """Difference mutation v = r1 + sf*(r2 - r3), clamped to bounds."""
    v = np.asarray(r1, dtype=np.float64) + sf * (
        np.asarray(r2, dtype=np.float64) - np.asarray(r3, dtype=np.float64)
    )
    return clamp(v, bounds)


def de_crossover(
    target: np.ndarray, mutant: np.ndarray, cr: float, rng: np.random.Generator
) -> np.ndarray:
    """Binomial crossover with one forced index, so the trial always differs
    from the target in at least one gene."""
    target = np.asarray(target, dtype=np.float64)
    mutant = np.asarray(mutant, dtype=np.float64)
    mask = rng.random(target.shape) < cr
    mask[rng.integers(0, len(target))] = True
    return np.where(mask, mutant, target)


def es_offspring(
    parent: np.ndarray,
    sigma: float,
    bounds: Bounds = DEFAULT_BOUNDS,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Gaussian perturbation of every gene, clamped to bounds."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if rng is None:
        rng = np.random.default_rng()
    parent = np.asarray(parent, dtype=np.float64)
    return clamp(parent + rng.normal(0.0, sigma, size=parent.shape), bounds)
