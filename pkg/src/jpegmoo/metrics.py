"""Quality indicators and statistics for comparing runs: exact 2-D
hypervolume, front selection by weighted sum, Pearson correlation, the
Wilcoxon signed-rank test (exact for small n), and ranking tables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .objectives import Weights


def hypervolume_2d(points: np.ndarray, ref: tuple[float, float]) -> float:
    """Exact area dominated by ``points`` and bounded by ``ref`` (minimization).

    Points with any coordinate at or beyond the reference contribute nothing.
    Sort-and-sweep over the staircase of non-dominated rectangles.
    """
    r1, r2 = float(ref[0]), float(ref[1])
    if not (math.isfinite(r1) and math.isfinite(r2)):
        raise ValueError(f"reference point must be finite, got {ref}")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    inside = (pts[:, 0] < r1) & (pts[:, 1] < r2)
    pts = pts[inside]
    if len(pts) == 0:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))  # by f1 asc, then f2 asc
    area = 0.0
    best_f2 = r2
    for i in order:
        f1, f2 = pts[i]
        if f2 < best_f2:
            area += (r1 - f1) * (best_f2 - f2)
            best_f2 = f2
    return area


def pf_select(points: np.ndarray, weights: Weights = Weights()) -> int:
    """Index of the front member minimizing w1*f1 + w2*f2; ties take the
    smallest f1 (the smaller file)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("cannot select from an empty front")
    combined = weights.w1 * pts[:, 0] + weights.w2 * pts[:, 1]
    best = combined.min()
    candidates = np.flatnonzero(combined == best)
    return int(candidates[np.argmin(pts[candidates, 0])])


def pearson(x, y) -> float:
    """Sample Pearson correlation; pairs with a non-finite member are dropped."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if len(x) < 2:
        raise ValueError(f"need at least 2 finite pairs, got {len(x)}")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ValueError("correlation undefined for a constant sequence")
    xc = x - x.mean()
    yc = y - y.mean()
    return float((xc @ yc) / math.sqrt((xc @ xc) * (yc @ yc)))


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float   # min(W+, W-)
    pvalue: float      # two-sided
    n: int             # pairs after dropping zero differences
    exact: bool


def _exact_signed_rank_p(ranks: np.ndarray, w_plus: float) -> float:
    """Two-sided p over all 2^n sign assignments via subset-sum counting.

    Ranks are doubled so tied (half-integer) average ranks stay integral.
    """
    d2 = np.rint(2.0 * ranks).astype(np.int64)
    total = int(d2.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for w in d2:
        shifted = np.zeros_like(counts)
        shifted[w:] = counts[: total + 1 - w]
        counts += shifted
    t_obs = int(round(2.0 * w_plus))
    center = total / 2.0
    extremity = abs(t_obs - center)
    sums = np.arange(total + 1)
    mass = counts[np.abs(sums - center) >= extremity - 1e-9].sum()
    return min(1.0, mass / counts.sum())


def wilcoxon_signed_rank(a, b, exact_limit: int = 25) -> WilcoxonResult:
    """Paired two-sided Wilcoxon signed-rank test.

    Zero differences are discarded; tied absolute differences get average
    ranks.  Uses the exact null distribution up to ``exact_limit`` pairs, and
    a normal approximation with continuity and tie corrections above."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"paired samples must have equal length: {a.shape} vs {b.shape}")
    d = a - b
    d = d[d != 0]
    n = len(d)
    if n == 0:
        raise ValueError("all differences are zero; test is degenerate")
    ranks = stats.rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    if n <= exact_limit:
        p = _exact_signed_rank_p(ranks, w_plus)
        return WilcoxonResult(w, p, n, exact=True)
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = ((tie_counts**3 - tie_counts).sum()) / 48.0
    sd = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
    z = (w - mean + 0.5) / sd
    p = min(1.0, 2.0 * stats.norm.cdf(z))
    return WilcoxonResult(w, p, n, exact=False)


@dataclass
class RankTable:
    image_names: list[str]
    algorithm_names: list[str]
    per_image_ranks: np.ndarray   # (n_images, n_algorithms), 1 = smallest mean
    average_rank: np.ndarray      # (n_algorithms,)
    overall_rank: np.ndarray      # (n_algorithms,), ties share fractional rank


def rank_table(means: np.ndarray, image_names, algorithm_names) -> RankTable:
    """Rank algorithms per image by mean objective (1 = best), then average
    the ranks across images and rank those averages."""
    means = np.asarray(means, dtype=np.float64)
    if means.ndim != 2:
        raise ValueError(f"means must be 2-D (images x algorithms), got {means.shape}")
    if means.shape != (len(image_names), len(algorithm_names)):
        raise ValueError("means shape does not match the name lists")
    if not np.isfinite(means).all():
        raise ValueError("means matrix has missing or non-finite entries")
    per_image = np.vstack([stats.rankdata(row, method="average") for row in means])
    average = per_image.mean(axis=0)
    overall = stats.rankdata(average, method="average")
    return RankTable(list(image_names), list(algorithm_names), per_image, average, overall)
