"""Pareto-based evolution over (size ratio, 1/PSNR), both minimized.

Implements fast non-dominated sorting, crowding-distance survival (NSGA-II)
and reference-point niching (NSGA-III); variation reuses the GA operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .metrics import hypervolume_2d
from .objectives import ObjectiveRecord
from .operators import polynomial_mutation, sbx_crossover
from .qtable import random_population
from .scalar import GaConfig, RunBudget, _eval_all


def dominates(a, b) -> bool:
    """True iff a is no worse than b everywhere and strictly better somewhere."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return bool(np.all(a <= b) and np.any(a < b))


@dataclass
class FrontAssignment:
    ranks: np.ndarray            # 1-based front index per member
    fronts: list[np.ndarray]     # member indices per front, in input order


def non_dominated_sort(points: np.ndarray) -> FrontAssignment:
    """Peel successive non-dominated fronts from a point set.

    Front k is the non-dominated subset once fronts 1..k-1 are removed.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    ranks = np.zeros(n, dtype=np.int64)
    if n == 0:
        return FrontAssignment(ranks, [])
    # counts of dominators and lists of dominated members, computed pairwise
    le = (pts[:, None, :] <= pts[None, :, :]).all(axis=2)
    lt = (pts[:, None, :] < pts[None, :, :]).any(axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    n_dominators = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(n_dominators == 0)
    k = 1
    remaining = n
    while len(current):
        ranks[current] = k
        fronts.append(current)
        remaining -= len(current)
        if remaining == 0:
            break
        n_dominators = n_dominators - dom[current].sum(axis=0)
        n_dominators[ranks > 0] = -1  # already assigned
        current = np.flatnonzero(n_dominators == 0)
        k += 1
    return FrontAssignment(ranks, fronts)


def crowding_distance(front_points: np.ndarray) -> np.ndarray:
    """Normalized cuboid side-length sum per member; boundary members get inf,
    objectives with zero range contribute nothing."""
    pts = np.asarray(front_points, dtype=np.float64)
    m = len(pts)
    dist = np.zeros(m)
    if m == 0:
        return dist
    if m <= 2:
        return np.full(m, np.inf)
    for j in range(pts.shape[1]):
        order = np.argsort(pts[:, j], kind="stable")
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = pts[order[-1], j] - pts[order[0], j]
        if span <= 0:
            continue
        gaps = (pts[order[2:], j] - pts[order[:-2], j]) / span
        interior = order[1:-1]
        finite = ~np.isinf(dist[interior])
        dist[interior[finite]] += gaps[finite]
    return dist


def crowded_tournament(rank_a: int, cd_a: float, rank_b: int, cd_b: float, rng) -> int:
    """0 if the first member wins, 1 otherwise: lower rank, then larger
    crowding distance, then a coin flip."""
    if rank_a != rank_b:
        return 0 if rank_a < rank_b else 1
    if cd_a != cd_b:
        return 0 if cd_a > cd_b else 1
    return int(rng.integers(0, 2))


def nsga2_survival(points: np.ndarray, n_survivors: int):
    """Front-by-front fill with crowding-distance truncation of the last front.

    Returns (selected indices, their ranks, their crowding distances).
    """
    assignment = non_dominated_sort(points)
    selected = []
    ranks = []
    cds = []
    for front in assignment.fronts:
        cd = crowding_distance(points[front])
        if len(selected) + len(front) <= n_survivors:
            selected.extend(front.tolist())
            ranks.extend([assignment.ranks[front[0]]] * len(front))
            cds.extend(cd.tolist())
            if len(selected) == n_survivors:
                break
        else:
            room = n_survivors - len(selected)
            order = np.argsort(-cd, kind="stable")[:room]
            selected.extend(front[order].tolist())
            ranks.extend([assignment.ranks[front[0]]] * room)
            cds.extend(cd[order].tolist())
            break
    return np.array(selected), np.array(ranks), np.array(cds)


def das_dennis(m: int, p: int) -> np.ndarray:
    """All simplex-lattice direction vectors with denominator p: components are
    nonnegative multiples of 1/p summing to 1, giving C(m+p-1, p) points."""
    if m < 2:
        raise ValueError(f"need at least 2 objectives, got {m}")
    if p < 1:
        raise ValueError(f"need at least 1 division, got {p}")
    points = []
    # choose cut positions with repetition: composition of p into m bins
    for cuts in combinations_with_replacement(range(m), p):
        counts = np.bincount(np.array(cuts), minlength=m)
        points.append(counts / p)
    return np.array(sorted(map(tuple, points)), dtype=np.float64)


def _associate(normalized: np.ndarray, refs: np.ndarray):
    """Nearest reference line per member by perpendicular distance."""
    norms_sq = (refs * refs).sum(axis=1)
    proj = normalized @ refs.T / norms_sq  # (n, H)
    foot = proj[:, :, None] * refs[None, :, :]
    perp = np.linalg.norm(normalized[:, None, :] - foot, axis=2)
    nearest = perp.argmin(axis=1)
    return nearest, perp[np.arange(len(normalized)), nearest]


def nsga3_niching(
    last_front: np.ndarray,
    chosen_assoc: np.ndarray,
    last_assoc: np.ndarray,
    last_dist: np.ndarray,
    n_refs: int,
    k: int,
    rng,
) -> list[int]:
    """Pick ``k`` members of the last front by niche counts.

    ``chosen_assoc`` are reference indices of already-selected members (they
    seed the niche counts); ``last_assoc``/``last_dist`` give each last-front
    member's reference and perpendicular distance.  An empty niche takes its
    closest member; an occupied one takes a random member; a reference with no
    last-front members left is excluded for the rest of the generation.
    """
    niche = np.bincount(chosen_assoc, minlength=n_refs).astype(np.int64)
    available = [np.flatnonzero(last_assoc == j).tolist() for j in range(n_refs)]
    active = np.ones(n_refs, dtype=bool)
    picked: list[int] = []
    while len(picked) < k:
        if not active.any():
            # every reference exhausted; fall back to closest remaining members
            rest = [i for i in range(len(last_front)) if i not in picked]
            rest.sort(key=lambda i: last_dist[i])
            picked.extend(rest[: k - len(picked)])
            break
        counts = np.where(active, niche, np.iinfo(np.int64).max)
        jmin = np.flatnonzero(counts == counts.min())
        j = int(jmin[rng.integers(0, len(jmin))])
        members = available[j]
        if not members:
            active[j] = False
            continue
        if niche[j] == 0:
            pick = min(members, key=lambda i: last_dist[i])
        else:
            pick = members[int(rng.integers(0, len(members)))]
        members.remove(pick)
        picked.append(pick)
        niche[j] += 1
    return picked


def nsga3_survival(points: np.ndarray, n_survivors: int, refs: np.ndarray, rng):
    """Front fill as in NSGA-II, but the partial front is resolved by
    reference-point niching on min-max normalized objectives."""
    assignment = non_dominated_sort(points)
    selected: list[int] = []
    ranks: list[int] = []
    last = None
    for front in assignment.fronts:
        if len(selected) + len(front) <= n_survivors:
            selected.extend(front.tolist())
            ranks.extend([int(assignment.ranks[front[0]])] * len(front))
            if len(selected) == n_survivors:
                break
        else:
            last = front
            break
    if last is not None and len(selected) < n_survivors:
        k = n_survivors - len(selected)
        lo = points.min(axis=0)
        span = points.max(axis=0) - lo
        span[span <= 0] = 1.0
        normalized = (points - lo) / span
        chosen_assoc, _ = (
            _associate(normalized[selected], refs)
            if selected
            else (np.empty(0, dtype=np.int64), None)
        )
        last_assoc, last_dist = _associate(normalized[last], refs)
        picked = nsga3_niching(
            points[last], chosen_assoc, last_assoc, last_dist, len(refs), k, rng
        )
        selected.extend(last[picked].tolist())
        ranks.extend([int(assignment.ranks[last[0]])] * len(picked))
    return np.array(selected), np.array(ranks)


@dataclass
class ParetoResult:
    algorithm: str
    seed: int
    front_genotypes: np.ndarray        # (m, dim)
    front_points: np.ndarray           # (m, 2), deduplicated in objective space
    front_records: list[ObjectiveRecord]
    hv_trace: list[tuple[int, float]]  # (nfe, hypervolume of current front 1)
    hv_reference: tuple[float, float]
    evaluations: int


def _records_to_points(records: list[ObjectiveRecord]) -> np.ndarray:
    return np.array([r.objective_pair() for r in records], dtype=np.float64)


def _dedupe_front(genotypes, records, points):
    seen = {}
    for i in range(len(points)):
        key = (points[i, 0], points[i, 1])
        if key not in seen:
            seen[key] = i
    keep = sorted(seen.values())
    return genotypes[keep], [records[i] for i in keep], points[keep]


def run_pareto(algorithm: str, problem, budget: RunBudget, config: GaConfig | None = None, rng=None, ref_divisions: int | None = None) -> ParetoResult:
    """Evolve a population toward the (f1, f2) front with NSGA-II or NSGA-III.

    Variation is shared with the scalar GA (binary tournament + SBX + PM).
    The hypervolume trace is computed after the run against a reference of
    1.05x the per-objective maximum seen across all generation snapshots.
    """
    key = algorithm.lower()
    if key not in ("nsga2", "nsga3"):
        raise ValueError(f"unknown pareto algorithm {algorithm!r}; options: ['nsga2', 'nsga3']")
    if budget.nfe_max < budget.pop_size:
        raise ValueError(
            f"Pareto algorithms need nfe_max >= pop_size, got {budget.nfe_max} < {budget.pop_size}"
        )
    if config is None:
        config = GaConfig()
    if rng is None:
        rng = np.random.default_rng(budget.seed)
    n = budget.pop_size
    refs = None
    if key == "nsga3":
        p = ref_divisions if ref_divisions is not None else max(n - 1, 1)
        refs = das_dennis(2, p)

    pop = random_population(n, problem.bounds, rng)
    records = _eval_all(problem, pop)
    points = _records_to_points(records)
    assignment = non_dominated_sort(points)
    ranks = assignment.ranks
    cds = np.zeros(n)
    for front in assignment.fronts:
        cds[front] = crowding_distance(points[front])
    nfe = n
    snapshots = [(nfe, points[assignment.fronts[0]].copy())]

    while nfe + n <= budget.nfe_max:
        children = []
        while len(children) < n:
            a, b = rng.integers(0, n, size=2)
            i = (a, b)[crowded_tournament(ranks[a], cds[a], ranks[b], cds[b], rng)]
            a, b = rng.integers(0, n, size=2)
            j = (a, b)[crowded_tournament(ranks[a], cds[a], ranks[b], cds[b], rng)]
            c1, c2 = sbx_crossover(
                pop[i], pop[j], config.crossover_prob, config.crossover_eta, problem.bounds, rng
            )
            children.append(c1)
            if len(children) < n:
                children.append(c2)
        children = np.array(
            [
                polynomial_mutation(c, config.mutation_prob, config.mutation_eta, problem.bounds, rng)
                for c in children
            ]
        )
        child_records = _eval_all(problem, children)
        merged = np.concatenate([pop, children])
        merged_records = records + child_records
        merged_points = np.concatenate([points, _records_to_points(child_records)])
        if key == "nsga2":
            idx, ranks, cds = nsga2_survival(merged_points, n)
        else:
            idx, _ = nsga3_survival(merged_points, n, refs, rng)
            # rank/crowd the survivors for the next tournament round
            survivor_sort = non_dominated_sort(merged_points[idx])
            ranks = survivor_sort.ranks
            cds = np.zeros(len(idx))
            for front in survivor_sort.fronts:
                cds[front] = crowding_distance(merged_points[idx][front])
        pop = merged[idx]
        records = [merged_records[i] for i in idx]
        points = merged_points[idx]
        nfe += n
        first = idx[ranks == ranks.min()]
        snapshots.append((nfe, merged_points[first].copy()))

    final_assignment = non_dominated_sort(points)
    first = final_assignment.fronts[0]
    genos, recs, pts = _dedupe_front(pop[first], [records[i] for i in first], points[first])

    ref = _shared_reference([snap for _, snap in snapshots])
    hv_trace = [(g_nfe, hypervolume_2d(snap, ref)) for g_nfe, snap in snapshots]
    return ParetoResult(key, budget.seed, genos, pts, recs, hv_trace, ref, nfe)


def _shared_reference(point_sets: list[np.ndarray]) -> tuple[float, float]:
    """1.05x the componentwise maximum, nudged if a coordinate is degenerate."""
    allpts = np.concatenate(point_sets)
    hi = allpts.max(axis=0)
    ref = hi * 1.05
    for j in range(len(ref)):
        if ref[j] <= hi[j]:
            ref[j] = hi[j] + 1.0
    return (float(ref[0]), float(ref[1]))
