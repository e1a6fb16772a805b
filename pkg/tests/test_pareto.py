"""Pareto machinery against brute-force oracles: dominance axioms, front
peeling, crowding distance, reference points, niching, and full runs."""

import math

import numpy as np
import pytest

from jpegmoo.objectives import BiFunctionProblem
from jpegmoo.pareto import (
    _associate,
    crowded_tournament,
    crowding_distance,
    das_dennis,
    dominates,
    non_dominated_sort,
    nsga2_survival,
    nsga3_niching,
    run_pareto,
)
from jpegmoo.scalar import RunBudget


def brute_fronts(points):
    """O(n^2) front peeling by literal definition."""
    remaining = list(range(len(points)))
    fronts = []
    while remaining:
        front = [
            i
            for i in remaining
            if not any(dominates(points[j], points[i]) for j in remaining if j != i)
        ]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


class TestDominates:
    def test_examples(self):
        assert dominates((0.5, 0.02), (0.6, 0.03))
        assert not dominates((0.5, 0.02), (0.5, 0.02))  # irreflexive
        assert not dominates((0.5, 0.03), (0.6, 0.02))
        assert not dominates((0.6, 0.02), (0.5, 0.03))

    def test_axioms_randomized(self, rng):
        pts = rng.random((60, 2))
        for _ in range(1000):
            i, j, k = rng.integers(0, 60, size=3)
            a, b, c = pts[i], pts[j], pts[k]
            if dominates(a, b):
                assert not dominates(b, a)  # antisymmetric
            if dominates(a, b) and dominates(b, c):
                assert dominates(a, c)  # transitive


class TestNonDominatedSort:
    def test_four_point_example(self):
        points = np.array([[1, 1], [1, 2], [2, 1], [2, 2]], dtype=float)
        fa = non_dominated_sort(points)
        assert [sorted(f.tolist()) for f in fa.fronts] == [[0], [1, 2], [3]]
        assert list(fa.ranks) == [1, 2, 2, 3]

    def test_identical_points_single_front(self):
        points = np.ones((5, 2))
        fa = non_dominated_sort(points)
        assert len(fa.fronts) == 1 and len(fa.fronts[0]) == 5

    def test_strictly_decreasing_curve_single_front(self):
        x = np.linspace(0, 1, 20)
        points = np.stack([x, 1 - x], axis=1)
        fa = non_dominated_sort(points)
        assert len(fa.fronts) == 1

    def test_matches_brute_force_oracle(self, rng):
        for trial in range(40):
            n = int(rng.integers(1, 60))
            points = rng.integers(0, 8, size=(n, 2)).astype(float)  # ties likely
            fa = non_dominated_sort(points)
            assert [sorted(f.tolist()) for f in fa.fronts] == brute_fronts(points)

    def test_front_consistency(self, rng):
        points = rng.random((80, 2))
        fa = non_dominated_sort(points)
        for k, front in enumerate(fa.fronts):
            for i in front:
                assert not any(dominates(points[j], points[i]) for j in front)
                if k > 0:
                    assert any(dominates(points[j], points[i]) for j in fa.fronts[k - 1])


class TestCrowdingDistance:
    def test_three_point_example(self):
        front = np.array([[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]])
        cd = crowding_distance(front)
        assert math.isinf(cd[0]) and math.isinf(cd[2])
        assert cd[1] == pytest.approx(2.0)  # (1-0)/1 + (1-0)/1

    def test_two_point_front_infinite(self):
        cd = crowding_distance(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert all(math.isinf(v) for v in cd)

    def test_identical_points_zero_interior(self):
        cd = crowding_distance(np.ones((6, 2)))
        finite = [v for v in cd if not math.isinf(v)]
        assert all(v == 0.0 for v in finite)
        assert sum(math.isinf(v) for v in cd) >= 2

    def test_uniform_spacing_equal_interior(self):
        x = np.linspace(0, 1, 11)
        front = np.stack([x, 1 - x], axis=1)
        cd = crowding_distance(front)
        interior = cd[1:-1]
        assert np.allclose(interior, interior[0])


class TestCrowdedTournament:
    def test_lower_rank_wins(self, rng):
        assert crowded_tournament(1, 0.1, 2, 9.9, rng) == 0
        assert crowded_tournament(3, 9.9, 2, 0.1, rng) == 1

    def test_larger_cd_wins_on_equal_rank(self, rng):
        assert crowded_tournament(1, 2.0, 1, 0.5, rng) == 0
        assert crowded_tournament(1, 0.5, 1, 2.0, rng) == 1

    def test_full_tie_is_coin_flip(self, rng):
        outcomes = [crowded_tournament(1, 1.0, 1, 1.0, rng) for _ in range(4000)]
        frac = np.mean(outcomes)
        assert 0.45 < frac < 0.55


class TestNsga2Survival:
    def brute_survival(self, points, n):
        fronts = brute_fronts(points)
        chosen = []
        for front in fronts:
            if len(chosen) + len(front) <= n:
                chosen.extend(front)
            else:
                cd = crowding_distance(points[np.array(front)])
                order = np.argsort(-cd, kind="stable")
                chosen.extend(np.array(front)[order[: n - len(chosen)]].tolist())
                break
        return sorted(chosen)

    def test_hand_built_six_points(self):
        # front 1: (0,3),(1,1),(3,0); front 2: (2,2),(4,1); front 3: (5,5)
        points = np.array([[0, 3], [1, 1], [3, 0], [2, 2], [4, 1], [5, 5]], dtype=float)
        idx, ranks, cds = nsga2_survival(points, 3)
        assert sorted(idx.tolist()) == [0, 1, 2]
        assert list(ranks) == [1, 1, 1]

    def test_truncation_keeps_least_crowded(self):
        x = np.linspace(0, 1, 8)
        points = np.stack([x, 1 - x], axis=1)  # all mutually non-dominated
        idx, ranks, cds = nsga2_survival(points, 4)
        brute = self.brute_survival(points, 4)
        assert sorted(idx.tolist()) == brute
        assert 0 in idx and 7 in idx  # boundary members always survive

    def test_elite_preservation_randomized(self, rng):
        for _ in range(300):
            points = rng.random((24, 2))
            n = 12
            first = brute_fronts(points)[0]
            idx, _, _ = nsga2_survival(points, n)
            if len(first) <= n:
                assert set(first) <= set(idx.tolist())

    def test_matches_brute_oracle_randomized(self, rng):
        for _ in range(200):
            points = rng.integers(0, 6, size=(14, 2)).astype(float)
            got = sorted(nsga2_survival(points, 7)[0].tolist())
            want = self.brute_survival(points, 7)
            # crowding ties may be broken differently only among equal-cd members;
            # stable argsort on both sides makes the comparison exact
            assert got == want


class TestDasDennis:
    def test_count_formula(self):
        for m in range(2, 6):
            for p in range(1, 9):
                pts = das_dennis(m, p)
                assert len(pts) == math.comb(m + p - 1, p)
                assert np.allclose(pts.sum(axis=1), 1.0)
                assert pts.min() >= 0

    def test_m3_p3_is_ten(self):
        assert len(das_dennis(3, 3)) == 10

    def test_m2_p1(self):
        pts = das_dennis(2, 1)
        assert sorted(map(tuple, pts)) == [(0.0, 1.0), (1.0, 0.0)]

    def test_m2_p4_enumeration(self):
        pts = sorted(map(tuple, das_dennis(2, 4)))
        assert pts == [(0.0, 1.0), (0.25, 0.75), (0.5, 0.5), (0.75, 0.25), (1.0, 0.0)]

    def test_unique_points(self):
        pts = das_dennis(4, 6)
        assert len({tuple(p) for p in pts}) == len(pts)

    def test_validation(self):
        with pytest.raises(ValueError):
            das_dennis(1, 3)
        with pytest.raises(ValueError):
            das_dennis(3, 0)


class TestNiching:
    def test_one_member_per_line_all_selected(self, rng):
        refs = das_dennis(2, 3)  # 4 lines
        members = refs * 2.0  # one member exactly on each line
        assoc, dist = _associate(members, refs)
        picked = nsga3_niching(members, np.empty(0, np.int64), assoc, dist, len(refs), 4, rng)
        assert sorted(picked) == [0, 1, 2, 3]

    def test_clustered_members_spread_across_lines(self, rng):
        refs = np.array([[1.0, 0.0], [0.0, 1.0]])
        # members 0-2 hug line 1 (x-axis), member 3 sits on line 2
        members = np.array([[1.0, 0.05], [0.9, 0.04], [0.8, 0.06], [0.05, 1.0]])
        assoc, dist = _associate(members, refs)
        assert list(assoc) == [0, 0, 0, 1]
        for _ in range(50):
            picked = nsga3_niching(members, np.empty(0, np.int64), assoc, dist, 2, 2, rng)
            assert 3 in picked  # the lone line-2 member is always taken
            assert len(set(picked)) == 2

    def test_empty_reference_is_excluded(self, rng):
        refs = np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]])
        members = np.array([[1.0, 0.1], [0.1, 1.0]])  # nothing near the middle line
        assoc, dist = _associate(members, refs)
        picked = nsga3_niching(members, np.empty(0, np.int64), assoc, dist, 3, 2, rng)
        assert sorted(picked) == [0, 1]

    def test_niche_counts_prefer_unserved_lines(self, rng):
        refs = np.array([[1.0, 0.0], [0.0, 1.0]])
        members = np.array([[1.0, 0.02], [0.04, 1.0]])
        assoc, dist = _associate(members, refs)
        # line 0 already holds two chosen members; the single slot must go to line 1
        picked = nsga3_niching(members, np.array([0, 0]), assoc, dist, 2, 1, rng)
        assert picked == [1]


def biobjective(x):
    # convex bi-objective with a known trade-off on the first two genes
    f1 = float(np.mean((x - 1.0) ** 2)) / 254.0**2 + 1e-6
    f2 = float(np.mean((x - 255.0) ** 2)) / 254.0**2
    return f1, f2


class TestRunPareto:
    @pytest.mark.parametrize("alg", ["nsga2", "nsga3"])
    def test_deterministic(self, alg):
        budget = RunBudget(pop_size=12, nfe_max=120, seed=5)
        r1 = run_pareto(alg, BiFunctionProblem(biobjective), budget)
        r2 = run_pareto(alg, BiFunctionProblem(biobjective), budget)
        assert np.array_equal(r1.front_points, r2.front_points)
        assert np.array_equal(r1.front_genotypes, r2.front_genotypes)
        assert r1.hv_trace == r2.hv_trace

    @pytest.mark.parametrize("alg", ["nsga2", "nsga3"])
    def test_front_mutually_non_dominated_and_deduped(self, alg):
        result = run_pareto(alg, BiFunctionProblem(biobjective), RunBudget(10, 100, 3))
        pts = result.front_points
        for i in range(len(pts)):
            for j in range(len(pts)):
                if i != j:
                    assert not dominates(pts[i], pts[j])
        assert len({tuple(p) for p in pts}) == len(pts)

    def test_budget_accounting(self):
        problem = BiFunctionProblem(biobjective)
        result = run_pareto("nsga2", problem, RunBudget(pop_size=10, nfe_max=105, seed=1))
        assert problem.eval_count <= 105
        assert result.evaluations == problem.eval_count
        assert len(result.hv_trace) == problem.eval_count // 10

    def test_hv_trace_reaches_initial(self):
        result = run_pareto("nsga2", BiFunctionProblem(biobjective), RunBudget(10, 200, 2))
        assert result.hv_trace[-1][1] >= result.hv_trace[0][1]

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            run_pareto("spea2", BiFunctionProblem(biobjective), RunBudget(10, 100, 0))

    def test_budget_below_population_rejected(self):
        with pytest.raises(ValueError):
            run_pareto("nsga2", BiFunctionProblem(biobjective), RunBudget(10, 9, 0))
