"""Five single-objective metaheuristics over the 128-gene table representation.

All drivers share the budget convention: the initial population is evaluated
first, then whole generations run while they still fit inside ``nfe_max``,
so total evaluations never exceed the budget.  The best-so-far solution is
tracked explicitly, making the reported trace non-increasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .objectives import ObjectiveRecord
from .operators import (
    clamp,
    de_crossover,
    de_mutant,
    polynomial_mutation,
    sbx_crossover,
    tournament_select,
)
from .qtable import random_population


@dataclass(frozen=True)
class RunBudget:
    pop_size: int = 50
    nfe_max: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 1:
            raise ValueError(f"pop_size must be >= 1, got {self.pop_size}")
        if self.nfe_max < 1:
            raise ValueError(f"nfe_max must be >= 1, got {self.nfe_max}")


@dataclass(frozen=True)
class GaConfig:
    crossover_prob: float = 0.9
    crossover_eta: float = 20.0
    mutation_prob: float = 0.3
    mutation_eta: float = 20.0
    tournament_size: int = 2


@dataclass(frozen=True)
class DeConfig:
    cr: float = 0.2
    sf_low: float = 0.5   # dither: SF ~ U[sf_low, sf_high] per generation
    sf_high: float = 1.0


@dataclass(frozen=True)
class PsoConfig:
    c1: float = 2.0
    c2: float = 2.0
    omega: float = 0.9          # inertia before the first adaptive update
    vmax_frac: float = 0.2      # velocity clamp as a fraction of the range
    step: float = 0.05          # acceleration adjustment, full step
    slight_step: float = 0.025  # acceleration adjustment, "slight" step
    coeff_min: float = 1.5
    coeff_max: float = 2.5
    coeff_sum_max: float = 4.0


@dataclass(frozen=True)
class EsConfig:
    sigma: float = 32.0   # per-gene perturbation, about an eighth of the range
    offspring: int | None = None  # lambda; defaults to pop_size


@dataclass(frozen=True)
class PsConfig:
    rho: float = 0.5      # step as a fraction of the range
    min_rho: float = 1e-6  # terminate below this radius


DEFAULT_CONFIGS = {
    "ga": GaConfig(),
    "de": DeConfig(),
    "pso": PsoConfig(),
    "es": EsConfig(),
    "ps": PsConfig(),
}


@dataclass(frozen=True)
class TracePoint:
    nfe: int
    best_scalar: float
    best_fs: float
    best_psnr: float


@dataclass
class RunResult:
    algorithm: str
    seed: int
    best_genotype: np.ndarray
    best_record: ObjectiveRecord
    trace: list[TracePoint]
    evaluations: int


class _BestTracker:
    def __init__(self):
        self.genotype = None
        self.record = None
        self.trace: list[TracePoint] = []

    def offer(self, genotype: np.ndarray, record: ObjectiveRecord) -> None:
        if self.record is None or record.scalar_value < self.record.scalar_value:
            self.genotype = np.array(genotype, copy=True)
            self.record = record

    def offer_population(self, pop: np.ndarray, records: list[ObjectiveRecord]) -> None:
        values = [r.scalar_value for r in records]
        i = int(np.argmin(values))
        self.offer(pop[i], records[i])

    def snapshot(self, nfe: int) -> None:
        r = self.record
        self.trace.append(TracePoint(nfe, r.scalar_value, r.fs_ratio, r.psnr_db))


def _eval_all(problem, pop: np.ndarray) -> list[ObjectiveRecord]:
    return [problem.evaluate(g) for g in pop]


def run_scalar(algorithm: str, problem, budget: RunBudget, config=None, rng=None) -> RunResult:
    """Minimize the scalarized objective with one of ga/de/pso/es/ps.

    ``problem`` must expose ``bounds`` and ``evaluate(genotype) ->
    ObjectiveRecord``; each call counts as one evaluation against
    ``budget.nfe_max``.
    """
    key = algorithm.lower()
    drivers = {"ga": _run_ga, "de": _run_de, "pso": _run_pso, "es": _run_es, "ps": _run_ps}
    if key not in drivers:
        raise ValueError(f"unknown scalar algorithm {algorithm!r}; options: {sorted(drivers)}")
    if key != "ps" and budget.nfe_max < budget.pop_size:
        raise ValueError(
            f"population algorithms need nfe_max >= pop_size, got {budget.nfe_max} < {budget.pop_size}"
        )
    if config is None:
        config = DEFAULT_CONFIGS[key]
    if rng is None:
        rng = np.random.default_rng(budget.seed)
    best, evals = drivers[key](problem, budget, config, rng)
    return RunResult(key, budget.seed, best.genotype, best.record, best.trace, evals)


def _run_ga(problem, budget, cfg: GaConfig, rng):
    n = budget.pop_size
    pop = random_population(n, problem.bounds, rng)
    recs = _eval_all(problem, pop)
    vals = np.array([r.scalar_value for r in recs])
    best = _BestTracker()
    best.offer_population(pop, recs)
    nfe = n
    best.snapshot(nfe)
    while nfe + n <= budget.nfe_max:
        children = []
        while len(children) < n:
            i = tournament_select(vals, cfg.tournament_size, rng)
            j = tournament_select(vals, cfg.tournament_size, rng)
            c1, c2 = sbx_crossover(
                pop[i], pop[j], cfg.crossover_prob, cfg.crossover_eta, problem.bounds, rng
            )
            children.append(c1)
            if len(children) < n:
                children.append(c2)
        pop = np.array(
            [
                polynomial_mutation(c, cfg.mutation_prob, cfg.mutation_eta, problem.bounds, rng)
                for c in children
            ]
        )
        recs = _eval_all(problem, pop)
        vals = np.array([r.scalar_value for r in recs])
        best.offer_population(pop, recs)
        nfe += n
        best.snapshot(nfe)
    return best, nfe


def _run_de(problem, budget, cfg: DeConfig, rng):
    n = budget.pop_size
    if n < 4:
        raise ValueError(f"differential evolution needs pop_size >= 4, got {n}")
    pop = random_population(n, problem.bounds, rng)
    recs = _eval_all(problem, pop)
    vals = np.array([r.scalar_value for r in recs])
    best = _BestTracker()
    best.offer_population(pop, recs)
    nfe = n
    best.snapshot(nfe)
    while nfe + n <= budget.nfe_max:
        sf = rng.uniform(cfg.sf_low, cfg.sf_high)
        trials = []
        for i in range(n):
            while True:
                r = rng.choice(n, size=3, replace=False)
                if i not in r:
                    break
            v = de_mutant(pop[r[0]], pop[r[1]], pop[r[2]], sf, problem.bounds)
            trials.append(de_crossover(pop[i], v, cfg.cr, rng))
        trial_recs = _eval_all(problem, trials)
        for i in range(n):
            if trial_recs[i].scalar_value <= vals[i]:
                pop[i] = trials[i]
                recs[i] = trial_recs[i]
                vals[i] = trial_recs[i].scalar_value
        best.offer_population(pop, recs)
        nfe += n
        best.snapshot(nfe)
    return best, nfe


@dataclass
class PsoState:
    """Mutable swarm state; one ``pso_step`` advances a full iteration."""

    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_records: list[ObjectiveRecord]
    gbest_position: np.ndarray
    gbest_record: ObjectiveRecord
    c1: float
    c2: float
    omega: float
    ef: float = 0.0
    state: str = "exploration"
    vmax: float = 50.8


def _classify_ef(ef: float) -> str:
    if ef < 0.25:
        return "convergence"
    if ef < 0.5:
        return "exploitation"
    if ef < 0.75:
        return "exploration"
    return "jumping-out"


def _adjust_coefficients(state: str, c1: float, c2: float, cfg: PsoConfig) -> tuple[float, float]:
    if state == "exploration":
        c1, c2 = c1 + cfg.step, c2 - cfg.step
    elif state == "exploitation":
        c1, c2 = c1 + cfg.slight_step, c2 - cfg.slight_step
    elif state == "convergence":
        c1, c2 = c1 + cfg.slight_step, c2 + cfg.slight_step
    else:  # jumping-out
        c1, c2 = c1 - cfg.step, c2 + cfg.step
    c1 = min(max(c1, cfg.coeff_min), cfg.coeff_max)
    c2 = min(max(c2, cfg.coeff_min), cfg.coeff_max)
    if c1 + c2 > cfg.coeff_sum_max:
        scale = cfg.coeff_sum_max / (c1 + c2)
        c1, c2 = c1 * scale, c2 * scale
    return c1, c2


def evolutionary_factor(positions: np.ndarray, gbest_index: int) -> float:
    """Swarm dispersion statistic in [0, 1]: 0 when the best particle sits in
    the densest region (or the swarm has collapsed), 1 when it is the most
    isolated."""
    n = positions.shape[0]
    if n < 2:
        return 0.0
    diffs = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diffs * diffs).sum(axis=2))
    d = dist.sum(axis=1) / (n - 1)
    dmin, dmax = float(d.min()), float(d.max())
    if dmax <= dmin:
        return 0.0
    return float(np.clip((d[gbest_index] - dmin) / (dmax - dmin), 0.0, 1.0))


def pso_step(state: PsoState, problem, cfg: PsoConfig, rng) -> int:
    """One adaptive-PSO iteration; returns evaluations consumed (the swarm size)."""
    n, dim = state.positions.shape
    pbest_vals = np.array([r.scalar_value for r in state.pbest_records])
    g_idx = int(np.argmin(pbest_vals))
    state.ef = evolutionary_factor(state.positions, g_idx)
    state.state = _classify_ef(state.ef)
    state.c1, state.c2 = _adjust_coefficients(state.state, state.c1, state.c2, cfg)
    state.omega = 1.0 / (1.0 + 1.5 * math.exp(-2.6 * state.ef))
    r1 = rng.random((n, dim))
    r2 = rng.random((n, dim))
    state.velocities = (
        state.omega * state.velocities
        + state.c1 * r1 * (state.pbest_positions - state.positions)
        + state.c2 * r2 * (state.gbest_position - state.positions)
    )
    np.clip(state.velocities, -state.vmax, state.vmax, out=state.velocities)
    state.positions = clamp(state.positions + state.velocities, problem.bounds)
    records = _eval_all(problem, state.positions)
    for i, rec in enumerate(records):
        if rec.scalar_value < state.pbest_records[i].scalar_value:
            state.pbest_records[i] = rec
            state.pbest_positions[i] = state.positions[i]
            if rec.scalar_value < state.gbest_record.scalar_value:
                state.gbest_record = rec
                state.gbest_position = state.positions[i].copy()
    return n


def _run_pso(problem, budget, cfg: PsoConfig, rng):
    n = budget.pop_size
    pop = random_population(n, problem.bounds, rng)
    recs = _eval_all(problem, pop)
    g_idx = int(np.argmin([r.scalar_value for r in recs]))
    span = problem.bounds.upper - problem.bounds.lower
    state = PsoState(
        positions=pop,
        velocities=np.zeros_like(pop),
        pbest_positions=pop.copy(),
        pbest_records=list(recs),
        gbest_position=pop[g_idx].copy(),
        gbest_record=recs[g_idx],
        c1=cfg.c1,
        c2=cfg.c2,
        omega=cfg.omega,
        vmax=cfg.vmax_frac * span,
    )
    best = _BestTracker()
    best.offer(state.gbest_position, state.gbest_record)
    nfe = n
    best.snapshot(nfe)
    while nfe + n <= budget.nfe_max:
        nfe += pso_step(state, problem, cfg, rng)
        best.offer(state.gbest_position, state.gbest_record)
        best.snapshot(nfe)
    return best, nfe


def _run_es(problem, budget, cfg: EsConfig, rng):
    n = budget.pop_size
    lam = cfg.offspring if cfg.offspring is not None else n
    pop = random_population(n, problem.bounds, rng)
    recs = _eval_all(problem, pop)
    best = _BestTracker()
    best.offer_population(pop, recs)
    nfe = n
    best.snapshot(nfe)
    while nfe + lam <= budget.nfe_max:
        parents = rng.integers(0, n, size=lam)
        noise = rng.normal(0.0, cfg.sigma, size=(lam, pop.shape[1]))
        offspring = clamp(pop[parents] + noise, problem.bounds)
        off_recs = _eval_all(problem, offspring)
        merged = np.concatenate([pop, offspring])
        merged_recs = recs + off_recs
        order = np.argsort([r.scalar_value for r in merged_recs], kind="stable")[:n]
        pop = merged[order]
        recs = [merged_recs[i] for i in order]
        best.offer_population(pop, recs)
        nfe += lam
        best.snapshot(nfe)
    return best, nfe


def ps_step(x: np.ndarray, record: ObjectiveRecord, rho: float, axis: int, problem, budget_left: int):
    """One exploratory probe along a coordinate axis: try +rho then -rho
    (as fractions of the range), accepting the first improvement.

    Probes that the bound repair collapses back onto the current point are
    failures that cost no evaluation.  Returns
    (x, record, improved, evaluations used).
    """
    span = problem.bounds.upper - problem.bounds.lower
    evals = 0
    for sign in (1.0, -1.0):
        if evals >= budget_left:
            break
        trial = x.copy()
        trial[axis] = min(max(trial[axis] + sign * rho * span, problem.bounds.lower), problem.bounds.upper)
        if trial[axis] == x[axis]:
            continue
        rec = problem.evaluate(trial)
        evals += 1
        if rec.scalar_value < record.scalar_value:
            return trial, rec, True, evals
    return x, record, False, evals


def _run_ps(problem, budget, cfg: PsConfig, rng):
    x = random_population(1, problem.bounds, rng)[0]
    record = problem.evaluate(x)
    best = _BestTracker()
    best.offer(x, record)
    nfe = 1
    best.snapshot(nfe)
    rho = cfg.rho
    dim = x.shape[0]
    axis = 0
    sweep_improved = False
    while nfe < budget.nfe_max and rho >= cfg.min_rho:
        x, record, improved, used = ps_step(x, record, rho, axis, problem, budget.nfe_max - nfe)
        nfe += used
        sweep_improved = sweep_improved or improved
        if used:
            best.offer(x, record)
            best.snapshot(nfe)
        axis += 1
        if axis == dim:
            # the radius is halved only when a whole sweep of directions fails
            if not sweep_improved:
                rho /= 2.0
            axis = 0
            sweep_improved = False
    return best, nfe
