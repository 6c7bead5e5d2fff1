"""Success-history adaptive differential evolution with linear population
reduction and feasibility-rule constraint handling.

current-to-pbest/1 mutation with an external archive, binomial crossover,
Cauchy/normal parameter sampling around a circular success memory, and Deb
feasibility rules for selection. Supports both a fixed evaluation budget
(deterministic) and a wall-clock deadline checked between evaluations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ProblemDef:
    """Box-bounded problem with an objective and optional constraint vector.

    `constraints(x)` returns non-negative violation magnitudes; feasibility
    means every entry is zero. Both callables must be pure.
    """

    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    objective: callable
    constraints: callable = None

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != (self.dimension,) or self.upper.shape != (self.dimension,):
            raise ValueError("bounds must match the problem dimension")
        if np.any(self.lower >= self.upper):
            raise ValueError("lower bounds must be strictly below upper bounds")

    def evaluate(self, x: np.ndarray) -> tuple[float, float]:
        f = float(self.objective(x))
        if self.constraints is None:
            return f, 0.0
        viol = np.asarray(self.constraints(x), dtype=float)
        return f, float(np.sum(viol))


@dataclass
class Individual:
    x: np.ndarray
    f: float
    violation: float

    def key(self) -> tuple[float, float]:
        """Feasibility-rule ordering key (lower is better)."""
        if self.violation > 0.0:
            return (1.0, self.violation)
        return (0.0, self.f)


@dataclass
class SuccessMemory:
    """Circular history of successful scale factors and crossover rates."""

    size: int
    m_f: np.ndarray = None
    m_cr: np.ndarray = None
    index: int = 0

    def __post_init__(self):
        if self.m_f is None:
            self.m_f = np.full(self.size, 0.5)
        if self.m_cr is None:
            self.m_cr = np.full(self.size, 0.5)


@dataclass
class OptimizerConfig:
    budget: int
    n_init: int = None  # defaults to 18 * dimension
    n_min: int = 4
    memory_size: int = 6
    p_best: float = 0.11
    archive_rate: float = 1.4
    deadline: float = None  # wall seconds, None = budget only
    seed: int = 0

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("evaluation budget must be positive")
        if self.deadline is not None and self.deadline <= 0.0:
            raise ValueError("deadline must be positive when given")
        if self.n_min < 4:
            raise ValueError("minimum population size is 4")


@dataclass
class OptimizerStats:
    evaluations: int = 0
    generations: int = 0
    wall_time: float = 0.0
    best_f_history: list = field(default_factory=list)
    best_violation_history: list = field(default_factory=list)
    pop_size_history: list = field(default_factory=list)


def select(parent: Individual, trial: Individual) -> Individual:
    """Deb feasibility rules; the parent wins exact ties."""
    return trial if trial.key() < parent.key() else parent


def _better(a: Individual, b: Individual) -> bool:
    return a.key() < b.key()


def generate_trial(target_idx: int, population: list, archive: list,
                   f_scale: float, cr: float, p_best: float,
                   lower: np.ndarray, upper: np.ndarray,
                   rng: np.random.Generator, order=None) -> np.ndarray:
    """current-to-pbest/1 mutation, binomial crossover, midpoint bound repair.

    `order` may carry a precomputed feasibility-rule ranking of the
    population (indices, best first); it is recomputed when omitted.
    """
    n = len(population)
    if n < 4:
        raise ValueError("population must hold at least four individuals")
    target = population[target_idx]
    if order is None:
        order = sorted(range(n), key=lambda i: population[i].key())
    n_top = max(2, int(round(p_best * n)))
    pbest = population[order[int(rng.integers(n_top))]]

    r1 = int(rng.integers(n))
    while r1 == target_idx:
        r1 = int(rng.integers(n))
    n_union = n + len(archive)
    r2 = int(rng.integers(n_union))
    while r2 == target_idx or r2 == r1:
        r2 = int(rng.integers(n_union))
    x_r2 = population[r2].x if r2 < n else archive[r2 - n]

    mutant = target.x + f_scale * (pbest.x - target.x) \
        + f_scale * (population[r1].x - x_r2)
    below = mutant < lower
    above = mutant > upper
    mutant[below] = 0.5 * (lower[below] + target.x[below])
    mutant[above] = 0.5 * (upper[above] + target.x[above])

    dim = target.x.shape[0]
    cross = rng.random(dim) < cr
    cross[int(rng.integers(dim))] = True
    return np.where(cross, mutant, target.x)


def adapt(successes: list, memory: SuccessMemory, eval_count: int,
          config: OptimizerConfig, n_init: int) -> int:
    """Update the success memory and return the new population size.

    Successes are (F, CR, improvement) triples; F uses the weighted Lehmer
    mean, CR the weighted arithmetic mean. Population size shrinks linearly
    with the spent evaluation budget.
    """
    if successes:
        fs = np.array([s[0] for s in successes])
        crs = np.array([s[1] for s in successes])
        w = np.array([s[2] for s in successes])
        w = w / np.sum(w) if np.sum(w) > 0 else np.full(len(successes), 1.0 / len(successes))
        memory.m_f[memory.index] = float(np.sum(w * fs * fs) / np.sum(w * fs))
        memory.m_cr[memory.index] = float(np.sum(w * crs))
        memory.index = (memory.index + 1) % memory.size
    frac = min(eval_count / config.budget, 1.0)
    return max(config.n_min, int(round(n_init - frac * (n_init - config.n_min))))


def optimize(problem: ProblemDef, config: OptimizerConfig,
             warm_start=None) -> tuple[Individual, OptimizerStats]:
    """Run LSHADE until the budget or deadline is exhausted.

    Deterministic for a fixed seed when no deadline is set. `warm_start`
    may be one vector or a list of vectors injected into the initial
    population (clipped to bounds).
    """
    rng = np.random.default_rng(config.seed)
    dim = problem.dimension
    n_init = config.n_init if config.n_init is not None else 18 * dim
    n_init = max(n_init, config.n_min)
    stats = OptimizerStats()
    start = time.perf_counter()
    deadline_hit = False

    def out_of_time() -> bool:
        return config.deadline is not None and \
            time.perf_counter() - start >= config.deadline

    def evaluate(x: np.ndarray) -> Individual:
        f, phi = problem.evaluate(x)
        stats.evaluations += 1
        return Individual(x=x, f=f, violation=phi)

    seeds = []
    if warm_start is not None:
        ws = warm_start if isinstance(warm_start, (list, tuple)) else [warm_start]
        seeds = [np.clip(np.asarray(w, dtype=float), problem.lower, problem.upper)
                 for w in ws]

    pop_x = problem.lower + rng.random((n_init, dim)) * (problem.upper - problem.lower)
    for i, w in enumerate(seeds[:n_init]):
        pop_x[i] = w

    population: list[Individual] = []
    for x in pop_x:
        if stats.evaluations >= config.budget or out_of_time():
            deadline_hit = True
            break
        population.append(evaluate(x))
    if not population:
        raise RuntimeError("optimizer completed zero evaluations")

    best = min(population, key=lambda ind: ind.key())
    memory = SuccessMemory(size=config.memory_size)
    archive: list[np.ndarray] = []
    pop_size = len(population)

    while not deadline_hit and stats.evaluations < config.budget:
        stats.generations += 1
        successes = []
        new_population = list(population)
        n = len(population)
        order = sorted(range(n), key=lambda i: population[i].key())
        for i in range(n):
            if stats.evaluations >= config.budget or out_of_time():
                deadline_hit = True
                break
            r = int(rng.integers(memory.size))
            f_scale = memory.m_f[r] + 0.1 * rng.standard_cauchy()
            while f_scale <= 0.0:
                f_scale = memory.m_f[r] + 0.1 * rng.standard_cauchy()
            f_scale = min(f_scale, 1.0)
            cr = float(np.clip(rng.normal(memory.m_cr[r], 0.1), 0.0, 1.0))

            trial_x = generate_trial(i, population, archive, f_scale, cr,
                                     config.p_best, problem.lower,
                                     problem.upper, rng, order=order)
            trial = evaluate(trial_x)
            parent = population[i]
            if _better(trial, parent):
                new_population[i] = trial
                archive.append(parent.x)
                improvement = parent.violation - trial.violation \
                    if parent.violation != trial.violation else parent.f - trial.f
                successes.append((f_scale, cr, max(improvement, 1e-300)))
                if _better(trial, best):
                    best = trial
        population = new_population

        max_archive = max(4, int(round(config.archive_rate * len(population))))
        while len(archive) > max_archive:
            archive.pop(int(rng.integers(len(archive))))

        pop_size = adapt(successes, memory, stats.evaluations, config, n_init)
        if pop_size < len(population):
            population.sort(key=lambda ind: ind.key())
            population = population[:pop_size]

        feas_best = min(population, key=lambda ind: ind.key())
        stats.best_f_history.append(feas_best.f)
        stats.best_violation_history.append(feas_best.violation)
        stats.pop_size_history.append(len(population))

    stats.wall_time = time.perf_counter() - start
    return best, stats
