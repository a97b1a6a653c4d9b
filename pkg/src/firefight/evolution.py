"""Generational EA for enclosure and mutation-only hill climbing for highways.

The generational loop keeps its population as two ``(n, L)`` integer
arrays (directions and barrier ends) so that breeding is vectorised and
each individual goes straight into the compiled evaluator.
"""
from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from firefight import kernels
from firefight.fitness import (
    EnclosureFitness,
    HighwayProfile,
    compare_highway,
    enclosure_fitness,
)
from firefight.genomes import (
    ConnectedGenome,
    MutationRates,
    Window,
    crossover_cut,
    format_genome,
    mutate_connected,
    mutate_coordinate,
    mutate_loci,
    random_connected,
    random_coordinate,
)
from firefight.grid import Cell, ConfigInvalid, Outcome, Scenario, SimConfig, parse_rational

log = logging.getLogger(__name__)


def opening_credit(c, opening) -> Fraction:
    """Credit that makes the account open with ``opening`` instead of ``c``.

    The account pays ``c`` before every protect phase, so opening with
    ``b`` is the same as a one-off credit of ``b - c``. ``None`` means the
    plain account.
    """
    if opening is None:
        return Fraction(0)
    credit = parse_rational(opening) - parse_rational(c)
    if credit < 0:
        raise ConfigInvalid(f"opening budget {opening} is below the income c={c}")
    return credit


@dataclass(frozen=True)
class EAParams:
    """Knobs of the generational algorithm.

    ``initial_budget`` is the balance the account opens with, i.e. the
    number of cells protectable in step 1; the plain model opens with
    ``c``. ``None`` picks 2 for ``c < 2`` and the plain account otherwise.
    ``genome_length=None`` uses ``ceil(t*c + credit)`` loci, which covers
    every cell the budget can pay for up to step ``t``.
    """

    c: Fraction
    t: int
    n: int = 50
    p: float = 0.02
    r: float = 0.3
    initial_budget: Optional[Fraction] = None
    start: Cell = Cell(0, 1)
    seed: int = 0
    max_generations: int = 1000
    target_fitness: Optional[int] = None
    stop_when_enclosed: bool = False
    elitism: bool = True
    distinct_parents: bool = False
    orientation: str = "ccw"
    genome_length: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "c", parse_rational(self.c))
        object.__setattr__(self, "start", Cell(*self.start))
        if self.initial_budget is None and self.c < 2:
            object.__setattr__(self, "initial_budget", Fraction(2))
        if self.initial_budget is not None:
            object.__setattr__(self, "initial_budget", parse_rational(self.initial_budget))
        opening_credit(self.c, self.initial_budget)
        if self.n < 2:
            raise ConfigInvalid("population size must be at least 2")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigInvalid("mutation probability must lie in [0, 1]")
        if not 0.0 < self.r <= 1.0 or math.floor(self.r * self.n) < 1:
            raise ConfigInvalid("keep ratio must leave at least one parent")
        if self.t < 1:
            raise ConfigInvalid("simulation time must be at least 1")
        if self.orientation not in ("cw", "ccw"):
            raise ConfigInvalid("orientation must be 'cw' or 'ccw'")

    @property
    def n_parents(self) -> int:
        return math.floor(self.r * self.n)

    @property
    def length(self) -> int:
        if self.genome_length is not None:
            return self.genome_length
        return math.ceil(self.t * self.c + self.credit)

    @property
    def credit(self) -> Fraction:
        return opening_credit(self.c, self.initial_budget)

    def sim_config(self) -> SimConfig:
        return SimConfig(c=self.c, t_max=self.t, initial_budget=self.credit)


@dataclass
class GenerationRecord:
    generation: int
    best: object
    mean: float
    best_genome: Optional[str] = None


@dataclass
class RunLog:
    params: dict
    seed: int
    records: list = field(default_factory=list)
    wall_clock: float = 0.0
    reason: str = ""

    def best_series(self) -> list:
        return [rec.best for rec in self.records]

    def to_jsonl(self) -> str:
        head = {"type": "params", "params": self.params, "seed": self.seed}
        lines = [json.dumps(head, default=str)]
        for rec in self.records:
            row = {"type": "generation", "generation": rec.generation,
                   "best": _fitness_json(rec.best), "mean": rec.mean}
            if rec.best_genome is not None:
                row["best_genome"] = rec.best_genome
            lines.append(json.dumps(row))
        tail = {"type": "end", "reason": self.reason, "wall_clock": round(self.wall_clock, 3),
                "generations": len(self.records)}
        lines.append(json.dumps(tail))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["generation,best,mean"]
        for rec in self.records:
            rows.append(f"{rec.generation},{_fitness_scalar(rec.best)},{rec.mean:.6g}")
        return "\n".join(rows) + "\n"


def _fitness_json(fit):
    if isinstance(fit, EnclosureFitness):
        return {"burning": fit.burning_count, "enclosed": fit.enclosed,
                "time": fit.enclosure_time, "protected": fit.protected_count}
    if isinstance(fit, HighwayProfile):
        return {"r": fit.r, "d": list(fit.d), "survived": fit.survived}
    return fit


def _fitness_scalar(fit):
    if isinstance(fit, EnclosureFitness):
        return fit.burning_count
    if isinstance(fit, HighwayProfile):
        return fit.r
    return fit


def _params_dict(params) -> dict:
    out = {}
    for key, value in asdict(params).items():
        if isinstance(value, Fraction):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        out[key] = value
    return out


def outcome_from_kernel(res) -> Outcome:
    reason, t, burning, protected, profile = res
    return Outcome(reason, t, burning, protected, profile)


# -- generational EA ------------------------------------------------------------

def _evaluate_population(dirs, ends, params: EAParams, config: SimConfig) -> list:
    return [
        enclosure_fitness(outcome_from_kernel(
            kernels.evaluate_loci(params.start, dirs[i], ends[i], config, params.orientation)))
        for i in range(dirs.shape[0])
    ]


def _breed(dirs, ends, fitness, params: EAParams, rng: np.random.Generator):
    """Selection, crossover and mutation on a population of locus arrays."""
    n, length = dirs.shape
    order = sorted(range(n), key=fitness.__getitem__)
    if params.distinct_parents:
        seen = set()
        unique = []
        for i in order:
            key = dirs[i].tobytes() + ends[i].tobytes()
            if key not in seen:
                seen.add(key)
                unique.append(i)
        # duplicates only fill up if there are too few distinct genomes
        order = unique + [i for i in order if i not in set(unique)]
    k = params.n_parents
    parents_d = dirs[order[:k]]
    parents_e = ends[order[:k]]
    new_d = np.empty_like(dirs)
    new_e = np.empty_like(ends)
    new_d[:k] = parents_d
    new_e[:k] = parents_e
    for i in range(k, n):
        a, b = rng.integers(0, k, size=2)
        cut = crossover_cut(length, length, rng)
        new_d[i, :cut] = parents_d[a, :cut]
        new_d[i, cut:] = parents_d[b, cut:]
        new_e[i, :cut] = parents_e[a, :cut]
        new_e[i, cut:] = parents_e[b, cut:]
    first = 1 if params.elitism else 0
    mutate_loci(new_d[first:], new_e[first:], params.p, rng)
    return new_d, new_e


def evolve_generation(population: Sequence[ConnectedGenome], params: EAParams,
                      rng: np.random.Generator) -> list[ConnectedGenome]:
    """One round of evaluate, truncate to the best ``floor(r*n)``, refill, mutate."""
    if len(population) != params.n:
        raise ConfigInvalid(f"population has {len(population)} members, expected {params.n}")
    arrays = [g.as_arrays() for g in population]
    dirs = np.stack([a[0] for a in arrays])
    ends = np.stack([a[1] for a in arrays])
    config = params.sim_config()
    fitness = _evaluate_population(dirs, ends, params, config)
    new_d, new_e = _breed(dirs, ends, fitness, params, rng)
    return [ConnectedGenome.from_arrays(params.start, new_d[i], new_e[i]) for i in range(params.n)]


def run_ea(params: EAParams, progress: Optional[Callable] = None):
    """Evolve random connected genomes; returns ``(best_genome, best_fitness, RunLog)``."""
    rng = np.random.default_rng(params.seed)
    config = params.sim_config()
    dirs = rng.integers(0, 8, size=(params.n, params.length))
    ends = rng.integers(0, 2, size=(params.n, params.length))
    runlog = RunLog(params=_params_dict(params), seed=params.seed)
    best_fit = None
    best_genome = None
    reason = "max_generations"
    started = time.perf_counter()
    for gen in range(params.max_generations):
        fitness = _evaluate_population(dirs, ends, params, config)
        i_best = min(range(params.n), key=fitness.__getitem__)
        snapshot = None
        if best_fit is None or fitness[i_best] < best_fit:
            best_fit = fitness[i_best]
            best_genome = ConnectedGenome.from_arrays(params.start, dirs[i_best], ends[i_best])
            snapshot = format_genome(best_genome)
        mean = float(np.mean([f.burning_count for f in fitness]))
        runlog.records.append(GenerationRecord(gen, best_fit, mean, snapshot))
        if progress is not None:
            progress(gen, best_fit, mean)
        if params.target_fitness is not None and best_fit.burning_count <= params.target_fitness:
            reason = "target_fitness"
            break
        if params.stop_when_enclosed and best_fit.enclosed:
            reason = "enclosed"
            break
        if gen + 1 < params.max_generations:
            dirs, ends = _breed(dirs, ends, fitness, params, rng)
    runlog.wall_clock = time.perf_counter() - started
    runlog.reason = reason
    return best_genome, best_fit, runlog


# -- mutation-only hill climbing ------------------------------------------------------

@dataclass(frozen=True)
class HillClimbParams:
    """Settings for the single-strategy climber.

    The highway lies on row 0 and the fire starts at ``(0, d)``. For the
    enclosure scenario ``d`` is ignored and the fire starts at the origin.
    """

    c: Fraction
    t: int
    d: int = 20
    seed: int = 0
    max_iterations: int = 10_000
    restarts: int = 1
    kind: str = "coordinate"
    rates: MutationRates = MutationRates()
    start: Optional[Cell] = None
    window: Optional[Window] = None
    initial_count: int = 0
    genome_length: Optional[int] = None
    initial_budget: Fraction = Fraction(0)
    initial_protected: tuple = ()
    scenario: Scenario = Scenario.HIGHWAY
    orientation: str = "ccw"

    def __post_init__(self):
        object.__setattr__(self, "c", parse_rational(self.c))
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.restarts < 1:
            raise ConfigInvalid("restarts must be at least 1")
        if self.kind not in ("connected", "coordinate"):
            raise ConfigInvalid(f"unknown genome kind {self.kind!r}")
        if self.scenario is Scenario.HIGHWAY and self.d < 1:
            raise ConfigInvalid("fire must start above the highway")

    def sim_config(self) -> SimConfig:
        if self.scenario is Scenario.HIGHWAY:
            return SimConfig.highway(self.c, self.d, self.t, initial_budget=self.initial_budget,
                                     initial_protected=self.initial_protected)
        return SimConfig(c=self.c, t_max=self.t, initial_budget=self.initial_budget,
                         initial_protected=self.initial_protected)

    @property
    def origin(self) -> Cell:
        return Cell(0, self.d) if self.scenario is Scenario.HIGHWAY else Cell(0, 0)

    def resolved_window(self) -> Window:
        if self.window is not None:
            return self.window
        if self.scenario is Scenario.HIGHWAY:
            return Window(-self.t, self.t, 1, self.d + self.d // 2)
        return Window(-self.t, self.t, -self.t, self.t)

    def resolved_start(self) -> Cell:
        if self.start is not None:
            return Cell(*self.start)
        o = self.origin
        return Cell(o.x, o.y - 1) if self.scenario is Scenario.HIGHWAY else Cell(0, 1)

    def resolved_length(self) -> int:
        if self.genome_length is not None:
            return self.genome_length
        return math.ceil(self.t * self.c + parse_rational(self.initial_budget))


def evaluate_genome(genome, config: SimConfig, orientation: str = "ccw") -> Outcome:
    """Fast evaluation of either genome kind."""
    if isinstance(genome, ConnectedGenome):
        return outcome_from_kernel(kernels.evaluate_connected(genome, config, orientation))
    return outcome_from_kernel(kernels.evaluate_coordinate(genome, config))


def _scenario_fitness(outcome: Outcome, scenario: Scenario):
    from firefight.fitness import highway_fitness

    if scenario is Scenario.HIGHWAY:
        return highway_fitness(outcome)
    return enclosure_fitness(outcome)


def _fitter(a, b, scenario: Scenario) -> bool:
    if scenario is Scenario.HIGHWAY:
        return compare_highway(a, b) > 0
    return a < b


def initial_genome(params: HillClimbParams, rng: np.random.Generator):
    if params.kind == "connected":
        return random_connected(params.resolved_length(), params.resolved_start(), rng)
    return random_coordinate(params.initial_count, params.resolved_window(), rng)


def hill_climb(initial, params: HillClimbParams, seed: Optional[int] = None):
    """Mutate one strategy; keep a mutant only if it is strictly fitter.

    Returns ``(best_genome, best_fitness, RunLog)``; the log holds one record
    per accepted mutation (and the starting point as iteration 0).
    """
    seed = params.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    config = params.sim_config()
    window = params.resolved_window()
    if initial is None:
        initial = initial_genome(params, rng)
    current = initial
    current_fit = _scenario_fitness(evaluate_genome(current, config, params.orientation),
                                    params.scenario)
    runlog = RunLog(params=_params_dict(params), seed=seed)
    runlog.records.append(GenerationRecord(0, current_fit, float(_fitness_scalar(current_fit)),
                                           format_genome(current)))
    started = time.perf_counter()
    for it in range(1, params.max_iterations + 1):
        if isinstance(current, ConnectedGenome):
            cand = mutate_connected(current, params.rates, rng)
        else:
            cand = mutate_coordinate(current, params.rates, rng, window)
        if cand == current:
            continue
        fit = _scenario_fitness(evaluate_genome(cand, config, params.orientation), params.scenario)
        if _fitter(fit, current_fit, params.scenario):
            current, current_fit = cand, fit
            runlog.records.append(GenerationRecord(it, fit, float(_fitness_scalar(fit)),
                                                   format_genome(cand)))
    runlog.wall_clock = time.perf_counter() - started
    runlog.reason = "max_iterations"
    return current, current_fit, runlog


def restart_seeds(params: HillClimbParams) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(params.seed).generate_state(params.restarts)]


def _climb_task(args):
    params, seed = args
    return hill_climb(None, params, seed=seed)


def parallel_restarts(params: HillClimbParams, jobs: int = 1):
    """Independent climbs from derived seeds; returns ``(best, fitness, logs)``.

    With ``restarts=1`` the single climb uses ``params.seed`` directly, so the
    result equals :func:`hill_climb`. The winner is picked in seed order with
    ties going to the earlier restart, so scheduling never changes it.
    """
    seeds = [params.seed] if params.restarts == 1 else restart_seeds(params)
    tasks = [(params, s) for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_climb_task, tasks))
    else:
        results = [_climb_task(t) for t in tasks]
    best_i = 0
    for i in range(1, len(results)):
        if _fitter(results[i][1], results[best_i][1], params.scenario):
            best_i = i
    best, best_fit, _ = results[best_i]
    return best, best_fit, [r[2] for r in results]
