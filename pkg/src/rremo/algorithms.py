"""GSEMO, NSGA-II and the elitist (mu+lambda) black-box driver.

The run functions dispatch to the compiled kernel when it is importable and
supports the problem; the Python loops here are the reference path and the
fallback.  Both consume the random stream identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import _backend
from .bitstring import BitString
from .objectives import Fitness, Problem, dominates, weakly_dominates
from .operators import Crossover, Mutation, pick_one_offspring
from .rng import Rng

INF = math.inf

VIOLATION_KINDS = ("antichain", "protect_count", "protect_survival")


@dataclass(frozen=True)
class Individual:
    genome: BitString
    fitness: Fitness


def _fit(p) -> Sequence[int]:
    return p.fitness if isinstance(p, Individual) else p


@dataclass
class Layering:
    """Non-dominated layers (0-based rank per individual) and crowding distances."""

    layers: list[list[int]]
    rank: list[int]
    cdist: list[float] = field(default_factory=list)


# --------------------------------------------------------------------------
# ranking


def nondominated_sort(pop: Sequence) -> Layering:
    """Peel ``pop`` into layers; layer members are listed in index order."""
    fits = [_fit(p) for p in pop]
    N = len(fits)
    dominated_by_count = [0] * N
    dominated_sets: list[list[int]] = [[] for _ in range(N)]
    for i in range(N):
        fi = fits[i]
        for j in range(i + 1, N):
            fj = fits[j]
            if dominates(fi, fj):
                dominated_sets[i].append(j)
                dominated_by_count[j] += 1
            elif dominates(fj, fi):
                dominated_sets[j].append(i)
                dominated_by_count[i] += 1
    rank = [-1] * N
    current = [i for i in range(N) if dominated_by_count[i] == 0]
    layers = []
    while current:
        layers.append(current)
        nxt = []
        for i in current:
            rank[i] = len(layers) - 1
            for j in dominated_sets[i]:
                dominated_by_count[j] -= 1
                if dominated_by_count[j] == 0:
                    nxt.append(j)
        current = sorted(nxt)
    return Layering(layers, rank)


def crowding_distance(layer: Sequence) -> list[float]:
    """Crowding distance of every member of one layer.

    Per objective the layer is sorted in descending order, ties kept in input
    order.  End points get +inf; a zero objective range contributes 0.
    """
    fits = [_fit(p) for p in layer]
    K = len(fits)
    cd = [0.0] * K
    if K == 0:
        return cd
    for k in range(2):
        order = sorted(range(K), key=lambda i: (-fits[i][k], i))
        first, last = order[0], order[-1]
        span = fits[first][k] - fits[last][k]
        cd[first] += INF
        if last != first:
            cd[last] += INF
        for pos in range(1, K - 1):
            i = order[pos]
            if span:
                cd[i] += (fits[order[pos - 1]][k] - fits[order[pos + 1]][k]) / span
    return cd


def rank_population(pop: Sequence) -> Layering:
    fits = [_fit(p) for p in pop]
    lay = nondominated_sort(fits)
    cdist = [0.0] * len(fits)
    for members in lay.layers:
        for i, d in zip(members, crowding_distance([fits[i] for i in members])):
            cdist[i] = d
    lay.cdist = cdist
    return lay


def survival_order(layering: Layering) -> list[int]:
    """Indices sorted by (layer ascending, crowding distance descending, index)."""
    r, cd = layering.rank, layering.cdist
    return sorted(range(len(r)), key=lambda i: (r[i], -cd[i], i))


def _tournament_index(rank: Sequence[int], cdist: Sequence[float], rng: Rng) -> int:
    mu = len(rank)
    a = rng.below(mu)
    b = rng.below(mu)
    if rank[a] != rank[b]:
        return a if rank[a] < rank[b] else b
    if cdist[a] != cdist[b]:
        return a if cdist[a] > cdist[b] else b
    return a if rng.coin() == 0 else b


def binary_tournament(pop: Sequence[Individual], layering: Layering, rng: Rng) -> Individual:
    return pop[_tournament_index(layering.rank, layering.cdist, rng)]


def front_coverage(pop: Sequence, problem: Problem) -> float:
    found = {problem.pareto_index(_fit(p)) for p in pop} - {None}
    return len(found) / problem.front_size


# --------------------------------------------------------------------------
# run bookkeeping


@dataclass
class RunResult:
    algorithm: str
    evaluations: int
    generations: int
    first_pareto_hit: Optional[int]
    covered: int
    front_size: int
    plateau_hit: Optional[int]
    max_pop_size: int
    violations: dict
    population: list[Individual]
    backend: str = "python"

    @property
    def coverage(self) -> float:
        return self.covered / self.front_size

    @property
    def success(self) -> bool:
        return self.covered == self.front_size

    def comparable(self) -> tuple:
        """Everything except the backend tag, for cross-backend equality."""
        pop = tuple((ind.genome.value, tuple(ind.fitness)) for ind in self.population)
        return (self.algorithm, self.evaluations, self.generations, self.first_pareto_hit,
                self.covered, self.front_size, self.plateau_hit, self.max_pop_size,
                tuple(sorted(self.violations.items())), pop)


def _new_violations() -> dict:
    return {k: 0 for k in VIOLATION_KINDS}


def _random_individual(problem: Problem, rng: Rng) -> Individual:
    g = BitString(problem.n, rng.bits(problem.n))
    return Individual(g, problem.evaluate(g))


# --------------------------------------------------------------------------
# GSEMO


@dataclass
class GSEMOState:
    population: list[Individual]
    evaluations: int = 1
    generation: int = 0
    first_pareto_hit: Optional[int] = None
    plateau_hit: Optional[int] = None
    covered: int = 0
    max_pop_size: int = 1
    violations: dict = field(default_factory=_new_violations)


def gsemo_init(problem: Problem, rng: Rng) -> GSEMOState:
    ind = _random_individual(problem, rng)
    state = GSEMOState([ind])
    if problem.pareto_index(ind.fitness) is not None:
        state.first_pareto_hit = 1
        state.covered = 1
    if problem.on_plateau(ind.fitness):
        state.plateau_hit = 1
    return state


def gsemo_step(state: GSEMOState, problem: Problem, mutation: Mutation, crossover: Crossover,
               p_c: float, rng: Rng, check_invariants: bool = True) -> GSEMOState:
    """One generation: a single offspring, accepted unless strictly dominated."""
    pop = state.population
    size = len(pop)
    p1 = pop[rng.below(size)]
    if rng.uniform() < p_c:
        p2 = pop[rng.below(size)]
        s = pick_one_offspring(crossover(p1.genome, p2.genome, rng), rng)
    else:
        s = p1.genome
    child = mutation(s, rng)
    f = problem.evaluate(child)
    state.evaluations += 1
    state.generation += 1
    idx = problem.pareto_index(f)
    if idx is not None and state.first_pareto_hit is None:
        state.first_pareto_hit = state.evaluations
    for q in pop:
        if dominates(q.fitness, f):
            return state
    seen = False
    keep = []
    for q in pop:
        if weakly_dominates(f, q.fitness):
            seen = seen or q.fitness == f
        else:
            keep.append(q)
    keep.append(Individual(child, f))
    state.population = keep
    if idx is not None and not seen:
        state.covered += 1
    if state.plateau_hit is None and problem.on_plateau(f):
        state.plateau_hit = state.evaluations
    if len(keep) > state.max_pop_size:
        state.max_pop_size = len(keep)
    if check_invariants:
        ok = all(not weakly_dominates(f, q.fitness) and not weakly_dominates(q.fitness, f)
                 for q in keep[:-1])
        bound = problem.antichain_bound([q.genome for q in keep], [q.fitness for q in keep])
        if not ok or len(keep) > bound:
            state.violations["antichain"] += 1
    return state


def gsemo_run(problem: Problem, mutation: Mutation, crossover: Crossover, p_c: float,
              budget: int, rng: Rng, check_invariants: bool = True, backend: str = "auto",
              monitor: Optional[Callable[[GSEMOState], None]] = None) -> RunResult:
    """Run GSEMO until the front is covered or ``budget`` evaluations are spent."""
    if budget < 1:
        raise ValueError("budget must be at least 1 evaluation")
    if not 0.0 <= p_c <= 1.0:
        raise ValueError(f"crossover probability must lie in [0, 1], got {p_c}")
    if monitor is None and _backend.use_compiled(backend, problem):
        return _backend.gsemo(problem, mutation, crossover, p_c, budget, rng, check_invariants)
    state = gsemo_init(problem, rng)
    if monitor is not None:
        monitor(state)
    front = problem.front_size
    while state.covered < front and state.evaluations < budget:
        gsemo_step(state, problem, mutation, crossover, p_c, rng, check_invariants)
        if monitor is not None:
            monitor(state)
    return RunResult("gsemo", state.evaluations, state.generation, state.first_pareto_hit,
                     state.covered, front, state.plateau_hit, state.max_pop_size,
                     dict(state.violations), list(state.population))


# --------------------------------------------------------------------------
# NSGA-II


@dataclass
class NSGAIIState:
    population: list[Individual]
    rank: list[int]
    cdist: list[float]
    evaluations: int
    generation: int = 0
    first_pareto_hit: Optional[int] = None
    covered: int = 0
    violations: dict = field(default_factory=_new_violations)
    last_layering: Optional[Layering] = None
    last_merged: Optional[list[Individual]] = None


def _check_mu(mu: int) -> None:
    if mu < 2 or mu % 2:
        raise ValueError(f"NSGA-II needs an even population size >= 2, got {mu}")


def _covered(pop: Sequence[Individual], problem: Problem) -> int:
    return len({problem.pareto_index(p.fitness) for p in pop} - {None})


def nsgaii_init(problem: Problem, mu: int, rng: Rng) -> NSGAIIState:
    _check_mu(mu)
    pop = []
    first = None
    for e in range(1, mu + 1):
        ind = _random_individual(problem, rng)
        if first is None and problem.pareto_index(ind.fitness) is not None:
            first = e
        pop.append(ind)
    lay = rank_population(pop)
    return NSGAIIState(pop, lay.rank, lay.cdist, mu, 0, first, _covered(pop, problem))


def nsgaii_step(state: NSGAIIState, problem: Problem, mutation: Mutation, crossover: Crossover,
                p_c: float, rng: Rng, check_invariants: bool = True) -> NSGAIIState:
    pop = state.population
    mu = len(pop)
    offspring = []
    for _ in range(mu // 2):
        pa = pop[_tournament_index(state.rank, state.cdist, rng)].genome
        pb = pop[_tournament_index(state.rank, state.cdist, rng)].genome
        if rng.uniform() < p_c:
            s1, s2 = crossover(pa, pb, rng)
        else:
            s1, s2 = pa, pb
        s1 = mutation(s1, rng)
        s2 = mutation(s2, rng)
        for s in (s1, s2):
            f = problem.evaluate(s)
            state.evaluations += 1
            if state.first_pareto_hit is None and problem.pareto_index(f) is not None:
                state.first_pareto_hit = state.evaluations
            offspring.append(Individual(s, f))
    merged = pop + offspring
    lay = rank_population(merged)
    order = survival_order(lay)
    survivors = order[:mu]
    if check_invariants:
        _check_nsgaii_invariants(state.violations, problem, merged, lay, survivors, mu)
    state.population = [merged[i] for i in survivors]
    state.rank = [lay.rank[i] for i in survivors]
    state.cdist = [lay.cdist[i] for i in survivors]
    state.covered = _covered(state.population, problem)
    state.generation += 1
    state.last_layering = lay
    state.last_merged = merged
    return state


def _check_nsgaii_invariants(viol: dict, problem: Problem, merged: Sequence[Individual],
                             lay: Layering, survivors: Sequence[int], mu: int) -> None:
    first = lay.layers[0]
    vectors = {merged[i].fitness for i in first}
    m = len(vectors)
    bound = problem.antichain_bound([merged[i].genome for i in first],
                                    [merged[i].fitness for i in first])
    if m > bound:
        viol["antichain"] += 1
    if sum(1 for i in first if lay.cdist[i] > 0) > 4 * m:
        viol["protect_count"] += 1
    if mu >= 4 * m:
        kept = {merged[i].fitness for i in survivors}
        if not vectors <= kept:
            viol["protect_survival"] += 1


def nsgaii_run(problem: Problem, mutation: Mutation, crossover: Crossover, p_c: float, mu: int,
               budget: int, rng: Rng, check_invariants: bool = True, backend: str = "auto",
               monitor: Optional[Callable[[NSGAIIState], None]] = None) -> RunResult:
    """Run NSGA-II; a generation is only started if its ``mu`` evaluations fit the budget."""
    _check_mu(mu)
    if budget < mu:
        raise ValueError(f"budget {budget} is smaller than the population size {mu}")
    if not 0.0 <= p_c <= 1.0:
        raise ValueError(f"crossover probability must lie in [0, 1], got {p_c}")
    if monitor is None and _backend.use_compiled(backend, problem):
        return _backend.nsgaii(problem, mutation, crossover, p_c, mu, budget, rng, check_invariants)
    state = nsgaii_init(problem, mu, rng)
    if monitor is not None:
        monitor(state)
    front = problem.front_size
    while state.covered < front and state.evaluations + mu <= budget:
        nsgaii_step(state, problem, mutation, crossover, p_c, rng, check_invariants)
        if monitor is not None:
            monitor(state)
    return RunResult("nsgaii", state.evaluations, state.generation, state.first_pareto_hit,
                     state.covered, front, None, mu, dict(state.violations),
                     list(state.population))


# --------------------------------------------------------------------------
# elitist (mu + lambda) black-box driver

RankingFn = Callable[[Sequence[Fitness]], list]
OffspringFn = Callable[[list[Individual], list, Rng], list[BitString]]


def elitist_blackbox_run(mu: int, lam: int, sample_offspring: OffspringFn, ranking: RankingFn,
                         problem: Problem, budget: int, rng: Rng,
                         max_generations: Optional[int] = None) -> RunResult:
    """Generic elitist (mu+lambda) scheme.

    ``ranking`` maps a list of fitness vectors to one sort key per entry (lower
    is better, index breaks ties).  ``sample_offspring`` receives the current
    population, the keys its members received when they were selected, and the
    rng, and returns ``lam`` genomes.
    """
    if mu < 1 or lam < 0:
        raise ValueError("need mu >= 1 and lam >= 0")
    if lam == 0 and max_generations is None:
        raise ValueError("lam = 0 never spends budget; give max_generations")
    pop = []
    first = None
    for e in range(1, mu + 1):
        ind = _random_individual(problem, rng)
        if first is None and problem.pareto_index(ind.fitness) is not None:
            first = e
        pop.append(ind)
    evals = mu
    keys = ranking([p.fitness for p in pop])
    front = problem.front_size
    covered = _covered(pop, problem)
    gen = 0
    while covered < front and evals + lam <= budget:
        if max_generations is not None and gen >= max_generations:
            break
        genomes = sample_offspring(pop, keys, rng)
        if len(genomes) != lam:
            raise ValueError(f"sample_offspring returned {len(genomes)} genomes, expected {lam}")
        offspring = []
        for g in genomes:
            f = problem.evaluate(g)
            evals += 1
            if first is None and problem.pareto_index(f) is not None:
                first = evals
            offspring.append(Individual(g, f))
        merged = pop + offspring
        rkeys = ranking([p.fitness for p in merged])
        order = sorted(range(len(merged)), key=lambda i: (rkeys[i], i))[:mu]
        pop = [merged[i] for i in order]
        keys = [rkeys[i] for i in order]
        covered = _covered(pop, problem)
        gen += 1
    return RunResult("blackbox", evals, gen, first, covered, front, None, mu,
                     _new_violations(), pop)


def nsgaii_ranking(fits: Sequence[Fitness]) -> list[tuple[int, float]]:
    lay = rank_population(fits)
    return [(r, -d) for r, d in zip(lay.rank, lay.cdist)]


def nsgaii_offspring(mutation: Mutation, crossover: Crossover, p_c: float) -> OffspringFn:
    """NSGA-II variation (tournaments, optional crossover, mutation) as a black-box sampler."""

    def sample(pop: list[Individual], keys: list, rng: Rng) -> list[BitString]:
        rank = [k[0] for k in keys]
        cdist = [-k[1] for k in keys]
        out = []
        for _ in range(len(pop) // 2):
            pa = pop[_tournament_index(rank, cdist, rng)].genome
            pb = pop[_tournament_index(rank, cdist, rng)].genome
            if rng.uniform() < p_c:
                s1, s2 = crossover(pa, pb, rng)
            else:
                s1, s2 = pa, pb
            out.append(mutation(s1, rng))
            out.append(mutation(s2, rng))
        return out

    return sample


def mutation_offspring(mutation: Mutation, lam: int) -> OffspringFn:
    """Uniform parent choice followed by mutation, ``lam`` times."""

    def sample(pop: list[Individual], keys: list, rng: Rng) -> list[BitString]:
        return [mutation(pop[rng.below(len(pop))].genome, rng) for _ in range(lam)]

    return sample


BLACKBOX_PRESETS = ("nsgaii", "mutation")


def blackbox_preset(name: str, mutation: Mutation, crossover: Crossover, p_c: float, mu: int):
    """(lambda, sample_offspring, ranking) for a named preset."""
    if name == "nsgaii":
        _check_mu(mu)
        return mu, nsgaii_offspring(mutation, crossover, p_c), nsgaii_ranking
    if name == "mutation":
        return mu, mutation_offspring(mutation, mu), nsgaii_ranking
    raise ValueError(f"unknown black-box preset {name!r}")
