"""Acceptance criteria 1-11, each at its stated size and tolerance.

Every test records one PASS/FAIL line; the lines are repeated in a section
at the end of the pytest output.  Seeds are fixed here and never tuned.

    pytest -v tests/test_acceptance.py
"""

import functools
import time

import pytest

from rremo.bitstring import BitString
from rremo.harness import ExperimentConfig, format_csv, run_experiment, summarize
from rremo.objectives import make_problem, rrrmo_front, urrrmo_front
from rremo.operators import Crossover, Mutation
from rremo.oracles import (brute_force_pareto, complementarity_check, jump_probability_probe,
                           operator_flip_frequency, trial_key, unbiasedness_check)
from rremo.rng import Rng

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

SEED = 2024
PROBE_SAMPLES = 10**7
OPERATOR_SAMPLES = 10**6

EXPERIMENTS = {
    "c2": dict(problem="rrrmo", n=(10, 20, 30), algo="gsemo", mutation="std",
               crossover="onepoint", pc=0.5, budget="100*n**4", trials=20),
    "c3": dict(problem="rrrmo", n=(20,), algo="nsgaii", mu="46", mutation="std",
               crossover="onepoint", pc=0.5, budget="10**8", trials=20),
    "c4-gsemo": dict(problem="rrrmo", n=(40,), algo="gsemo", mutation="std", crossover="none",
                     pc=0.0, budget="10**7", trials=20),
    "c4-nsgaii": dict(problem="rrrmo", n=(40,), algo="nsgaii", mu="86", mutation="std",
                      crossover="none", pc=0.0, budget="10**7", trials=20),
    "c6-r1": dict(problem="rrrmo", n=(50,), algo="gsemo", mutation="hyper:1", crossover="none",
                  pc=0.0, budget="10**6", trials=10),
    "c6-r05": dict(problem="rrrmo", n=(100,), algo="gsemo", mutation="hyper:0.5",
                   crossover="none", pc=0.0, budget="10**6", trials=10),
    "c7-gsemo": dict(problem="urrrmo", n=(16, 32, 48), algo="gsemo", mutation="std",
                     crossover="uniform", pc=0.5, budget="200*n**3", trials=20),
    "c7-nsgaii": dict(problem="urrrmo", n=(32,), algo="nsgaii", mu="5*n", mutation="std",
                      crossover="uniform", pc=0.5, budget="10**8", trials=20),
    "c8": dict(problem="urrrmo", n=(64,), algo="gsemo", mutation="std", crossover="none",
               pc=0.0, budget="10**7", trials=20),
}


def config(name):
    return ExperimentConfig(seed=SEED, **EXPERIMENTS[name])


@functools.cache
def records(name):
    return run_experiment(config(name))


def _successes(recs):
    return sum(r.success for r in recs)


# --------------------------------------------------------------------------


def test_criterion_01_fronts(verdict):
    t0 = time.perf_counter()
    parts = []
    ok = True
    for n in (5, 10, 15, 20):
        bf = brute_force_pareto(make_problem("rrrmo", n))
        closed = rrrmo_front(n)
        same = bf.vectors == sorted(f for _, f in closed) and \
            sorted(x.value for x in bf.preimages) == sorted(x.value for x, _ in closed)
        ok &= same
        parts.append(f"rrrmo n={n} {'=' if same else '!='}")
    bf = brute_force_pareto(make_problem("urrrmo", 16))
    front = urrrmo_front(16, enumerate_W=True)
    same = bf.vectors == front.fitness_vectors and len(bf.vectors) == 9 and \
        len(bf.preimages) == 144 and \
        sorted(x.value for x in bf.preimages) == sorted(w.value for w in front.W)
    ok &= same
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    parts.append(f"urrrmo n=16 {len(bf.vectors)} vectors/{len(bf.preimages)} preimages")
    verdict(1, ok, f"{'; '.join(parts)}; {elapsed:.1f}s")
    assert ok


def test_criterion_02_gsemo_onepoint_rrrmo(verdict):
    recs = records("c2")
    rows, slopes = summarize(recs)
    (slope,) = slopes.values()
    rate = _successes(recs) / len(recs)
    medians = ", ".join(f"n={r.n}: {r.median_evals:.0f}" for r in rows)
    ok = rate == 1.0 and slope <= 4.6
    verdict(2, ok, f"success {rate:.0%}; medians {medians}; log-log slope {slope:.2f} (<= 4.6)")
    assert ok


def test_criterion_03_nsgaii_onepoint_rrrmo(verdict):
    recs = records("c3")
    rate = _successes(recs) / len(recs)
    worst = max(r.evaluations_used for r in recs)
    verdict(3, rate == 1.0, f"success {rate:.0%} over {len(recs)} trials; max evals {worst}")
    assert rate == 1.0


def test_criterion_04_no_crossover_fails(verdict):
    g, m = records("c4-gsemo"), records("c4-nsgaii")
    hits = sum(r.first_pareto_hit_evals is not None for r in g + m)
    plateau = sum(r.diagnostics["plateau_hit"] is not None for r in g)
    ok = hits == 0 and plateau == len(g)
    verdict(4, ok, f"Pareto hits {hits} of {len(g) + len(m)} runs; GSEMO runs reaching F' "
                   f"{plateau}/{len(g)}")
    assert ok


def test_criterion_05_unbiased_probes(verdict):
    p = make_problem("rrrmo", 40)
    reps = [jump_probability_probe(p, "Gprime", "F", Mutation(spec, 40), PROBE_SAMPLES,
                                   Rng(trial_key(SEED, spec)))
            for spec in ("unbiased:uniform", "unbiased:binomial-1-over-n", "unbiased:point:n/5")]
    ok = all(r.passed for r in reps)
    detail = "; ".join(f"{r.claim.split(':', 3)[-1]} hits={r.observed['hits']}" for r in reps)
    verdict(5, ok, f"{detail} ({PROBE_SAMPLES:.0e} samples each)")
    assert ok


def test_criterion_06_hypermutation_stalls(verdict):
    r1, r05 = records("c6-r1"), records("c6-r05")
    most = max(r.diagnostics["covered"] for r in r1)
    first = sum(r.first_pareto_hit_evals is not None for r in r1)
    full = _successes(r05)
    ok = most <= 1 and full == 0
    verdict(6, ok, f"r=1 n=50: max vectors covered {most} ({first}/{len(r1)} hit the front); "
                   f"r=0.5 n=100: full coverage {full}/{len(r05)}")
    assert ok


def test_criterion_07_uniform_crossover_urrrmo(verdict):
    g, m = records("c7-gsemo"), records("c7-nsgaii")
    per_n = {n: _successes([r for r in g if r.n == n]) for n in (16, 32, 48)}
    ok = all(v == 20 for v in per_n.values()) and _successes(m) == len(m)
    detail = ", ".join(f"n={n} {v}/20" for n, v in per_n.items())
    verdict(7, ok, f"GSEMO {detail}; NSGA-II mu=160 {_successes(m)}/{len(m)}")
    assert ok


def test_criterion_08_mutation_only_urrrmo(verdict):
    recs = records("c8")
    found = sum(r.first_pareto_hit_evals is not None for r in recs)
    p = make_problem("urrrmo-sigma-z", 64, sigma="hypermut-hard", z="0")
    reps = [jump_probability_probe(p, "K", "W", Mutation(spec, 64), PROBE_SAMPLES,
                                   Rng(trial_key(SEED, spec)))
            for spec in ("hyper:1/3", "hyper:1/2", "hyper:1")]
    ok = found == 0 and all(r.passed for r in reps)
    probes = ", ".join(f"{r.claim.rsplit(':', 2)[-2]}:{r.claim.rsplit(':', 1)[-1][:-1]} "
                       f"hits={r.observed.get('hits')}" for r in reps)
    verdict(8, ok, f"GSEMO runs finding W {found}/{len(recs)}; probes K->W {probes}")
    assert ok


def test_criterion_09_operator_distributions(verdict):
    n = 100
    x = BitString(n, Rng(SEED).bits(n))
    reps = [operator_flip_frequency(Mutation(spec, n), x, OPERATOR_SAMPLES,
                                    Rng(trial_key(SEED, spec)))
            for spec in ("std", "hyper:0.25", "hyper:0.5", "hyper:1")]
    reps.append(complementarity_check(Crossover("uniform"), n, OPERATOR_SAMPLES,
                                      Rng(trial_key(SEED, "uniform"))))
    x8 = BitString.from_str("10110010")
    reps += [unbiasedness_check(Mutation(spec, 8), x8, OPERATOR_SAMPLES,
                                Rng(trial_key(SEED, "unbiased " + spec)))
             for spec in ("std", "unbiased:uniform", "unbiased:point:3")]
    ok = all(r.passed for r in reps)
    parts = []
    for r in reps:
        if "max_abs_z" in r.observed:
            parts.append(f"{r.claim} max|z|={r.observed['max_abs_z']:.2f}")
        elif "violations" in r.observed:
            parts.append(f"{r.claim} violations={r.observed['violations']}")
        else:
            parts.append(f"{r.claim} p={min(r.observed['sphere_p'], r.observed.get('radius_p', 1)):.3g}")
    verdict(9, ok, "; ".join(parts))
    for r in reps:
        print(r.line()[:300])
    assert ok


def test_criterion_10_lemma_invariants(verdict):
    totals = {"antichain": 0, "protect_count": 0, "protect_survival": 0}
    runs = 0
    for name in EXPERIMENTS:
        for r in records(name):
            runs += 1
            for k, v in r.diagnostics["violations"].items():
                totals[k] += v
    ok = not any(totals.values())
    verdict(10, ok, f"{runs} runs from criteria 2-8; violations {totals}")
    assert ok


@pytest.mark.parametrize("name", ["c3", "c6-r1", "c7-gsemo"])
def test_criterion_11_determinism(verdict, name):
    first = format_csv(records(name))
    again = format_csv(run_experiment(config(name)))
    cfg = config(name)
    cfg.workers = 2
    threaded = format_csv(run_experiment(cfg))
    ok = first == again == threaded
    verdict(11, ok, f"{name}: rerun and 2-worker rerun byte-identical ({len(first)} bytes)")
    assert ok
