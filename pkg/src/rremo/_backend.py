"""Backend selection between the compiled kernel and the pure-Python loops.

The compiled module ``rremo._core`` is optional.  If it failed to build, or the
environment variable ``RREMO_PURE_PYTHON`` is set to a true value, everything
runs through the Python reference code.  Both paths consume the random stream
identically, so the choice affects speed only.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _core
except ImportError:  # pragma: no cover - exercised only without a compiler
    _core = None

BACKENDS = ("auto", "compiled", "python")
KERNEL_MAX_URRRMO_N = 128


def _env_forces_python() -> bool:
    return os.environ.get("RREMO_PURE_PYTHON", "").strip().lower() in ("1", "true", "yes", "on")


def available() -> bool:
    return _core is not None


def default_backend() -> str:
    return "compiled" if available() and not _env_forces_python() else "python"


def supports(problem) -> bool:
    kind, n, _, _ = problem.kernel_spec()
    return kind == 0 or n <= KERNEL_MAX_URRRMO_N


def use_compiled(backend: str, problem) -> bool:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}")
    if backend == "python":
        return False
    if backend == "compiled":
        if not available():
            raise RuntimeError("compiled backend requested but rremo._core is not built")
        if not supports(problem):
            raise RuntimeError(f"compiled backend does not support {problem!r}")
        return True
    return available() and not _env_forces_python() and supports(problem)


def int_to_words(v: int, n: int) -> np.ndarray:
    W = (n + 63) // 64
    return np.frombuffer(int(v).to_bytes(8 * W, "little"), dtype="<u8").astype(np.uint64)


def words_to_int(words) -> int:
    return int.from_bytes(np.ascontiguousarray(words, dtype="<u8").tobytes(), "little")


def problem_args(problem):
    kind, n, perm, z = problem.kernel_spec()
    zwords = int_to_words(z, n) if z else None
    return kind, n, perm, zwords


def mutation_args(mutation):
    cdf = np.asarray(mutation.cdf, dtype=np.float64) if mutation.cdf is not None else None
    return mutation.kind, cdf, float(mutation.rate)


def _population(problem, pop, fit):
    from .algorithms import Individual
    from .bitstring import BitString
    from .objectives import Fitness

    return [Individual(BitString(problem.n, words_to_int(g)), Fitness(int(f[0]), int(f[1])))
            for g, f in zip(pop, fit)]


def _opt(v):
    return None if v < 0 else int(v)


def gsemo(problem, mutation, crossover, p_c, budget, rng, check_invariants):
    from .algorithms import RunResult

    r = _core.gsemo(rng, *problem_args(problem), *mutation_args(mutation),
                    crossover.code, float(p_c), int(budget), bool(check_invariants))
    viol = {"antichain": r["antichain"], "protect_count": 0, "protect_survival": 0}
    return RunResult("gsemo", r["evaluations"], r["generations"], _opt(r["first_hit"]),
                     r["covered"], problem.front_size, _opt(r["plateau_hit"]), r["max_pop"],
                     viol, _population(problem, r["pop"], r["fit"]), backend="compiled")


def nsgaii(problem, mutation, crossover, p_c, mu, budget, rng, check_invariants):
    from .algorithms import RunResult

    r = _core.nsgaii(rng, *problem_args(problem), *mutation_args(mutation),
                     crossover.code, float(p_c), int(mu), int(budget), bool(check_invariants))
    viol = {k: r[k] for k in ("antichain", "protect_count", "protect_survival")}
    return RunResult("nsgaii", r["evaluations"], r["generations"], _opt(r["first_hit"]),
                     r["covered"], problem.front_size, None, mu, viol,
                     _population(problem, r["pop"], r["fit"]), backend="compiled")


def evaluate_batch(problem, values) -> np.ndarray:
    """Fitness of many genomes (Python ints) through the kernel evaluator."""
    kind, n, perm, zwords = problem_args(problem)
    W = (n + 63) // 64
    x = np.zeros((len(values), W), dtype=np.uint64)
    for i, v in enumerate(values):
        x[i] = int_to_words(v, n)
    return _core.evaluate_words(kind, n, perm, zwords, x)


def mutate_batch(mutation, x, samples, rng) -> np.ndarray:
    """``samples`` independent mutants of ``x`` as rows of little-endian words."""
    return _core.mutate_batch(rng, x.n, int_to_words(x.value, x.n), *mutation_args(mutation),
                              int(samples))


def crossover_batch(crossover, n, xs, ys, rng):
    return _core.crossover_batch(rng, n, crossover.code, xs, ys)


def probe(problem, mutation, src_code, tgt_code, samples, max_tries, rng):
    return _core.probe(rng, *problem_args(problem), *mutation_args(mutation),
                       int(src_code), int(tgt_code), int(samples), int(max_tries))
