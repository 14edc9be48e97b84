"""Crossover royal-road benchmarks for evolutionary multi-objective optimisation.

GSEMO, NSGA-II and an elitist (mu+lambda) driver on the RRRMO and uRRRMO
functions, with oracles and an experiment harness.  Hot loops run in a
compiled kernel when it is built; see :mod:`rremo._backend`.
"""

from ._backend import available as compiled_available
from ._backend import default_backend
from .algorithms import (Individual, Layering, RunResult, crowding_distance,
                         elitist_blackbox_run, front_coverage, gsemo_run, nondominated_sort,
                         nsgaii_run)
from .bitstring import BitString, Permutation, count_statistics
from .objectives import RRRMO, URRRMO, Fitness, make_problem
from .operators import Crossover, Mutation, RadiusDistribution
from .rng import Rng, trial_seed

__version__ = "0.1.0"

__all__ = [
    "BitString", "Permutation", "count_statistics", "Fitness", "RRRMO", "URRRMO", "make_problem",
    "Mutation", "Crossover", "RadiusDistribution", "Rng", "trial_seed", "Individual", "Layering",
    "RunResult", "nondominated_sort", "crowding_distance", "front_coverage", "gsemo_run",
    "nsgaii_run", "elitist_blackbox_run", "compiled_available", "default_backend",
]
