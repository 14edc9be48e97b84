"""Batch experiments: configuration, seeded trials, CSV records and summaries."""

from __future__ import annotations

import csv
import io
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _backend
from .algorithms import (BLACKBOX_PRESETS, blackbox_preset, elitist_blackbox_run, gsemo_run,
                         nsgaii_run)
from .expr import eval_int
from .objectives import make_problem, parse_sigma
from .operators import Crossover, Mutation
from .rng import Rng, trial_seed

SCHEMA_VERSION = 1
SCHEMA_LINE = f"# rremo trial records, schema {SCHEMA_VERSION}"
CSV_COLUMNS = (
    "trial_id", "seed", "problem", "n", "algo", "mutation", "crossover", "pc", "mu", "budget",
    "evaluations_used", "generations", "first_pareto_hit_evals", "coverage_fraction", "success",
    "wall_time_ms",
)
PROBLEMS = ("rrrmo", "urrrmo", "urrrmo-sigma-z")


class ConfigError(ValueError):
    """Invalid experiment configuration; ``errors`` lists every problem found."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.errors))


@dataclass
class ExperimentConfig:
    problem: str = "rrrmo"
    algo: str = "gsemo"
    mutation: str = "std"
    crossover: str = "none"
    pc: float = 0.0
    mu: Optional[str] = None
    n: tuple = (20,)
    budget: str = "10**6"
    trials: int = 1
    seed: int = 0
    out: Optional[str] = None
    sigma: str = "identity"
    z: str = "0"
    workers: int = 1
    timing: bool = False
    backend: str = "auto"
    check_invariants: bool = True

    def uses_mu(self) -> bool:
        return self.algo != "gsemo"

    def mu_for(self, n: int) -> Optional[int]:
        if not self.uses_mu():
            return None
        return eval_int(self.mu, n=n)

    def budget_for(self, n: int) -> int:
        return eval_int(self.budget, n=n)

    def validate(self) -> "ExperimentConfig":
        errors = []
        if self.problem not in PROBLEMS:
            errors.append(f"problem must be one of {', '.join(PROBLEMS)}, got {self.problem!r}")
        algo_ok = self.algo in ("gsemo", "nsgaii") or (
            self.algo.startswith("blackbox:") and self.algo.split(":", 1)[1] in BLACKBOX_PRESETS)
        if not algo_ok:
            errors.append(f"algo must be gsemo, nsgaii or blackbox:<{'|'.join(BLACKBOX_PRESETS)}>,"
                          f" got {self.algo!r}")
        if not self.n:
            errors.append("n list is empty")
        try:
            pc = float(self.pc)
            if not 0.0 <= pc <= 1.0:
                errors.append(f"pc must lie in [0, 1], got {self.pc}")
        except (TypeError, ValueError):
            errors.append(f"pc is not a number: {self.pc!r}")
            pc = 0.0
        try:
            xo = Crossover(self.crossover)
            if xo.code == 0 and pc > 0:
                errors.append("crossover 'none' needs pc = 0")
        except ValueError as exc:
            errors.append(str(exc))
        if self.uses_mu() and self.mu is None:
            errors.append(f"algo {self.algo} needs mu")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            errors.append(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            errors.append(f"workers must be a positive integer, got {self.workers!r}")
        if self.backend not in _backend.BACKENDS:
            errors.append(f"backend must be one of {', '.join(_backend.BACKENDS)}")
        if self.backend == "compiled" and not _backend.available():
            errors.append("compiled backend requested but the extension is not built")
        if self.z not in ("0", "random") and not set(self.z) <= {"0", "1"}:
            errors.append(f"z must be 0, random or a bit string, got {self.z!r}")
        if self.problem != "urrrmo-sigma-z" and (self.sigma != "identity" or self.z != "0"):
            errors.append("sigma and z apply only to problem urrrmo-sigma-z")
        for n in self.n:
            errors.extend(self._validate_n(n))
        if errors:
            raise ConfigError(errors)
        return self

    def _validate_n(self, n) -> list:
        errs = []
        if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
            return [f"n must be a positive integer, got {n!r}"]
        if self.problem == "rrrmo" and n % 5:
            errs.append(f"rrrmo needs n divisible by 5, got {n}")
        if self.problem in ("urrrmo", "urrrmo-sigma-z") and n % 16:
            errs.append(f"{self.problem} needs n divisible by 16, got {n}")
        try:
            Mutation(self.mutation, n)
        except ValueError as exc:
            errs.append(f"n={n}: {exc}")
        if self.problem == "urrrmo-sigma-z" and n % 16 == 0:
            try:
                parse_sigma(self.sigma, n)
            except ValueError as exc:
                errs.append(f"n={n}: sigma: {exc}")
            if self.z not in ("0", "random") and len(self.z) != n:
                errs.append(f"n={n}: z has length {len(self.z)}")
        try:
            budget = self.budget_for(n)
            if budget < 1:
                errs.append(f"n={n}: budget must be positive, got {budget}")
        except (ValueError, ZeroDivisionError) as exc:
            errs.append(f"n={n}: budget: {exc}")
            budget = None
        if self.uses_mu() and self.mu is not None:
            try:
                mu = self.mu_for(n)
                if mu < 2 or mu % 2:
                    errs.append(f"n={n}: mu must be even and at least 2, got {mu}")
                elif budget is not None and budget < mu:
                    errs.append(f"n={n}: budget {budget} is smaller than mu {mu}")
            except (ValueError, ZeroDivisionError) as exc:
                errs.append(f"n={n}: mu: {exc}")
        return errs


# --------------------------------------------------------------------------
# records


@dataclass
class TrialRecord:
    trial_id: int
    seed: int
    problem: str
    n: int
    algo: str
    mutation: str
    crossover: str
    pc: float
    mu: Optional[int]
    budget: int
    evaluations_used: int
    generations: int
    first_pareto_hit_evals: Optional[int]
    coverage_fraction: float
    success: bool
    wall_time_ms: Optional[float] = None
    # run diagnostics, not part of the CSV
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.success != (self.coverage_fraction == 1.0):
            raise ValueError("success must equal (coverage_fraction == 1.0)")
        if self.first_pareto_hit_evals is not None and \
                self.first_pareto_hit_evals > self.evaluations_used:
            raise ValueError("first Pareto hit after the last evaluation")

    def to_row(self) -> list[str]:
        def opt(v):
            return "" if v is None else str(v)

        return [
            str(self.trial_id), str(self.seed), self.problem, str(self.n), self.algo,
            self.mutation, self.crossover, repr(float(self.pc)), opt(self.mu), str(self.budget),
            str(self.evaluations_used), str(self.generations), opt(self.first_pareto_hit_evals),
            repr(float(self.coverage_fraction)), "true" if self.success else "false",
            "" if self.wall_time_ms is None else f"{self.wall_time_ms:.3f}",
        ]

    @classmethod
    def from_row(cls, row: dict) -> "TrialRecord":
        def opt_int(s):
            return None if s == "" else int(s)

        if row["success"] not in ("true", "false"):
            raise ValueError(f"bad success flag {row['success']!r}")
        return cls(
            trial_id=int(row["trial_id"]), seed=int(row["seed"]), problem=row["problem"],
            n=int(row["n"]), algo=row["algo"], mutation=row["mutation"],
            crossover=row["crossover"], pc=float(row["pc"]), mu=opt_int(row["mu"]),
            budget=int(row["budget"]), evaluations_used=int(row["evaluations_used"]),
            generations=int(row["generations"]),
            first_pareto_hit_evals=opt_int(row["first_pareto_hit_evals"]),
            coverage_fraction=float(row["coverage_fraction"]), success=row["success"] == "true",
            wall_time_ms=None if row["wall_time_ms"] == "" else float(row["wall_time_ms"]),
        )


def format_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.to_row())
    return buf.getvalue()


def write_csv(records: Iterable[TrialRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(records))


def parse_csv(text: str) -> list[TrialRecord]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# rremo trial records, schema "):
        raise ValueError("missing schema line")
    version = int(lines[0].rsplit(" ", 1)[1])
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {version}")
    reader = csv.DictReader(lines[1:])
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected columns {reader.fieldnames}")
    return [TrialRecord.from_row(row) for row in reader]


def read_csv(path: str) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        return parse_csv(fh.read())


# --------------------------------------------------------------------------
# running


def build_problem(config: ExperimentConfig, n: int):
    # one random mask per (seed, n), drawn from its own stream
    z_source = Rng(trial_seed(config.seed, n))
    if config.problem == "urrrmo-sigma-z":
        return make_problem(config.problem, n, config.sigma, config.z, z_source)
    return make_problem(config.problem, n)


def run_trial(config: ExperimentConfig, n: int, index: int, trial_id: int, problem=None) -> TrialRecord:
    seed = trial_seed(config.seed, n, index)
    rng = Rng(seed)
    problem = problem if problem is not None else build_problem(config, n)
    mutation = Mutation(config.mutation, n)
    crossover = Crossover(config.crossover)
    budget = config.budget_for(n)
    mu = config.mu_for(n)
    pc = float(config.pc)
    t0 = time.perf_counter()
    if config.algo == "gsemo":
        res = gsemo_run(problem, mutation, crossover, pc, budget, rng,
                        check_invariants=config.check_invariants, backend=config.backend)
    elif config.algo == "nsgaii":
        res = nsgaii_run(problem, mutation, crossover, pc, mu, budget, rng,
                         check_invariants=config.check_invariants, backend=config.backend)
    else:
        lam, sampler, ranking = blackbox_preset(config.algo.split(":", 1)[1], mutation, crossover,
                                                pc, mu)
        res = elitist_blackbox_run(mu, lam, sampler, ranking, problem, budget, rng)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return TrialRecord(
        trial_id=trial_id, seed=seed, problem=problem.label, n=n, algo=config.algo,
        mutation=config.mutation, crossover=config.crossover, pc=pc, mu=mu, budget=budget,
        evaluations_used=res.evaluations, generations=res.generations,
        first_pareto_hit_evals=res.first_pareto_hit, coverage_fraction=res.coverage,
        success=res.success, wall_time_ms=elapsed if config.timing else None,
        diagnostics={"violations": dict(res.violations), "plateau_hit": res.plateau_hit,
                     "max_pop_size": res.max_pop_size, "backend": res.backend,
                     "covered": res.covered, "front_size": res.front_size},
    )


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """All trials over the n grid, sorted by trial_id; writes ``config.out`` if set."""
    config.validate()
    jobs = []
    problems = {n: build_problem(config, n) for n in config.n}
    for k, n in enumerate(config.n):
        for i in range(config.trials):
            jobs.append((n, i, k * config.trials + i))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(lambda j: run_trial(config, *j, problem=problems[j[0]]), jobs))
    else:
        records = [run_trial(config, *j, problem=problems[j[0]]) for j in jobs]
    records.sort(key=lambda r: r.trial_id)
    if config.out:
        write_csv(records, config.out)
    return records


# --------------------------------------------------------------------------
# summaries


@dataclass
class SummaryRow:
    group: tuple
    n: int
    trials: int
    success_rate: float
    median_evals: Optional[float]
    mean_evals: Optional[float]
    max_evals: Optional[int]
    exhausted: int


GROUP_FIELDS = ("problem", "algo", "mutation", "crossover", "pc", "mu")


def summarize(records: Sequence[TrialRecord]) -> tuple[list[SummaryRow], dict]:
    """Per (config, n) statistics and the log-log slope of median evaluations vs n."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict = {}
    for r in records:
        key = tuple(getattr(r, f) for f in GROUP_FIELDS if f != "mu")
        groups.setdefault((key, r.n), []).append(r)
    rows = []
    for (key, n), recs in sorted(groups.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        evals = [r.evaluations_used for r in recs if r.success]
        rows.append(SummaryRow(
            group=key, n=n, trials=len(recs), success_rate=len(evals) / len(recs),
            median_evals=float(statistics.median(evals)) if evals else None,
            mean_evals=float(statistics.fmean(evals)) if evals else None,
            max_evals=max(evals) if evals else None,
            exhausted=sum(1 for r in recs if not r.success),
        ))
    slopes = {}
    for key in {row.group for row in rows}:
        pts = [(row.n, row.median_evals) for row in rows
               if row.group == key and row.median_evals is not None]
        if len({n for n, _ in pts}) >= 3:
            slopes[key] = loglog_slope([n for n, _ in pts], [m for _, m in pts])
    return rows, slopes


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def format_summary(rows: Sequence[SummaryRow], slopes: dict) -> str:
    def fmt(v):
        if v is None:
            return "-"
        return f"{v:.1f}" if isinstance(v, float) else str(v)

    head = ("problem", "algo", "mutation", "crossover", "pc", "n", "trials", "success",
            "median", "mean", "max", "exhausted")
    lines = ["\t".join(head)]
    for r in rows:
        lines.append("\t".join([*map(str, r.group), str(r.n), str(r.trials),
                                f"{r.success_rate:.2f}", fmt(r.median_evals), fmt(r.mean_evals),
                                fmt(r.max_evals), str(r.exhausted)]))
    for key, s in sorted(slopes.items(), key=lambda kv: str(kv[0])):
        lines.append(f"slope\t{' '.join(map(str, key))}\t{s:.3f}")
    return "\n".join(lines)


def config_fields() -> list[str]:
    return [f.name for f in fields(ExperimentConfig)]
