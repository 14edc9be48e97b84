"""Command line entry point ``emo`` with subcommands run, verify and summarize.

Exit codes: 0 success, 1 validation error (or a failed verification),
2 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys

from .harness import (ConfigError, ExperimentConfig, config_fields, format_csv, format_summary,
                      read_csv, run_experiment, summarize)

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

_INT_FIELDS = {"trials", "seed", "workers"}
_BOOL_FIELDS = {"timing", "check_invariants"}


def _parse_n_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError:
        raise ConfigError([f"n must be a comma separated list of integers, got {text!r}"]) from None


def _parse_bool(key: str, text: str) -> bool:
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError([f"{key} must be a boolean, got {text!r}"])


def read_config_file(path: str) -> dict:
    """``key = value`` lines (an optional ``[run]`` header is allowed)."""
    with open(path) as fh:
        text = fh.read()
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser.read_string(text)
    section = parser["run"] if parser.has_section("run") else parser[parser.sections()[0]]
    return {k.replace("-", "_"): v for k, v in section.items()}


def build_config(values: dict) -> ExperimentConfig:
    known = set(config_fields())
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError([f"unknown configuration key(s): {', '.join(unknown)}"])
    kwargs = {}
    errors = []
    for key, raw in values.items():
        if raw is None:
            continue
        try:
            if key == "n":
                kwargs[key] = _parse_n_list(raw) if isinstance(raw, str) else tuple(raw)
            elif key in _INT_FIELDS:
                kwargs[key] = int(raw)
            elif key in _BOOL_FIELDS:
                kwargs[key] = raw if isinstance(raw, bool) else _parse_bool(key, raw)
            elif key == "pc":
                kwargs[key] = float(raw)
            else:
                kwargs[key] = str(raw)
        except ConfigError as exc:
            errors.extend(exc.errors)
        except ValueError:
            errors.append(f"{key}: cannot parse {raw!r}")
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(**kwargs)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write trial records as CSV")
    run.add_argument("--config", help="key = value file; flags override its values")
    run.add_argument("--problem", help="rrrmo | urrrmo | urrrmo-sigma-z")
    run.add_argument("--n", help="comma separated lengths, e.g. 20,40")
    run.add_argument("--algo", help="gsemo | nsgaii | blackbox:<nsgaii|mutation>")
    run.add_argument("--mutation", help="std | unbiased:<preset> | hyper:<r>")
    run.add_argument("--crossover", help="none | onepoint | uniform")
    run.add_argument("--pc", help="crossover probability in [0, 1]")
    run.add_argument("--mu", help="population size, may use n (e.g. 2*n+6)")
    run.add_argument("--budget", help="fitness evaluations, may use n (e.g. 100*n**4)")
    run.add_argument("--trials")
    run.add_argument("--seed")
    run.add_argument("--out", help="CSV path (default: standard output)")
    run.add_argument("--sigma", help="identity | hypermut-hard | comma separated permutation")
    run.add_argument("--z", help="0 | random | bit string")
    run.add_argument("--workers", help="parallel trials (threads)")
    run.add_argument("--backend", help="auto | compiled | python")
    run.add_argument("--timing", action="store_const", const=True, default=None,
                     help="fill wall_time_ms (makes output machine dependent)")
    run.add_argument("--no-check", dest="check_invariants", action="store_const", const=False,
                     default=None, help="skip run-time invariant checks")

    ver = sub.add_parser("verify", help="run oracle checks for a claim")
    ver.add_argument("claim", nargs="+", help="claim id or 'all'")
    ver.add_argument("--quick", action="store_true", help="smaller sample sizes")
    ver.add_argument("--seed", type=int, default=2024)

    summ = sub.add_parser("summarize", help="summarise a CSV of trial records")
    summ.add_argument("csv")
    return p


def cmd_run(args) -> int:
    values = read_config_file(args.config) if args.config else {}
    for key in config_fields():
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    config = build_config(values)
    records = run_experiment(config)
    if not config.out:
        sys.stdout.write(format_csv(records))
    else:
        ok = sum(r.success for r in records)
        print(f"{len(records)} trials, {ok} successful, written to {config.out}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .oracles import CLAIMS, run_claims

    names = args.claim
    unknown = [n for n in names if n != "all" and n not in CLAIMS]
    if unknown:
        print(f"unknown claim(s): {', '.join(unknown)}; choose from all, {', '.join(CLAIMS)}",
              file=sys.stderr)
        return EXIT_INVALID
    reports = run_claims(names, quick=args.quick, seed=args.seed)
    for r in reports:
        print(r.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_INVALID


def cmd_summarize(args) -> int:
    records = read_csv(args.csv)
    rows, slopes = summarize(records)
    print(format_summary(rows, slopes))
    return EXIT_OK


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    handler = {"run": cmd_run, "verify": cmd_verify, "summarize": cmd_summarize}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
