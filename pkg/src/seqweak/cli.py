"""Command-line entry point: ``seqweak run --scenario ...``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical-budget
violation (pointer leakage or vanishing postselection).
"""

from __future__ import annotations

import argparse
import sys
import time

from .errors import ConfigurationError, NumericalBudgetError
from .scenarios import (
    SCENARIOS,
    build_config,
    config_comments,
    emit_csv,
    fit_convergence,
    parse_config_text,
    run_scenario,
    summarize,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def _csv_list(text):
    return tuple(s for s in text.replace(",", " ").split() if s)


def _floats(text):
    return tuple(float(s) for s in _csv_list(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqweak", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and write a CSV table")
    run.add_argument("--scenario", choices=SCENARIOS)
    run.add_argument("--theta-start", type=float)
    run.add_argument("--theta-end", type=float)
    run.add_argument("--theta-step", type=float)
    run.add_argument("--theta-convention", choices=("hwp", "polarization"))
    run.add_argument("--delta", type=float, help="coupling shift in µm")
    run.add_argument("--sigma", type=float, help="pointer width in µm")
    run.add_argument("--grid-spacing", type=float, help="µm")
    run.add_argument("--grid-count", type=int)
    run.add_argument("--normalization", choices=("unnormalized", "conditional"))
    run.add_argument("--orderings", type=_csv_list, help="plan labels, e.g. 'HD,DH' or 'H>30>!H'")
    run.add_argument("--input", choices=("pure", "mixed"), help="system input for custom plans")
    run.add_argument("--strengths", type=_floats, help="δ/σ values for the convergence scenario")
    run.add_argument("--jobs", type=int, help="threads used for the θ sweep")
    run.add_argument("--leakage-budget", type=float)
    run.add_argument("--self-check", action="store_const", const=True, default=None,
                     help="append a pass/fail column against the analytic companion")
    run.add_argument("--out", dest="output_path", help="CSV output path")
    run.add_argument("--config", help="key = value configuration file (CLI flags win)")
    return parser


def _run(args) -> int:
    file_values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            file_values = parse_config_text(fh.read())
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    cfg = build_config(file_values, overrides).resolved()
    if not cfg.output_path:
        raise ConfigurationError("an output path is required (--out or output_path in the config)")
    t0 = time.perf_counter()
    rows = run_scenario(cfg)
    emit_csv(rows, cfg.output_path, config_comments(cfg), self_check=cfg.self_check)
    print(f"wrote {len(rows)} rows to {cfg.output_path} in {time.perf_counter() - t0:.2f} s")
    if cfg.scenario == "convergence":
        fit = fit_convergence(rows)
        for label, slope in fit.slopes.items():
            print(f"{label}: log-log slope of |grid - weak limit| = {slope:.4f}")
    elif len(set(r.ordering for r in rows)) == 2:
        for line in summarize(rows).lines():
            print(line)
    if cfg.self_check and any(r.self_check is False for r in rows):
        print("self-check: some rows outside tolerance", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ConfigurationError as exc:
        print(f"seqweak: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalBudgetError as exc:
        print(f"seqweak: numerical budget violated: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"seqweak: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
