"""Command-line interface.

Subcommands:
  run            run an experiment config, write the per-trial CSV
  verify-bounds  run the Monte-Carlo bound suite, write the report CSV
  summarize      recompute and print the summary of a per-trial CSV

All subcommands accept ``--fig-dir DIR`` to render figures next to the
delimited output.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import experiment as exp
from .bounds import format_params, write_bound_reports


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sitrace",
        description="Simulate SI cascades under noisy periodic testing and "
                    "estimate the source and spread quickly.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("--config", required=True, help="YAML config file")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.add_argument("--trials", type=int, help="override the trial count")
    p_run.add_argument("--threads", type=int, default=1,
                       help="worker processes (output is schedule-independent)")
    p_run.add_argument("--fig-dir", help="also render figures into this directory")

    p_vb = sub.add_parser("verify-bounds", help="run the bound suite")
    p_vb.add_argument("--config", required=True, help="YAML config file")
    p_vb.add_argument("--out", required=True, help="output CSV path")
    p_vb.add_argument("--fig-dir", help="also render figures into this directory")

    p_sum = sub.add_parser("summarize", help="summarize a per-trial CSV")
    p_sum.add_argument("--in", dest="input", required=True,
                       help="per-trial CSV written by `run`")
    p_sum.add_argument("--fig-dir", help="also render figures into this directory")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify-bounds":
            return _cmd_verify_bounds(args)
        return _cmd_summarize(args)
    except exp.ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


def _cmd_run(args) -> int:
    config = exp.load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.trials is not None:
        if args.trials < 1:
            raise exp.ConfigError("trials: must be >= 1")
        config = replace(config, trials=args.trials)
    result = exp.run_experiment(config, threads=max(1, args.threads))
    exp.write_experiment_csv(result, args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    print(exp.summary_text(result.summary))
    if args.fig_dir:
        from .plots import render_run_figures
        paths = render_run_figures(result.rows, args.fig_dir,
                                   Path(args.out).stem)
        for p in paths:
            print(f"wrote {p}")
    return 0


def _cmd_verify_bounds(args) -> int:
    config = exp.load_bounds_config(args.config)
    reports = exp.run_bounds(config)
    write_bound_reports(reports, args.out)
    for r in reports:
        verdict = "pass" if r.passed else "FAIL"
        print(f"{r.bound_name}[{format_params(r.params)}]: analytic "
              f"{r.analytic:.4g}, empirical {r.empirical:.4g} "
              f"({r.trials} trials, se {r.se:.2g}) -> {verdict}")
    print(f"wrote {len(reports)} reports to {args.out}")
    if args.fig_dir:
        from .plots import render_bound_figures
        paths = render_bound_figures(reports, args.fig_dir,
                                     Path(args.out).stem)
        for p in paths:
            print(f"wrote {p}")
    return 0


def _cmd_summarize(args) -> int:
    rows = exp.read_experiment_csv(args.input)
    print(exp.summary_text(exp.summarize(rows)))
    if args.fig_dir:
        from .plots import render_run_figures
        paths = render_run_figures(rows, args.fig_dir, Path(args.input).stem)
        for p in paths:
            print(f"wrote {p}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
