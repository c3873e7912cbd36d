"""Figure rendering for experiment and bound-suite reports.

Figures are written as PNG files next to the delimited output when the CLI
is given ``--fig-dir``; the CSV stays the primary interchange format.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .bounds import BoundReport, format_params  # noqa: E402
from .experiment import TrialRow  # noqa: E402


def render_run_figures(rows: Sequence[TrialRow], fig_dir, stem: str) -> list[Path]:
    """Histograms of the per-trial stopping time, infection count at the
    stop, and hop error.  Returns the written paths."""
    fig_dir = Path(fig_dir)
    fig_dir.mkdir(parents=True, exist_ok=True)
    panels = [
        ("stop_time", [r.stop_time for r in rows], "stopping time (rounds)"),
        ("infections", [r.infected_at_stop for r in rows],
         "infections at stopping"),
        ("dist_error", [r.dist_error for r in rows],
         "hop distance to true source"),
    ]
    written = []
    for name, values, xlabel in panels:
        fig, ax = plt.subplots(figsize=(5, 3.2))
        hi = max(values)
        ax.hist(values, bins=range(0, hi + 2), color="#4878a8",
                edgecolor="white", align="left")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("trials")
        ax.set_title(f"{stem}: {name.replace('_', ' ')}")
        fig.tight_layout()
        path = fig_dir / f"{stem}_{name}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_bound_figures(reports: Sequence[BoundReport], fig_dir,
                         stem: str) -> list[Path]:
    """One log-scale chart per bound family: analytic bound vs empirical
    violation frequency at each parameter point."""
    fig_dir = Path(fig_dir)
    fig_dir.mkdir(parents=True, exist_ok=True)
    families: dict[str, list[BoundReport]] = {}
    for r in reports:
        families.setdefault(r.bound_name, []).append(r)
    written = []
    for name, group in families.items():
        labels = [format_params(r.params) for r in group]
        xs = range(len(group))
        fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(group)), 3.2))
        ax.plot(xs, [r.analytic for r in group], "s-", label="analytic bound",
                color="#b2503c")
        # log axis cannot show exact zeros; clip to one notch below the floor
        floor = min([r.analytic for r in group]
                    + [r.empirical for r in group if r.empirical > 0]
                    + [1e-6])
        emp = [max(r.empirical, floor / 10) for r in group]
        ax.plot(xs, emp, "o--", label="empirical frequency", color="#4878a8")
        ax.set_yscale("log")
        ax.set_xticks(list(xs), labels, rotation=30, ha="right")
        ax.set_ylabel("probability")
        ax.set_title(name.replace("_", " "))
        ax.legend()
        fig.tight_layout()
        path = fig_dir / f"{stem}_{name}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
