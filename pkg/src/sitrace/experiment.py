"""Batch experiment driver: config files, deterministic trials, CSV output.

A config describes one parameter point: a graph generator, a rate law, the
testing noise, the estimator parameters and a trial count.  Each trial draws
a fresh graph (unless ``shared_graph``), a uniform random source, a cascade
and an estimation run.  Per-trial randomness is derived from the master seed
with a fixed hash, so results are byte-identical across reruns and worker
schedules.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import yaml

from . import bounds as bounds_mod
from .cascade import default_rate_params, simulate_fpp
from .estimator import make_config, run_estimation
from .graphs import Graph, lattice, load_edge_list, random_regular_graph, \
    regular_tree, reweighted
from .observation import NoiseParams
from .seeds import derive_seed, make_rng


class ConfigError(ValueError):
    """Config validation failure; the message names the offending field."""


def _need(mapping, key, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"{where}.{key}: missing")
    return mapping[key]


def _num(value, where, minimum=None, maximum=None, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: must be a number")
    if integer and int(value) != value:
        raise ConfigError(f"{where}: must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}")
    if maximum is not None and value > maximum:
        raise ConfigError(f"{where}: must be <= {maximum}")
    return int(value) if integer else float(value)


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    n: Optional[int] = None
    degree: Optional[int] = None
    depth: Optional[int] = None
    dims: Optional[int] = None
    side: Optional[int] = None
    path: Optional[str] = None
    seed: Optional[int] = None


@dataclass(frozen=True)
class RateSpec:
    kind: str
    value: Optional[float] = None
    low: Optional[float] = None
    high: Optional[float] = None


@dataclass(frozen=True)
class EstimatorSpec:
    """Either fixed (alpha, beta) or "derived" (computed per graph from the
    rate extrema).  ``eps`` sizes the decision threshold and defaults to the
    observation error rate."""
    mode: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    eps: Optional[float] = None
    candidates: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GraphSpec
    rates: RateSpec
    noise: NoiseParams
    estimator: EstimatorSpec
    trials: int
    seed: int
    shared_graph: bool = False
    max_rounds: Optional[int] = None


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config mapping, blaming the precise field on failure."""
    if not isinstance(raw, dict):
        raise ConfigError("config: must be a mapping")
    graph = _parse_graph(_need(raw, "graph", "config"))
    rates = _parse_rates(_need(raw, "rates", "config"))
    noise_raw = _need(raw, "noise", "config")
    p = _num(_need(noise_raw, "p", "noise"), "noise.p")
    eps = _num(_need(noise_raw, "eps", "noise"), "noise.eps")
    try:
        noise = NoiseParams(p, eps)
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc
    estimator = _parse_estimator(_need(raw, "estimator", "config"), noise)
    trials = _num(_need(raw, "trials", "config"), "trials", minimum=1,
                  integer=True)
    seed = _num(_need(raw, "seed", "config"), "seed", integer=True)
    shared = raw.get("shared_graph", False)
    if not isinstance(shared, bool):
        raise ConfigError("shared_graph: must be true or false")
    max_rounds = raw.get("max_rounds")
    if max_rounds is not None:
        max_rounds = _num(max_rounds, "max_rounds", minimum=1, integer=True)
    known = {"graph", "rates", "noise", "estimator", "trials", "seed",
             "shared_graph", "max_rounds"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{key}: unknown field")
    return ExperimentConfig(graph, rates, noise, estimator, trials, seed,
                            shared, max_rounds)


def _parse_graph(raw) -> GraphSpec:
    kind = _need(raw, "kind", "graph")
    seed = raw.get("seed")
    if seed is not None:
        seed = _num(seed, "graph.seed", integer=True)
    if kind == "random_regular":
        return GraphSpec(kind,
                         n=_num(_need(raw, "n", "graph"), "graph.n",
                                minimum=4, integer=True),
                         degree=_num(_need(raw, "degree", "graph"),
                                     "graph.degree", minimum=3, integer=True),
                         seed=seed)
    if kind == "regular_tree":
        return GraphSpec(kind,
                         degree=_num(_need(raw, "degree", "graph"),
                                     "graph.degree", minimum=3, integer=True),
                         depth=_num(_need(raw, "depth", "graph"),
                                    "graph.depth", minimum=1, integer=True),
                         seed=seed)
    if kind == "lattice":
        return GraphSpec(kind,
                         dims=_num(_need(raw, "dims", "graph"), "graph.dims",
                                   minimum=1, integer=True),
                         side=_num(_need(raw, "side", "graph"), "graph.side",
                                   minimum=2, integer=True),
                         seed=seed)
    if kind == "edge_list":
        path = _need(raw, "path", "graph")
        if not isinstance(path, str):
            raise ConfigError("graph.path: must be a string")
        return GraphSpec(kind, path=path, seed=seed)
    raise ConfigError(f"graph.kind: unknown kind {kind!r}")


def _parse_rates(raw) -> RateSpec:
    kind = _need(raw, "kind", "rates")
    if kind == "homogeneous":
        value = _num(_need(raw, "value", "rates"), "rates.value")
        if value <= 0:
            raise ConfigError("rates.value: must be positive")
        return RateSpec(kind, value=value)
    if kind == "uniform":
        low = _num(_need(raw, "low", "rates"), "rates.low")
        high = _num(_need(raw, "high", "rates"), "rates.high")
        if low <= 0:
            raise ConfigError("rates.low: must be positive")
        if high < low:
            raise ConfigError("rates.high: must be >= rates.low")
        return RateSpec(kind, low=low, high=high)
    raise ConfigError(f"rates.kind: unknown kind {kind!r}")


def _parse_estimator(raw, noise: NoiseParams) -> EstimatorSpec:
    if not isinstance(raw, dict):
        raise ConfigError("estimator: must be a mapping")
    eps = raw.get("eps")
    if eps is None:
        eps = noise.eps
    else:
        eps = _num(eps, "estimator.eps")
    if not 0 < eps < 0.5:
        raise ConfigError("estimator.eps: must be in (0, 1/2) "
                          "(the threshold needs a positive error rate)")
    candidates = raw.get("candidates", "all")
    if candidates == "all":
        cand = None
    elif isinstance(candidates, (list, tuple)):
        cand = tuple(_num(c, "estimator.candidates[]", minimum=0, integer=True)
                     for c in candidates)
        if len(cand) < 2:
            raise ConfigError("estimator.candidates: need at least two")
    else:
        raise ConfigError("estimator.candidates: must be 'all' or a list")
    mode = raw.get("mode", "fixed")
    if mode == "derived":
        if "alpha" in raw or "beta" in raw:
            raise ConfigError("estimator.alpha: not allowed with mode=derived")
        return EstimatorSpec("derived", eps=eps, candidates=cand)
    if mode != "fixed":
        raise ConfigError(f"estimator.mode: unknown mode {mode!r}")
    alpha = _num(_need(raw, "alpha", "estimator"), "estimator.alpha")
    beta = _num(_need(raw, "beta", "estimator"), "estimator.beta")
    if alpha <= 0 or beta <= 0:
        raise ConfigError("estimator.alpha: alpha and beta must be positive")
    return EstimatorSpec("fixed", alpha=alpha, beta=beta, eps=eps,
                         candidates=cand)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(yaml.safe_load(fh))


# ---------------------------------------------------------------------------
# Trial execution
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("trial", "seed", "stop_time", "fallback", "dist_error",
               "infected_at_stop", "spread_estimate_size", "containment",
               "boundary_contaminated")


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    stop_time: int
    fallback: bool
    dist_error: int
    infected_at_stop: int
    spread_estimate_size: int
    containment: bool
    boundary_contaminated: bool


@dataclass(frozen=True)
class Summary:
    """Per-run aggregates.  The median uses the lower-median rule for even
    counts, to keep it an attained value."""
    trials: int
    mean_stop_time: float
    median_infected_at_stop: int
    mean_dist_error: float
    fallback_count: int
    contaminated_count: int


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[TrialRow, ...]
    summary: Summary
    metadata: dict = field(default_factory=dict)


def build_base_graph(spec: GraphSpec, seed: int) -> Graph:
    """Instantiate the topology with unit rates; ``seed`` is used only by
    seeded generators (and overridden by an explicit graph.seed)."""
    if spec.kind == "random_regular":
        return random_regular_graph(spec.n, spec.degree,
                                    spec.seed if spec.seed is not None else seed)
    if spec.kind == "regular_tree":
        return regular_tree(spec.degree, spec.depth)
    if spec.kind == "lattice":
        return lattice(spec.dims, spec.side)
    if spec.kind == "edge_list":
        return load_edge_list(spec.path)
    raise ConfigError(f"graph.kind: unknown kind {spec.kind!r}")


def apply_rates(g: Graph, spec: RateSpec, seed: int) -> Graph:
    if spec.kind == "homogeneous":
        return reweighted(g, np.full(g.edge_count, spec.value))
    rng = make_rng(seed)
    return reweighted(g, rng.uniform(spec.low, spec.high, g.edge_count))


def run_trial(config: ExperimentConfig, trial: int,
              shared: Optional[Graph] = None) -> TrialRow:
    master = config.seed
    trial_seed = derive_seed(master, "trial", trial)
    if shared is not None:
        g = shared
    else:
        base = build_base_graph(config.graph, derive_seed(master, "graph", trial))
        g = apply_rates(base, config.rates, derive_seed(master, "rates", trial))

    if config.estimator.mode == "derived":
        params = default_rate_params(g)
        alpha, beta = params.alpha, params.beta
    else:
        alpha, beta = config.estimator.alpha, config.estimator.beta
    est_config = make_config(g, alpha, beta, config.estimator.eps,
                             config.estimator.candidates)

    # the source is drawn from the candidate set (the model assumes the
    # candidates contain it); with candidates = all this is uniform over V
    source_rng = make_rng(derive_seed(master, "source", trial))
    source = int(est_config.candidates[
        source_rng.integers(len(est_config.candidates))])
    traj = simulate_fpp(g, source, derive_seed(master, "cascade", trial))
    result = run_estimation(g, est_config, traj, config.noise,
                            derive_seed(master, "observe", trial),
                            max_rounds=config.max_rounds)
    return TrialRow(
        trial=trial,
        seed=trial_seed,
        stop_time=result.stop_time,
        fallback=result.fallback,
        dist_error=result.dist_error,
        infected_at_stop=result.infected_at_stop,
        spread_estimate_size=result.spread_size,
        containment=result.containment,
        boundary_contaminated=result.boundary_contaminated,
    )


def _run_block(config: ExperimentConfig, trials: Sequence[int],
               shared: Optional[Graph]) -> list[TrialRow]:
    return [run_trial(config, t, shared) for t in trials]


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """All trials, a summary, and metadata recording the modelling choices
    that the output depends on.  Deterministic in (config, seed) regardless
    of ``threads``."""
    shared = None
    if config.shared_graph:
        base = build_base_graph(config.graph,
                                derive_seed(config.seed, "shared-graph"))
        shared = apply_rates(base, config.rates,
                             derive_seed(config.seed, "shared-rates"))
    indices = list(range(config.trials))
    if threads > 1 and config.trials > 1:
        blocks = [indices[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = pool.map(_run_block, [config] * len(blocks), blocks,
                               [shared] * len(blocks))
        rows = [row for block in results for row in block]
        rows.sort(key=lambda r: r.trial)
    else:
        rows = _run_block(config, indices, shared)
    metadata = {
        "graph": config.graph.kind,
        "trials": config.trials,
        "seed": config.seed,
        "shared_graph": config.shared_graph,
        "rounds_start_at": 0,
        "cascade_engine": "edge-delay shortest path",
        "source_choice": "uniform over candidates per trial",
    }
    return ExperimentResult(tuple(rows), summarize(rows), metadata)


def summarize(rows: Sequence[TrialRow]) -> Summary:
    if not rows:
        raise ValueError("no rows to summarize")
    n = len(rows)
    infected = sorted(r.infected_at_stop for r in rows)
    return Summary(
        trials=n,
        mean_stop_time=sum(r.stop_time for r in rows) / n,
        median_infected_at_stop=infected[(n - 1) // 2],
        mean_dist_error=sum(r.dist_error for r in rows) / n,
        fallback_count=sum(r.fallback for r in rows),
        contaminated_count=sum(r.boundary_contaminated for r in rows),
    )


def summary_text(summary: Summary) -> str:
    return "\n".join([
        f"trials: {summary.trials}",
        f"mean_stop_time: {summary.mean_stop_time!r}",
        f"median_infected_at_stop: {summary.median_infected_at_stop}",
        f"mean_dist_error: {summary.mean_dist_error!r}",
        f"fallback_count: {summary.fallback_count}",
        f"contaminated_count: {summary.contaminated_count}",
    ])


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

def write_experiment_csv(result: ExperimentResult, path) -> None:
    """Rows in the documented column order, preceded by deterministic
    ``#``-prefixed metadata lines (no timestamps: reruns must be
    byte-identical)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for key in sorted(result.metadata):
            fh.write(f"# {key}: {result.metadata[key]}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in result.rows:
            fh.write(f"{r.trial},{r.seed},{r.stop_time},{int(r.fallback)},"
                     f"{r.dist_error},{r.infected_at_stop},"
                     f"{r.spread_estimate_size},{int(r.containment)},"
                     f"{int(r.boundary_contaminated)}\n")


def read_experiment_csv(path) -> list[TrialRow]:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = tuple(line.split(","))
                if header != CSV_COLUMNS:
                    raise ValueError(f"unexpected CSV header: {line}")
                continue
            vals = line.split(",")
            rows.append(TrialRow(
                trial=int(vals[0]), seed=int(vals[1]), stop_time=int(vals[2]),
                fallback=bool(int(vals[3])), dist_error=int(vals[4]),
                infected_at_stop=int(vals[5]), spread_estimate_size=int(vals[6]),
                containment=bool(int(vals[7])),
                boundary_contaminated=bool(int(vals[8]))))
    if header is None:
        raise ValueError("empty CSV")
    return rows


# ---------------------------------------------------------------------------
# Bound-suite configs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsConfig:
    """Config for the bound verification suite.  The containment checks run
    on one graph with the derived (conservative) containment speeds."""
    graph: GraphSpec
    rates: RateSpec
    seed: int
    trials: int
    inner_k: tuple[int, ...]
    outer_k: tuple[int, ...]
    tail: Optional[dict] = None


def parse_bounds_config(raw: dict) -> BoundsConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config: must be a mapping")
    graph = _parse_graph(_need(raw, "graph", "config"))
    rates = _parse_rates(_need(raw, "rates", "config"))
    seed = _num(_need(raw, "seed", "config"), "seed", integer=True)
    cont = _need(raw, "containment", "config")
    trials = _num(_need(cont, "trials", "containment"), "containment.trials",
                  minimum=1, integer=True)
    inner_k = tuple(_num(k, "containment.inner_k[]", minimum=1, integer=True)
                    for k in _need(cont, "inner_k", "containment"))
    outer_k = tuple(_num(k, "containment.outer_k[]", minimum=1, integer=True)
                    for k in _need(cont, "outer_k", "containment"))
    tail_raw = raw.get("exp_sum_tail")
    tail = None
    if tail_raw is not None:
        m = _num(_need(tail_raw, "m", "exp_sum_tail"), "exp_sum_tail.m",
                 minimum=1, integer=True)
        rate = _num(_need(tail_raw, "rate", "exp_sum_tail"),
                    "exp_sum_tail.rate")
        eps = _num(_need(tail_raw, "eps", "exp_sum_tail"), "exp_sum_tail.eps")
        t_trials = _num(_need(tail_raw, "trials", "exp_sum_tail"),
                        "exp_sum_tail.trials", minimum=1, integer=True)
        tail = {"m": m, "rate": rate, "eps": eps, "trials": t_trials}
    return BoundsConfig(graph, rates, seed, trials, inner_k, outer_k, tail)


def load_bounds_config(path) -> BoundsConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_bounds_config(yaml.safe_load(fh))


def run_bounds(config: BoundsConfig) -> list:
    base = build_base_graph(config.graph, derive_seed(config.seed, "graph"))
    g = apply_rates(base, config.rates, derive_seed(config.seed, "rates"))
    params = default_rate_params(g)
    reports = []
    reports += bounds_mod.verify_inner_containment(
        g, params, config.inner_k, config.trials,
        derive_seed(config.seed, "inner"))
    reports += bounds_mod.verify_outer_containment(
        g, params, config.outer_k, config.trials,
        derive_seed(config.seed, "outer"))
    if config.tail is not None:
        m = config.tail["m"]
        reports.append(bounds_mod.verify_exp_sum_tail(
            m, [config.tail["rate"]] * m, config.tail["eps"],
            config.tail["trials"], derive_seed(config.seed, "tail")))
    return reports
