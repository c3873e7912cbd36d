"""Monte-Carlo verification of the cascade containment bounds and the
estimator's performance-guarantee diagnostics.

Each verifier pits a closed-form analytic tail bound against the empirical
violation frequency over independent simulated cascades and reports both,
with a binomial standard error.  Nothing here proves anything: a report
passes when the empirical frequency does not exceed the bound by more than
three standard errors.

The guarantees carry "sufficiently large" qualifiers without explicit onset
constants, so reports are only meant to be asserted where the analytic
bound is informative (< 0.5) and well resolved (SE < bound / 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cascade import RateParams, simulate_fpp
from .estimator import EstimationResult
from .graphs import EPS, Graph, all_distances_from, growth_inverse, radius_floor
from .seeds import derive_seed, make_rng


@dataclass(frozen=True)
class BoundReport:
    """One analytic-vs-empirical comparison at one parameter point.

    ``se`` is the binomial standard error ``sqrt(emp (1 - emp) / trials)``;
    ``passed`` is ``empirical <= analytic + 3 se``.
    """
    bound_name: str
    params: dict
    analytic: float
    empirical: float
    trials: int
    se: float
    passed: bool


def _report(name: str, params: dict, analytic: float, violations: int,
            trials: int) -> BoundReport:
    if trials <= 0:
        raise ValueError("trials must be positive")
    emp = violations / trials
    se = math.sqrt(emp * (1.0 - emp) / trials)
    return BoundReport(name, params, float(analytic), emp, trials, se,
                       emp <= analytic + 3.0 * se)


# ---------------------------------------------------------------------------
# Analytic bound evaluators (pure closed forms)
# ---------------------------------------------------------------------------

def inner_containment_bound(k: int, rate_min: float) -> float:
    """Tail bound for the inner containment failing at or after round k:
    ``(12 / rate_min) * exp(-k rate_min / 12)``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return (12.0 / rate_min) * math.exp(-k * rate_min / 12.0)


def outer_containment_bound(k: int, max_degree: int, rate_max: float) -> float:
    """Tail bound for the outer containment failing at or after round k:
    ``900 * (2.9 / 3) ** (3 * max_degree * rate_max * k)``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return 900.0 * (2.9 / 3.0) ** (3.0 * max_degree * rate_max * k)


def exp_sum_tail_bound(m: int, eps: float, rate_max: float) -> float:
    """Lower-tail bound for a sum of m independent exponentials with rates
    at most ``rate_max``: ``P(sum <= eps m) <= sqrt(m) (2.8 eps rate_max)^m``."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return math.sqrt(m) * (2.8 * eps * rate_max) ** m


# ---------------------------------------------------------------------------
# Containment-event verification
# ---------------------------------------------------------------------------

def _containment_violation_profile(g: Graph, params: RateParams,
                                   seed: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Simulate one cascade from a random source and record, for each
    integer t up to the exact finite-graph horizon, whether either
    containment fails at t.

    On a finite graph no violation is possible once the cascade has covered
    everything and the outer radius exceeds the source eccentricity, so the
    returned profiles are complete: the event "some t >= k fails" equals
    "some t in [k, cap] fails".
    """
    rng = make_rng(derive_seed(seed, "source"))
    source = int(rng.integers(g.vertex_count))
    traj = simulate_fpp(g, source, derive_seed(seed, "cascade"))
    dist = all_distances_from(g, source)
    times = traj.times
    cap = max(math.ceil(times.max()), math.ceil(dist.max() / params.beta)) + 1
    inner = np.zeros(cap + 1, dtype=bool)
    outer = np.zeros(cap + 1, dtype=bool)
    for t in range(cap + 1):
        r_in = radius_floor(params.alpha * t)
        inner[t] = bool(np.any((dist <= r_in) & (times > t)))
        outer[t] = bool(np.any((times <= t) & (dist > params.beta * t + EPS)))
    return inner, outer, cap


def _verify_containment(g: Graph, params: RateParams, k_grid: Sequence[int],
                        trials: int, seed: int, side: str) -> list[BoundReport]:
    k_grid = sorted(int(k) for k in k_grid)
    if not k_grid or k_grid[0] < 1:
        raise ValueError("k_grid must contain positive integers")
    violations = {k: 0 for k in k_grid}
    for trial in range(trials):
        inner, outer, _cap = _containment_violation_profile(
            g, params, derive_seed(seed, side, trial))
        profile = inner if side == "inner" else outer
        for k in k_grid:
            if k < len(profile) and profile[k:].any():
                violations[k] += 1
    reports = []
    for k in k_grid:
        if side == "inner":
            analytic = inner_containment_bound(k, g.rate_min)
        else:
            analytic = outer_containment_bound(k, g.max_degree, g.rate_max)
        reports.append(_report(f"{side}_containment", {"k": k}, analytic,
                               violations[k], trials))
    return reports


def verify_inner_containment(g: Graph, params: RateParams,
                             k_grid: Sequence[int], trials: int,
                             seed: int) -> list[BoundReport]:
    """Empirical frequency of the inner containment (cascade covers the
    radius-``alpha t`` source neighborhood) failing at some t >= k, against
    the analytic bound, per k.  ``params`` must be the derived defaults for
    the graph's rates; the bound is stated for that choice.
    """
    return _verify_containment(g, params, k_grid, trials, seed, "inner")


def verify_outer_containment(g: Graph, params: RateParams,
                             k_grid: Sequence[int], trials: int,
                             seed: int) -> list[BoundReport]:
    """Outer-side twin of :func:`verify_inner_containment`: the cascade
    escaping the radius-``beta t`` source neighborhood at some t >= k."""
    return _verify_containment(g, params, k_grid, trials, seed, "outer")


def verify_exp_sum_tail(m: int, rates: Sequence[float], eps: float,
                        trials: int, seed: int) -> BoundReport:
    """Empirical lower tail of a sum of m independent exponentials versus
    the closed-form bound.

    ``rates`` are the exponential rate parameters (mean ``1/rate``); ``eps``
    must lie in ``(0, 1/max(rates))`` for the bound to be meaningful.  The
    bound only kicks in for large m, so small-m reports may fail and are for
    information only.
    """
    rates = np.asarray(list(rates), dtype=np.float64)
    if len(rates) != m:
        raise ValueError("need one rate per summand")
    if np.any(rates <= 0):
        raise ValueError("rates must be positive")
    rate_max = float(rates.max())
    if not 0 < eps < 1.0 / rate_max:
        raise ValueError("eps must be in (0, 1/max(rates))")
    rng = make_rng(seed)
    u = rng.random((trials, m))
    sums = (-np.log1p(-u) / rates[None, :]).sum(axis=1)
    violations = int(np.sum(sums <= eps * m))
    analytic = exp_sum_tail_bound(m, eps, rate_max)
    return _report("exp_sum_tail", {"m": m, "mu": rate_max, "eps": eps},
                   analytic, violations, trials)


# ---------------------------------------------------------------------------
# Estimator guarantee diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticsReport:
    """Empirical satisfaction rates for the estimator's guarantees.

    ``score_budget`` is ``15 log(candidates) / (p (1 - 2 eps)^2)``; each
    trial's stopping time is compared with the growth inverse of that budget
    at the trial's true source.  The stopping-time and distance items are
    asymptotic statements reported as fractions, not hard claims; the
    containment fraction comes with its standard error because it is the one
    commonly asserted.
    """
    trials: int
    score_budget: float
    stop_within_budget: float
    dist_within_budget: float
    containment_fraction: float
    containment_se: float
    spread_size_within: Optional[float] = None
    size_exponent: Optional[float] = None


def guarantee_diagnostics(results: Sequence[EstimationResult], g: Graph,
                          p: float, eps: float, alpha: float, beta: float,
                          candidate_count: Optional[int] = None,
                          size_exponent: Optional[float] = None) -> DiagnosticsReport:
    """Compare a batch of estimation results (one shared graph and
    configuration) against the theoretical budgets.

    ``size_exponent`` c, when given, additionally reports the fraction of
    trials with spread-estimate size at most ``log(candidates) ** c``.
    """
    if not results:
        raise ValueError("need at least one result")
    if candidate_count is None:
        candidate_count = g.vertex_count
    budget = 15.0 * math.log(candidate_count) / (p * (1.0 - 2.0 * eps) ** 2)
    stop_ok = 0
    dist_ok = 0
    contain_ok = 0
    size_ok = 0
    for res in results:
        t_budget = growth_inverse(g, res.source, alpha, budget)
        stop_ok += res.stop_time <= t_budget
        dist_ok += res.dist_error <= (alpha + beta) * t_budget + EPS
        contain_ok += res.containment
        if size_exponent is not None:
            size_ok += res.spread_size <= math.log(candidate_count) ** size_exponent
    n = len(results)
    frac = contain_ok / n
    return DiagnosticsReport(
        trials=n,
        score_budget=budget,
        stop_within_budget=stop_ok / n,
        dist_within_budget=dist_ok / n,
        containment_fraction=frac,
        containment_se=math.sqrt(frac * (1.0 - frac) / n),
        spread_size_within=None if size_exponent is None else size_ok / n,
        size_exponent=size_exponent,
    )


def growth_rescaling_table(g: Graph, v: int, alpha: float,
                           z_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Convergence table for the inverse-growth rescaling identity:
    ``growth_inverse(alpha, z) * alpha / growth_inverse(1, alpha * z)``.

    The ratio tends to 1 for large z on graphs with regular growth; this is
    reported for inspection, never asserted (the identity is asymptotic and
    finite truncations bend it).  Entries where the unit-rate inverse is 0
    are reported as ``nan``.
    """
    table = []
    for z in z_grid:
        num = growth_inverse(g, v, alpha, z) * alpha
        denom = growth_inverse(g, v, 1.0, max(alpha * z, 1.0))
        table.append((float(z), num / denom if denom else math.nan))
    return table


# ---------------------------------------------------------------------------
# Report output
# ---------------------------------------------------------------------------

BOUND_CSV_HEADER = "bound_name,params,analytic,empirical,trials,se,pass"


def format_params(params: dict) -> str:
    """Comma-free ``key=value`` serialization for the params CSV column."""
    return ";".join(f"{k}={v:g}" for k, v in params.items())


def write_bound_reports(reports: Sequence[BoundReport], path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(BOUND_CSV_HEADER + "\n")
        for r in reports:
            fh.write(f"{r.bound_name},{format_params(r.params)},{r.analytic!r},"
                     f"{r.empirical!r},{r.trials},{r.se!r},{int(r.passed)}\n")
