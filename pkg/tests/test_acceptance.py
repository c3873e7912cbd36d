"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or in
the captured output) and then asserts the criterion at its stated tolerance.
Heavier shared runs live in module-scoped fixtures.
"""

import itertools
import math
import time

import numpy as np
import pytest
import yaml
from scipy.stats import ks_2samp

from sitrace import (build_graph, check_poly_equivalence, cumulative_growth,
                     diameter, growth_inverse, lattice, make_config,
                     random_regular_graph, regular_tree, run_estimation,
                     run_experiment, simulate_fpp, simulate_markovian,
                     verify_exp_sum_tail, verify_inner_containment,
                     verify_outer_containment, write_experiment_csv)
from sitrace.cascade import default_rate_params
from sitrace.cli import main as cli_main
from sitrace.estimator import NoiseParams
from sitrace.experiment import parse_config
from sitrace.bounds import guarantee_diagnostics
from helpers import all_connected_graphs, bfs_neighborhood, \
    random_connected_graph

SEEDS = (101, 202, 303)


def report(number, name, ok, detail):
    print(f"\nACCEPTANCE {number} ({name}): {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def reference_config(seed, n=500, trials=100, heterogeneous=False):
    rates = ({"kind": "uniform", "low": 1.0, "high": 1.5} if heterogeneous
             else {"kind": "homogeneous", "value": 1.0})
    return parse_config({
        "graph": {"kind": "random_regular", "n": n, "degree": 3},
        "rates": rates,
        "noise": {"p": 0.5, "eps": 0.1},
        "estimator": {"alpha": 1.0, "beta": 2.0},
        "trials": trials,
        "seed": seed,
    })


@pytest.fixture(scope="module")
def homogeneous_runs():
    out = {}
    for seed in SEEDS:
        t0 = time.time()
        out[seed] = (run_experiment(reference_config(seed)), time.time() - t0)
    return out


@pytest.fixture(scope="module")
def heterogeneous_runs():
    return {seed: run_experiment(reference_config(seed, heterogeneous=True))
            for seed in SEEDS}


def test_criterion_1_homogeneous_reference_point(homogeneous_runs):
    result, elapsed = homogeneous_runs[SEEDS[0]]
    s = result.summary
    ok = (s.median_infected_at_stop <= 100        # 80 + 25% tolerance
          and s.mean_dist_error <= 2.0            # 1.5 + 0.5 tolerance
          and elapsed < 300.0)
    assert report(1, "homogeneous reference point", ok,
                  f"median infections {s.median_infected_at_stop} (<= 100), "
                  f"mean dist error {s.mean_dist_error:.3f} (<= 2.0), "
                  f"runtime {elapsed:.1f}s (< 300s)")


def test_criterion_2_heterogeneous_reference_point(homogeneous_runs,
                                                   heterogeneous_runs):
    errors = [heterogeneous_runs[s].summary.mean_dist_error for s in SEEDS]
    med_pairs = [(homogeneous_runs[s][0].summary.median_infected_at_stop,
                  heterogeneous_runs[s].summary.median_infected_at_stop)
                 for s in SEEDS]
    increased = sum(het >= hom for hom, het in med_pairs)
    ok = errors[0] <= 2.5 and increased >= 2     # 2.0 + 0.5 tolerance
    assert report(2, "heterogeneous reference point", ok,
                  f"mean dist error {errors[0]:.3f} (<= 2.5), medians "
                  f"hom/het per seed {med_pairs}, increased in {increased}/3")


def test_criterion_3_containment_at_n1000():
    result = run_experiment(reference_config(7001, n=1000, trials=200))
    rows = result.rows
    containment = sum(r.containment for r in rows) / len(rows)
    # companion guarantee: the estimate lands within (alpha+beta) T hops
    within = sum(r.dist_error <= 3.0 * r.stop_time for r in rows) / len(rows)
    ok = containment >= 0.95 and within >= 0.95
    assert report(3, "spread containment at n=1000", ok,
                  f"containment fraction {containment:.3f} (>= 0.95), "
                  f"dist within (alpha+beta)T fraction {within:.3f} (>= 0.95)")


def test_criterion_4_engine_equivalence():
    cycle = build_graph([(i, (i + 1) % 10, 1.0) for i in range(10)])
    target = 5  # antipodal vertex of the 10-cycle
    fpp = np.array([simulate_fpp(cycle, 0, 10_000 + i).times[target]
                    for i in range(5000)])
    markov = np.array([
        simulate_markovian(cycle, 0, math.inf, 20_000 + i).times[target]
        for i in range(5000)])
    stat = ks_2samp(fpp, markov).statistic
    # asymptotic two-sample critical value at 1%:
    # sqrt(-ln(0.005)/2) * sqrt((n+m)/(n m)) = 1.6276 * sqrt(2/5000)
    critical = 1.6276236307187293 * math.sqrt(2.0 / 5000.0)
    ok = stat < critical
    assert report(4, "engine equivalence", ok,
                  f"KS statistic {stat:.5f} < critical {critical:.5f} "
                  f"(5000 samples per engine)")


def test_criterion_5_bound_suite():
    tail = verify_exp_sum_tail(10, [1.0] * 10, 0.2, trials=100_000, seed=31)
    tail_ok = tail.empirical <= 9.47e-3 and tail.passed

    g = random_regular_graph(500, 3, seed=11)
    params = default_rate_params(g)
    reports = (verify_inner_containment(g, params, [12, 24, 36, 48, 60],
                                        trials=500, seed=77)
               + verify_outer_containment(g, params, [1, 2, 5, 10, 25],
                                          trials=500, seed=77))
    asserted = [r for r in reports
                if r.analytic < 0.5 and r.se < r.analytic / 3.0]
    grid_ok = bool(asserted) and all(r.passed for r in asserted)
    ok = tail_ok and grid_ok
    assert report(5, "bound suite", ok,
                  f"tail empirical {tail.empirical:.2e} (<= 9.47e-3, analytic "
                  f"{tail.analytic:.2e}); containment grid: "
                  f"{len(asserted)}/{len(reports)} informative points, "
                  f"all pass: {grid_ok}")


# ---------------------------------------------------------------------------
# Criterion 6: growth-inequality property sweep + poly-equivalence oracle
# ---------------------------------------------------------------------------

def graph_pool(rng):
    pool = [random_regular_graph(int(rng.integers(16, 50)) * 2, 3,
                                 seed=int(rng.integers(10_000)))
            for _ in range(6)]
    pool += [regular_tree(3, 3), regular_tree(4, 2), lattice(1, 12),
             lattice(2, 5), lattice(3, 3)]
    pool += [random_connected_graph(rng, int(rng.integers(5, 30)))
             for _ in range(12)]
    prepared = []
    for g in pool:
        diam = diameter(g)
        q = 1.0
        for t in range(diam + 1):
            sizes = [len(bfs_neighborhood(g, v, t))
                     for v in range(g.vertex_count)]
            q = max(q, max(sizes) / min(sizes))
        assert check_poly_equivalence(g, q, 1.0, diam)
        prepared.append((g, diam, q))
    return prepared


def test_criterion_6_growth_property_sweep():
    rng = np.random.default_rng(2024)
    pool = graph_pool(rng)
    violations = 0
    cases = 1000
    for _ in range(cases):
        g, diam, q = pool[int(rng.integers(len(pool)))]
        v = int(rng.integers(g.vertex_count))
        alpha = float(rng.uniform(0.2, 2.0))
        t = int(rng.integers(1, 2 * diam + 2))
        t2 = t + int(rng.integers(0, diam + 1))

        # neighborhood size vs degree power
        t_hop = min(t, diam)
        if len(bfs_neighborhood(g, v, t_hop)) > 2 * g.max_degree ** t_hop:
            violations += 1
        # growth ratio and difference bounds (exact integer forms)
        f1 = cumulative_growth(g, v, alpha, t)
        f2 = cumulative_growth(g, v, alpha, t2)
        if f1 * t2 > 2 * t * f2:
            violations += 1
        if f2 - f1 < t2 - t:
            violations += 1
        # certified power bound at r = 1
        k = int(rng.integers(1, 4))
        if len(bfs_neighborhood(g, v, k * t_hop)) > \
                (q * len(bfs_neighborhood(g, v, t_hop))) ** k + 1e-9:
            violations += 1
        # inverse roundtrip
        z = float(rng.uniform(1.0, 3.0 * f2))
        if cumulative_growth(g, v, alpha, growth_inverse(g, v, alpha, z)) < z:
            violations += 1
        if growth_inverse(g, v, alpha, f1) > t:
            violations += 1
    ok = violations == 0
    assert report(6, "growth property sweep", ok,
                  f"{cases} randomized cases, {violations} violations")


def brute_force_poly_equivalent(g, q, r, t_max):
    for u, v, t in itertools.product(range(g.vertex_count),
                                     range(g.vertex_count),
                                     range(t_max + 1)):
        if not len(bfs_neighborhood(g, u, t)) <= \
                q * len(bfs_neighborhood(g, v, t)) ** r:
            return False
    return True


def test_criterion_6b_poly_equivalence_small_graph_oracle():
    qr_grid = [(1.0, 1.0), (1.2, 1.0), (2.0, 1.0), (1.0, 1.5), (3.0, 2.0)]
    graphs = []
    for n in (2, 3, 4, 5):
        graphs.extend(all_connected_graphs(n))
    rng = np.random.default_rng(99)
    for n in (6, 7, 8):
        graphs.extend(random_connected_graph(rng, n) for _ in range(50))
    checked = 0
    mismatches = 0
    for g in graphs:
        t_max = g.vertex_count  # beyond the diameter: certifies all radii
        for q, r in qr_grid:
            checked += 1
            if check_poly_equivalence(g, q, r, t_max) != \
                    brute_force_poly_equivalent(g, q, r, t_max):
                mismatches += 1
    ok = mismatches == 0
    assert report(6, "poly-equivalence vs brute force", ok,
                  f"{len(graphs)} graphs x {len(qr_grid)} (q, r) points = "
                  f"{checked} comparisons, {mismatches} mismatches")


def test_criterion_7_byte_identical_reruns(tmp_path):
    raw = {
        "graph": {"kind": "random_regular", "n": 80, "degree": 3},
        "rates": {"kind": "uniform", "low": 1.0, "high": 1.5},
        "noise": {"p": 0.5, "eps": 0.1},
        "estimator": {"alpha": 1.0, "beta": 2.0},
        "trials": 12,
        "seed": 4242,
    }
    config = parse_config(raw)
    direct_a, direct_b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_experiment_csv(run_experiment(config), direct_a)
    write_experiment_csv(run_experiment(config, threads=2), direct_b)

    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text(yaml.safe_dump(raw))
    cli_a, cli_b = tmp_path / "c.csv", tmp_path / "d.csv"
    assert cli_main(["run", "--config", str(cfg_path), "--out", str(cli_a)]) == 0
    assert cli_main(["run", "--config", str(cfg_path), "--out", str(cli_b),
                     "--threads", "3"]) == 0
    ok = (direct_a.read_bytes() == direct_b.read_bytes()
          and cli_a.read_bytes() == cli_b.read_bytes()
          and direct_a.read_bytes() == cli_a.read_bytes())
    assert report(7, "byte-identical reruns", ok,
                  f"{len(direct_a.read_bytes())} bytes, direct and CLI, "
                  f"serial and threaded")


def test_guarantee_diagnostics_on_live_runs():
    # informational companion to criterion 3: exercise the diagnostics
    # report on a real shared-graph batch
    g = random_regular_graph(300, 3, seed=5)
    cfg = make_config(g, 1.0, 2.0, 0.1)
    noise = NoiseParams(0.5, 0.1)
    rng = np.random.default_rng(6)
    results = []
    for i in range(40):
        source = int(rng.integers(g.vertex_count))
        traj = simulate_fpp(g, source, 50_000 + i)
        results.append(run_estimation(g, cfg, traj, noise, 60_000 + i))
    rep = guarantee_diagnostics(results, g, p=0.5, eps=0.1, alpha=1.0,
                                beta=2.0, size_exponent=6.0)
    print(f"\ndiagnostics: budget {rep.score_budget:.1f}, "
          f"stop within budget {rep.stop_within_budget:.2f}, "
          f"dist within budget {rep.dist_within_budget:.2f}, "
          f"containment {rep.containment_fraction:.2f} "
          f"(se {rep.containment_se:.3f}), "
          f"spread size within log^6: {rep.spread_size_within:.2f}")
    assert rep.trials == 40
    assert rep.containment_fraction >= 0.9
