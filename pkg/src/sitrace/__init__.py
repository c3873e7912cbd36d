"""sitrace: simulate SI network cascades and locate their source quickly
from noisy periodic diagnostic tests.

The package pairs two cascade engines (edge-delay shortest path and
event-driven) with a sequential neighborhood-score estimator, a Monte-Carlo
verifier for the cascade containment bounds, and a batch experiment driver
with deterministic seeding and CSV/figure output.
"""

from .graphs import (Graph, build_graph, random_regular_graph, regular_tree,
                     lattice, distance, all_distances_from, distance_matrix,
                     diameter, neighborhood, cumulative_growth, growth_inverse,
                     check_poly_equivalence, save_edge_list, load_edge_list,
                     as_vertex_set, reweighted)
from .cascade import (RateParams, CascadeTrajectory, default_rate_params,
                      simulate_fpp, simulate_markovian, affected_at,
                      check_containment, check_causality, save_trajectory,
                      load_trajectory)
from .observation import (NoiseParams, ObservationRound, signal_pmf,
                          sample_round, save_rounds, load_rounds)
from .estimator import (EstimatorConfig, EstimatorState, EstimationResult,
                        StopDecision, threshold, make_config, update_scores,
                        check_stopping, spread_estimate, run_estimation,
                        replay_estimation)
from .bounds import (BoundReport, DiagnosticsReport, inner_containment_bound,
                     outer_containment_bound, exp_sum_tail_bound,
                     verify_inner_containment, verify_outer_containment,
                     verify_exp_sum_tail, guarantee_diagnostics,
                     growth_rescaling_table, write_bound_reports)
from .experiment import (ExperimentConfig, ExperimentResult, TrialRow, Summary,
                         ConfigError, parse_config, load_config, run_trial,
                         run_experiment, summarize, write_experiment_csv,
                         read_experiment_csv, parse_bounds_config,
                         load_bounds_config, run_bounds)
from .seeds import derive_seed, make_rng

__version__ = "0.1.0"
