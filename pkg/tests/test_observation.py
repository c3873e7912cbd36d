import numpy as np
import pytest
from scipy.stats import chi2_contingency

from sitrace import (NoiseParams, ObservationRound, load_rounds, make_rng,
                     sample_round, save_rounds, signal_pmf)


# ---------------------------------------------------------------------------
# Parameters and PMFs
# ---------------------------------------------------------------------------

def test_noise_params_validation():
    NoiseParams(1.0, 0.0)      # perfect tests are allowed
    with pytest.raises(ValueError, match="p"):
        NoiseParams(0.0, 0.1)
    with pytest.raises(ValueError, match="eps"):
        NoiseParams(0.5, 0.5)
    with pytest.raises(ValueError, match="eps"):
        NoiseParams(0.5, -0.1)


def test_pmf_perfect_tests():
    assert signal_pmf(True, NoiseParams(1.0, 0.0)) == (0.0, 0.0, 1.0)
    assert signal_pmf(False, NoiseParams(1.0, 0.0)) == (0.0, 1.0, 0.0)


def test_pmf_values():
    params = NoiseParams(0.5, 0.1)
    p0, pm, pp = signal_pmf(True, params)
    assert p0 == 0.5
    assert pm == 0.05
    assert pp == pytest.approx(0.45, abs=1e-15)
    p0, pm, pp = signal_pmf(False, params)
    assert p0 == 0.5
    assert pm == pytest.approx(0.45, abs=1e-15)
    assert pp == pytest.approx(0.05, abs=1e-15)


def test_pmf_sums_to_one_exactly():
    rng = np.random.default_rng(7)
    for _ in range(500):
        params = NoiseParams(float(rng.uniform(0.01, 1.0)),
                             float(rng.uniform(0.0, 0.499)))
        for affected in (True, False):
            assert sum(signal_pmf(affected, params)) == 1.0


# ---------------------------------------------------------------------------
# Round sampling
# ---------------------------------------------------------------------------

def test_perfect_round_reports_truth():
    params = NoiseParams(1.0, 0.0)
    rnd = sample_round(np.array([2]), 5, 0, params, make_rng(1))
    assert rnd.signals.tolist() == [-1, -1, 1, -1, -1]


def test_round_values_and_determinism():
    params = NoiseParams(0.5, 0.1)
    a = sample_round(np.array([0, 1]), 50, 3, params, make_rng(9))
    b = sample_round(np.array([0, 1]), 50, 3, params, make_rng(9))
    assert np.array_equal(a.signals, b.signals)
    assert set(np.unique(a.signals)) <= {-1, 0, 1}
    assert a.t == 3


def test_tested_count_binomial():
    # with p = 0.5 over 1000 vertices the tested count averages 500
    params = NoiseParams(0.5, 0.1)
    rng = make_rng(12)
    counts = [np.count_nonzero(
        sample_round(np.array([0]), 1000, t, params, rng).signals)
        for t in range(200)]
    assert abs(np.mean(counts) - 500.0) < 10.0


def test_signal_expectations():
    # E[signal] = p(1-2eps) for affected vertices, the negative for clean
    params = NoiseParams(0.6, 0.2)
    rng = make_rng(21)
    n, rounds = 2000, 60
    affected = np.arange(1000)
    total = np.zeros(n)
    for t in range(rounds):
        total += sample_round(affected, n, t, params, rng).signals
    mean_affected = total[:1000].mean() / rounds
    mean_clean = total[1000:].mean() / rounds
    expect = params.p * (1.0 - 2.0 * params.eps)
    se = np.sqrt(params.p / (rounds * 1000))  # Var(signal) <= p
    assert abs(mean_affected - expect) < 3 * se
    assert abs(mean_clean + expect) < 3 * se


def test_rounds_independent_chi_square():
    # signals of the same vertex in different rounds are independent:
    # pool (round-1, round-2) pairs across many vertices
    params = NoiseParams(0.5, 0.2)
    rng = make_rng(33)
    n = 30_000
    affected = np.arange(n)  # all affected: identical marginals
    r1 = sample_round(affected, n, 0, params, rng).signals
    r2 = sample_round(affected, n, 1, params, rng).signals
    table = np.zeros((3, 3))
    for a, b in zip(r1 + 1, r2 + 1):
        table[a, b] += 1
    _stat, pvalue, _dof, _ = chi2_contingency(table)
    assert pvalue > 1e-3


def test_restricted_sampling():
    params = NoiseParams(1.0, 0.0)
    rnd = sample_round(np.array([0]), 6, 0, params, make_rng(2),
                       restrict_to=np.array([0, 3]))
    assert rnd.signals[0] == 1
    assert rnd.signals[3] == -1
    assert np.all(rnd.signals[[1, 2, 4, 5]] == 0)


def test_round_validation():
    with pytest.raises(ValueError, match="values"):
        ObservationRound(0, np.array([0, 2], dtype=np.int8))
    with pytest.raises(ValueError, match="nonnegative"):
        ObservationRound(-1, np.zeros(3, dtype=np.int8))


# ---------------------------------------------------------------------------
# Interchange
# ---------------------------------------------------------------------------

def test_rounds_roundtrip(tmp_path):
    params = NoiseParams(0.7, 0.1)
    rng = make_rng(5)
    rounds = [sample_round(np.array([0, 1]), 12, t, params, rng)
              for t in range(4)]
    path = tmp_path / "rounds.txt"
    save_rounds(rounds, path)
    back = load_rounds(path, 12)
    assert len(back) == 4
    for orig, copy in zip(rounds, back):
        assert copy.t == orig.t
        assert np.array_equal(copy.signals, orig.signals)
