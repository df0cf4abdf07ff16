import numpy as np
import pytest

from sccprem import wstats
from sccprem.errors import DomainError


def test_weighted_mean_matches_numpy_average(rng):
    x = rng.normal(size=200)
    w = rng.uniform(0.1, 3.0, size=200)
    assert wstats.weighted_mean(x, w) == pytest.approx(np.average(x, weights=w), rel=1e-14)


def test_weighted_mean_scale_invariant(rng):
    x = rng.normal(size=50)
    w = rng.uniform(0.1, 2.0, size=50)
    assert wstats.weighted_mean(x, w) == pytest.approx(
        wstats.weighted_mean(x, 7.5 * w), rel=1e-14)


def test_weighted_var_and_sd(rng):
    x = rng.normal(size=100)
    w = rng.uniform(0.5, 2.0, size=100)
    m = np.average(x, weights=w)
    var = np.average((x - m) ** 2, weights=w)
    assert wstats.weighted_var(x, w) == pytest.approx(var, rel=1e-13)
    assert wstats.weighted_sd(x, w) == pytest.approx(np.sqrt(var), rel=1e-13)


def test_skewness_sign():
    sym = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    assert wstats.weighted_skewness(sym, np.ones(5)) == pytest.approx(0.0, abs=1e-14)
    right = np.array([0.0, 0.0, 0.0, 0.0, 10.0])
    assert wstats.weighted_skewness(right, np.ones(5)) > 1.0
    assert wstats.weighted_skewness(np.full(4, 3.0), np.ones(4)) == 0.0


def test_equal_weight_quantile_matches_numpy(rng):
    x = rng.normal(size=31)
    w = np.ones(31)
    for q in (0.0, 0.05, 0.25, 0.5, 0.77, 0.95, 1.0):
        assert wstats.weighted_quantile(x, q, w) == pytest.approx(
            np.quantile(x, q), abs=1e-12)


def test_weighted_median_hand_value():
    # positions (C_i - w_i)/(W - w_i): [0, 0.2, 1.0]; q=0.5 interpolates
    # between 2 and 3 at (0.5-0.2)/0.8.
    x = np.array([1.0, 2.0, 3.0])
    w = np.array([1.0, 1.0, 4.0])
    assert wstats.weighted_median(x, w) == pytest.approx(2.375, abs=1e-12)


def test_quantile_extremes_and_monotonicity(rng):
    x = rng.uniform(-5, 5, size=40)
    w = rng.uniform(0.1, 4.0, size=40)
    assert wstats.weighted_quantile(x, 0.0, w) == pytest.approx(x.min())
    assert wstats.weighted_quantile(x, 1.0, w) == pytest.approx(x.max())
    qs = [wstats.weighted_quantile(x, q, w) for q in np.linspace(0, 1, 21)]
    assert all(a <= b + 1e-12 for a, b in zip(qs, qs[1:]))


def test_quantile_single_observation():
    assert wstats.weighted_quantile([4.2], 0.7, [2.0]) == 4.2


def test_percentile_of_midpoint_ties():
    x = np.array([1.0, 2.0, 2.0, 3.0])
    w = np.ones(4)
    assert wstats.weighted_percentile_of(x, w, 2.0) == pytest.approx(50.0)
    assert wstats.weighted_percentile_of(x, w, 0.0) == 0.0
    assert wstats.weighted_percentile_of(x, w, 99.0) == 100.0


def test_mean_se_equal_weights_reduces_to_classic(rng):
    x = rng.normal(size=400)
    w = np.ones(400)
    classic = x.std() / np.sqrt(len(x))
    assert wstats.weighted_mean_se(x, w) == pytest.approx(classic, rel=1e-12)


@pytest.mark.parametrize("bad_weights", [
    np.array([-1.0, 1.0]),
    np.array([0.0, 0.0]),
    np.array([np.nan, 1.0]),
])
def test_invalid_weights_rejected(bad_weights):
    with pytest.raises(DomainError):
        wstats.weighted_mean(np.array([1.0, 2.0]), bad_weights)


def test_empty_and_mismatched_inputs_rejected():
    with pytest.raises(DomainError):
        wstats.weighted_mean(np.array([]), np.array([]))
    with pytest.raises(DomainError):
        wstats.weighted_mean(np.array([1.0]), np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        wstats.weighted_quantile(np.array([1.0, 2.0]), 1.5, np.ones(2))
