"""Valuation engine against brute-force reference implementations.

The reference below recomputes every NPV with plain Python floats and an
explicit per-year loop, deliberately avoiding numpy so shared bugs with the
vectorized kernel are impossible.
"""
import numpy as np
import pytest

from sccprem import (
    batch_scc,
    growth_path,
    scc_for_preferences,
    weighted_mean_preferences,
    weitzman_premium,
)
from sccprem.engine import results_to_csv
from sccprem.errors import AlignmentError, DomainError

from conftest import make_preferences, make_toy_mdp, make_toy_scenario


def brute_force_scc(mdp, rho, eta, g):
    """Loop-based NPV per tonne, normalized to the pulse year."""
    years = list(mdp.years)
    k = years.index(mdp.pulse_year)
    factor = 1.0
    factors = [1.0]
    for t in range(len(years) - 1):
        factor /= 1.0 + rho + eta * float(g[t])
        factors.append(factor)
    base = factors[k]
    total = 0.0
    for f, d in zip(factors, mdp.delta_damage):
        total += (f / base) * float(d)
    return total / mdp.pulse_size


def test_scc_matches_brute_force_on_simple_preferences(toy_scenario, toy_mdp):
    g = growth_path(toy_scenario)
    for rho, eta in ((0.0, 0.0), (0.1, 0.0), (0.0, 2.0), (0.03, 1.5)):
        got = scc_for_preferences(toy_mdp, rho, eta, g)
        want = brute_force_scc(toy_mdp, rho, eta, g)
        assert got == pytest.approx(want, rel=1e-12)
    # rho = eta = 0 means no discounting: NPV is the plain sum
    undiscounted = float(toy_mdp.delta_damage.sum() / toy_mdp.pulse_size)
    assert scc_for_preferences(toy_mdp, 0.0, 0.0, g) == pytest.approx(
        undiscounted, rel=1e-12)


def test_scc_matches_brute_force_random_preferences(toy_mdp, toy_scenario, rng):
    g = growth_path(toy_scenario)
    for _ in range(50):
        rho = float(rng.uniform(0.0, 0.12))
        eta = float(rng.uniform(0.0, 4.0))
        got = scc_for_preferences(toy_mdp, rho, eta, g)
        want = brute_force_scc(toy_mdp, rho, eta, g)
        assert got == pytest.approx(want, rel=1e-9)


def test_pulse_year_normalization():
    """Years before the pulse must not dilute the NPV."""
    from sccprem.iam import MarginalDamagePath

    scen = make_toy_scenario(years=60, start_year=2015)
    mdp = make_toy_mdp(scen, pulse_year=2020)
    g = growth_path(scen)
    got = scc_for_preferences(mdp, 0.02, 1.0, g)
    want = brute_force_scc(mdp, 0.02, 1.0, g)
    assert got == pytest.approx(want, rel=1e-12)
    # pre-pulse damages are identically zero, so the value must equal the
    # NPV on the grid truncated at the pulse year
    k = scen.index_of(2020)
    assert np.allclose(mdp.delta_damage[:k + 1], 0.0, atol=1e-9)
    tail = MarginalDamagePath(years=mdp.years[k:],
                              delta_damage=mdp.delta_damage[k:],
                              pulse_size=mdp.pulse_size, pulse_year=2020)
    truncated = scc_for_preferences(tail, 0.02, 1.0, g[k:])
    assert got == pytest.approx(truncated, rel=1e-12)


def test_alignment_and_domain_errors(toy_mdp, toy_scenario):
    with pytest.raises(AlignmentError):
        scc_for_preferences(toy_mdp, 0.01, 1.0, np.zeros(7))
    g = np.full(len(toy_scenario), -0.6)
    with pytest.raises(DomainError):
        scc_for_preferences(toy_mdp, 0.0, 2.0, g)  # rate hits -120%


def test_batch_matches_single_bitwise(toy_mdp, toy_scenario, rng):
    g = growth_path(toy_scenario)
    n = 300
    prefs = make_preferences(rho=rng.uniform(0, 0.1, n),
                             eta=rng.uniform(0, 4, n),
                             weight=rng.uniform(0.5, 2.0, n))
    results = batch_scc(toy_mdp, prefs, g)
    assert list(results.columns) == ["key", "country", "gender", "age",
                                     "rho", "eta", "scc", "weight", "error"]
    assert len(results) == n
    for i in (0, 17, 299):
        single = scc_for_preferences(toy_mdp, float(prefs.rho[i]),
                                     float(prefs.eta[i]), g)
        # matmul and dot may differ in summation order; agreement to a few ulp
        assert results["scc"].iloc[i] == pytest.approx(single, rel=1e-13)


def test_batch_chunk_size_independence(toy_mdp, toy_scenario, rng):
    g = growth_path(toy_scenario)
    prefs = make_preferences(rho=rng.uniform(0, 0.1, 101),
                             eta=rng.uniform(0, 4, 101))
    a = batch_scc(toy_mdp, prefs, g, chunk_size=17)
    b = batch_scc(toy_mdp, prefs, g, chunk_size=4096)
    assert np.array_equal(a["scc"].to_numpy(), b["scc"].to_numpy())


def test_batch_serial_parallel_bitwise(toy_mdp, toy_scenario, rng):
    g = growth_path(toy_scenario)
    prefs = make_preferences(rho=rng.uniform(0, 0.1, 500),
                             eta=rng.uniform(0, 4, 500))
    serial = batch_scc(toy_mdp, prefs, g, workers=1, chunk_size=64)
    parallel = batch_scc(toy_mdp, prefs, g, workers=4, chunk_size=64)
    assert np.array_equal(serial["scc"].to_numpy(), parallel["scc"].to_numpy())
    assert list(serial["key"]) == list(parallel["key"])


def test_batch_requires_calibration(toy_mdp, toy_scenario):
    from sccprem.preferences import PreferenceSet
    raw = PreferenceSet(country=np.array(["A"], dtype=object),
                        time_index=np.array([0.1]), risk_index=np.array([0.2]),
                        gender=np.array(["unknown"], dtype=object),
                        age=np.array([np.nan]), weight=np.array([1.0]))
    with pytest.raises(DomainError):
        batch_scc(toy_mdp, raw, growth_path(toy_scenario))


def test_weighted_mean_preferences():
    prefs = make_preferences(rho=[0.0, 0.04], eta=[1.0, 3.0],
                             weight=[3.0, 1.0])
    rho_bar, eta_bar = weighted_mean_preferences(prefs)
    assert rho_bar == pytest.approx(0.01)
    assert eta_bar == pytest.approx(1.5)


def test_premium_nonnegative_across_random_populations(toy_mdp, toy_scenario, rng):
    """Convexity of the discount factor makes the premium nonnegative
    whenever growth and damages are nonnegative."""
    g = growth_path(toy_scenario)
    for _ in range(100):
        n = int(rng.integers(2, 40))
        prefs = make_preferences(rho=rng.uniform(0, 0.1, n),
                                 eta=rng.uniform(0, 4, n),
                                 weight=rng.uniform(0.1, 5.0, n))
        results = batch_scc(toy_mdp, prefs, g)
        rho_bar, eta_bar = weighted_mean_preferences(prefs)
        report = weitzman_premium(results, rho_bar, eta_bar, toy_mdp, g)
        assert report.premium >= -1e-9
        assert report.mean_scc == pytest.approx(report.ref_scc + report.premium)


def test_premium_zero_for_homogeneous_population(toy_mdp, toy_scenario):
    g = growth_path(toy_scenario)
    prefs = make_preferences(rho=[0.02] * 5, eta=[1.5] * 5)
    results = batch_scc(toy_mdp, prefs, g)
    report = weitzman_premium(results, 0.02, 1.5, toy_mdp, g)
    assert report.premium == pytest.approx(0.0, abs=1e-9)


def test_batch_flags_bad_rows_and_continues(toy_mdp, toy_scenario):
    # a contracting economy pushes eta = 3 past the compounding domain
    g_bad = np.full(len(toy_scenario), -0.4)
    prefs = make_preferences(rho=[0.01, 0.0], eta=[3.0, 0.5])
    results = batch_scc(toy_mdp, prefs, g_bad)
    assert np.isnan(results["scc"].iloc[0])        # 0.01 - 1.2 < -1
    assert results["error"].iloc[0]
    assert np.isfinite(results["scc"].iloc[1])     # 0.0 - 0.2 is fine
    assert not results["error"].iloc[1]
    report = weitzman_premium(results, 0.0, 0.5, toy_mdp, g_bad)
    assert np.isfinite(report.mean_scc)
    with pytest.raises(DomainError):
        all_bad = make_preferences(rho=[0.0], eta=[3.0])
        weitzman_premium(batch_scc(toy_mdp, all_bad, g_bad), 0, 3, toy_mdp, g_bad)


def test_results_to_csv_roundtrip(tmp_path, toy_mdp, toy_scenario):
    import pandas as pd
    g = growth_path(toy_scenario)
    prefs = make_preferences(rho=[0.01, 0.02], eta=[1.0, 2.0])
    results = batch_scc(toy_mdp, prefs, g)
    out = tmp_path / "results.csv"
    results_to_csv(results, out)
    back = pd.read_csv(out)
    assert list(back.columns) == ["key", "country", "gender", "age",
                                  "rho", "eta", "scc", "weight"]
    assert np.allclose(back["scc"], results["scc"], rtol=1e-12)
