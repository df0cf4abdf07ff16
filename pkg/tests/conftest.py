"""Shared fixtures.

The demo workspace and its base batch run are expensive enough to share at
session scope; everything else builds tiny analytic objects per test.
"""
import numpy as np
import pytest

from sccprem import (
    CarbonCycleParams,
    ClimateParams,
    DamageSpec,
    PreferenceSet,
    Scenario,
    Workspace,
    batch_scc,
    growth_path,
    load_config,
    marginal_damage_path,
)


def make_toy_scenario(years=50, growth=0.017, start_year=2020,
                      emissions=10.0, population=7.8e9, income0=9500.0):
    """Constant-growth, constant-emission scenario for analytic checks."""
    yy = np.arange(start_year, start_year + years + 1)
    t = np.arange(len(yy))
    return Scenario(
        id="toy",
        years=yy,
        population=np.full(len(yy), population),
        income_pc=income0 * (1.0 + growth) ** t,
        emissions=np.full(len(yy), emissions),
    )


def make_toy_mdp(scenario=None, coeff=0.003467, elasticity=0.0,
                 pulse_year=2020):
    scenario = scenario or make_toy_scenario()
    carbon = CarbonCycleParams(shares=(0.2, 0.8), timescales=(np.inf, 100.0))
    climate = ClimateParams(sensitivity=3.0, response_time=40.0,
                            initial_temp=1.1)
    damage = DamageSpec(kind="polynomial", coefficients=(0.0, 0.0, coeff),
                        income_elasticity=elasticity, label="quadratic")
    return marginal_damage_path(carbon, climate, damage, scenario,
                                pulse_gtc=1.0, pulse_year=pulse_year)


def make_preferences(rho, eta, weight=None, country=None):
    """Calibrated preference set straight from arrays."""
    rho = np.asarray(rho, dtype=float)
    n = len(rho)
    return PreferenceSet(
        country=np.asarray(country if country is not None else ["AAA"] * n,
                           dtype=object),
        time_index=np.zeros(n),
        risk_index=np.zeros(n),
        gender=np.asarray(["unknown"] * n, dtype=object),
        age=np.full(n, 40.0),
        weight=np.ones(n) if weight is None else np.asarray(weight, dtype=float),
        rho=rho,
        eta=np.asarray(eta, dtype=float),
    )


@pytest.fixture
def toy_scenario():
    return make_toy_scenario()


@pytest.fixture
def toy_mdp(toy_scenario):
    return make_toy_mdp(toy_scenario)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


@pytest.fixture(scope="session")
def demo_workspace(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo_ws")
    return Workspace(load_config(output_dir=out))


@pytest.fixture(scope="session")
def base_run(demo_workspace):
    """Calibrated base preferences plus the full respondent batch."""
    ws = demo_workspace
    prefs, cal_map, clamp = ws.calibrated("base")
    scen = ws.scenario(ws.config.base_scenario)
    g = growth_path(scen)
    mdp = ws.mdp(ws.config.base_scenario, ws.config.base_damage_kind,
                 ws.config.base_elasticity)
    results = batch_scc(mdp, prefs, g, workers=1,
                        chunk_size=ws.config.chunk_size)
    return {"ws": ws, "prefs": prefs, "cal_map": cal_map, "clamp": clamp,
            "scenario": scen, "g": g, "mdp": mdp, "results": results}
