"""Deterministic synthetic survey extract for demonstration and testing.

The original respondent-level survey extract is licensed data and is not
bundled.  This generator produces a stand-in with the same schema and the
documented large-scale features: 79,273 respondents across 76 countries,
composite indices on the published ranges, a positive time/risk index
correlation, higher risk aversion among women and older respondents, and
per-country index distributions chosen so that the bundled calibration
reproduces the documented aggregate behavior.  Same seed, same bytes.
"""
from __future__ import annotations

from importlib.resources import files as package_files
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataError
from .preferences import RISK_INDEX_RANGE, TIME_INDEX_RANGE

FEMALE_RISK_SHIFT = 0.20    # index points; women report higher risk aversion
FEMALE_TIME_SHIFT = 0.03
OLD_AGE_TIME_SLOPE = 0.006  # impatience rises past retirement age
AGE_RISK_SLOPE = 0.0040     # risk aversion rises with age
AGE_PIVOT = 40.0
RETIREMENT_AGE = 65.0


def _profiles_path() -> Path:
    return Path(str(package_files("sccprem").joinpath("data"))) / "country_profiles.csv"


def load_country_profiles(path=None) -> pd.DataFrame:
    path = Path(path) if path else _profiles_path()
    try:
        profiles = pd.read_csv(path)
    except FileNotFoundError:
        raise DataError(f"country profile table not found: {path}")
    needed = {"country", "n_respondents", "time_mu", "time_sd",
              "risk_mu", "risk_sd", "index_corr"}
    missing = needed - set(profiles.columns)
    if missing:
        raise DataError(f"{path}: profile table missing columns {sorted(missing)}")
    return profiles


def make_demo_extract(country_weights, seed: int = 20260814,
                      profiles_path=None) -> pd.DataFrame:
    """Build the synthetic respondent table as a DataFrame."""
    profiles = load_country_profiles(profiles_path)
    weights_table = country_weights.table.set_index("country")
    missing = sorted(set(profiles["country"]) - set(weights_table.index))
    if missing:
        raise DataError(f"profiles reference countries without weights: {missing}")

    rng = np.random.default_rng(seed)
    blocks = []
    for row in profiles.sort_values("country").itertuples(index=False):
        n = int(row.n_respondents)
        z1 = rng.standard_normal(n)
        z2 = rng.standard_normal(n)
        corr = float(row.index_corr)
        base_t = row.time_mu + row.time_sd * z1
        base_r = row.risk_mu + row.risk_sd * (corr * z1 + np.sqrt(1 - corr**2) * z2)

        u = rng.random(n)
        gender = np.where(u < 0.52, "female", np.where(u < 0.995, "male", "unknown"))
        female = gender == "female"
        age = np.minimum(15.0 + rng.gamma(2.2, 11.0, size=n), 95.0).round(0)

        time_index = base_t + FEMALE_TIME_SHIFT * female \
            + OLD_AGE_TIME_SLOPE * np.maximum(age - RETIREMENT_AGE, 0.0)
        risk_index = base_r + FEMALE_RISK_SHIFT * female \
            + AGE_RISK_SLOPE * (age - AGE_PIVOT)
        time_index = np.clip(time_index, *TIME_INDEX_RANGE)
        risk_index = np.clip(risk_index, *RISK_INDEX_RANGE)

        population = float(weights_table.loc[row.country, "population"])
        weight = (population / n) * rng.lognormal(0.0, 0.15, size=n)

        blocks.append(pd.DataFrame({
            "country": row.country,
            "time_index": time_index,
            "risk_index": risk_index,
            "gender": gender,
            "age": age,
            "weight": weight,
        }))
    frame = pd.concat(blocks, ignore_index=True)
    # Normalize weights to average 1 so totals read as respondent counts.
    frame["weight"] *= len(frame) / frame["weight"].sum()
    return frame


def write_demo_extract(path, country_weights, seed: int = 20260814,
                       profiles_path=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = make_demo_extract(country_weights, seed=seed, profiles_path=profiles_path)
    with open(path, "w", newline="") as handle:
        frame.to_csv(handle, index=False)
    return path


def make_demo_policy(country_weights, seed: int = 20260814,
                     profiles_path=None) -> pd.DataFrame:
    """Country policy indicators loosely tied to national patience.

    Patient countries get higher carbon prices and stated willingness to
    pay and smaller pledge gaps, plus noise; some carbon prices are left
    missing to exercise pairwise-complete handling downstream.
    """
    profiles = load_country_profiles(profiles_path).sort_values("country")
    rng = np.random.default_rng(seed + 1)
    n = len(profiles)
    t = profiles["time_mu"].to_numpy()
    carbon_price = np.maximum(0.0, 38.0 - 55.0 * t + rng.normal(0.0, 9.0, n))
    ndc_gap = np.clip(0.25 + 0.45 * t + rng.normal(0.0, 0.10, n), -0.5, 1.5)
    wtp_share = np.clip(0.52 - 0.30 * t + rng.normal(0.0, 0.07, n), 0.02, 0.98)
    missing = rng.random(n) < 0.18
    carbon_price[missing] = np.nan
    return pd.DataFrame({
        "country": profiles["country"].to_numpy(),
        "carbon_price": carbon_price.round(2),
        "ndc_gap": ndc_gap.round(3),
        "wtp_share": wtp_share.round(3),
    })


def write_demo_policy(path, country_weights, seed: int = 20260814,
                      profiles_path=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    make_demo_policy(country_weights, seed=seed,
                     profiles_path=profiles_path).to_csv(path, index=False)
    return path
