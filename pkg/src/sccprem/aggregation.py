"""Aggregation of respondent-level SCCs into headline numbers.

Four voting schemes weight the same individual valuations differently:
democracy (respondent weights), un (one country, one vote), plutocracy
(market GDP weights on country means), and welfare (equity weights, the
ratio of global to national per-capita PPP income, on country means).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import stats as sstats

from . import engine, wstats
from .errors import DataError, DomainError
from .iam import MarginalDamagePath

SCHEMES = ("democracy", "un", "plutocracy", "welfare")
POLICY_INDICATORS = ("carbon_price", "ndc_gap", "wtp_share")


@dataclass(frozen=True)
class CountryWeights:
    """Per-country aggregation inputs; all values strictly positive."""

    table: pd.DataFrame  # columns: country, population, gdp_mer, income_pc_ppp

    def __post_init__(self):
        needed = {"country", "population", "gdp_mer", "income_pc_ppp"}
        missing = needed - set(self.table.columns)
        if missing:
            raise DataError(f"country weights missing columns {sorted(missing)}")
        if self.table["country"].duplicated().any():
            raise DataError("country weights contain duplicate countries")
        for col in ("population", "gdp_mer", "income_pc_ppp"):
            vals = self.table[col].to_numpy(dtype=float)
            if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
                raise DomainError(f"country weight column '{col}' must be positive")

    @classmethod
    def from_csv(cls, path) -> "CountryWeights":
        try:
            table = pd.read_csv(path)
        except FileNotFoundError:
            raise DataError(f"country weights file not found: {path}")
        return cls(table=table)

    def populations(self) -> dict:
        return dict(zip(self.table["country"], self.table["population"]))

    def require(self, countries) -> pd.DataFrame:
        """Rows for the given countries; missing ones are a data error."""
        wanted = sorted(set(countries))
        got = self.table[self.table["country"].isin(wanted)]
        missing = sorted(set(wanted) - set(got["country"]))
        if missing:
            raise DataError(f"no aggregation weights for countries: {missing}")
        return got.set_index("country").loc[wanted].reset_index()


@dataclass(frozen=True)
class AggregateReport:
    scheme: str
    ref_scc: float
    mean_scc: float
    premium: float          # mean_scc - ref_scc, exact
    mean_percentile: float  # where mean_scc sits in the respondent distribution
    country_table: pd.DataFrame = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "ref_scc": self.ref_scc,
                "mean_scc": self.mean_scc, "premium": self.premium,
                "mean_percentile": self.mean_percentile}


def make_country_table(results: pd.DataFrame, mdp: MarginalDamagePath,
                       g) -> pd.DataFrame:
    """Per-country reference SCC, mean SCC, and premium.

    The reference uses the country's weighted-mean post-clamp preferences;
    the mean averages individual SCCs with respondent weights.
    """
    ok = results[results["scc"].notna()]
    if ok.empty:
        raise DataError("no valid valuations to aggregate")
    rows = []
    for country, group in ok.groupby("country", sort=True):
        w = group["weight"].to_numpy()
        rho_bar = wstats.weighted_mean(group["rho"].to_numpy(), w)
        eta_bar = wstats.weighted_mean(group["eta"].to_numpy(), w)
        ref = engine.scc_for_preferences(mdp, rho_bar, eta_bar, g)
        mean = wstats.weighted_mean(group["scc"].to_numpy(), w)
        rows.append({"country": country, "n": len(group), "weight": w.sum(),
                     "rho_mean": rho_bar, "eta_mean": eta_bar,
                     "ref_scc": ref, "mean_scc": mean, "premium": mean - ref})
    return pd.DataFrame(rows)


def aggregate(results: pd.DataFrame, weights: CountryWeights, scheme: str,
              mdp: MarginalDamagePath, g,
              country_table: pd.DataFrame | None = None,
              welfare_population_scaling: bool = False) -> AggregateReport:
    """Headline SCC numbers under one voting scheme.

    democracy: respondent-weighted mean of individual SCCs; reference at
    the global weighted-mean preferences.  un/plutocracy/welfare: country
    means combined with equal, GDP, or equity weights; references combine
    the per-country reference SCCs with the same weights.
    """
    if scheme not in SCHEMES:
        raise DataError(f"unknown scheme '{scheme}'; known: {list(SCHEMES)}")
    ok = results[results["scc"].notna()]
    if ok.empty:
        raise DataError("no valid valuations to aggregate")
    if country_table is None:
        country_table = make_country_table(results, mdp, g)

    scc = ok["scc"].to_numpy()
    w_ind = ok["weight"].to_numpy()

    if scheme == "democracy":
        mean_scc = wstats.weighted_mean(scc, w_ind)
        rho_bar = wstats.weighted_mean(ok["rho"].to_numpy(), w_ind)
        eta_bar = wstats.weighted_mean(ok["eta"].to_numpy(), w_ind)
        ref_scc = engine.scc_for_preferences(mdp, rho_bar, eta_bar, g)
    else:
        table = country_table
        info = weights.require(table["country"])
        if scheme == "un":
            cw = np.ones(len(table))
        elif scheme == "plutocracy":
            cw = info["gdp_mer"].to_numpy(dtype=float)
        else:  # welfare
            pop = info["population"].to_numpy(dtype=float)
            inc = info["income_pc_ppp"].to_numpy(dtype=float)
            global_mean_income = float(np.dot(pop, inc) / pop.sum())
            cw = global_mean_income / inc
            if welfare_population_scaling:
                cw = cw * pop / pop.sum()
        mean_scc = wstats.weighted_mean(table["mean_scc"].to_numpy(), cw)
        ref_scc = wstats.weighted_mean(table["ref_scc"].to_numpy(), cw)

    return AggregateReport(
        scheme=scheme, ref_scc=ref_scc, mean_scc=mean_scc,
        premium=mean_scc - ref_scc,
        mean_percentile=wstats.weighted_percentile_of(scc, w_ind, mean_scc),
        country_table=country_table)


@dataclass(frozen=True)
class DistributionStats:
    mean: float
    median: float
    mode_bin_midpoint: float
    skewness: float
    percentile_of_mean: float
    histogram: pd.DataFrame = field(repr=False, default=None)


def distribution_stats(results: pd.DataFrame, bin_width: float = 2.0) -> DistributionStats:
    """Weighted shape summary of the individual SCC distribution."""
    if bin_width <= 0:
        raise DomainError("bin_width must be positive")
    ok = results[results["scc"].notna()]
    if ok.empty:
        raise DataError("no valid valuations")
    scc = ok["scc"].to_numpy()
    w = ok["weight"].to_numpy()
    lo = min(0.0, np.floor(scc.min() / bin_width) * bin_width)
    edges = np.arange(lo, scc.max() + bin_width, bin_width)
    if len(edges) < 2:
        edges = np.array([lo, lo + bin_width])
    counts, edges = np.histogram(scc, bins=edges, weights=w)
    hist = pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:],
                         "weight": counts, "share": counts / w.sum()})
    mode_mid = float(hist.loc[hist["weight"].idxmax(), ["bin_left", "bin_right"]].mean())
    mean = wstats.weighted_mean(scc, w)
    return DistributionStats(
        mean=mean,
        median=wstats.weighted_median(scc, w),
        mode_bin_midpoint=mode_mid,
        skewness=wstats.weighted_skewness(scc, w),
        percentile_of_mean=wstats.weighted_percentile_of(scc, w, mean),
        histogram=hist)


def slice_by(results: pd.DataFrame, by: str = "gender", min_group: int = 30,
             age_edges=(15, 25, 35, 45, 55, 65, 75, 120)) -> pd.DataFrame:
    """Weighted group means of SCC with normal-approximation 95% bands.

    Groups smaller than min_group are kept but flagged.  by='age' bins on
    age_edges and drops unknown ages; by='gender' keeps the 'unknown' level.
    """
    ok = results[results["scc"].notna()].copy()
    if ok.empty:
        raise DataError("no valid valuations")
    if by == "age":
        ok = ok[np.isfinite(ok["age"])]
        if ok.empty:
            raise DataError("no records with known age")
        ok["group"] = pd.cut(ok["age"], bins=list(age_edges), right=False).astype(str)
        ok = ok[ok["group"] != "nan"]
    elif by == "gender":
        ok["group"] = ok["gender"]
    else:
        raise DataError(f"unknown slice '{by}'")
    rows = []
    for key, group in ok.groupby("group", sort=True):
        scc = group["scc"].to_numpy()
        w = group["weight"].to_numpy()
        mean = wstats.weighted_mean(scc, w)
        se = wstats.weighted_mean_se(scc, w)
        rows.append({"group": key, "n": len(group), "scc_mean": mean,
                     "scc_se": se, "ci_low": mean - 1.96 * se,
                     "ci_high": mean + 1.96 * se,
                     "small_group": len(group) < min_group})
    return pd.DataFrame(rows)


def correlate_policy(country_scc: pd.DataFrame, policy: pd.DataFrame,
                     indicators=POLICY_INDICATORS) -> pd.DataFrame:
    """Pearson and rank correlations between country mean SCC and policy.

    Uses pairwise-complete observations per indicator; fewer than three
    overlapping countries for an indicator is an insufficient-data error.
    No sign is asserted; interpretation is left to the caller.
    """
    if "country" not in country_scc.columns or "mean_scc" not in country_scc.columns:
        raise DataError("country_scc needs 'country' and 'mean_scc' columns")
    if "country" not in policy.columns:
        raise DataError("policy table needs a 'country' column")
    merged = country_scc[["country", "mean_scc"]].merge(policy, on="country", how="inner")
    rows = []
    for name in indicators:
        if name not in merged.columns:
            raise DataError(f"policy table missing indicator '{name}'")
        pair = merged[["mean_scc", name]].dropna()
        if len(pair) < 3:
            raise DataError(f"indicator '{name}': only {len(pair)} overlapping "
                            "countries; need at least 3")
        x = pair["mean_scc"].to_numpy(dtype=float)
        y = pair[name].to_numpy(dtype=float)
        pearson_r, pearson_p = sstats.pearsonr(x, y)
        spearman_r, spearman_p = sstats.spearmanr(x, y)
        rows.append({"indicator": name, "n": len(pair),
                     "pearson_r": float(pearson_r), "pearson_p": float(pearson_p),
                     "spearman_r": float(spearman_r), "spearman_p": float(spearman_p)})
    return pd.DataFrame(rows)
