"""Social cost of carbon per respondent and in bulk.

The marginal damage path is preference-independent, so one IAM run pair per
(scenario, damage kind, elasticity) serves every respondent; each SCC is
then a cheap discounted sum.  Batch evaluation chunks respondents through a
fixed vectorized kernel, which makes parallel and serial runs bit-identical
by construction.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from . import wstats
from .errors import AlignmentError, DomainError
from .iam import MarginalDamagePath
from .preferences import PreferenceSet

DEFAULT_CHUNK = 4096


@dataclass(frozen=True)
class SccResult:
    """One respondent's valuation."""

    key: int
    scc: float     # USD per tC
    rho: float
    eta: float
    weight: float


def _check_alignment(mdp: MarginalDamagePath, g: np.ndarray) -> int:
    g = np.asarray(g, dtype=float)
    if len(g) != len(mdp.years):
        raise AlignmentError(f"growth path has {len(g)} entries, damage path "
                             f"{len(mdp.years)}; year grids must match")
    return int(np.where(mdp.years == mdp.pulse_year)[0][0])


def scc_for_preferences(mdp: MarginalDamagePath, rho: float, eta: float,
                        g) -> float:
    """NPV of the marginal damage path per tonne of carbon.

    Discounts with the Ramsey rule r(t) = rho + eta*g(t) under discrete
    annual compounding, normalized to the pulse year.
    """
    g = np.asarray(g, dtype=float)
    k = _check_alignment(mdp, g)
    rates = rho + eta * g
    if np.any(rates <= -1.0):
        raise DomainError("Ramsey rate at or below -100%/yr")
    factors = np.empty(len(g))
    factors[0] = 1.0
    np.cumprod(1.0 / (1.0 + rates[:-1]), out=factors[1:])
    if k:
        factors = factors / factors[k]
    return float(np.dot(factors, mdp.delta_damage) / mdp.pulse_size)


def _chunk_kernel(rho, eta, g, delta, pulse_size, k):
    """SCCs for a block of respondents; row order fixed, no cross-row ops."""
    rates = rho[:, None] + eta[:, None] * g[None, :-1]
    bad = np.any(rates <= -1.0, axis=1)
    rates[bad] = 0.0
    factors = np.empty((len(rho), len(g)))
    factors[:, 0] = 1.0
    np.cumprod(1.0 / (1.0 + rates), axis=1, out=factors[:, 1:])
    if k:
        factors /= factors[:, k:k + 1]
    scc = factors @ delta / pulse_size
    scc[bad] = np.nan
    return scc, bad


def batch_scc(mdp: MarginalDamagePath, prefs: PreferenceSet, g,
              workers: int = 1, chunk_size: int = DEFAULT_CHUNK) -> pd.DataFrame:
    """Valuations for every respondent, in input order.

    Returns a frame with key, country, gender, age, rho, eta, scc, weight,
    and error.  Respondents whose Ramsey rate leaves the compounding domain
    get scc = NaN and an error message; the batch never aborts.  Results do
    not depend on workers or scheduling: each chunk runs the same kernel.
    """
    if not prefs.calibrated:
        raise DomainError("batch_scc requires calibrated preferences")
    g = np.asarray(g, dtype=float)
    k = _check_alignment(mdp, g)
    n = len(prefs)
    scc = np.empty(n)
    bad = np.zeros(n, dtype=bool)
    bounds = [(lo, min(lo + chunk_size, n)) for lo in range(0, n, chunk_size)]

    def run(span):
        lo, hi = span
        return _chunk_kernel(prefs.rho[lo:hi], prefs.eta[lo:hi], g,
                             mdp.delta_damage, mdp.pulse_size, k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(run, bounds))
    else:
        outputs = [run(span) for span in bounds]
    for (lo, hi), (vals, flags) in zip(bounds, outputs):
        scc[lo:hi] = vals
        bad[lo:hi] = flags

    frame = pd.DataFrame({
        "key": np.arange(n),
        "country": prefs.country,
        "gender": prefs.gender,
        "age": prefs.age,
        "rho": prefs.rho,
        "eta": prefs.eta,
        "scc": scc,
        "weight": prefs.weight,
    })
    frame["error"] = np.where(bad, "rate at or below -100%/yr", None)
    return frame


def weighted_mean_preferences(prefs: PreferenceSet) -> tuple[float, float]:
    """Weighted mean (rho, eta) of calibrated, clamped records."""
    if not prefs.calibrated:
        raise DomainError("preferences are not calibrated")
    return (wstats.weighted_mean(prefs.rho, prefs.weight),
            wstats.weighted_mean(prefs.eta, prefs.weight))


@dataclass(frozen=True)
class PremiumReport:
    mean_scc: float
    ref_scc: float
    premium: float
    ref_rho: float
    ref_eta: float


def weitzman_premium(results: pd.DataFrame, ref_rho: float, ref_eta: float,
                     mdp: MarginalDamagePath, g) -> PremiumReport:
    """Mean individual SCC minus the SCC at reference preferences.

    The reference is conventionally the weighted mean of the calibrated
    (post-clamp) preferences; the caller supplies it explicitly so variant
    conventions stay visible.  Respondents with errors are excluded from
    the mean with their weights.
    """
    ok = results["scc"].notna().to_numpy()
    if not ok.any():
        raise DomainError("no valid respondent valuations")
    mean_scc = wstats.weighted_mean(results["scc"].to_numpy()[ok],
                                    results["weight"].to_numpy()[ok])
    ref_scc = scc_for_preferences(mdp, ref_rho, ref_eta, g)
    return PremiumReport(mean_scc=mean_scc, ref_scc=ref_scc,
                         premium=mean_scc - ref_scc,
                         ref_rho=ref_rho, ref_eta=ref_eta)


def results_to_csv(results: pd.DataFrame, path) -> None:
    """Respondent-level output: key, country, gender, age, rho, eta, scc, weight."""
    cols = ["key", "country", "gender", "age", "rho", "eta", "scc", "weight"]
    results[cols].to_csv(path, index=False)
