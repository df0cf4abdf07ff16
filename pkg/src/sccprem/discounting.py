"""Discount schedules, certainty-equivalent rates, and gamma-family fits.

Conventions
-----------
Engine-side rates are fractions per year and compound discretely: the
factor for year t is D(t) = prod_{s<t} (1 + r(s))^-1 with D(0) = 1.
Survey-rate fitting instead works in percent per year, the unit the fitted
parameters are quoted in; every fit result carries an explicit unit tag
because mixing the two conventions silently changes answers by orders of
magnitude.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .errors import DataError, DegenerateFitError, DomainError

PERCENT_PER_YEAR = "percent_per_year"
FRACTION_PER_YEAR = "fraction_per_year"


@dataclass(frozen=True)
class DiscountSchedule:
    """Forward rates and discount factors on an annual grid.

    rates[t] applies between t and t+1; factors[t] discounts a flow at t
    back to 0.  factors[0] = 1 and factors[t+1] = factors[t]/(1+rates[t]).
    """

    rates: np.ndarray
    factors: np.ndarray

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        factors = np.asarray(self.factors, dtype=float)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "factors", factors)
        if len(rates) != len(factors) or len(rates) == 0:
            raise DomainError("schedule: rates and factors must be equal-length")
        if factors[0] != 1.0:
            raise DomainError("schedule: factors must start at 1")

    def __len__(self) -> int:
        return len(self.factors)

    def npv(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if len(values) != len(self.factors):
            raise DomainError("npv: value path length does not match schedule")
        return float(np.dot(self.factors, values))


def schedule_from_rates(rates) -> DiscountSchedule:
    """Build a schedule from forward rates (fraction/yr)."""
    rates = np.asarray(rates, dtype=float)
    if np.any(rates <= -1.0):
        raise DomainError("forward rate at or below -100%/yr")
    factors = np.empty(len(rates))
    factors[0] = 1.0
    np.cumprod(1.0 / (1.0 + rates[:-1]), out=factors[1:])
    return DiscountSchedule(rates=rates, factors=factors)


def constant_rate_schedule(rate: float, horizon: int) -> DiscountSchedule:
    """Constant-rate schedule with horizon+1 annual entries."""
    return schedule_from_rates(np.full(horizon + 1, float(rate)))


def ramsey_schedule(rho: float, eta: float, g, n=None) -> DiscountSchedule:
    """Ramsey discounting r(t) = rho + eta * g(t), compounded annually.

    g is the per-capita income growth path (fraction/yr).  The optional
    population growth path n is accepted for signature compatibility but is
    NOT added to the rate: schedules here discount aggregate damages whose
    population growth is already embodied in the damage path.  The appendix
    command adds population growth to its constant-rate comparison itself.
    """
    g = np.asarray(g, dtype=float)
    rates = rho + eta * g
    if np.any(rates <= -1.0):
        worst = float(rates.min())
        raise DomainError(f"Ramsey rate reaches {worst:.4f} <= -1; "
                          "discrete compounding undefined")
    return schedule_from_rates(rates)


@dataclass(frozen=True)
class CertaintyEquivalentCurve:
    """Mixture discount factors and their annualized rates.

    factors[t] is the weighted average of member discount factors; rates[t]
    solves factors[t] = (1+rates[t])^-t for t >= 1, while rates[0] is the
    weighted average initial forward rate (the t=0 annualization limit).
    """

    factors: np.ndarray
    rates: np.ndarray


def certainty_equivalent_rate(schedules, weights) -> CertaintyEquivalentCurve:
    """Certainty-equivalent declining discount rate of a preference mixture.

    The average of factors, not rates: factors*(t) = sum_i w_i D_i(t).  The
    annualized curve starts at the weighted mean rate and declines toward
    the smallest member rate as the patient members dominate the mixture.
    """
    if len(schedules) == 0:
        raise DomainError("need at least one schedule")
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(schedules):
        raise DomainError("one weight per schedule required")
    if np.any(weights < 0) or weights.sum() <= 0:
        raise DomainError("weights must be nonnegative with positive total")
    w = weights / weights.sum()
    horizon = len(schedules[0])
    for s in schedules:
        if len(s) != horizon:
            raise DomainError("member schedules must share one horizon")
    factors = np.zeros(horizon)
    for wi, s in zip(w, schedules):
        factors += wi * s.factors
    t = np.arange(horizon)
    rates = np.empty(horizon)
    rates[0] = float(np.dot(w, [s.rates[0] for s in schedules]))
    with np.errstate(divide="ignore"):
        rates[1:] = factors[1:] ** (-1.0 / t[1:]) - 1.0
    return CertaintyEquivalentCurve(factors=factors, rates=rates)


def gamma_ce_rate(alpha: float, beta: float, t) -> np.ndarray:
    """Forward certainty-equivalent rate of gamma-distributed constant rates.

    For rates r ~ Gamma(shape alpha, rate beta) the exact mixture factor is
    (beta/(beta+t))^alpha and its forward rate is alpha/(beta+t).  Units of
    beta and t must agree with the rate units of the fit.
    """
    _check_gamma(alpha, beta)
    t = np.asarray(t, dtype=float)
    return alpha / (beta + t)


def gamma_mixture_factor(alpha: float, beta: float, t) -> np.ndarray:
    """Exact mixture discount factor E[e^-rt] for gamma-distributed rates."""
    _check_gamma(alpha, beta)
    t = np.asarray(t, dtype=float)
    return (beta / (beta + t)) ** alpha


def _check_gamma(alpha, beta):
    if alpha <= 0 or beta <= 0:
        raise DomainError("gamma parameters must be positive")


@dataclass(frozen=True)
class ZeroInflatedGammaFit:
    """Zero-inflated gamma description of a rate distribution.

    alpha/beta are the gamma shape and rate of the positive part, delta the
    weighted share of exact zeros; mu and sigma2 are the weighted sample
    moments of all rates, kept for the alternative moment-form printing.
    All rate-like fields share the recorded units.
    """

    alpha: float
    beta: float
    delta: float
    mu: float
    sigma2: float
    mise: float
    bin_width: float
    n_obs: int
    units: str = PERCENT_PER_YEAR

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise DomainError("fitted gamma parameters must be positive")
        if not 0.0 <= self.delta < 1.0:
            raise DomainError("zero share must lie in [0, 1)")

    def rate(self, t) -> np.ndarray:
        return zig_rate(self.alpha, self.beta, self.delta, t)


def zig_rate(alpha: float, beta: float, delta: float, t) -> np.ndarray:
    """Declining rate of the zero-inflated gamma, (1-delta)*alpha/(beta+t).

    This is the fitted-parameter form; see zig_rate_moment_form for the
    alternative printing in terms of mu and sigma2.
    """
    if not 0.0 <= delta < 1.0:
        raise DomainError("zero share must lie in [0, 1)")
    return (1.0 - delta) * gamma_ce_rate(alpha, beta, t)


def zig_rate_moment_form(mu: float, sigma2: float, delta: float, t) -> np.ndarray:
    """Moment-form printing (1-delta)*mu/(1 + t*sigma2/mu).

    Equivalent to the fitted-parameter form only when mu = alpha/beta and
    sigma2 = alpha/beta^2 exactly; with sample moments of an overdispersed
    rate distribution the two curves differ.  Provided for comparison, the
    fitted-parameter form is canonical.
    """
    if mu <= 0 or sigma2 <= 0:
        raise DomainError("moments must be positive")
    if not 0.0 <= delta < 1.0:
        raise DomainError("zero share must lie in [0, 1)")
    t = np.asarray(t, dtype=float)
    return (1.0 - delta) * mu / (1.0 + t * sigma2 / mu)


def fit_zig(rates, weights=None, bin_width: float = 0.25,
            min_obs: int = 100, units: str = PERCENT_PER_YEAR) -> ZeroInflatedGammaFit:
    """Fit a zero-inflated gamma to a weighted sample of nonnegative rates.

    delta is the weighted share of exact zeros.  The gamma (alpha, beta) of
    the positive part minimizes the mean integrated squared error against a
    weighted histogram of the positive rates with the given bin width,
    starting from the weighted method-of-moments point.  Rates are expected
    in percent per year under the default unit tag.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.ndim != 1:
        raise DataError("rates must be a 1-d array")
    if len(rates) < min_obs:
        raise DataError(f"need at least {min_obs} observations, got {len(rates)}")
    if np.any(~np.isfinite(rates)) or np.any(rates < 0):
        raise DomainError("rates must be finite and nonnegative")
    if weights is None:
        weights = np.ones(len(rates))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != rates.shape or np.any(weights < 0) or weights.sum() <= 0:
        raise DomainError("weights must be nonnegative with positive total")
    if bin_width <= 0:
        raise DomainError("bin_width must be positive")

    total = weights.sum()
    zero_mask = rates == 0.0
    delta = float(weights[zero_mask].sum() / total)
    mu = float(np.dot(weights, rates) / total)
    sigma2 = float(np.dot(weights, (rates - mu) ** 2) / total)

    pos = rates[~zero_mask]
    wpos = weights[~zero_mask]
    if len(pos) == 0:
        raise DegenerateFitError("all rates are zero; no positive part to fit")

    edges = np.arange(0.0, pos.max() + bin_width, bin_width)
    if len(edges) < 3:
        edges = np.array([0.0, bin_width, 2 * bin_width])
    counts, edges = np.histogram(pos, bins=edges, weights=wpos)
    density = counts / (wpos.sum() * bin_width)
    mids = 0.5 * (edges[:-1] + edges[1:])

    def mise(params):
        a, b = np.exp(params)
        f = stats.gamma.pdf(mids, a, scale=1.0 / b)
        return float(np.sum((f - density) ** 2) * bin_width)

    m = float(np.dot(wpos, pos) / wpos.sum())
    v = float(np.dot(wpos, (pos - m) ** 2) / wpos.sum())
    if v <= 0:
        raise DegenerateFitError("positive rates are a single point mass")
    start = np.log([m * m / v, m / v])
    result = optimize.minimize(mise, start, method="Nelder-Mead",
                               options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 4000})
    alpha, beta = np.exp(result.x)
    return ZeroInflatedGammaFit(alpha=float(alpha), beta=float(beta), delta=delta,
                                mu=mu, sigma2=sigma2, mise=float(result.fun),
                                bin_width=bin_width, n_obs=len(rates), units=units)


def binning_sensitivity(rates, weights=None, bin_width: float = 0.25,
                        factors=(0.5, 1.0, 2.0)) -> dict:
    """Refit the zero-inflated gamma across bin widths; returns width -> fit."""
    return {round(bin_width * f, 10): fit_zig(rates, weights, bin_width=bin_width * f)
            for f in factors}
