"""Reduced-form integrated assessment chain.

Emissions map to concentrations through an impulse-response box model,
concentrations to temperature through logarithmic forcing and a first-order
lag, and temperature to output loss through configurable damage functions.
The marginal damage path of an emission pulse is the difference between a
pulsed and a baseline run, valued at gross output.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DomainError
from .scenarios import Scenario

LOG2 = np.log(2.0)


@dataclass(frozen=True)
class CarbonCycleParams:
    """Impulse-response carbon cycle.

    Each box j receives share a_j of every emitted tonne and decays with
    timescale tau_j (years); tau = inf marks the permanently airborne box.
    The initial concentration anomaly above preindustrial is allocated to
    the boxes in proportion to their shares.
    """

    shares: tuple            # box shares a_j, sum to 1
    timescales: tuple        # decay timescales tau_j, years (inf allowed)
    preindustrial_ppm: float = 280.0
    ppm_per_gtc: float = 0.4695   # 1 / 2.13 GtC per ppm
    initial_anomaly_ppm: float = 0.0

    def __post_init__(self):
        shares = np.asarray(self.shares, dtype=float)
        taus = np.asarray(self.timescales, dtype=float)
        object.__setattr__(self, "shares", tuple(shares))
        object.__setattr__(self, "timescales", tuple(taus))
        if shares.ndim != 1 or shares.shape != taus.shape or len(shares) == 0:
            raise ConfigError("carbon cycle: shares and timescales must be equal-length")
        if abs(shares.sum() - 1.0) > 1e-9:
            raise ConfigError(f"carbon cycle: shares sum to {shares.sum():.12f}, not 1")
        if np.any(shares < 0):
            raise ConfigError("carbon cycle: shares must be nonnegative")
        if np.any(~(taus > 0)):
            raise ConfigError("carbon cycle: timescales must be positive (inf allowed)")
        if self.preindustrial_ppm <= 0 or self.ppm_per_gtc <= 0:
            raise ConfigError("carbon cycle: preindustrial_ppm and ppm_per_gtc must be positive")
        if self.initial_anomaly_ppm < 0:
            raise ConfigError("carbon cycle: initial_anomaly_ppm must be nonnegative")


@dataclass(frozen=True)
class ClimateParams:
    """First-order temperature response to radiative forcing."""

    sensitivity: float        # equilibrium warming per CO2 doubling, degC
    response_time: float      # e-folding time of the lag, years
    forcing_2x: float = 3.93  # forcing per CO2 doubling, W/m2
    initial_temp: float = 0.0  # anomaly in the first scenario year, degC

    def __post_init__(self):
        if self.sensitivity <= 0:
            raise ConfigError("climate: sensitivity must be positive")
        if self.response_time <= 0:
            raise ConfigError("climate: response_time must be positive")
        if self.forcing_2x <= 0:
            raise ConfigError("climate: forcing_2x must be positive")


@dataclass(frozen=True)
class DamageSpec:
    """Output loss as a function of warming, with an income elasticity.

    kind 'polynomial': D(T) = sum_k coefficients[k] * T^k, coefficients[0]
    must be 0 so that D(0) = 0.
    kind 'bilinear': coefficients = (slope_low, breakpoint, slope_high);
    D(T) = slope_low*T up to the breakpoint and continues with slope_high
    beyond it.  A negative low slope yields benefits at mild warming.

    Realized damage fraction at time t multiplies D(T) by
    (income_pc(t)/income_pc(base))^income_elasticity.
    """

    kind: str
    coefficients: tuple
    income_elasticity: float = 0.0
    label: str = ""

    def __post_init__(self):
        coeffs = tuple(float(c) for c in np.atleast_1d(self.coefficients))
        object.__setattr__(self, "coefficients", coeffs)
        if self.kind == "polynomial":
            if len(coeffs) < 2:
                raise ConfigError("polynomial damage: need at least linear order")
            if coeffs[0] != 0.0:
                raise ConfigError("polynomial damage: constant term must be 0 so D(0)=0")
        elif self.kind == "bilinear":
            if len(coeffs) != 3:
                raise ConfigError("bilinear damage: coefficients are "
                                  "(slope_low, breakpoint, slope_high)")
            if coeffs[1] <= 0:
                raise ConfigError("bilinear damage: breakpoint must be positive")
        else:
            raise ConfigError(f"unknown damage kind '{self.kind}'")

    def base_damage(self, temperature) -> np.ndarray:
        """D(T), fraction of gross output, before income scaling."""
        t = np.asarray(temperature, dtype=float)
        if self.kind == "polynomial":
            out = np.zeros_like(t)
            for k in range(len(self.coefficients) - 1, 0, -1):
                out = (out + self.coefficients[k]) * t
            return out
        lo, brk, hi = self.coefficients
        return np.where(t <= brk, lo * t, lo * brk + hi * (t - brk))

    @property
    def nonnegative(self) -> bool:
        """True when D(T) >= 0 for all T >= 0."""
        if self.kind == "polynomial":
            return all(c >= 0 for c in self.coefficients)
        return self.coefficients[0] >= 0 and self.coefficients[2] >= 0


@dataclass(frozen=True)
class MarginalDamagePath:
    """Extra aggregate damage per year caused by an emission pulse."""

    years: np.ndarray         # annual grid shared with the source scenario
    delta_damage: np.ndarray  # USD per year, total for the whole pulse
    pulse_size: float         # tC
    pulse_year: int

    def __post_init__(self):
        object.__setattr__(self, "years", np.asarray(self.years, dtype=int))
        object.__setattr__(self, "delta_damage", np.asarray(self.delta_damage, dtype=float))
        if len(self.years) != len(self.delta_damage):
            raise DataError("marginal damage path: years/values length mismatch")
        if self.pulse_size <= 0:
            raise DomainError("pulse size must be positive")


def concentration_path(params: CarbonCycleParams, scenario: Scenario,
                       extra_emissions: np.ndarray | None = None) -> np.ndarray:
    """CO2 concentration (ppm) on the scenario's annual grid.

    C(t) = preindustrial + ppm_per_gtc * sum_j a_j * sum_{s<=t} E(s) e^{-(t-s)/tau_j}
    plus the decaying initial anomaly.  Emissions are booked in full in
    their own year, so a 1 GtC pulse at t has airborne fraction 1 at t.
    """
    emissions = scenario.emissions
    if extra_emissions is not None:
        emissions = emissions + extra_emissions
    shares = np.asarray(params.shares)
    decay = np.exp(-1.0 / np.asarray(params.timescales))
    n = len(emissions)
    boxes = shares * (params.initial_anomaly_ppm / params.ppm_per_gtc)
    airborne = np.empty(n)
    for t in range(n):
        if t:
            boxes = boxes * decay
        boxes = boxes + shares * emissions[t]
        airborne[t] = boxes.sum()
    return params.preindustrial_ppm + params.ppm_per_gtc * airborne


def forcing_path(climate: ClimateParams, carbon: CarbonCycleParams,
                 concentration: np.ndarray,
                 exo_forcing: np.ndarray | None = None) -> np.ndarray:
    conc = np.asarray(concentration, dtype=float)
    if np.any(conc <= 0):
        raise DomainError("concentration must be positive for logarithmic forcing")
    forcing = climate.forcing_2x * np.log(conc / carbon.preindustrial_ppm) / LOG2
    if exo_forcing is not None:
        forcing = forcing + np.asarray(exo_forcing, dtype=float)
    return forcing


def temperature_path(climate: ClimateParams, carbon: CarbonCycleParams,
                     concentration: np.ndarray,
                     exo_forcing: np.ndarray | None = None) -> np.ndarray:
    """Temperature anomaly (degC) from a concentration path.

    Forcing is logarithmic in concentration, F = forcing_2x * log2(C/C_pre)
    plus any exogenous term; temperature relaxes toward the equilibrium
    sensitivity * F / forcing_2x with the configured response time:
    T(t+1) = T(t) + (sensitivity*F(t)/forcing_2x - T(t)) / response_time.
    """
    forcing = forcing_path(climate, carbon, concentration, exo_forcing)
    n = len(forcing)
    temp = np.empty(n)
    temp[0] = climate.initial_temp
    k = 1.0 / climate.response_time
    gain = climate.sensitivity / climate.forcing_2x
    for t in range(n - 1):
        temp[t + 1] = temp[t] + (gain * forcing[t] - temp[t]) * k
    return temp


def damage_fraction(spec: DamageSpec, temperature, income_ratio) -> np.ndarray:
    """Realized damage fraction D(T) * income_ratio^elasticity."""
    ratio = np.asarray(income_ratio, dtype=float)
    if np.any(ratio <= 0):
        raise DomainError("income ratio must be positive")
    return spec.base_damage(temperature) * ratio**spec.income_elasticity


def marginal_damage_path(carbon: CarbonCycleParams, climate: ClimateParams,
                         damage: DamageSpec, scenario: Scenario,
                         pulse_gtc: float = 1.0, pulse_year: int = 2020) -> MarginalDamagePath:
    """Difference in aggregate damages between a pulsed and a baseline run.

    The pulse adds pulse_gtc to emissions in pulse_year.  Damage fractions
    apply to gross output (population * income_pc); the income-elasticity
    base year is the pulse year.  delta_damage is in USD/yr for the whole
    pulse; pulse_size is recorded in tC so that NPVs normalize per tonne.
    """
    if pulse_gtc <= 0:
        raise DomainError("pulse_gtc must be positive")
    k = scenario.index_of(pulse_year)
    extra = np.zeros(len(scenario))
    extra[k] = pulse_gtc

    income_ratio = scenario.income_pc / scenario.income_pc[k]
    output = scenario.gross_output()

    conc_base = concentration_path(carbon, scenario)
    conc_pulse = concentration_path(carbon, scenario, extra_emissions=extra)
    temp_base = temperature_path(climate, carbon, conc_base, scenario.exo_forcing)
    temp_pulse = temperature_path(climate, carbon, conc_pulse, scenario.exo_forcing)

    frac_base = damage_fraction(damage, temp_base, income_ratio)
    frac_pulse = damage_fraction(damage, temp_pulse, income_ratio)
    delta = (frac_pulse - frac_base) * output

    return MarginalDamagePath(years=scenario.years, delta_damage=delta,
                              pulse_size=pulse_gtc * 1e9, pulse_year=pulse_year)


class MarginalDamageCache:
    """Single-writer, multi-reader cache of marginal damage paths.

    Keys combine scenario id, damage kind label, income elasticity, and the
    pulse settings; entries are immutable once stored.
    """

    def __init__(self, carbon: CarbonCycleParams, climate: ClimateParams):
        self.carbon = carbon
        self.climate = climate
        self._store: dict = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(scenario: Scenario, damage: DamageSpec, pulse_gtc: float, pulse_year: int):
        return (scenario.id, damage.label or damage.kind, damage.coefficients,
                round(damage.income_elasticity, 12), pulse_gtc, pulse_year)

    def get(self, scenario: Scenario, damage: DamageSpec,
            pulse_gtc: float = 1.0, pulse_year: int = 2020,
            enabled: bool = True) -> MarginalDamagePath:
        if not enabled:
            return marginal_damage_path(self.carbon, self.climate, damage,
                                        scenario, pulse_gtc, pulse_year)
        key = self.key(scenario, damage, pulse_gtc, pulse_year)
        found = self._store.get(key)
        if found is not None:
            self.hits += 1
            return found
        with self._lock:
            found = self._store.get(key)
            if found is None:
                found = marginal_damage_path(self.carbon, self.climate, damage,
                                             scenario, pulse_gtc, pulse_year)
                self._store[key] = found
                self.misses += 1
            else:
                self.hits += 1
        return found
