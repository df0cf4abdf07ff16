"""Social cost of carbon under heterogeneous time and risk preferences.

The package values a marginal tonne of carbon separately for every survey
respondent using their own Ramsey discount rate, then aggregates the
individual values under several voting schemes and characterizes the gap
between the mean individual value and the value at mean preferences.
"""
from .aggregation import (AggregateReport, CountryWeights, DistributionStats,
                          aggregate, correlate_policy, distribution_stats,
                          make_country_table, slice_by)
from .config import EngineConfig, Workspace, load_config
from .discounting import (CertaintyEquivalentCurve, DiscountSchedule,
                          ZeroInflatedGammaFit, binning_sensitivity,
                          certainty_equivalent_rate, constant_rate_schedule,
                          fit_zig, gamma_ce_rate, gamma_mixture_factor,
                          ramsey_schedule, schedule_from_rates, zig_rate,
                          zig_rate_moment_form)
from .engine import (PremiumReport, batch_scc, scc_for_preferences,
                     weighted_mean_preferences, weitzman_premium)
from .errors import (AlignmentError, ConfigError, DataError,
                     DegenerateFitError, DomainError, NumericError, SccError,
                     SchemaError)
from .iam import (CarbonCycleParams, ClimateParams, DamageSpec,
                  MarginalDamageCache, MarginalDamagePath, concentration_path,
                  damage_fraction, forcing_path, marginal_damage_path,
                  temperature_path)
from .preferences import (CalibrationMap, ClampReport, ExpertAnchors,
                          PreferenceSet, apply_calibration,
                          country_mean_indices, fit_calibration,
                          load_preferences, summarize_preferences)
from .scenarios import Scenario, ScenarioRegistry, growth_path, load_scenario
from .sensitivity import RunCell, compute_cell, matrix_frame, run_matrix

__version__ = "0.1.0"

__all__ = [
    "AggregateReport", "AlignmentError", "CalibrationMap", "CarbonCycleParams",
    "CertaintyEquivalentCurve", "ClampReport", "ClimateParams", "ConfigError",
    "CountryWeights", "DamageSpec", "DataError", "DegenerateFitError",
    "DiscountSchedule", "DistributionStats", "DomainError", "EngineConfig",
    "ExpertAnchors", "MarginalDamageCache", "MarginalDamagePath",
    "NumericError", "PreferenceSet", "PremiumReport", "RunCell", "SccError",
    "Scenario", "ScenarioRegistry", "SchemaError", "Workspace",
    "ZeroInflatedGammaFit", "aggregate", "apply_calibration", "batch_scc",
    "binning_sensitivity", "certainty_equivalent_rate", "concentration_path",
    "constant_rate_schedule",
    "compute_cell", "correlate_policy", "country_mean_indices",
    "damage_fraction", "distribution_stats", "fit_calibration", "fit_zig",
    "forcing_path", "gamma_ce_rate", "gamma_mixture_factor", "growth_path",
    "load_config", "load_preferences", "load_scenario", "make_country_table",
    "marginal_damage_path", "matrix_frame", "ramsey_schedule", "run_matrix",
    "scc_for_preferences", "schedule_from_rates", "slice_by",
    "summarize_preferences", "temperature_path", "weighted_mean_preferences",
    "weitzman_premium", "zig_rate", "zig_rate_moment_form",
]
