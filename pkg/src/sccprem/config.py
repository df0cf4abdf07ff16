"""Run configuration and the workspace that loads what it references.

Configuration lives in one YAML file with sections for input paths, the
base run axes, sweep axes, and numeric options.  Values the user omits
fall back to the packaged defaults.  Paths prefixed 'pkg:' resolve inside
the installed package's data directory; 'demo' as the preferences path
generates the bundled deterministic demo extract on first use.
"""
from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from importlib.resources import files as package_files
from pathlib import Path

import numpy as np
import yaml

from . import demo_data, iam, preferences, scenarios
from .aggregation import CountryWeights
from .errors import ConfigError

DEMO_SENTINEL = "demo"
_VARIANTS = ("base", "population_weighted", "geo_restricted")


def data_path(rel: str) -> Path:
    return Path(str(package_files("sccprem").joinpath("data"))) / rel


def _resolve(value: str, base_dir: Path) -> Path:
    if value.startswith("pkg:"):
        return data_path(value[4:])
    path = Path(value)
    return path if path.is_absolute() else (base_dir / path).resolve()


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass(frozen=True)
class EngineConfig:
    """Validated run settings with resolved input paths."""

    preferences_path: object      # Path or the demo sentinel string
    scenario_registry: Path
    country_weights: Path
    damage_functions: Path
    expert_anchors: Path
    climate: Path
    output_dir: Path

    base_scenario: str = "ssp2"
    base_damage_kind: str = "dice2023"
    base_elasticity: float = -0.36
    base_variant: str = "base"

    axis_scenarios: tuple = ()
    axis_damage_kinds: tuple = ()
    axis_elasticities: tuple = ()
    axis_variants: tuple = ()

    pulse_year: int = 2020
    horizon: int = 2300
    pulse_gtc: float = 1.0
    zig_bin_width: float = 0.25
    scc_hist_bin_width: float = 2.0
    min_group_size: int = 30
    percentile_span: tuple = (5.0, 95.0)
    workers: int = 1
    chunk_size: int = 4096
    welfare_population_scaling: bool = False
    demo_seed: int = 20260814
    geo_region: tuple = ()

    source_digest: str = ""

    def __post_init__(self):
        if not 2100 <= self.horizon <= 3000:
            raise ConfigError(f"horizon {self.horizon} outside [2100, 3000]")
        if not self.pulse_year < self.horizon:
            raise ConfigError("pulse_year must precede the horizon")
        if not 0 < self.pulse_gtc <= 10:
            raise ConfigError(f"pulse_gtc {self.pulse_gtc} outside (0, 10] GtC")
        if not 0 < self.zig_bin_width <= 10:
            raise ConfigError("zig_bin_width outside (0, 10] %/yr")
        if not 0 < self.scc_hist_bin_width <= 100:
            raise ConfigError("scc_hist_bin_width outside (0, 100] USD/tC")
        if self.min_group_size < 2:
            raise ConfigError("min_group_size must be at least 2")
        span = tuple(float(x) for x in self.percentile_span)
        if not (0 <= span[0] < span[1] <= 100):
            raise ConfigError(f"percentile_span {span} must be ordered within [0, 100]")
        object.__setattr__(self, "percentile_span", span)
        if not 1 <= self.workers <= 64:
            raise ConfigError("workers outside [1, 64]")
        if self.chunk_size < 64:
            raise ConfigError("chunk_size must be at least 64")
        if self.base_variant not in _VARIANTS:
            raise ConfigError(f"unknown calibration variant '{self.base_variant}'")
        for v in self.axis_variants:
            if v not in _VARIANTS:
                raise ConfigError(f"unknown calibration variant '{v}' in axes")
        for e in tuple(self.axis_elasticities) + (self.base_elasticity,):
            if not -2.0 <= float(e) <= 1.0:
                raise ConfigError(f"income elasticity {e} outside [-2, 1]")
        for name in ("scenario_registry", "country_weights", "damage_functions",
                     "expert_anchors", "climate"):
            path = getattr(self, name)
            if not Path(path).exists():
                raise ConfigError(f"{name} file does not exist: {path}")
        if self.preferences_path != DEMO_SENTINEL and not Path(self.preferences_path).exists():
            raise ConfigError(f"preferences file does not exist: {self.preferences_path}")


def _merge(defaults: dict, override: dict) -> dict:
    out = dict(defaults)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path=None, output_dir=None, workers=None) -> EngineConfig:
    """Read a YAML config, filling gaps from the packaged defaults."""
    default_path = data_path("default_config.yaml")
    raw = yaml.safe_load(default_path.read_text())
    base_dir = Path.cwd()
    digest_src = default_path
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            user = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}")
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: config must be a mapping")
        raw = _merge(raw, user)
        base_dir = path.parent.resolve()
        digest_src = path

    paths = raw.get("paths", {})
    numeric = raw.get("numeric", {})
    base = raw.get("base", {})
    axes = raw.get("axes", {})

    prefs = paths.get("preferences", DEMO_SENTINEL)
    prefs = prefs if prefs == DEMO_SENTINEL else _resolve(str(prefs), base_dir)
    out_dir = Path(output_dir) if output_dir else Path(raw.get("output_dir", "runs"))
    if not out_dir.is_absolute():
        out_dir = (base_dir / out_dir).resolve()

    try:
        return EngineConfig(
            preferences_path=prefs,
            scenario_registry=_resolve(str(paths["scenario_registry"]), base_dir),
            country_weights=_resolve(str(paths["country_weights"]), base_dir),
            damage_functions=_resolve(str(paths["damage_functions"]), base_dir),
            expert_anchors=_resolve(str(paths["expert_anchors"]), base_dir),
            climate=_resolve(str(paths["climate"]), base_dir),
            output_dir=out_dir,
            base_scenario=str(base.get("scenario", "ssp2")),
            base_damage_kind=str(base.get("damage_kind", "dice2023")),
            base_elasticity=float(base.get("income_elasticity", -0.36)),
            base_variant=str(base.get("calibration_variant", "base")),
            axis_scenarios=tuple(axes.get("scenarios", ())),
            axis_damage_kinds=tuple(axes.get("damage_kinds", ())),
            axis_elasticities=tuple(float(e) for e in axes.get("elasticities", ())),
            axis_variants=tuple(axes.get("variants", ())),
            pulse_year=int(numeric.get("pulse_year", 2020)),
            horizon=int(numeric.get("horizon", 2300)),
            pulse_gtc=float(numeric.get("pulse_gtc", 1.0)),
            zig_bin_width=float(numeric.get("zig_bin_width", 0.25)),
            scc_hist_bin_width=float(numeric.get("scc_hist_bin_width", 2.0)),
            min_group_size=int(numeric.get("min_group_size", 30)),
            percentile_span=tuple(numeric.get("percentile_span", (5.0, 95.0))),
            workers=int(workers if workers is not None else numeric.get("workers", 1)),
            chunk_size=int(numeric.get("chunk_size", 4096)),
            welfare_population_scaling=bool(numeric.get("welfare_population_scaling", False)),
            demo_seed=int(numeric.get("demo_seed", 20260814)),
            geo_region=tuple(raw.get("region", {}).get("geo_restricted", ())),
            source_digest=sha256_file(digest_src),
        )
    except KeyError as exc:
        raise ConfigError(f"config missing required path entry: {exc}")


def load_climate_params(path) -> tuple[iam.CarbonCycleParams, iam.ClimateParams]:
    raw = yaml.safe_load(Path(path).read_text())
    try:
        cc = raw["carbon_cycle"]
        cl = raw["climate"]
        carbon = iam.CarbonCycleParams(
            shares=tuple(cc["shares"]),
            timescales=tuple(float(t) for t in cc["timescales"]),
            preindustrial_ppm=float(cc["preindustrial_ppm"]),
            ppm_per_gtc=float(cc["ppm_per_gtc"]),
            initial_anomaly_ppm=float(cc.get("initial_anomaly_ppm", 0.0)))
        climate = iam.ClimateParams(
            sensitivity=float(cl["sensitivity"]),
            response_time=float(cl["response_time"]),
            forcing_2x=float(cl["forcing_2x"]),
            initial_temp=float(cl.get("initial_temp", 0.0)))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: malformed climate parameter file ({exc})")
    return carbon, climate


def load_damage_kinds(path) -> dict:
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict) or "kinds" not in raw:
        raise ConfigError(f"{path}: damage function file must map 'kinds'")
    kinds = {}
    for label, spec in raw["kinds"].items():
        try:
            kinds[str(label)] = {"kind": str(spec["form"]),
                                 "coefficients": tuple(float(c) for c in spec["coefficients"])}
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: malformed damage kind '{label}' ({exc})")
    if not kinds:
        raise ConfigError(f"{path}: no damage kinds defined")
    return kinds


def load_expert_anchors(path) -> preferences.ExpertAnchors:
    raw = yaml.safe_load(Path(path).read_text())
    try:
        return preferences.ExpertAnchors(
            rho_q5=float(raw["rho"]["q5"]), rho_q95=float(raw["rho"]["q95"]),
            eta_q5=float(raw["eta"]["q5"]), eta_q95=float(raw["eta"]["q95"]),
            provenance=str(raw.get("provenance", "")))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: malformed expert anchor file ({exc})")


class Workspace:
    """Loaded inputs plus caches for one configuration."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.carbon, self.climate = load_climate_params(config.climate)
        self.damage_kinds = load_damage_kinds(config.damage_functions)
        self.anchors = load_expert_anchors(config.expert_anchors)
        self.country_weights = CountryWeights.from_csv(config.country_weights)
        self.registry = scenarios.ScenarioRegistry.from_file(
            config.scenario_registry, pulse_year=config.pulse_year,
            horizon=config.horizon)
        self.mdp_cache = iam.MarginalDamageCache(self.carbon, self.climate)
        self._prefs = None
        self._load_report = None
        self._calibrated: dict = {}
        self._lock = threading.Lock()

    def damage_spec(self, kind_label: str, elasticity: float) -> iam.DamageSpec:
        if kind_label not in self.damage_kinds:
            raise ConfigError(f"unknown damage kind '{kind_label}'; known: "
                              f"{sorted(self.damage_kinds)}")
        entry = self.damage_kinds[kind_label]
        return iam.DamageSpec(kind=entry["kind"], coefficients=entry["coefficients"],
                              income_elasticity=float(elasticity), label=kind_label)

    def scenario(self, label: str) -> scenarios.Scenario:
        return self.registry.get(label)

    def growth(self, scenario_label: str) -> np.ndarray:
        return scenarios.growth_path(self.scenario(scenario_label))

    def preferences_file(self) -> Path:
        if self.config.preferences_path != DEMO_SENTINEL:
            return Path(self.config.preferences_path)
        target = self.config.output_dir / "demo_inputs" / "preferences.csv"
        if not target.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
            demo_data.write_demo_extract(target, self.country_weights,
                                         seed=self.config.demo_seed)
        return target

    def load_preferences(self):
        if self._prefs is None:
            self._prefs, self._load_report = preferences.load_preferences(
                self.preferences_file())
        return self._prefs, self._load_report

    def calibrated(self, variant: str):
        """(calibrated set, map, clamp report) for a variant, cached."""
        with self._lock:
            if variant not in self._calibrated:
                prefs, _ = self.load_preferences()
                kwargs = {}
                if variant == "population_weighted":
                    kwargs["country_populations"] = self.country_weights.populations()
                elif variant == "geo_restricted":
                    kwargs["region"] = list(self.config.geo_region)
                cal = preferences.fit_calibration(
                    prefs, self.anchors, variant=variant,
                    percentile_span=self.config.percentile_span, **kwargs)
                calibrated, clamp = preferences.apply_calibration(cal, prefs)
                self._calibrated[variant] = (calibrated, cal, clamp)
            return self._calibrated[variant]

    def mdp(self, scenario_label: str, kind_label: str, elasticity: float,
            use_cache: bool = True) -> iam.MarginalDamagePath:
        return self.mdp_cache.get(self.scenario(scenario_label),
                                  self.damage_spec(kind_label, elasticity),
                                  pulse_gtc=self.config.pulse_gtc,
                                  pulse_year=self.config.pulse_year,
                                  enabled=use_cache)

    def input_digests(self) -> dict:
        out = {"config": self.config.source_digest}
        for name in ("scenario_registry", "country_weights", "damage_functions",
                     "expert_anchors", "climate"):
            out[name] = sha256_file(getattr(self.config, name))
        prefs = self.preferences_file()
        out["preferences"] = sha256_file(prefs)
        for label in self.registry.labels:
            out[f"scenario:{label}"] = sha256_file(self.registry.path_of(label))
        return out
