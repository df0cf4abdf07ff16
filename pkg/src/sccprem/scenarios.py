"""Socio-economic scenario ingestion.

A scenario is an annual path of global population, per-capita income
(2010 USD), fossil carbon emissions (GtC/yr) and optional non-CO2 forcing
(W/m2).  Files may be stored on a coarser grid (e.g. decadal); loading
interpolates linearly onto the annual grid spanned by the file.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from .errors import ConfigError, DataError, DomainError, SchemaError

REQUIRED_COLUMNS = ("year", "population", "income_pc", "emissions")
OPTIONAL_COLUMNS = ("exo_forcing",)


@dataclass(frozen=True)
class Scenario:
    """Annual global scenario on a contiguous year grid."""

    id: str
    years: np.ndarray       # int years, step 1
    population: np.ndarray  # persons
    income_pc: np.ndarray   # 2010 USD per person per year
    emissions: np.ndarray   # GtC per year
    exo_forcing: np.ndarray = field(default=None)  # W/m2, defaults to zero

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        object.__setattr__(self, "years", years)
        for name in ("population", "income_pc", "emissions"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        exo = self.exo_forcing
        exo = np.zeros_like(self.population) if exo is None else np.asarray(exo, dtype=float)
        object.__setattr__(self, "exo_forcing", exo)
        self._validate()

    def _validate(self):
        n = len(self.years)
        if n < 2:
            raise DataError(f"scenario '{self.id}': needs at least two years")
        for name in ("population", "income_pc", "emissions", "exo_forcing"):
            arr = getattr(self, name)
            if len(arr) != n:
                raise DataError(f"scenario '{self.id}': column '{name}' has length "
                                f"{len(arr)}, expected {n}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"scenario '{self.id}': non-finite values in '{name}'")
        if np.any(np.diff(self.years) != 1):
            raise DataError(f"scenario '{self.id}': years must be strictly increasing "
                            "with step 1")
        if np.any(self.population <= 0):
            raise DomainError(f"scenario '{self.id}': population must be positive")
        if np.any(self.income_pc <= 0):
            raise DomainError(f"scenario '{self.id}': income_pc must be positive")
        if np.any(self.emissions < 0):
            raise DomainError(f"scenario '{self.id}': emissions must be nonnegative")

    def __len__(self) -> int:
        return len(self.years)

    def index_of(self, year: int) -> int:
        if not self.years[0] <= year <= self.years[-1]:
            raise DataError(f"scenario '{self.id}': year {year} outside "
                            f"[{self.years[0]}, {self.years[-1]}]")
        return int(year - self.years[0])

    def gross_output(self) -> np.ndarray:
        """Total output, USD/yr = population * income_pc."""
        return self.population * self.income_pc

    def to_csv(self, path) -> None:
        """Emit the annual grid; reloading the file round-trips bit-identically."""
        frame = pd.DataFrame({
            "year": self.years,
            "population": self.population,
            "income_pc": self.income_pc,
            "emissions": self.emissions,
            "exo_forcing": self.exo_forcing,
        })
        with open(path, "w", newline="") as handle:
            frame.to_csv(handle, index=False, float_format=None)


def growth_path(scenario: Scenario) -> np.ndarray:
    """Forward per-capita income growth rate per year.

    g(t) = income_pc(t+1)/income_pc(t) - 1 for interior years; the final
    entry repeats the last computed rate so the array matches the year grid.
    """
    y = scenario.income_pc
    g = np.empty(len(y))
    g[:-1] = y[1:] / y[:-1] - 1.0
    g[-1] = g[-2]
    return g


def _read_csv(path) -> pd.DataFrame:
    try:
        # default float parsing can be off by one ulp; exact parsing keeps
        # write/reload cycles bit-identical
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise DataError(f"scenario file not found: {path}")
    except Exception as exc:  # parse failures
        raise SchemaError(f"cannot parse scenario file {path}: {exc}")
    cols = list(frame.columns)
    missing = [c for c in REQUIRED_COLUMNS if c not in cols]
    if missing:
        raise SchemaError(f"{path}: missing required columns {missing}; "
                          f"expected header year,population,income_pc,emissions[,exo_forcing]")
    extra = [c for c in cols if c not in REQUIRED_COLUMNS + OPTIONAL_COLUMNS]
    if extra:
        raise SchemaError(f"{path}: unrecognized columns {extra}")
    if frame.empty:
        raise DataError(f"{path}: scenario file has no rows")
    return frame


def load_scenario(path, id: str, pulse_year: int | None = 2020,
                  horizon: int | None = 2300) -> Scenario:
    """Load a scenario CSV, interpolating to an annual grid when coarser.

    When pulse_year/horizon are given the file must start at or before the
    pulse year and reach at least the horizon; pass None to skip the check
    (toy inputs).
    """
    frame = _read_csv(path)
    years_in = frame["year"].to_numpy()
    if np.any(~np.isfinite(years_in)) or np.any(years_in != years_in.astype(int)):
        raise SchemaError(f"{path}: 'year' column must be integer-valued")
    years_in = years_in.astype(int)
    if np.any(np.diff(years_in) <= 0):
        raise DataError(f"{path}: years must be strictly increasing")
    if pulse_year is not None and years_in[0] > pulse_year:
        raise DataError(f"{path}: scenario starts at {years_in[0]}, "
                        f"after the pulse year {pulse_year}")
    if horizon is not None and years_in[-1] < horizon:
        raise DataError(f"{path}: scenario ends at {years_in[-1]}, "
                        f"before the horizon {horizon}")

    annual = np.arange(years_in[0], years_in[-1] + 1)
    columns = {}
    for name in ("population", "income_pc", "emissions", "exo_forcing"):
        if name == "exo_forcing" and name not in frame.columns:
            columns[name] = np.zeros(len(annual))
            continue
        vals = frame[name].to_numpy(dtype=float)
        if np.any(~np.isfinite(vals)):
            raise DomainError(f"{path}: non-finite values in '{name}'")
        if len(annual) == len(years_in):
            columns[name] = vals
        else:
            columns[name] = np.interp(annual, years_in, vals)
    return Scenario(id=id, years=annual, **columns)


class ScenarioRegistry:
    """Label -> file mapping from a YAML registry, loading lazily."""

    def __init__(self, mapping: dict[str, Path], pulse_year: int = 2020,
                 horizon: int = 2300):
        self._mapping = dict(mapping)
        self._pulse_year = pulse_year
        self._horizon = horizon
        self._cache: dict[str, Scenario] = {}

    @classmethod
    def from_file(cls, path, pulse_year: int = 2020, horizon: int = 2300) -> "ScenarioRegistry":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"scenario registry not found: {path}")
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse scenario registry {path}: {exc}")
        if not isinstance(raw, dict) or "scenarios" not in raw:
            raise ConfigError(f"{path}: registry must map 'scenarios' to label/file pairs")
        entries = raw["scenarios"]
        if not isinstance(entries, dict) or not entries:
            raise ConfigError(f"{path}: 'scenarios' must be a non-empty mapping")
        mapping = {}
        for label, rel in entries.items():
            target = (path.parent / rel).resolve()
            if not target.exists():
                raise ConfigError(f"{path}: scenario file for '{label}' missing: {target}")
            mapping[str(label)] = target
        return cls(mapping, pulse_year=pulse_year, horizon=horizon)

    @property
    def labels(self) -> list[str]:
        return sorted(self._mapping)

    def path_of(self, label: str) -> Path:
        if label not in self._mapping:
            raise ConfigError(f"unknown scenario '{label}'; known: {self.labels}")
        return self._mapping[label]

    def get(self, label: str) -> Scenario:
        if label not in self._mapping:
            raise ConfigError(f"unknown scenario '{label}'; known: {self.labels}")
        if label not in self._cache:
            self._cache[label] = load_scenario(self._mapping[label], label,
                                               pulse_year=self._pulse_year,
                                               horizon=self._horizon)
        return self._cache[label]
