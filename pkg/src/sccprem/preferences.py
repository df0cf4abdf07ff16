"""Survey preference records and their calibration to expert anchors.

Respondent-level composite indices (time_index for impatience, risk_index
for risk aversion) are mapped linearly onto pure time preference rho and
marginal-utility elasticity eta so that the 5th and 95th percentiles of the
country-average indices land on expert-survey anchor values.  Negative
mapped values are clamped to zero, the economically admissible floor.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from . import wstats
from .errors import DataError, DegenerateFitError, DomainError, SchemaError

TIME_INDEX_RANGE = (-1.3, 2.8)
RISK_INDEX_RANGE = (-1.9, 2.5)
GENDERS = ("male", "female", "unknown")

REQUIRED_COLUMNS = ("country", "time_index", "risk_index")
DEFAULT_AGE_EDGES = (15, 25, 35, 45, 55, 65, 75, 120)


@dataclass(frozen=True)
class PreferenceRecord:
    """One respondent; rho/eta are present only after calibration."""

    country: str
    time_index: float
    risk_index: float
    gender: str = "unknown"
    age: float = float("nan")
    weight: float = 1.0
    rho: float = float("nan")
    eta: float = float("nan")


@dataclass(frozen=True)
class PreferenceSet:
    """Column-oriented respondent table; immutable once constructed."""

    country: np.ndarray
    time_index: np.ndarray
    risk_index: np.ndarray
    gender: np.ndarray
    age: np.ndarray
    weight: np.ndarray
    rho: np.ndarray | None = None
    eta: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.country)
        if n == 0:
            raise DataError("preference set is empty")
        for name in ("time_index", "risk_index", "age", "weight"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if len(arr) != n:
                raise DataError(f"preference column '{name}' length mismatch")
        object.__setattr__(self, "country", np.asarray(self.country, dtype=object))
        object.__setattr__(self, "gender", np.asarray(self.gender, dtype=object))
        if np.any(~np.isfinite(self.time_index)) or np.any(~np.isfinite(self.risk_index)):
            raise DataError("indices must be finite after loading")
        if np.any(~np.isfinite(self.weight)) or np.any(self.weight <= 0):
            raise DomainError("weights must be positive")
        for name in ("rho", "eta"):
            val = getattr(self, name)
            if val is not None:
                arr = np.asarray(val, dtype=float)
                if len(arr) != n:
                    raise DataError(f"'{name}' length mismatch")
                if np.any(arr < 0):
                    raise DomainError(f"calibrated {name} must be nonnegative")
                object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.country)

    @property
    def calibrated(self) -> bool:
        return self.rho is not None and self.eta is not None

    def to_frame(self) -> pd.DataFrame:
        data = {
            "country": self.country,
            "time_index": self.time_index,
            "risk_index": self.risk_index,
            "gender": self.gender,
            "age": self.age,
            "weight": self.weight,
        }
        if self.calibrated:
            data["rho"] = self.rho
            data["eta"] = self.eta
        return pd.DataFrame(data)


@dataclass(frozen=True)
class LoadReport:
    n_loaded: int
    n_dropped_missing: int
    n_malformed: int
    warnings: tuple = ()


@dataclass(frozen=True)
class ExpertAnchors:
    """5th/95th percentile anchor values from an expert survey."""

    rho_q5: float
    rho_q95: float
    eta_q5: float
    eta_q95: float
    provenance: str = ""

    def __post_init__(self):
        if not self.rho_q95 > self.rho_q5:
            raise DomainError("expert rho anchors need q95 > q5")
        if not self.eta_q95 > self.eta_q5:
            raise DomainError("expert eta anchors need q95 > q5")


@dataclass(frozen=True)
class CalibrationMap:
    """Linear index-to-parameter maps plus fitting metadata."""

    slope_rho: float
    intercept_rho: float
    slope_eta: float
    intercept_eta: float
    variant: str
    lay_percentiles: dict = field(default_factory=dict)
    n_countries: int = 0

    def latent_rho(self, time_index) -> np.ndarray:
        return self.slope_rho * np.asarray(time_index, dtype=float) + self.intercept_rho

    def latent_eta(self, risk_index) -> np.ndarray:
        return self.slope_eta * np.asarray(risk_index, dtype=float) + self.intercept_eta


@dataclass(frozen=True)
class ClampReport:
    rho_clamped_fraction: float  # weighted share mapped below zero
    eta_clamped_fraction: float


def load_preferences(path) -> tuple[PreferenceSet, LoadReport]:
    """Read a respondent CSV, tolerating bad rows.

    Rows missing either composite index are dropped and counted; rows whose
    fields are present but unparseable count as malformed and are dropped
    too; both leave the load running.  An empty usable table is fatal.
    Indices outside the documented ranges produce warnings but stay in.
    """
    bad_lines: list = []
    try:
        raw = pd.read_csv(path, dtype=str, engine="python",
                          on_bad_lines=lambda row: bad_lines.append(row) and None)
    except FileNotFoundError:
        raise DataError(f"preference file not found: {path}")
    except Exception as exc:
        raise SchemaError(f"cannot parse preference file {path}: {exc}")
    missing_cols = [c for c in REQUIRED_COLUMNS if c not in raw.columns]
    if missing_cols:
        raise SchemaError(f"{path}: missing required columns {missing_cols}")
    if raw.empty:
        raise DataError(f"{path}: no respondent rows")

    n_malformed = len(bad_lines)
    country = raw["country"].fillna("").str.strip()

    def numeric(col, default=None):
        if col in raw.columns:
            present = raw[col].notna() & (raw[col].str.strip() != "")
            values = pd.to_numeric(raw[col], errors="coerce")
        else:
            present = pd.Series(False, index=raw.index)
            values = pd.Series(np.nan, index=raw.index)
        if default is not None:
            values = values.where(present & values.notna(), default)
        return values, present

    time_idx, time_present = numeric("time_index")
    risk_idx, risk_present = numeric("risk_index")
    age, _ = numeric("age", default=np.nan)
    weight, weight_present = numeric("weight", default=1.0)

    missing_index = ~(time_present & risk_present)
    parsed_bad = ((time_present & time_idx.isna()) | (risk_present & risk_idx.isna())
                  | (country == "") | (weight_present & (weight.isna() | (weight <= 0))))
    keep = ~missing_index & ~parsed_bad
    n_dropped = int(missing_index.sum())
    n_malformed += int((parsed_bad & ~missing_index).sum())
    if not keep.any():
        raise DataError(f"{path}: no usable respondent rows after cleaning")

    gender = (raw["gender"].fillna("unknown").str.strip().str.lower()
              if "gender" in raw.columns else pd.Series("unknown", index=raw.index))
    gender = gender.where(gender.isin(GENDERS[:2]), "unknown")

    warnings = []
    t = time_idx[keep]
    r = risk_idx[keep]
    out_t = int(((t < TIME_INDEX_RANGE[0]) | (t > TIME_INDEX_RANGE[1])).sum())
    out_r = int(((r < RISK_INDEX_RANGE[0]) | (r > RISK_INDEX_RANGE[1])).sum())
    if out_t:
        warnings.append(f"{out_t} time_index values outside {TIME_INDEX_RANGE}; kept")
    if out_r:
        warnings.append(f"{out_r} risk_index values outside {RISK_INDEX_RANGE}; kept")

    prefs = PreferenceSet(
        country=country[keep].to_numpy(dtype=object),
        time_index=t.to_numpy(dtype=float),
        risk_index=r.to_numpy(dtype=float),
        gender=gender[keep].to_numpy(dtype=object),
        age=age[keep].to_numpy(dtype=float),
        weight=weight[keep].to_numpy(dtype=float),
    )
    report = LoadReport(n_loaded=len(prefs), n_dropped_missing=n_dropped,
                        n_malformed=n_malformed, warnings=tuple(warnings))
    return prefs, report


def country_mean_indices(prefs: PreferenceSet) -> pd.DataFrame:
    """Respondent-weight-weighted average indices per country."""
    frame = prefs.to_frame()
    def agg(group):
        w = group["weight"].to_numpy()
        return pd.Series({
            "time_mean": wstats.weighted_mean(group["time_index"].to_numpy(), w),
            "risk_mean": wstats.weighted_mean(group["risk_index"].to_numpy(), w),
            "n": len(group),
        })
    table = frame.groupby("country", sort=True).apply(agg, include_groups=False)
    table["n"] = table["n"].astype(int)
    return table.reset_index()


def fit_calibration(prefs: PreferenceSet, anchors: ExpertAnchors,
                    variant: str = "base",
                    country_populations: dict | None = None,
                    region: list | None = None,
                    percentile_span: tuple = (5.0, 95.0)) -> CalibrationMap:
    """Fit the linear index-to-parameter maps.

    Percentiles are taken over country-average indices, not individuals.
    variant 'base' uses unweighted country averages; 'population_weighted'
    weights each country average by its national population;
    'geo_restricted' fits on the given country subset only.  The map then
    applies to every respondent regardless of variant.
    """
    table = country_mean_indices(prefs)
    if variant == "base":
        cweights = np.ones(len(table))
    elif variant == "population_weighted":
        if not country_populations:
            raise DataError("population_weighted variant needs country populations")
        missing = sorted(set(table["country"]) - set(country_populations))
        if missing:
            raise DataError(f"no population for countries: {missing}")
        cweights = np.array([float(country_populations[c]) for c in table["country"]])
        if np.any(cweights <= 0):
            raise DomainError("country populations must be positive")
    elif variant == "geo_restricted":
        if not region:
            raise DataError("geo_restricted variant needs a country list")
        mask = table["country"].isin(set(region)).to_numpy()
        if mask.sum() < 2:
            raise DegenerateFitError("geo_restricted region covers fewer than "
                                     "two surveyed countries")
        table = table[mask].reset_index(drop=True)
        cweights = np.ones(len(table))
    else:
        raise DataError(f"unknown calibration variant '{variant}'")

    qlo, qhi = percentile_span[0] / 100.0, percentile_span[1] / 100.0
    lay = {}
    params = {}
    for index_col, q5_exp, q95_exp, name in (
            ("time_mean", anchors.rho_q5, anchors.rho_q95, "rho"),
            ("risk_mean", anchors.eta_q5, anchors.eta_q95, "eta")):
        values = table[index_col].to_numpy()
        q5_lay = wstats.weighted_quantile(values, qlo, cweights)
        q95_lay = wstats.weighted_quantile(values, qhi, cweights)
        if not q95_lay > q5_lay:
            raise DegenerateFitError(f"country-average {name} indices have no spread "
                                     f"between the {percentile_span} percentiles")
        slope = (q95_exp - q5_exp) / (q95_lay - q5_lay)
        intercept = q5_exp - slope * q5_lay
        lay[name] = (float(q5_lay), float(q95_lay))
        params[name] = (float(slope), float(intercept))

    return CalibrationMap(slope_rho=params["rho"][0], intercept_rho=params["rho"][1],
                          slope_eta=params["eta"][0], intercept_eta=params["eta"][1],
                          variant=variant, lay_percentiles=lay,
                          n_countries=len(table))


def apply_calibration(cal: CalibrationMap,
                      prefs: PreferenceSet) -> tuple[PreferenceSet, ClampReport]:
    """Map indices to (rho, eta), clamping negatives to zero."""
    latent_rho = cal.latent_rho(prefs.time_index)
    latent_eta = cal.latent_eta(prefs.risk_index)
    total = prefs.weight.sum()
    report = ClampReport(
        rho_clamped_fraction=float(prefs.weight[latent_rho < 0].sum() / total),
        eta_clamped_fraction=float(prefs.weight[latent_eta < 0].sum() / total),
    )
    out = replace(prefs, rho=np.maximum(latent_rho, 0.0),
                  eta=np.maximum(latent_eta, 0.0))
    return out, report


def summarize_preferences(prefs: PreferenceSet, by: str = "country",
                          age_edges=DEFAULT_AGE_EDGES) -> pd.DataFrame:
    """Weighted mean, sd, and exact-zero share of rho and eta per group.

    by is one of 'country', 'gender', or 'age' (binned on age_edges).
    """
    if not prefs.calibrated:
        raise DataError("summarize_preferences requires calibrated records")
    frame = prefs.to_frame()
    if by == "age":
        frame = frame[np.isfinite(frame["age"])]
        if frame.empty:
            raise DataError("no records with known age")
        frame = frame.assign(group=pd.cut(frame["age"], bins=list(age_edges), right=False))
        frame = frame[frame["group"].notna()]
        frame["group"] = frame["group"].astype(str)
    elif by in ("country", "gender"):
        frame = frame.assign(group=frame[by])
    else:
        raise DataError(f"unknown grouping '{by}'")

    rows = []
    for key, group in frame.groupby("group", sort=True):
        w = group["weight"].to_numpy()
        row = {"group": key, "n": len(group), "weight": w.sum()}
        for name in ("rho", "eta"):
            x = group[name].to_numpy()
            row[f"{name}_mean"] = wstats.weighted_mean(x, w)
            row[f"{name}_sd"] = wstats.weighted_sd(x, w)
            row[f"{name}_zero_fraction"] = float(w[x == 0.0].sum() / w.sum())
        rows.append(row)
    return pd.DataFrame(rows)
