"""Sensitivity sweeps over scenarios, damage kinds, elasticities, variants.

One cell per axis combination.  Marginal damage paths are cached per
(scenario, damage kind, elasticity), so preference variants reuse the IAM
runs.  A JSON-lines checkpoint makes long sweeps restartable: finished
cells are read back and skipped, and a failed cell records its error
without stopping the sweep.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import pandas as pd

from . import engine
from .config import Workspace
from .errors import SccError
from .scenarios import growth_path

MATRIX_COLUMNS = ("cell_id", "scenario", "damage_kind", "elasticity", "variant",
                  "ref_scc", "mean_scc", "premium", "ratio", "error")


@dataclass(frozen=True)
class RunCell:
    """Outputs of one sweep combination."""

    scenario: str
    damage_kind: str
    elasticity: float
    variant: str
    ref_scc: float = math.nan
    mean_scc: float = math.nan
    premium: float = math.nan
    ratio: float = math.nan   # mean/ref, defined only when ref_scc > 0
    error: str | None = None

    @property
    def cell_id(self) -> str:
        return f"{self.scenario}|{self.damage_kind}|{self.elasticity:g}|{self.variant}"


def compute_cell(ws: Workspace, scenario: str, damage_kind: str,
                 elasticity: float, variant: str,
                 use_cache: bool = True, workers: int = 1) -> RunCell:
    """Evaluate one cell; raises on failure (run_matrix catches)."""
    prefs, _, _ = ws.calibrated(variant)
    scen = ws.scenario(scenario)
    g = growth_path(scen)
    mdp = ws.mdp(scenario, damage_kind, elasticity, use_cache=use_cache)
    results = engine.batch_scc(mdp, prefs, g, workers=workers,
                               chunk_size=ws.config.chunk_size)
    rho_bar, eta_bar = engine.weighted_mean_preferences(prefs)
    report = engine.weitzman_premium(results, rho_bar, eta_bar, mdp, g)
    ratio = report.mean_scc / report.ref_scc if report.ref_scc > 0 else math.nan
    return RunCell(scenario=scenario, damage_kind=damage_kind,
                   elasticity=elasticity, variant=variant,
                   ref_scc=report.ref_scc, mean_scc=report.mean_scc,
                   premium=report.premium, ratio=ratio)


def _load_checkpoint(path: Path) -> dict:
    done = {}
    if path.exists():
        with open(path) as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                cell = RunCell(**{k: v for k, v in entry.items() if k != "cell_id"})
                done[cell.cell_id] = cell
    return done


def run_matrix(ws: Workspace, scenarios=None, damage_kinds=None,
               elasticities=None, variants=None,
               checkpoint_path=None, use_cache: bool = True,
               workers: int = 1) -> list[RunCell]:
    """Run the sweep, resuming from the checkpoint when one is given.

    Axis defaults come from the workspace configuration.  Cells evaluate in
    deterministic axis order; each failure is recorded in its cell and the
    sweep continues.
    """
    cfg = ws.config
    scenarios = tuple(scenarios or cfg.axis_scenarios or (cfg.base_scenario,))
    damage_kinds = tuple(damage_kinds or cfg.axis_damage_kinds or (cfg.base_damage_kind,))
    elasticities = tuple(elasticities if elasticities is not None
                         else (cfg.axis_elasticities or (cfg.base_elasticity,)))
    variants = tuple(variants or cfg.axis_variants or (cfg.base_variant,))

    done = {}
    handle = None
    if checkpoint_path is not None:
        checkpoint_path = Path(checkpoint_path)
        done = _load_checkpoint(checkpoint_path)
        checkpoint_path.parent.mkdir(parents=True, exist_ok=True)
        handle = open(checkpoint_path, "a")

    cells = []
    try:
        for scen, kind, eps, variant in itertools.product(
                scenarios, damage_kinds, elasticities, variants):
            probe = RunCell(scenario=scen, damage_kind=kind,
                            elasticity=float(eps), variant=variant)
            if probe.cell_id in done:
                cells.append(done[probe.cell_id])
                continue
            try:
                cell = compute_cell(ws, scen, kind, float(eps), variant,
                                    use_cache=use_cache, workers=workers)
            except SccError as exc:
                cell = RunCell(scenario=scen, damage_kind=kind,
                               elasticity=float(eps), variant=variant,
                               error=f"{type(exc).__name__}: {exc}")
            cells.append(cell)
            if handle is not None:
                record = asdict(cell)
                record["cell_id"] = cell.cell_id
                handle.write(json.dumps(record) + "\n")
                handle.flush()
    finally:
        if handle is not None:
            handle.close()
    return cells


def matrix_frame(cells) -> pd.DataFrame:
    rows = []
    for cell in cells:
        record = asdict(cell)
        record["cell_id"] = cell.cell_id
        rows.append(record)
    return pd.DataFrame(rows, columns=list(MATRIX_COLUMNS))
