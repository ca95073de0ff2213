"""Self-contained JSON bundle consumed by the browser decision explorer.

The bundle carries every lattice scenario's reference-year outcomes, frontier
membership flags, quartile labels for frontier members, and the fitted
surrogate coefficients, so the explorer can re-run posterior selection and
draw budget/indifference overlays entirely client-side. The schema is
versioned and shipped in-repo (docs/explorer_bundle.schema.json).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .analysis import (
    FittedSurrogate,
    ParetoPoint,
    SurrogateForm,
    fit_surrogate,
    pareto_frontier,
    quartile_labels,
)
from .engine import SweepTable
from .policy import f2e_levels, g2g_levels

SCHEMA_VERSION = 1

BUNDLE_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ExplorerBundle",
    "type": "object",
    "required": ["schema_version", "config_hash", "reference_year",
                 "lattice", "points", "surrogates", "defaults"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"type": "integer", "const": SCHEMA_VERSION},
        "config_hash": {"type": "string"},
        "base_seed": {"type": ["integer", "null"]},
        "reference_year": {"type": ["integer", "null"]},
        "lattice": {
            "type": "object",
            "required": ["g2g", "f2e"],
            "additionalProperties": False,
            "properties": {
                "g2g": {"type": "array", "items": {"type": "number"}},
                "f2e": {"type": "array", "items": {"type": "number"}},
            },
        },
        "points": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["g2g_compensation", "f2e_price", "carbon_kg",
                             "habitat_index", "gross_economic_benefits",
                             "reverted_area_mu", "electricity_kwh",
                             "financial_burden", "frontier", "labels"],
                "additionalProperties": False,
                "properties": {
                    "g2g_compensation": {"type": "number"},
                    "f2e_price": {"type": "number"},
                    "carbon_kg": {"type": "number"},
                    "habitat_index": {"type": "number"},
                    "gross_economic_benefits": {"type": "number"},
                    "reverted_area_mu": {"type": "number"},
                    "electricity_kwh": {"type": "number"},
                    "financial_burden": {"type": "number"},
                    "frontier": {"type": "boolean"},
                    "labels": {
                        "type": ["object", "null"],
                        "required": ["economy", "carbon", "habitat"],
                        "additionalProperties": False,
                        "properties": {
                            "economy": {"enum": ["--", "-", "+", "++"]},
                            "carbon": {"enum": ["--", "-", "+", "++"]},
                            "habitat": {"enum": ["--", "-", "+", "++"]},
                        },
                    },
                },
            },
        },
        "surrogates": {
            "type": "object",
            "required": ["g2g_budget", "f2e_budget", "habitat", "economy"],
            "additionalProperties": False,
            "properties": {
                name: {
                    "type": "object",
                    "required": ["form", "coefficients", "train_r2", "test_r2",
                                 "x1_scale", "x2_scale", "x2_linear"],
                    "additionalProperties": False,
                    "properties": {
                        "form": {"type": "string"},
                        "coefficients": {"type": "array", "items": {"type": "number"}},
                        "train_r2": {"type": "number"},
                        "test_r2": {"type": "number"},
                        "x1_scale": {"type": "number"},
                        "x2_scale": {"type": "number"},
                        "x2_linear": {"type": "boolean"},
                    },
                }
                for name in ("g2g_budget", "f2e_budget", "habitat", "economy")
            },
        },
        "defaults": {
            "type": "object",
            "required": ["budget_cap", "min_reverted_area_mu", "weights"],
            "additionalProperties": False,
            "properties": {
                "budget_cap": {"type": "number"},
                "min_reverted_area_mu": {"type": "number"},
                "weights": {
                    "type": "object",
                    "required": ["carbon", "habitat", "economy"],
                    "additionalProperties": False,
                    "properties": {
                        "carbon": {"type": "number"},
                        "habitat": {"type": "number"},
                        "economy": {"type": "number"},
                    },
                },
            },
        },
    },
}


def surrogate_to_json(model: FittedSurrogate) -> dict:
    return {
        "form": str(model.form.value),
        "coefficients": [float(c) for c in model.coefficients],
        "train_r2": float(model.train_r2),
        "test_r2": float(model.test_r2),
        "x1_scale": float(model.x1_scale),
        "x2_scale": float(model.x2_scale),
        "x2_linear": bool(model.x2_linear),
    }


def surrogate_from_json(data: dict) -> FittedSurrogate:
    return FittedSurrogate(
        form=SurrogateForm(data["form"]),
        coefficients=list(data["coefficients"]),
        train_r2=data.get("train_r2", float("nan")),
        test_r2=data.get("test_r2", float("nan")),
        x1_scale=data.get("x1_scale", 1.0),
        x2_scale=data.get("x2_scale", 1.0),
        x2_linear=data.get("x2_linear", False),
    )


def fit_bundle_surrogates(points: list[ParetoPoint],
                          g2g_budget_y: list[float],
                          f2e_budget_y: list[float],
                          seed: int = 0,
                          f2e_x2_linear: bool = False,
                          ) -> dict[str, FittedSurrogate]:
    """Fit the four forms on per-scenario direct benefits and outcomes."""
    x1 = [p.reverted_area_mu for p in points]
    x2 = [p.electricity_kwh for p in points]
    habitat = [p.objectives.habitat_index for p in points]
    econ = [p.objectives.gross_economic_benefits for p in points]
    return {
        "g2g_budget": fit_surrogate(list(zip(x1, x2, g2g_budget_y)),
                                    SurrogateForm.G2G_BUDGET, seed=seed),
        "f2e_budget": fit_surrogate(list(zip(x1, x2, f2e_budget_y)),
                                    SurrogateForm.F2E_BUDGET, seed=seed,
                                    x2_linear=f2e_x2_linear),
        "habitat": fit_surrogate(list(zip(x1, x2, habitat)),
                                 SurrogateForm.HABITAT_CUBIC, seed=seed),
        "economy": fit_surrogate(list(zip(x1, x2, econ)),
                                 SurrogateForm.ECON_QUADRATIC, seed=seed),
    }


def build_bundle(points: list[ParetoPoint],
                 surrogates: dict[str, FittedSurrogate],
                 config_hash: str,
                 base_seed: int | None = None,
                 reference_year: int | None = None,
                 defaults: dict | None = None,
                 lattice: dict | None = None) -> dict:
    """Assemble a schema-valid bundle; frontier flags and labels recomputed
    here so they are consistent with pareto_frontier by construction."""
    frontier = pareto_frontier(points)
    frontier_keys = {p.scenario for p in frontier}
    labels = quartile_labels(frontier)
    label_by_scenario = {p.scenario: lab for p, lab in zip(frontier, labels)}
    json_points = []
    for p in points:
        on_front = p.scenario in frontier_keys
        json_points.append({
            "g2g_compensation": float(p.scenario.g2g_compensation),
            "f2e_price": float(p.scenario.f2e_price),
            "carbon_kg": float(p.objectives.carbon_kg),
            "habitat_index": float(p.objectives.habitat_index),
            "gross_economic_benefits": float(p.objectives.gross_economic_benefits),
            "reverted_area_mu": float(p.reverted_area_mu),
            "electricity_kwh": float(p.electricity_kwh),
            "financial_burden": float(p.financial_burden),
            "frontier": on_front,
            "labels": label_by_scenario.get(p.scenario),
        })
    if defaults is None:
        burdens = sorted(p.financial_burden for p in points)
        areas = sorted(p.reverted_area_mu for p in points)
        defaults = {
            "budget_cap": max(1.0, burdens[len(burdens) // 2]),
            "min_reverted_area_mu": areas[len(areas) // 4],
            "weights": {"carbon": 1 / 3, "habitat": 1 / 3, "economy": 1 / 3},
        }
    if lattice is None:
        lattice = {"g2g": g2g_levels(), "f2e": f2e_levels()}
    return {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash,
        "base_seed": base_seed,
        "reference_year": reference_year,
        "lattice": lattice,
        "points": json_points,
        "surrogates": {k: surrogate_to_json(v) for k, v in surrogates.items()},
        "defaults": defaults,
    }


def bundle_from_sweep(table: SweepTable, seed: int = 0,
                      f2e_x2_linear: bool = False) -> dict:
    from .analysis import points_from_sweep

    ref = table.reference_year()
    points = points_from_sweep(table, ref)
    g2g_y = [table.at(p.scenario, ref, "g2g_expenditure") for p in points]
    f2e_y = [table.at(p.scenario, ref, "f2e_subsidy") for p in points]
    surrogates = fit_bundle_surrogates(points, g2g_y, f2e_y, seed=seed,
                                       f2e_x2_linear=f2e_x2_linear)
    g2g = sorted({p.scenario.g2g_compensation for p in points})
    f2e = sorted({p.scenario.f2e_price for p in points}, reverse=True)
    return build_bundle(
        points, surrogates,
        config_hash=str(table.metadata.get("config_hash", "unknown")),
        base_seed=table.metadata.get("base_seed"),
        reference_year=ref,
        lattice={"g2g": [float(v) for v in g2g], "f2e": [float(v) for v in f2e]},
    )


def write_bundle(bundle: dict, path: str | Path) -> Path:
    """Atomic write (temp file + rename); key order is deterministic."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_name(p.name + ".tmp")
    tmp.write_text(json.dumps(bundle, indent=1, sort_keys=True) + "\n")
    os.replace(tmp, p)
    return p


def load_bundle(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text())
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(
            f"unsupported bundle schema_version {version!r}; expected {SCHEMA_VERSION}")
    return data
