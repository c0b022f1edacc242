"""JSON formats for measures and verification reports."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import InvalidArgument
from .measures import DensityPiece, DiscreteMeasure1D, DiscreteMeasureND

SCHEMA_VERSION = "1.0"

MEASURE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["dim", "points", "weights"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "points": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "weights": {"type": "array", "items": {"type": "number"}},
        "probability": {"type": "boolean"},
        "density_pieces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["l", "u", "coeffs"],
                "properties": {
                    "l": {"type": "number"},
                    "u": {"type": "number"},
                    "coeffs": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                },
            },
        },
    },
}

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "kind", "config", "rows", "summary"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"type": "string"},
        "config": {"type": "object"},
        "rows": {"type": "array", "items": {"type": "object"}},
        "summary": {
            "type": "object",
            "required": ["passed", "properties"],
            "properties": {
                "passed": {"type": "boolean"},
                "properties": {"type": "object", "additionalProperties": {"type": "boolean"}},
            },
        },
        "timing": {"type": "object"},
        "timestamp": {"type": "string"},
    },
}


# -----------------------------------------------------------------------------
# Measures
# -----------------------------------------------------------------------------
def measure_to_dict(m: DiscreteMeasureND | DiscreteMeasure1D, probability: bool = False) -> dict:
    if isinstance(m, DiscreteMeasure1D):
        out = {
            "dim": 1,
            "points": [[float(x)] for x in m.locations],
            "weights": m.weights.tolist(),
            "probability": probability,
        }
        if m.pieces:
            out["density_pieces"] = [{"l": pc.l, "u": pc.u, "coeffs": list(pc.coeffs)} for pc in m.pieces]
        return out
    return {
        "dim": m.dim,
        "points": m.points.tolist(),
        "weights": m.weights.tolist(),
        "probability": bool(m.probability),
    }


def measure_from_dict(data: dict) -> DiscreteMeasureND | DiscreteMeasure1D:
    """Density pieces give a ``DiscreteMeasure1D``; anything else a ``DiscreteMeasureND``."""
    try:
        jsonschema.validate(data, MEASURE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InvalidArgument(f"bad measure JSON: {exc.message}") from exc
    d = data["dim"]
    points = np.asarray(data["points"], dtype=float).reshape(-1, d)
    weights = np.asarray(data["weights"], dtype=float)
    if data.get("density_pieces"):
        if d != 1:
            raise InvalidArgument("density pieces are only supported in one dimension")
        pieces = tuple(DensityPiece(pc["l"], pc["u"], tuple(pc["coeffs"])) for pc in data["density_pieces"])
        return DiscreteMeasure1D(points[:, 0], weights, pieces)
    return DiscreteMeasureND(points, weights, probability=bool(data.get("probability", False)))


def load_measure(path) -> DiscreteMeasureND | DiscreteMeasure1D:
    with Path(path).open(encoding="utf-8") as fh:
        return measure_from_dict(json.load(fh))


def save_measure(m, path, probability: bool = False) -> Path:
    path = Path(path)
    path.write_text(json.dumps(measure_to_dict(m, probability), indent=2), encoding="utf-8")
    return path


# -----------------------------------------------------------------------------
# Reports
# -----------------------------------------------------------------------------
def validate_report(data: dict) -> dict:
    try:
        jsonschema.validate(data, REPORT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InvalidArgument(f"report rejected: {exc.message}") from exc
    return data


def dump_report(report: dict) -> str:
    return json.dumps(validate_report(report), indent=2, sort_keys=True)


def load_report(path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        return validate_report(json.load(fh))
