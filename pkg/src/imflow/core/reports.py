"""
Assembly of JSON-compatible report documents.

Every information quantity is a float in bits; blocks holding them carry
"units": "bits". The envelope records the toolkit version, the estimator and
the command that produced the report.
"""
import json
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import jsonschema

from imflow import __version__
from imflow.core.channels import NoiseBoundReport
from imflow.core.errors import InvariantBreachError
from imflow.core.info_matrix import (
    ConstraintReport,
    InfoQuantities,
    InformationMatrix,
    MatrixAnalysis,
    NoiseLossPoint,
    PatternLabel,
)
from imflow.core.layer_chain import LayerChainReport, PathwayStep
from imflow.core.mlp import GradCheckResult
from imflow.core.objectives import SelectionResult, SweepTable
from imflow.core.probability import CLAMP_TOLERANCE, ESTIMATOR

UNITS = "bits"

DIAGRAM_HEADER = ("snapshot_epoch", "layer", "a_bits", "d_bits", "ixx_bits", "pattern")
SWEEP_HEADER = ("parameter", "value", "objective", "selected", "argmin_set", "companion",
                "companion_argmin_set", "verdict")


def quantities_dict(q: InfoQuantities) -> Dict[str, Any]:
    return {"units": UNITS, **{name: float(value) for name, value in q.as_dict().items()}}


def matrix_dict(m: InformationMatrix) -> Dict[str, Any]:
    return {
        "units": UNITS,
        **{name: float(value) for name, value in m.entries().items()},
        "entropy_expansion": bool(m.entropy_expansion),
    }


def constraints_dict(report: ConstraintReport) -> Dict[str, Any]:
    return {
        "mode": report.mode.value,
        "units": UNITS,
        "passed": report.passed,
        "checks": [
            {
                "name": check.name,
                "relation": check.relation,
                "observed": {name: float(value) for name, value in check.observed.items()},
                "passed": bool(check.passed),
                "slack": float(check.slack),
            }
            for check in report.checks
        ],
    }


def pattern_dict(label: PatternLabel) -> Dict[str, Any]:
    return {
        "kind": label.kind.value,
        "oracle": bool(label.oracle),
        "distance": None if label.distance is None else float(label.distance),
    }


def point_dict(p: NoiseLossPoint) -> Dict[str, Any]:
    return {"units": UNITS, "x_coord": float(p.x_coord), "y_coord": float(p.y_coord)}


def analysis_dict(analysis: MatrixAnalysis) -> Dict[str, Any]:
    return {
        "quantities": quantities_dict(analysis.quantities),
        "matrix": matrix_dict(analysis.matrix),
        "constraints": constraints_dict(analysis.constraints),
        "pattern": pattern_dict(analysis.pattern),
        "noise_loss_point": point_dict(analysis.point),
        "i_xxf_from_point": float(analysis.i_xxf_from_point),
    }


def noise_bounds_dict(bounds: NoiseBoundReport) -> Dict[str, Any]:
    values = {name: float(getattr(bounds, name)) for name in bounds.__dataclass_fields__}
    return {
        "units": UNITS,
        **values,
        "noise_bound_holds": bounds.noise_bound_holds,
        "loss_bound_holds": bounds.loss_bound_holds,
        "sandwich_holds": bounds.sandwich_holds,
    }


def selection_dict(selection: Optional[SelectionResult]) -> Optional[Dict[str, Any]]:
    if selection is None:
        return None
    return {
        "objective": selection.spec.label,
        "units": UNITS,
        "values": {name: float(value) for name, value in selection.values.items()},
        "argmin_set": list(selection.argmin_set),
        "selected": selection.selected,
    }


def sweep_dict(table: SweepTable) -> Dict[str, Any]:
    return {
        "candidates": list(table.candidates),
        "deterministic_family": table.deterministic_family,
        "rows": [
            {
                "parameter": row.parameter,
                "value": row.value,
                "selection": selection_dict(row.selection),
                "companion": selection_dict(row.companion),
                "verdict": row.verdict,
            }
            for row in table.rows
        ],
    }


def sweep_rows(table: SweepTable) -> List[List[Any]]:
    rows = []
    for row in table.rows:
        companion = row.companion
        rows.append([
            row.parameter, row.value, row.selection.spec.label, row.selection.selected,
            " ".join(row.selection.argmin_set),
            "" if companion is None else companion.spec.label,
            "" if companion is None else " ".join(companion.argmin_set),
            row.verdict,
        ])
    return rows


def chain_dict(chain: LayerChainReport) -> Dict[str, Any]:
    return {
        "metadata": dict(chain.metadata),
        "monotone": chain.monotone,
        "ordered": chain.ordered,
        "layers": [
            {
                "layer": entry.layer,
                "index": entry.index,
                "units_measured": entry.units_measured,
                "dpi_slack": float(entry.dpi_slack),
                "dpi_holds": entry.dpi_holds,
                **analysis_dict(entry.analysis),
            }
            for entry in chain.entries
        ],
        "chains": [
            {
                "quantity": verdict.quantity,
                "direction": verdict.direction,
                "source": verdict.source,
                "target": verdict.target,
                "slack": float(verdict.slack),
                "holds": verdict.holds,
            }
            for verdict in chain.chains
        ],
        "order": [
            {
                "source": verdict.source,
                "target": verdict.target,
                "noise_slack": float(verdict.noise_slack),
                "loss_slack": float(verdict.loss_slack),
                "holds": verdict.holds,
            }
            for verdict in chain.order
        ],
    }


def pathways_dict(steps: Iterable[PathwayStep]) -> List[Dict[str, Any]]:
    return [
        {
            "layer": step.layer,
            "from_epoch": step.from_epoch,
            "to_epoch": step.to_epoch,
            "units": UNITS,
            "delta_a": float(step.delta_a),
            "delta_c": float(step.delta_c),
        }
        for step in steps
    ]


def diagram_rows(chains: Mapping[int, LayerChainReport]) -> List[List[Any]]:
    """One row per snapshot and chain entry, IM[X] first, aligned with DIAGRAM_HEADER."""
    rows = []
    for epoch in sorted(chains):
        for entry in chains[epoch].entries:
            analysis = entry.analysis
            rows.append([
                epoch, entry.layer,
                float(analysis.point.x_coord), float(analysis.point.y_coord),
                float(analysis.i_xxf_from_point), analysis.pattern.kind.value,
            ])
    return rows


def grad_check_dict(results: Sequence[GradCheckResult], seeds: Sequence[int], eps: float) -> Dict[str, Any]:
    return {
        "eps": eps,
        "max_relative_error": max(float(result.max_relative_error) for result in results),
        "models": [
            {
                "seed": seed,
                "max_relative_error": float(result.max_relative_error),
                "compared": result.compared,
                "skipped": result.skipped,
            }
            for seed, result in zip(seeds, results)
        ],
    }


def envelope(command: str, arguments: Mapping[str, Any], body: Mapping[str, Any],
             artifacts: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """Wrap a report body with the toolkit version, estimator and command echo."""
    return {
        "toolkit_version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "estimator": {"name": ESTIMATOR, "units": UNITS, "log_base": 2, "clamp_tolerance": CLAMP_TOLERANCE},
        "command": {"name": command, "arguments": dict(arguments)},
        "artifacts": dict(artifacts or {}),
        "body": dict(body),
    }


SCHEMA_PATH = Path(__file__).resolve().parent.parent / "schemas" / "report.schema.json"


@lru_cache(maxsize=1)
def report_schema() -> Dict[str, Any]:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


def validate_report(report: Mapping[str, Any]) -> None:
    """Raise InvariantBreachError unless the report matches the shipped schema."""
    try:
        jsonschema.validate(report, report_schema())
    except jsonschema.ValidationError as e:
        location = "/".join(str(part) for part in e.absolute_path)
        raise InvariantBreachError(f"report does not match its schema at /{location}: {e.message}")
