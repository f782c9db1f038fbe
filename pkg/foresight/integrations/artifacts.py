"""
On-disk artifacts: ensemble / dual-model JSON documents and the CSV / JSON
reports of an experiment run.

Float fields round-trip exactly: pydantic writes JSON floats with shortest-repr
digits, CSV floats with 17 significant digits.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, TypeAdapter

from ..core.dual import DualModel, EventForecast
from ..core.errors import DataError
from ..core.evaluation import REPORT_COLUMNS, Aggregate, FoldReport
from ..core.mlp import Normalizer, pack, unpack
from ..core.training import EnsembleForecaster, TrainConfig

FLOAT_FORMAT = "%.17g"

VALUE_MODEL_FILE = "value_model.json"
ERROR_MODEL_FILE = "error_model.json"
DUAL_MODEL_FILE = "dual_model.json"

_REPORT_LIST = TypeAdapter(list[FoldReport])


# ---------- Schemas ----------


class NormalizerDoc(BaseModel):
    input_means: list[float]
    input_stds: list[float]
    target_mean: float
    target_std: float


class EnsembleDoc(BaseModel):
    n_inputs: int
    n_neurons: int
    members: list[list[float]]
    normalizer: NormalizerDoc
    member_train_costs: list[float]
    config: Optional[TrainConfig] = None


class DualModelDoc(BaseModel):
    n_cells: int
    cell_boundaries: list[float]
    degenerate: bool
    m: int
    tau: int
    transform: str = "none"


# ---------- Ensembles ----------


def ensemble_to_doc(
    ensemble: EnsembleForecaster, config: Optional[TrainConfig] = None
) -> EnsembleDoc:
    norm = ensemble.normalizer
    return EnsembleDoc(
        n_inputs=ensemble.n_inputs,
        n_neurons=ensemble.n_neurons,
        members=[pack(member).tolist() for member in ensemble.members],
        normalizer=NormalizerDoc(
            input_means=norm.input_means.tolist(),
            input_stds=norm.input_stds.tolist(),
            target_mean=norm.target_mean,
            target_std=norm.target_std,
        ),
        member_train_costs=list(ensemble.member_train_costs),
        config=config,
    )


def ensemble_from_doc(doc: EnsembleDoc) -> EnsembleForecaster:
    return EnsembleForecaster(
        members=tuple(
            unpack(np.array(vector), doc.n_inputs, doc.n_neurons)
            for vector in doc.members
        ),
        normalizer=Normalizer(
            input_means=np.array(doc.normalizer.input_means),
            input_stds=np.array(doc.normalizer.input_stds),
            target_mean=doc.normalizer.target_mean,
            target_std=doc.normalizer.target_std,
        ),
        member_train_costs=tuple(doc.member_train_costs),
    )


def _dumps(doc: BaseModel) -> str:
    return doc.model_dump_json(indent=2)


def ensemble_to_json(
    ensemble: EnsembleForecaster, config: Optional[TrainConfig] = None
) -> str:
    return _dumps(ensemble_to_doc(ensemble, config))


def ensemble_from_json(text: str) -> EnsembleForecaster:
    return ensemble_from_doc(EnsembleDoc.model_validate_json(text))


# ---------- Dual models ----------


def save_dual_model(
    model: DualModel,
    directory: Path,
    *,
    m: int,
    tau: int,
    transform: str,
    config: Optional[TrainConfig] = None,
) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / VALUE_MODEL_FILE).write_text(
        ensemble_to_json(model.value_model, config), encoding="utf-8"
    )
    (directory / ERROR_MODEL_FILE).write_text(
        ensemble_to_json(model.error_model, config), encoding="utf-8"
    )
    doc = DualModelDoc(
        n_cells=model.n_cells,
        cell_boundaries=list(model.cell_boundaries),
        degenerate=model.degenerate,
        m=m,
        tau=tau,
        transform=transform,
    )
    (directory / DUAL_MODEL_FILE).write_text(_dumps(doc), encoding="utf-8")


def load_dual_model(directory: Path) -> tuple[DualModel, DualModelDoc]:
    try:
        doc = DualModelDoc.model_validate_json(
            (directory / DUAL_MODEL_FILE).read_text(encoding="utf-8")
        )
        model = DualModel(
            value_model=ensemble_from_json(
                (directory / VALUE_MODEL_FILE).read_text(encoding="utf-8")
            ),
            error_model=ensemble_from_json(
                (directory / ERROR_MODEL_FILE).read_text(encoding="utf-8")
            ),
            cell_boundaries=tuple(doc.cell_boundaries),
            n_cells=doc.n_cells,
            degenerate=doc.degenerate,
        )
    except ValueError as exc:
        # pydantic ValidationError is a ValueError too
        raise DataError(f"{directory}: unusable model document: {exc}") from exc
    return model, doc


# ---------- Reports ----------


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def events_frame(events: Sequence[EventForecast]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "source_index": [e.source_index for e in events],
            "actual": [e.actual for e in events],
            "predicted_value": [e.predicted_value for e in events],
            "predicted_abs_error": [e.predicted_abs_error for e in events],
            "cell": [e.cell for e in events],
            "label": [e.label.value if e.label is not None else "" for e in events],
        }
    )


def write_events_csv(events: Sequence[EventForecast], path: Path) -> None:
    _write_csv(events_frame(events), path)


def reports_frame(reports: Sequence[FoldReport]) -> pd.DataFrame:
    return pd.DataFrame([r.csv_row() for r in reports], columns=list(REPORT_COLUMNS))


def write_fold_reports(reports: Sequence[FoldReport], csv_path: Path, json_path: Path) -> None:
    _write_csv(reports_frame(reports), csv_path)
    json_path.write_bytes(_REPORT_LIST.dump_json(list(reports), indent=2))


def aggregate_frame(summary: Aggregate) -> pd.DataFrame:
    means: dict[str, Any] = {"row": "mean", **summary.means()}
    deviations: dict[str, Any] = {"row": "deviation", **summary.deviations()}
    return pd.DataFrame([means, deviations], columns=["row", *REPORT_COLUMNS[1:]])


def write_aggregate(summary: Aggregate, csv_path: Path, json_path: Path) -> None:
    _write_csv(aggregate_frame(summary), csv_path)
    json_path.write_text(_dumps(summary), encoding="utf-8")
