import json

import numpy as np
import pandas as pd
import pytest

from foresight.core.dual import classify_test_set
from foresight.core.errors import DataError
from foresight.core.evaluation import REPORT_COLUMNS, aggregate, fold_report, training_residual_pairs
from foresight.integrations.artifacts import (
    DUAL_MODEL_FILE,
    ERROR_MODEL_FILE,
    VALUE_MODEL_FILE,
    ensemble_from_json,
    ensemble_to_json,
    load_dual_model,
    save_dual_model,
    write_aggregate,
    write_events_csv,
    write_fold_reports,
)


def test_ensemble_json_is_exact(fitted_dual, train_test, tiny_config):
    _, test = train_test
    original = fitted_dual.value_model
    text = ensemble_to_json(original, tiny_config)
    restored = ensemble_from_json(text)

    assert restored.members == original.members
    assert restored.normalizer == original.normalizer
    assert restored.member_train_costs == original.member_train_costs
    assert np.array_equal(restored.predict_batch(test.inputs), original.predict_batch(test.inputs))
    assert json.loads(text)["config"]["n_trials"] == tiny_config.n_trials


def test_dual_model_directory(tmp_path, fitted_dual, train_test, tiny_config):
    _, test = train_test
    save_dual_model(fitted_dual, tmp_path, m=2, tau=1, transform="none", config=tiny_config)
    for name in (VALUE_MODEL_FILE, ERROR_MODEL_FILE, DUAL_MODEL_FILE):
        assert (tmp_path / name).exists()

    model, doc = load_dual_model(tmp_path)
    assert (doc.m, doc.tau, doc.transform) == (2, 1, "none")
    assert model.cell_boundaries == fitted_dual.cell_boundaries
    before = classify_test_set(fitted_dual, test)
    after = classify_test_set(model, test)
    assert before == after


def test_events_csv(tmp_path, fitted_dual, train_test):
    _, test = train_test
    path = tmp_path / "events" / "fold_01.csv"
    events = classify_test_set(fitted_dual, test)
    write_events_csv(events, path)

    frame = pd.read_csv(path, float_precision="round_trip")
    assert list(frame.columns) == [
        "source_index", "actual", "predicted_value", "predicted_abs_error", "cell", "label",
    ]
    assert len(frame) == len(test)
    assert frame["predicted_value"].tolist() == [e.predicted_value for e in events]
    assert set(frame["label"]) <= {"MorePredictable", "LessPredictable"}


def test_report_files(tmp_path, fitted_dual, train_test):
    train, test = train_test
    report = fold_report(fitted_dual, test, training_residual_pairs(fitted_dual, train), fold=1)
    second = report.model_copy(update={"fold": 2})
    write_fold_reports([report, second], tmp_path / "folds.csv", tmp_path / "folds.json")

    frame = pd.read_csv(tmp_path / "folds.csv", float_precision="round_trip")
    assert list(frame.columns) == list(REPORT_COLUMNS)
    assert frame["fold"].tolist() == [1, 2]
    assert frame["eps_t"].iloc[0] == report.eps_t
    payload = json.loads((tmp_path / "folds.json").read_text(encoding="utf-8"))
    assert payload[0]["cells"][0]["cell"] == 1

    summary = aggregate([report, second])
    write_aggregate(summary, tmp_path / "aggregate.csv", tmp_path / "aggregate.json")
    table = pd.read_csv(tmp_path / "aggregate.csv")
    assert table["row"].tolist() == ["mean", "deviation"]
    assert table["eps_t"].iloc[0] == pytest.approx(report.eps_t, abs=1e-15)
    doc = json.loads((tmp_path / "aggregate.json").read_text(encoding="utf-8"))
    assert len(doc["comparisons"]) == 8


def test_ensemble_document_with_unsorted_costs_is_rejected(fitted_dual, tiny_config):
    doc = json.loads(ensemble_to_json(fitted_dual.value_model, tiny_config))
    doc["member_train_costs"] = [3.0, 1.0]
    with pytest.raises(ValueError):
        ensemble_from_json(json.dumps(doc))


def test_corrupt_model_directory_is_a_data_error(tmp_path, fitted_dual, tiny_config):
    save_dual_model(fitted_dual, tmp_path, m=2, tau=1, transform="none", config=tiny_config)
    path = tmp_path / ERROR_MODEL_FILE
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["member_train_costs"] = doc["member_train_costs"][::-1]
    doc["member_train_costs"][0] += 1.0
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(DataError):
        load_dual_model(tmp_path)
    (tmp_path / DUAL_MODEL_FILE).write_text("{not json", encoding="utf-8")
    with pytest.raises(DataError):
        load_dual_model(tmp_path)
