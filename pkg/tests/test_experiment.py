import json

import pandas as pd
import pytest
from pydantic import ValidationError

from foresight.core.errors import ConfigError, DataError, FoldFailed
from foresight.core.experiment import ExperimentConfig, load_config, load_series, run_experiment
from foresight.core.ledger import list_runs

TINY_TRAINING = {"n_trials": 3, "n_combined": 2, "max_simplex_iterations": 120, "seed": 1}


def tiny(**overrides) -> ExperimentConfig:
    fields = {
        "source": "model1",
        "seed": 4,
        "series_length": 220,
        "train_size": 100,
        "test_size": 60,
        "step": 60,
        "train_config": TINY_TRAINING,
    }
    fields.update(overrides)
    return ExperimentConfig.model_validate(fields)


# ---------- config ----------


def test_generated_source_defaults():
    config = ExperimentConfig()
    assert config.source == "model1"
    assert (config.m, config.tau) == (2, 1)
    assert config.transform == "none"
    assert config.price_statistics is False
    assert (config.train_size, config.test_size, config.step) == (200, 100, 100)
    assert config.train_config.n_trials == 50
    assert config.history == 2


def test_csv_source_defaults(tmp_path):
    config = ExperimentConfig(source="csv", csv_path=tmp_path / "p.csv")
    assert config.tau == 3
    assert config.transform == "normalized_difference"
    assert config.price_statistics is True


@pytest.mark.parametrize(
    "fields",
    [
        {"source": "csv"},
        {"source": "model1", "csv_path": "x.csv"},
        {"m": 0},
        {"m": 2, "tau": 3, "train_size": 4},
        {"test_size": 0},
        {"n_cells": 1},
        {"window": 5},
        {"train_config": {"n_trials": 2, "n_combined": 3}},
    ],
)
def test_invalid_configs(fields):
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(fields)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(broken)

    unknown = tmp_path / "unknown.json"
    unknown.write_text('{"sauce": "model1"}', encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(unknown)


def test_load_config_resolves_csv_relative_to_file(tmp_path, price_csv):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"source": "csv", "csv_path": price_csv.name}), encoding="utf-8")
    config = load_config(path)
    assert config.csv_path == price_csv.resolve()


def test_empty_config_file_takes_defaults(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{}", encoding="utf-8")
    assert load_config(path) == ExperimentConfig()


def test_load_series_transforms_csv(price_csv):
    config = ExperimentConfig(source="csv", csv_path=price_csv)
    assert len(load_series(config)) == 239


# ---------- runs ----------


def test_run_writes_every_artifact(tmp_path, ledger_url):
    out = tmp_path / "run"
    result = run_experiment(tiny(), output_dir=out, ledger_url=ledger_url)

    assert len(result.folds) == 2
    for fold in result.folds:
        assert fold.report.n_1 + fold.report.n_2 == 60
        assert fold.train_patterns == 98

    for name in ("config.json", "folds.csv", "folds.json", "aggregate.csv", "aggregate.json"):
        assert (out / name).exists()
    for tag in ("fold_01", "fold_02"):
        assert (out / "events" / f"{tag}.csv").exists()
        assert (out / "models" / tag / "dual_model.json").exists()

    header = json.loads((out / "config.json").read_text(encoding="utf-8"))
    assert header["dropped_history_patterns"] == 2
    assert [w["test"] for w in header["windows"]] == [[101, 160], [161, 220]]

    folds = pd.read_csv(out / "folds.csv")
    assert folds["fold"].tolist() == [1, 2]

    runs = list_runs(ledger_url)
    assert len(runs) == 1 and runs[0].n_folds == 2


def test_folds_see_only_their_window():
    result = run_experiment(tiny())
    first, second = result.folds
    assert first.window.test == (101, 160)
    assert second.window.train == (61, 160)
    indices = [e.source_index for e in second.events]
    assert indices == list(range(161, 221))


def test_identical_configs_give_identical_aggregates(tmp_path):
    run_experiment(tiny(), output_dir=tmp_path / "a")
    run_experiment(tiny(), output_dir=tmp_path / "b")
    assert (tmp_path / "a" / "aggregate.csv").read_bytes() == (tmp_path / "b" / "aggregate.csv").read_bytes()


def test_parallel_folds_match_sequential():
    sequential = run_experiment(tiny(), workers=1)
    parallel = run_experiment(tiny(), workers=2)
    assert sequential.reports == parallel.reports


def test_no_window_fits(tmp_path):
    with pytest.raises(DataError):
        run_experiment(tiny(series_length=150), output_dir=tmp_path / "none")
    assert not (tmp_path / "none").exists()


def test_csv_run_has_price_statistics(price_csv):
    config = ExperimentConfig(
        source="csv",
        csv_path=price_csv,
        train_size=120,
        test_size=50,
        step=50,
        train_config=TINY_TRAINING,
    )
    result = run_experiment(config)
    assert len(result.folds) == 2
    report = result.reports[0]
    assert report.u_t is not None and report.s_t is not None
    assert report.f_t is None
    assert result.folds[0].train_patterns == 120 - 4


def test_fold_error_names_the_fold(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("\n".join(["1.0"] * 200) + "\n", encoding="utf-8")
    config = ExperimentConfig(
        source="csv", csv_path=path, train_size=100, test_size=50, step=50,
        train_config=TINY_TRAINING,
    )
    with pytest.raises(FoldFailed) as info:
        run_experiment(config, output_dir=tmp_path / "flat")
    assert info.value.fold == 1
    assert info.value.exit_code == 2
    assert not (tmp_path / "flat").exists()
