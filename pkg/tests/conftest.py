import logging

import numpy as np
import pytest

from foresight.core.dual import fit_dual
from foresight.core.generators import generate_model1
from foresight.core.series import TimeSeries, embed
from foresight.core.training import TrainConfig


@pytest.fixture(autouse=True)
def _propagate_foresight_logs():
    # the CLI detaches the package logger from root; caplog listens on root
    yield
    logging.getLogger("foresight").propagate = True


@pytest.fixture
def tiny_config() -> TrainConfig:
    return TrainConfig(n_trials=4, n_combined=2, max_simplex_iterations=150, seed=3)


@pytest.fixture
def model1_series() -> TimeSeries:
    return generate_model1(160, seed=11)


@pytest.fixture
def model1_dataset(model1_series):
    return embed(model1_series, 2, 1)


@pytest.fixture
def train_test(model1_dataset):
    train = model1_dataset.select_window(1, 100, causal=True)
    test = model1_dataset.select_window(101, 160, causal=False)
    return train, test


@pytest.fixture
def fitted_dual(train_test, tiny_config):
    train, _ = train_test
    return fit_dual(train, tiny_config, n_cells=2)


@pytest.fixture
def price_csv(tmp_path):
    """Positive random-walk prices with a date column."""
    rng = np.random.default_rng(42)
    prices = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.01, size=240)))
    path = tmp_path / "prices.csv"
    lines = ["date,close"] + [f"2020-01-{k:04d},{float(p)!r}" for k, p in enumerate(prices, 1)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def ledger_url(tmp_path) -> str:
    return f"sqlite:///{tmp_path / 'ledger.db'}"
