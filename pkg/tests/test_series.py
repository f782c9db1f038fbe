import numpy as np
import pytest

from foresight.core.errors import CsvFormatError, DegenerateDifference, SeriesTooShort
from foresight.core.series import (
    Predictability,
    TimeSeries,
    embed,
    latest_delay_vector,
    min_length,
    normalized_difference,
    read_series_csv,
    rolling_windows,
    write_series_csv,
)


def test_embed_unit_lag():
    ds = embed(TimeSeries([1.0, 2.0, 3.0, 4.0, 5.0]), m=2, tau=1)
    assert ds.inputs.tolist() == [[2, 1], [3, 2], [4, 3]]
    assert ds.targets.tolist() == [3, 4, 5]
    assert ds.source_indices.tolist() == [3, 4, 5]


def test_embed_lag_three():
    ds = embed(TimeSeries(np.arange(1.0, 7.0)), m=2, tau=3)
    assert ds.inputs.tolist() == [[4, 1], [5, 2]]
    assert ds.targets.tolist() == [5, 6]
    assert ds.source_indices.tolist() == [5, 6]


def test_embed_single_input():
    ds = embed(TimeSeries([1.0, 2.0, 3.0]), m=1, tau=1)
    assert ds.inputs.tolist() == [[1], [2]]
    assert ds.targets.tolist() == [2, 3]


def test_embed_too_short():
    with pytest.raises(SeriesTooShort) as info:
        embed(TimeSeries([1.0, 2.0, 3.0]), m=2, tau=3)
    assert info.value.required == min_length(2, 3) == 5


def test_embed_carries_target_labels(model1_series):
    ds = embed(model1_series, 2, 1)
    assert ds.labels == model1_series.labels[2:]
    assert ds.source_positions_valid(model1_series)


def test_dataset_arrays_are_read_only(model1_dataset):
    with pytest.raises(ValueError):
        model1_dataset.targets[0] = 1.0


def test_normalized_difference():
    out = normalized_difference(TimeSeries([100.0, 110.0])).values
    assert out[0] == pytest.approx(2 * 10 / 210, abs=1e-15)
    assert normalized_difference(TimeSeries([5.0, 5.0, 5.0])).values.tolist() == [0.0, 0.0]


def test_normalized_difference_zero_denominator():
    with pytest.raises(DegenerateDifference) as info:
        normalized_difference(TimeSeries([3.0, 1.0, -1.0, 4.0]))
    assert info.value.index == 3
    with pytest.raises(DegenerateDifference):
        normalized_difference(TimeSeries([1.0, -1.0]))


def test_normalized_difference_drops_labels():
    labelled = TimeSeries([1.0, 2.0, 4.0], labels=(Predictability.LESS,) * 3)
    assert normalized_difference(labelled).labels is None


@pytest.mark.parametrize(
    "length, expected",
    [(300, 1), (299, 0), (1200, 10), (1211, 10)],
)
def test_rolling_window_count(length, expected):
    assert len(rolling_windows(length, 200, 100, 100)) == expected


def test_rolling_window_ranges():
    windows = rolling_windows(1200, 200, 100, 100)
    assert windows[0].train == (1, 200) and windows[0].test == (201, 300)
    assert windows[-1].train == (901, 1100) and windows[-1].test == (1101, 1200)
    for w in windows:
        assert w.train[1] < w.test[0]


def test_rolling_window_bad_step():
    with pytest.raises(ValueError):
        rolling_windows(1200, 200, 100, 0)


def test_select_window_causal_cut():
    ds = embed(TimeSeries(np.arange(1.0, 21.0)), m=2, tau=3)
    train = ds.select_window(1, 10, causal=True)
    assert train.source_indices.tolist() == [5, 6, 7, 8, 9, 10]
    test = ds.select_window(11, 20, causal=False)
    assert test.source_indices.tolist() == list(range(11, 21))
    # test inputs may reach back before the window
    assert test.inputs[0].tolist() == [10.0, 7.0]


def test_default_window_pattern_counts():
    ds = embed(TimeSeries(np.arange(300.0)), m=2, tau=1)
    assert len(ds.select_window(1, 200, causal=True)) == 198
    assert len(ds.select_window(201, 300, causal=False)) == 100


def test_latest_delay_vector():
    series = TimeSeries(np.arange(1.0, 7.0))
    assert latest_delay_vector(series, 2, 3).tolist() == [6.0, 3.0]
    assert latest_delay_vector(series, 3, 1).tolist() == [6.0, 5.0, 4.0]


# ---------- CSV ----------


def test_read_single_column_with_blank_lines(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("1.5\n\n2.5\n3\n", encoding="utf-8")
    assert read_series_csv(path).values.tolist() == [1.5, 2.5, 3.0]


def test_read_date_value(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("2021-01-01,10\n2021-01-02,11.5\n", encoding="utf-8")
    series = read_series_csv(path)
    assert series.values.tolist() == [10.0, 11.5]
    assert series.labels is None


def test_read_unnamed_header(price_csv):
    assert len(read_series_csv(price_csv)) == 240


def test_read_reports_line_number(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("price\n1\n2\nabc\n", encoding="utf-8")
    with pytest.raises(CsvFormatError) as info:
        read_series_csv(path)
    assert info.value.line == 4


def test_read_empty_file(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("\n\n", encoding="utf-8")
    with pytest.raises(CsvFormatError):
        read_series_csv(path)


def test_written_series_reads_back_with_labels(tmp_path, model1_series):
    path = tmp_path / "model1.csv"
    write_series_csv(model1_series, path)
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == "index,value,label"

    back = read_series_csv(path)
    assert np.array_equal(back.values, model1_series.values)
    assert back.labels == model1_series.labels
    assert back.labels[0] == Predictability.UNDEFINED


def test_read_ignores_byte_order_mark(tmp_path):
    path = tmp_path / "excel.csv"
    path.write_bytes(b"\xef\xbb\xbf1.5\n2.5\n3.5\n")
    assert read_series_csv(path).values.tolist() == [1.5, 2.5, 3.5]


def test_read_byte_order_mark_before_header(tmp_path):
    path = tmp_path / "excel.csv"
    path.write_bytes(b"\xef\xbb\xbfdate,value\n2021-01-01,10\n2021-02-01,12\n")
    assert read_series_csv(path).values.tolist() == [10.0, 12.0]


def test_read_non_finite_first_row_is_not_a_header(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("nan\n1.0\n", encoding="utf-8")
    with pytest.raises(CsvFormatError) as info:
        read_series_csv(path)
    assert info.value.line == 1


def test_read_invalid_utf8_reports_line(tmp_path):
    path = tmp_path / "s.csv"
    path.write_bytes(b"1.0\n2.0\n\xff\xfe3.0\n")
    with pytest.raises(CsvFormatError) as info:
        read_series_csv(path)
    assert info.value.line == 3
    assert info.value.detail == "invalid UTF-8"


# ---------- properties ----------


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_normalized_difference_of_positive_series_is_bounded(seed):
    rng = np.random.default_rng(seed)
    prices = rng.lognormal(mean=0.0, sigma=3.0, size=500)
    out = normalized_difference(TimeSeries(prices)).values
    assert np.all(out > -2.0) and np.all(out < 2.0)


@pytest.mark.parametrize("length, train_size, test_size", [(1200, 200, 100), (777, 50, 30), (90, 10, 7)])
def test_test_ranges_tile_when_step_equals_test_size(length, train_size, test_size):
    windows = rolling_windows(length, train_size, test_size, test_size)
    assert windows
    for earlier, later in zip(windows, windows[1:]):
        assert later.test[0] == earlier.test[1] + 1
    assert windows[0].test[0] == train_size + 1
    for w in windows:
        assert 1 <= w.train[0] and w.test[1] <= length


@pytest.mark.parametrize("m, tau", [(1, 1), (2, 1), (2, 3), (4, 2)])
def test_source_positions_recover_targets(m, tau):
    series = TimeSeries(np.random.default_rng(m * 10 + tau).normal(size=120))
    ds = embed(series, m, tau)
    assert ds.source_positions_valid(series)
    assert ds.take(range(0, len(ds), 3)).source_positions_valid(series)
    assert ds.select_window(30, 80, causal=True).source_positions_valid(series)


def test_source_positions_detect_a_shifted_series():
    series = TimeSeries(np.arange(1.0, 41.0))
    ds = embed(series, 2, 1)
    assert not ds.source_positions_valid(TimeSeries(np.arange(0.0, 40.0)))
