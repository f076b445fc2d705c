from datetime import datetime, timezone

import numpy as np
import pytest

from trig_wind.ingestion import (
    CsvFormat,
    STATIONS,
    WindSeries,
    day_of,
    interpolate_gaps,
    parse_station_csv,
    slot_of,
    split,
    split_fraction,
    write_station_csv,
)
from trig_wind.models import DataError
from tests import grid_rows, write_rows


@pytest.fixture
def station_file(tmp_path):
    return write_rows(tmp_path / "station.csv", grid_rows([3.0, 4.5, None, 6.0, -999, 5.0]))


def test_parse_station_csv_marks_gaps(station_file):
    series = parse_station_csv(station_file, station="manschnow")
    assert len(series) == 6
    assert series.station == "manschnow"
    assert series.start_timestamp == datetime(2010, 1, 1, tzinfo=timezone.utc)
    assert series.gap_mask.tolist() == [False, False, True, False, True, False]
    assert np.isnan(series.values[2]) and np.isnan(series.values[4])
    assert not series.is_filled


def test_missing_rows_become_gaps(tmp_path):
    path = write_rows(
        tmp_path / "station.csv",
        ["2010-01-01T00:00:00Z,3.0", "2010-01-01T00:30:00Z,4.0"],
    )
    series = parse_station_csv(path)
    assert len(series) == 4
    assert series.gap_mask.tolist() == [False, True, True, False]


def test_custom_csv_format(tmp_path):
    path = tmp_path / "station.csv"
    path.write_text("time;ff\n2010-01-01T00:00:00Z;3.0\n2010-01-01T00:10:00Z;9999\n2010-01-01T00:20:00Z;5.0\n")
    csv_format = CsvFormat(timestamp_column="time", speed_column="ff", sentinel=9999, delimiter=";")
    series = parse_station_csv(path, csv_format)
    assert series.gap_mask.tolist() == [False, True, False]


error_cases = [
    (["2010-01-01T00:00:00Z,3.0", "2010-01-01T00:00:00Z,4.0"], "duplicate_timestamp"),
    (["2010-01-01T00:10:00Z,3.0", "2010-01-01T00:00:00Z,4.0"], "non_monotone_timestamp"),
    (["2010-01-01T00:00:00Z,3.0", "2010-01-01T00:05:00Z,4.0"], "malformed_row"),
    (["2010-01-01T00:00:00Z,3.0", "2010-01-01T00:10:00Z,fast"], "malformed_row"),
    (["2010-01-01T00:00:00Z,3.0", "yesterday,4.0"], "malformed_row"),
    (["2010-01-01T00:00:00Z,-2.0"], "malformed_row"),
    ([], "empty_file"),
]


@pytest.mark.parametrize("rows,error_type", error_cases)
def test_parse_errors(tmp_path, rows, error_type):
    path = write_rows(tmp_path / "station.csv", rows)
    with pytest.raises(DataError) as error:
        parse_station_csv(path)
    assert error.value.type == error_type
    assert error.value.exit_code == 2


def test_missing_file(tmp_path):
    with pytest.raises(DataError) as error:
        parse_station_csv(tmp_path / "absent.csv")
    assert error.value.type == "missing_file"


def test_missing_column(tmp_path):
    path = write_rows(tmp_path / "station.csv", ["2010-01-01T00:00:00Z,3.0"], header="timestamp,ff")
    with pytest.raises(DataError) as error:
        parse_station_csv(path)
    assert error.value.type == "missing_column"


def test_interpolate_gaps_is_linear(station_file):
    series = interpolate_gaps(parse_station_csv(station_file))
    assert series.is_filled
    np.testing.assert_allclose(series.values, [3.0, 4.5, 5.25, 6.0, 5.5, 5.0])
    assert series.gap_mask.tolist() == [False, False, True, False, True, False]


def test_interpolate_gaps_is_idempotent(station_file):
    once = interpolate_gaps(parse_station_csv(station_file))
    twice = interpolate_gaps(once)
    np.testing.assert_array_equal(once.values, twice.values)


def _series(values):
    values = np.array(values, dtype=float)
    return WindSeries(
        start_timestamp="2010-01-01T00:00:00Z", values=values, gap_mask=np.isnan(values)
    )


@pytest.mark.parametrize(
    "values,error_type",
    [
        ([np.nan, 1.0, 2.0], "leading_gap"),
        ([1.0, 2.0, np.nan], "trailing_gap"),
        ([1.0, np.nan, np.nan, np.nan, 2.0], "gap_too_long"),
    ],
)
def test_interpolate_gap_errors(values, error_type):
    with pytest.raises(DataError) as error:
        interpolate_gaps(_series(values), max_gap=2)
    assert error.value.type == error_type


def test_series_rejects_negative_values():
    with pytest.raises(ValueError):
        _series([1.0, -0.5])


def test_split_by_timestamp():
    series = _series(np.arange(10.0))
    sample = split(series, "2010-01-01T00:40:00Z")
    assert (sample.in_sample.start, sample.in_sample.stop) == (0, 4)
    assert (sample.out_sample.start, sample.out_sample.stop) == (4, 10)
    np.testing.assert_array_equal(series.values[sample.in_sample.to_slice()], [0, 1, 2, 3])


@pytest.mark.parametrize("boundary", ["2010-01-01T00:00:00Z", "2010-01-02T00:00:00Z"])
def test_split_outside_series(boundary):
    with pytest.raises(DataError) as error:
        split(_series(np.arange(10.0)), boundary)
    assert error.value.type == "boundary_outside_series"


def test_split_fraction():
    sample = split_fraction(_series(np.arange(10.0)), 0.8)
    assert sample.in_sample.stop == 8
    assert len(sample.out_sample) == 2


def test_write_station_csv_round_trip(tmp_path):
    series = _series([3.0, 0.1 + 0.2, np.nan, 7.25])
    path = tmp_path / "out.csv"
    write_station_csv(series, path)
    parsed = parse_station_csv(path)
    assert parsed.start_timestamp == series.start_timestamp
    np.testing.assert_array_equal(parsed.gap_mask, series.gap_mask)
    assert parsed.values[1] == 0.1 + 0.2


def test_calendar_helpers():
    assert day_of(0) == 1 and slot_of(0) == 1
    assert day_of(143) == 1 and slot_of(143) == 144
    assert day_of(144) == 2 and slot_of(144) == 1


def test_station_registry():
    assert set(STATIONS) == {"manschnow", "lindenberg", "angermuende", "gruenow"}
    assert STATIONS["manschnow"].latitude == pytest.approx(52.55)


def test_timestamps_and_pandas_view():
    series = _series([1.0, 2.0, 3.0])
    frame = series.to_pandas()
    assert frame.index[1] - frame.index[0] == np.timedelta64(10, "m")
    assert series.index_of("2010-01-01T00:20:00Z") == 2.0


def test_ragged_row_is_malformed(tmp_path):
    path = write_rows(
        tmp_path / "station.csv",
        ["2010-01-01T00:00:00Z,3.5", "2010-01-01T00:10:00Z,4.0,extra,fields"],
    )
    with pytest.raises(DataError) as error:
        parse_station_csv(path)
    assert error.value.type == "malformed_row"
    assert error.value.exit_code == 2
    assert "line 3" in error.value.message


def test_round_trip_keeps_interpolated_flags(station_file, tmp_path):
    filled = interpolate_gaps(parse_station_csv(station_file))
    path = tmp_path / "filled.csv"
    write_station_csv(filled, path)
    assert path.read_text().splitlines()[0] == "timestamp,speed_ms,interpolated"
    parsed = parse_station_csv(path)
    assert parsed.is_filled
    np.testing.assert_array_equal(parsed.values, filled.values)
    assert parsed.gap_mask.tolist() == [False, False, True, False, True, False]


def test_uninterpolated_series_writes_input_layout(tmp_path):
    path = tmp_path / "out.csv"
    write_station_csv(_series([1.0, np.nan, 2.0]), path)
    assert path.read_text().splitlines()[0] == "timestamp,speed_ms"


def test_bad_gap_flag(tmp_path):
    path = write_rows(
        tmp_path / "station.csv",
        ["2010-01-01T00:00:00Z,3.5,0", "2010-01-01T00:10:00Z,4.0,yes"],
        header="timestamp,speed_ms,interpolated",
    )
    with pytest.raises(DataError) as error:
        parse_station_csv(path)
    assert error.value.type == "malformed_row"
