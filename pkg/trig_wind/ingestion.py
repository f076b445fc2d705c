"""
Station CSV ingestion: parsing onto the regular 10 minute grid, gap filling by
linear interpolation and the in-sample / out-of-sample split.
"""
from datetime import datetime, timedelta
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd
from pydantic import validator, root_validator
from tornado.log import app_log

from trig_wind.models import DataError, FrozenModel, as_float_array

STEP_SECONDS = 600
STEPS_PER_DAY = 144
DEFAULT_MAX_GAP = 36


class Station(FrozenModel):
    name: str
    latitude: float
    longitude: float


STATIONS: Dict[str, Station] = {
    station.name.lower(): station
    for station in (
        Station(name="Manschnow", latitude=52 + 33 / 60, longitude=14 + 32 / 60),
        Station(name="Lindenberg", latitude=52 + 13 / 60, longitude=14 + 7 / 60),
        Station(name="Angermuende", latitude=53 + 2 / 60, longitude=14 + 0 / 60),
        Station(name="Gruenow", latitude=53 + 19 / 60, longitude=13 + 56 / 60),
    )
}


class CsvFormat(FrozenModel):
    """
    Column mapping of a station file. Empty fields and `sentinel` both mark a
    missing speed. An optional `gap_column` of 0/1 flags marks present values
    that were interpolated.
    """

    timestamp_column: str = "timestamp"
    speed_column: str = "speed_ms"
    gap_column: str = "interpolated"
    sentinel: Optional[float] = -999.0
    delimiter: str = ","


def _utc(value) -> datetime:
    stamp = pd.Timestamp(value)
    if stamp.tzinfo is None:
        stamp = stamp.tz_localize("UTC")
    return stamp.tz_convert("UTC").to_pydatetime()


class WindSeries(FrozenModel):
    """
    Wind speed in m/s on a regular grid. Missing points hold NaN until
    `interpolate_gaps` fills them; `gap_mask` keeps marking them afterwards.
    """

    start_timestamp: datetime
    step: timedelta = timedelta(seconds=STEP_SECONDS)
    values: np.ndarray
    gap_mask: np.ndarray
    station: Optional[str] = None

    @validator("start_timestamp", pre=True)
    def _to_utc(cls, value):
        return _utc(value)

    @validator("step")
    def _fixed_step(cls, value):
        if value.total_seconds() <= 0:
            raise ValueError("step must be positive")
        return value

    @validator("values", pre=True)
    def _float_values(cls, value):
        return as_float_array(value, "values")

    @validator("gap_mask", pre=True)
    def _bool_mask(cls, value):
        mask = np.array(value, dtype=bool)
        mask.setflags(write=False)
        return mask

    @root_validator(skip_on_failure=True)
    def _check_values(cls, fields):
        values, mask = fields["values"], fields["gap_mask"]
        if mask.shape != values.shape:
            raise ValueError("gap_mask must have the same length as values")
        if values.size == 0:
            raise ValueError("series is empty")
        present = values[~np.isnan(values)]
        if not np.all(np.isfinite(present)) or np.any(present < 0):
            raise ValueError("values must be finite and non-negative")
        if np.any(np.isnan(values) & ~mask):
            raise ValueError("NaN values must be marked in gap_mask")
        return fields

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def is_filled(self) -> bool:
        return not np.isnan(self.values).any()

    def timestamp_at(self, index: int) -> datetime:
        return self.start_timestamp + index * self.step

    def index_of(self, timestamp) -> float:
        offset = _utc(timestamp) - self.start_timestamp
        return offset / self.step

    def timestamps(self) -> pd.DatetimeIndex:
        return pd.date_range(
            start=self.start_timestamp, periods=len(self), freq=self.step
        )

    def to_pandas(self) -> pd.Series:
        return pd.Series(self.values, index=self.timestamps(), name="speed_ms")

    def slice(self, start: int, stop: int) -> "WindSeries":
        return WindSeries(
            start_timestamp=self.timestamp_at(start),
            step=self.step,
            values=self.values[start:stop],
            gap_mask=self.gap_mask[start:stop],
            station=self.station,
        )


class IndexRange(FrozenModel):
    start: int
    stop: int

    @root_validator(skip_on_failure=True)
    def _ordered(cls, fields):
        if not 0 <= fields["start"] <= fields["stop"]:
            raise ValueError("invalid index range")
        return fields

    def __len__(self) -> int:
        return self.stop - self.start

    def to_slice(self) -> slice:
        return slice(self.start, self.stop)


class SampleSplit(FrozenModel):
    in_sample: IndexRange
    out_sample: IndexRange

    @root_validator(skip_on_failure=True)
    def _contiguous(cls, fields):
        if fields["in_sample"].stop != fields["out_sample"].start:
            raise ValueError("in_sample must end where out_sample starts")
        return fields


def day_of(t: int) -> int:
    """Day index r (1-based) of the 0-based grid index t."""
    return t // STEPS_PER_DAY + 1


def slot_of(t: int) -> int:
    """Intraday index o in 1..144 of the 0-based grid index t."""
    return t % STEPS_PER_DAY + 1


def _line(position: int) -> int:
    # header is line 1
    return int(position) + 2


def parse_station_csv(
    path, csv_format: CsvFormat = CsvFormat(), station: Optional[str] = None
) -> WindSeries:
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            sep=csv_format.delimiter,
            skipinitialspace=True,
        )
    except FileNotFoundError as e:
        raise DataError(error_type="missing_file", message=str(path)) from e
    except pd.errors.EmptyDataError as e:
        raise DataError(error_type="empty_file", message=str(path)) from e
    except pd.errors.ParserError as e:
        raise DataError(error_type="malformed_row", message=f"{path}: {e}") from e

    for column in (csv_format.timestamp_column, csv_format.speed_column):
        if column not in frame.columns:
            raise DataError(
                error_type="missing_column", message=f"{path}: no column {column}"
            )
    if frame.empty:
        raise DataError(error_type="empty_file", message=str(path))

    stamps = pd.to_datetime(
        frame[csv_format.timestamp_column].str.strip(),
        utc=True,
        errors="coerce",
        format="ISO8601",
    )
    bad_stamps = np.flatnonzero(stamps.isna().to_numpy())
    if bad_stamps.size:
        raise DataError(
            error_type="malformed_row",
            message=f"{path}: unparseable timestamp on line {_line(bad_stamps[0])}",
        )

    raw = frame[csv_format.speed_column].str.strip()
    speeds = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
    empty = (raw == "").to_numpy()
    bad_speeds = np.flatnonzero(np.isnan(speeds) & ~empty)
    if bad_speeds.size:
        raise DataError(
            error_type="malformed_row",
            message=f"{path}: non-numeric speed on line {_line(bad_speeds[0])}",
        )
    missing = empty.copy()
    if csv_format.sentinel is not None:
        missing |= speeds == csv_format.sentinel
    negative = np.flatnonzero((speeds < 0) & ~missing)
    if negative.size:
        raise DataError(
            error_type="malformed_row",
            message=f"{path}: negative speed on line {_line(negative[0])}",
        )
    speeds[missing] = np.nan

    nanos = (
        stamps.dt.tz_localize(None).to_numpy().astype("datetime64[ns]").astype("int64")
    )
    deltas = np.diff(nanos)
    duplicates = np.flatnonzero(deltas == 0)
    if duplicates.size:
        raise DataError(
            error_type="duplicate_timestamp",
            message=f"{path}: duplicate timestamp on line {_line(duplicates[0] + 1)}",
        )
    backwards = np.flatnonzero(deltas < 0)
    if backwards.size:
        raise DataError(
            error_type="non_monotone_timestamp",
            message=f"{path}: timestamp goes backwards on line {_line(backwards[0] + 1)}",
        )

    step_nanos = STEP_SECONDS * 10 ** 9
    offsets = nanos - nanos[0]
    off_grid = np.flatnonzero(offsets % step_nanos)
    if off_grid.size:
        raise DataError(
            error_type="malformed_row",
            message=f"{path}: timestamp off the 10 minute grid on line {_line(off_grid[0])}",
        )

    positions = offsets // step_nanos
    values = np.full(int(positions[-1]) + 1, np.nan)
    values[positions] = speeds
    gap_mask = np.isnan(values)
    if csv_format.gap_column in frame.columns:
        flags = frame[csv_format.gap_column].str.strip()
        bad_flags = np.flatnonzero(~flags.isin(("", "0", "1")).to_numpy())
        if bad_flags.size:
            raise DataError(
                error_type="malformed_row",
                message=f"{path}: gap flag must be 0 or 1 on line {_line(bad_flags[0])}",
            )
        gap_mask[positions[(flags == "1").to_numpy()]] = True
    app_log.info(
        "parsed %s: %d rows, %d grid points, %d missing",
        path,
        len(frame),
        values.size,
        int(gap_mask.sum()),
    )
    return WindSeries(
        start_timestamp=stamps.iloc[0],
        values=values,
        gap_mask=gap_mask,
        station=station,
    )


def _gap_runs(mask: np.ndarray):
    padded = np.concatenate(([False], mask, [False])).astype(int)
    edges = np.diff(padded)
    return np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)


def interpolate_gaps(series: WindSeries, max_gap: int = DEFAULT_MAX_GAP) -> WindSeries:
    """
    Fill every gap by linear interpolation between its nearest present
    neighbours. Points flagged in `gap_mask` are never used as anchors, so the
    operation is idempotent.
    """
    mask = series.gap_mask
    if not mask.any():
        return series
    if mask[0]:
        raise DataError(error_type="leading_gap", message="series starts with a gap")
    if mask[-1]:
        raise DataError(error_type="trailing_gap", message="series ends with a gap")

    starts, stops = _gap_runs(mask)
    lengths = stops - starts
    longest = int(lengths.max())
    if longest > max_gap:
        where = int(starts[np.argmax(lengths)])
        raise DataError(
            error_type="gap_too_long",
            message=(
                f"gap of {longest} steps at {series.timestamp_at(where).isoformat()}"
                f" exceeds the maximum of {max_gap}"
            ),
        )

    index = np.arange(len(series))
    values = series.values.copy()
    values[mask] = np.interp(index[mask], index[~mask], series.values[~mask])
    app_log.info("interpolated %d points in %d gaps", int(mask.sum()), starts.size)
    return WindSeries(
        start_timestamp=series.start_timestamp,
        step=series.step,
        values=values,
        gap_mask=mask,
        station=series.station,
    )


def split(series: WindSeries, boundary: Union[datetime, str]) -> SampleSplit:
    """In-sample covers [start, boundary), out-of-sample [boundary, end]."""
    position = series.index_of(boundary)
    index = int(np.ceil(position))
    if not 0 < index < len(series):
        raise DataError(
            error_type="boundary_outside_series",
            message=f"split boundary {boundary} is not strictly inside the series",
        )
    return SampleSplit(
        in_sample=IndexRange(start=0, stop=index),
        out_sample=IndexRange(start=index, stop=len(series)),
    )


def split_fraction(series: WindSeries, fraction: float) -> SampleSplit:
    if not 0 < fraction < 1:
        raise DataError(error_type="invalid_fraction", message=str(fraction))
    return split(series, series.timestamp_at(int(round(fraction * len(series)))))


def write_station_csv(
    series: WindSeries, path, csv_format: CsvFormat = CsvFormat()
) -> None:
    """Interpolated points, if any, are flagged in `csv_format.gap_column`."""
    frame = pd.DataFrame(
        {
            csv_format.timestamp_column: series.timestamps().strftime(
                "%Y-%m-%dT%H:%M:%SZ"
            ),
            csv_format.speed_column: series.values,
        }
    )
    if np.any(series.gap_mask & ~np.isnan(series.values)):
        frame[csv_format.gap_column] = series.gap_mask.astype(int)
    frame.to_csv(
        path,
        index=False,
        sep=csv_format.delimiter,
        float_format="%.17g",
        na_rep="",
    )
