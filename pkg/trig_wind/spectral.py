"""
Periodogram estimation and period selection.

Frequencies are in cycles per 10 minute step. The day therefore sits at
1/144 and the year at 1/52560; some printed sources swap the labels of the two
peaks, the numbers used here follow the sampling cadence.
"""
from typing import List

import numpy as np
import pandas as pd
from pydantic import root_validator
from scipy.signal import find_peaks

from trig_wind.models import ConfigError, DataError, FrozenModel, as_float_array

MIN_LENGTH = 16
DEFAULT_BANDWIDTH = 11
PERIOD_DAY = 144
PERIOD_YEAR = 52560


class Periodogram(FrozenModel):
    frequencies: np.ndarray
    power: np.ndarray
    n_obs: int

    @root_validator(pre=True)
    def _arrays(cls, fields):
        fields["frequencies"] = as_float_array(fields["frequencies"], "frequencies")
        fields["power"] = as_float_array(fields["power"], "power")
        return fields

    @root_validator(skip_on_failure=True)
    def _check(cls, fields):
        frequencies, power = fields["frequencies"], fields["power"]
        if frequencies.shape != power.shape:
            raise ValueError("frequencies and power differ in length")
        if np.any(np.diff(frequencies) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if frequencies.size and (frequencies[0] <= 0 or frequencies[-1] > 0.5):
            raise ValueError("frequencies must lie in (0, 0.5]")
        if not np.all(np.isfinite(power)) or np.any(power < 0):
            raise ValueError("power must be finite and non-negative")
        return fields

    def __len__(self) -> int:
        return int(self.frequencies.size)

    def total_variance(self) -> float:
        """
        Parseval sum over the two-sided Fourier grid: interior bins count twice,
        the Nyquist bin once.
        """
        spacing = 2 * np.pi * self.frequencies[0]
        weights = np.full(len(self), 2.0)
        if np.isclose(self.frequencies[-1], 0.5):
            weights[-1] = 1.0
        return float(np.sum(weights * self.power) * spacing)


class PeriodSet(FrozenModel):
    """Detected periods in steps, strictly decreasing, with their spectral power."""

    periods: np.ndarray
    strengths: np.ndarray

    @root_validator(pre=True)
    def _arrays(cls, fields):
        periods = as_float_array(fields.get("periods", []), "periods")
        strengths = fields.get("strengths")
        strengths = (
            np.ones_like(periods)
            if strengths is None
            else as_float_array(strengths, "strengths")
        )
        fields["periods"], fields["strengths"] = periods, strengths
        return fields

    @root_validator(skip_on_failure=True)
    def _check(cls, fields):
        periods, strengths = fields["periods"], fields["strengths"]
        if periods.shape != strengths.shape:
            raise ValueError("periods and strengths differ in length")
        if np.any(np.diff(periods) >= 0):
            raise ValueError("periods must be strictly decreasing")
        if np.any(periods <= 1):
            raise ValueError("periods must exceed one step")
        return fields

    def __len__(self) -> int:
        return int(self.periods.size)

    def ranked(self) -> List[float]:
        """Periods ordered by spectral power, strongest first."""
        order = np.argsort(-self.strengths, kind="stable")
        return [float(period) for period in self.periods[order]]


def _next_power_of_two(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def periodogram(series) -> Periodogram:
    """
    Raw periodogram I(w_k) = |DFT_k|^2 / (2 pi n) of the demeaned series. Lengths
    that are not a power of two are zero-padded; the power keeps the 1/n
    normalisation of the original length, so the Parseval sum uses the padded
    frequency spacing.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < MIN_LENGTH:
        raise DataError(
            error_type="insufficient_data",
            message=f"periodogram needs at least {MIN_LENGTH} points, got {n}",
        )
    x = x - x.mean()
    if np.allclose(x, 0.0):
        raise DataError(error_type="zero_variance", message="series is constant")

    padded = _next_power_of_two(n)
    spectrum = np.fft.rfft(x, n=padded)
    power = np.abs(spectrum[1:]) ** 2 / (2 * np.pi * n)
    frequencies = np.arange(1, padded // 2 + 1) / padded
    return Periodogram(frequencies=frequencies, power=power, n_obs=n)


def smooth(pg: Periodogram, bandwidth: int = DEFAULT_BANDWIDTH) -> Periodogram:
    """
    Daniell (moving average) smoothing. Windows are truncated at both ends and
    renormalised by the number of bins they cover.
    """
    if bandwidth < 1 or bandwidth % 2 == 0:
        raise ConfigError(
            error_type="even_bandwidth",
            message=f"bandwidth must be an odd number >= 1, got {bandwidth}",
        )
    if bandwidth >= len(pg):
        raise ConfigError(
            error_type="bandwidth_too_wide",
            message=f"bandwidth {bandwidth} >= {len(pg)} frequencies",
        )
    if bandwidth == 1:
        return pg
    window = np.ones(bandwidth)
    total = np.convolve(pg.power, window, mode="same")
    counts = np.convolve(np.ones(len(pg)), window, mode="same")
    return Periodogram(
        frequencies=pg.frequencies, power=total / counts, n_obs=pg.n_obs
    )


def detect_peaks(pg: Periodogram, max_period: float, top_k: int) -> PeriodSet:
    """
    Up to `top_k` local maxima of the spectrum whose period does not exceed
    `max_period`. Longer cycles cannot be identified from the sample and are
    dropped before ranking.
    """
    if top_k < 1:
        raise ConfigError(error_type="invalid_top_k", message=str(top_k))
    peaks, _ = find_peaks(pg.power)
    periods = 1.0 / pg.frequencies[peaks]
    keep = periods <= max_period
    peaks, periods = peaks[keep], periods[keep]
    if peaks.size == 0:
        return PeriodSet(periods=[], strengths=[])

    ranked = np.argsort(-pg.power[peaks], kind="stable")[:top_k]
    chosen_periods = periods[ranked]
    chosen_power = pg.power[peaks][ranked]
    order = np.argsort(-chosen_periods)
    return PeriodSet(periods=chosen_periods[order], strengths=chosen_power[order])


def default_periods() -> PeriodSet:
    """Year, half-year, day and half-day, in steps."""
    return PeriodSet(
        periods=[PERIOD_YEAR, PERIOD_YEAR / 2, PERIOD_DAY, PERIOD_DAY / 2],
        strengths=[4.0, 3.0, 2.0, 1.0],
    )


def write_spectrum_csv(pg: Periodogram, path) -> None:
    pd.DataFrame({"frequency": pg.frequencies, "power": pg.power}).to_csv(
        path, index=False, float_format="%.17g"
    )
