"""
Multi-step conditional mean and scale forecasts issued at a time index kappa
(the last observed grid point), plus the persistence benchmark.
"""
from abc import ABC, abstractmethod
from typing import NamedTuple, Optional, Tuple

import numpy as np
from pydantic import root_validator

from trig_wind.aparch import aparch_scale_path, asym_power_moment, asymmetric_power
from trig_wind.arfima import filter_to_innovations, forecast_residuals
from trig_wind.estimation import FitResult, fit as fit_model
from trig_wind.ingestion import IndexRange, WindSeries
from trig_wind.models import ConfigError, DataError, FrozenModel
from trig_wind.seasonal import design_matrix

DEFAULT_HORIZON = 18
DEFAULT_MAX_HORIZON = 144
DEFAULT_WINDOW = 220_000


class ForecastPath(FrozenModel):
    origin: int
    horizon: int
    mean: np.ndarray
    scale_delta: np.ndarray

    @root_validator(skip_on_failure=True)
    def _lengths(cls, fields):
        horizon = fields["horizon"]
        if len(fields["mean"]) != horizon or len(fields["scale_delta"]) != horizon:
            raise ValueError("forecast paths must have `horizon` entries")
        if np.any(fields["scale_delta"] <= 0):
            raise ValueError("scale forecasts must be positive")
        return fields


def _check_request(origin: int, horizon: int, length: int, max_horizon: int) -> None:
    if horizon < 1:
        raise ConfigError(error_type="invalid_horizon", message=f"horizon={horizon}")
    if horizon > max_horizon:
        raise ConfigError(
            error_type="horizon_too_long",
            message=f"horizon {horizon} exceeds the maximum of {max_horizon}",
        )
    if not 0 <= origin < length:
        raise DataError(
            error_type="origin_outside_history",
            message=f"origin {origin} not in [0, {length})",
        )


def mean_spec(fit: FitResult):
    return fit.params.seasonal(fit.spec)


def information_set(
    fit: FitResult, history: WindSeries, origin: int, window: int = DEFAULT_WINDOW
) -> Tuple[np.ndarray, np.ndarray]:
    """Residuals and innovations over the trailing window ending at `origin`."""
    start = max(0, origin - window + 1)
    values = np.asarray(history.values[start : origin + 1], dtype=float)
    if np.isnan(values).any():
        raise DataError(
            error_type="unfilled_gaps", message="history has missing values before the origin"
        )
    t = np.arange(start, origin + 1)
    residuals = values - design_matrix(mean_spec(fit), t) @ fit.params.theta
    return residuals, filter_to_innovations(residuals, fit.params.arfima)


def mean_path(fit: FitResult, residuals, innovations, origin: int, horizon: int) -> np.ndarray:
    t = np.arange(origin + 1, origin + horizon + 1)
    deterministic = design_matrix(mean_spec(fit), t) @ fit.params.theta
    return deterministic + forecast_residuals(
        residuals, innovations, fit.params.arfima, horizon
    )


def forecast_mean(
    fit: FitResult,
    history: WindSeries,
    origin: int,
    horizon: int = DEFAULT_HORIZON,
    window: int = DEFAULT_WINDOW,
    max_horizon: int = DEFAULT_MAX_HORIZON,
) -> np.ndarray:
    """W_{kappa+u|kappa}, u = 1..horizon."""
    _check_request(origin, horizon, len(history), max_horizon)
    residuals, innovations = information_set(fit, history, origin, window)
    return mean_path(fit, residuals, innovations, origin, horizon)


def scale_path(fit: FitResult, innovations, horizon: int) -> np.ndarray:
    """
    E[sigma^delta] for the `horizon` steps after the last entry of
    `innovations`. Lags inside the observed past use realised values, later
    ones the expected asymmetric power kappa_l E[sigma^delta].
    """
    aparch, skewt = fit.params.aparch, fit.params.skewt
    innovations = np.asarray(innovations, dtype=float)
    observed_scale = aparch_scale_path(innovations, aparch)
    observed_terms = [
        asymmetric_power(innovations, gamma, aparch.delta) for gamma in aparch.gamma
    ]
    kappas = None
    if horizon > 1:
        kappas = [asym_power_moment(gamma, aparch.delta, skewt) for gamma in aparch.gamma]

    last = innovations.size - 1
    expected = np.empty(horizon)
    for u in range(1, horizon + 1):
        value = aparch.alpha0
        for l, alpha in enumerate(aparch.alpha, start=1):
            if u - l <= 0:
                value += alpha * observed_terms[l - 1][last + u - l]
            else:
                value += alpha * kappas[l - 1] * expected[u - l - 1]
        for m, beta in enumerate(aparch.beta, start=1):
            if u - m <= 0:
                value += beta * observed_scale[last + u - m]
            else:
                value += beta * expected[u - m - 1]
        expected[u - 1] = value
    return expected


def forecast_scale(
    fit: FitResult,
    origin: int,
    horizon: int = DEFAULT_HORIZON,
    history: Optional[WindSeries] = None,
    window: int = DEFAULT_WINDOW,
    max_horizon: int = DEFAULT_MAX_HORIZON,
) -> np.ndarray:
    """
    Without `history` the fitted innovations are used, so `origin` must lie
    inside the estimation window.
    """
    if history is None:
        _check_request(origin - fit.start, horizon, fit.n_obs, max_horizon)
        innovations = fit.innovations[: origin - fit.start + 1]
    else:
        _check_request(origin, horizon, len(history), max_horizon)
        innovations = information_set(fit, history, origin, window)[1]
    return scale_path(fit, innovations, horizon)


def persistence_forecast(history: WindSeries, origin: int, horizon: int = DEFAULT_HORIZON) -> np.ndarray:
    _check_request(origin, horizon, len(history), np.inf)
    return np.full(horizon, history.values[origin])


def forecast(
    fit: FitResult,
    history: WindSeries,
    origin: int,
    horizon: int = DEFAULT_HORIZON,
    window: int = DEFAULT_WINDOW,
    max_horizon: int = DEFAULT_MAX_HORIZON,
) -> ForecastPath:
    _check_request(origin, horizon, len(history), max_horizon)
    residuals, innovations = information_set(fit, history, origin, window)
    return ForecastPath(
        origin=origin,
        horizon=horizon,
        mean=mean_path(fit, residuals, innovations, origin, horizon),
        scale_delta=scale_path(fit, innovations, horizon),
    )


class Forecaster(ABC):
    """A point forecaster scored by the rolling backtest."""

    name: str

    def prepare(self, history: WindSeries) -> None:
        """Hook for work shared by every origin on the same history."""

    def refit(self, history: WindSeries, origin: int) -> "Forecaster":
        """Forecaster re-estimated on data up to `origin`; fixed models return themselves."""
        return self

    @abstractmethod
    def forecast(self, history: WindSeries, origin: int, horizon: int) -> np.ndarray:
        ...


class PersistenceForecaster(Forecaster):
    def __init__(self, name: str = "persistence"):
        self.name = name

    def forecast(self, history, origin, horizon):
        return persistence_forecast(history, origin, horizon)


class OracleForecaster(Forecaster):
    """Returns the realised values; every error metric of it is zero."""

    def __init__(self, name: str = "oracle"):
        self.name = name

    def forecast(self, history, origin, horizon):
        return np.asarray(history.values[origin + 1 : origin + horizon + 1], dtype=float)


class _Prepared(NamedTuple):
    history: WindSeries
    first_gap: int
    residuals: np.ndarray
    innovations: np.ndarray


class FittedModelForecaster(Forecaster):
    """
    Forecasts from fixed fitted parameters. The filter is causal, so one pass
    over the whole history serves every origin inside the first `window`
    points; later origins refilter their trailing window.
    """

    def __init__(
        self,
        fit: FitResult,
        name: Optional[str] = None,
        window: int = DEFAULT_WINDOW,
        max_horizon: int = DEFAULT_MAX_HORIZON,
    ):
        self.fit = fit
        self.name = name or f"model {fit.model.value}"
        self.window = window
        self.max_horizon = max_horizon
        self._prepared: Optional[_Prepared] = None

    def prepare(self, history):
        values = np.asarray(history.values, dtype=float)
        # gaps only matter once an origin reaches them
        values = np.where(np.isnan(values), 0.0, values)
        t = np.arange(values.size)
        residuals = values - design_matrix(mean_spec(self.fit), t) @ self.fit.params.theta
        gaps = np.flatnonzero(np.isnan(history.values))
        # strong reference, compared by identity in forecast
        self._prepared = _Prepared(
            history,
            int(gaps[0]) if gaps.size else values.size,
            residuals,
            filter_to_innovations(residuals, self.fit.params.arfima),
        )

    def forecast(self, history, origin, horizon):
        _check_request(origin, horizon, len(history), self.max_horizon)
        prepared = self._prepared
        if prepared is not None and prepared.history is history and origin < self.window:
            if origin >= prepared.first_gap:
                raise DataError(
                    error_type="unfilled_gaps",
                    message="history has missing values before the origin",
                )
            residuals = prepared.residuals[: origin + 1]
            innovations = prepared.innovations[: origin + 1]
        else:
            residuals, innovations = information_set(self.fit, history, origin, self.window)
        return mean_path(self.fit, residuals, innovations, origin, horizon)

    def refit(self, history, origin):
        refitted = fit_model(
            history,
            self.fit.spec,
            self.fit.orders,
            self.fit.model,
            in_sample=IndexRange(start=0, stop=origin + 1),
            truncation=self.fit.params.arfima.truncation,
            standard_errors=False,
        )
        return FittedModelForecaster(refitted, self.name, self.window, self.max_horizon)
