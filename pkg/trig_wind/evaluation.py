"""
Forecast accuracy: turbine power curves, the power curve error (PCE), RMSE and
MAE, and the rolling-origin backtest that scores every forecaster at the
same randomly drawn origins.
"""
import calendar
import json
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import root_validator, validator
from tornado import gen
from tornado.ioloop import IOLoop
from tornado.log import app_log

from trig_wind.forecast import DEFAULT_HORIZON, Forecaster
from trig_wind.ingestion import SampleSplit, WindSeries
from trig_wind.models import ConfigError, DataError, FrozenModel

DEFAULT_TAUS = (0.25, 0.5, 0.75)
DEFAULT_N_ORIGINS = 5000
MONTHS = tuple(calendar.month_name[1:])
TOTAL = "Total"


class PowerCurve(FrozenModel):
    """
    Four-zone turbine curve in kW. Without `cp` the cubic ramp is calibrated
    to reach `rated_power` exactly at `rated_speed`.
    """

    name: str = "custom"
    cut_in: float
    rated_speed: float
    cut_out: float
    rated_power: float
    cp: Optional[float] = None
    rho: float = 1.25
    rotor_area: float

    @root_validator(skip_on_failure=True)
    def _zones(cls, fields):
        if not 0 < fields["cut_in"] < fields["rated_speed"] < fields["cut_out"]:
            raise ValueError("need 0 < cut_in < rated_speed < cut_out")
        if fields["rated_power"] <= 0 or fields["rotor_area"] <= 0 or fields["rho"] <= 0:
            raise ValueError("rated_power, rotor_area and rho must be positive")
        return fields

    @validator("cp")
    def _efficiency(cls, value):
        if value is not None and not 0 < value <= 1:
            raise ValueError("cp must lie in (0, 1]")
        return value

    @property
    def calibrated_cp(self) -> float:
        """C_p for which 1/2 C_p rho A v^3 equals rated_power at rated_speed."""
        return self.rated_power * 1000.0 / (0.5 * self.rho * self.rotor_area * self.rated_speed ** 3)

    @property
    def efficiency(self) -> float:
        return self.cp if self.cp is not None else self.calibrated_cp


def _rotor_area(diameter: float) -> float:
    return math.pi * (diameter / 2.0) ** 2


# the GE curve is an illustrative alternative; its zones are not from a fit
POWER_CURVES: Dict[str, PowerCurve] = {
    "fuhrlaender_md77": PowerCurve(
        name="fuhrlaender_md77",
        cut_in=3.0,
        rated_speed=13.0,
        cut_out=20.0,
        rated_power=1500.0,
        rotor_area=_rotor_area(77.0),
    ),
    "ge_1_6": PowerCurve(
        name="ge_1_6",
        cut_in=3.5,
        rated_speed=12.0,
        cut_out=25.0,
        rated_power=1600.0,
        rotor_area=_rotor_area(82.5),
    ),
}


def power_curve(name: str) -> PowerCurve:
    try:
        return POWER_CURVES[name]
    except KeyError:
        raise ConfigError(
            error_type="unknown_power_curve",
            message=f"{name}; choose one of {', '.join(sorted(POWER_CURVES))}",
        )


def power_output(speed, curve: PowerCurve = POWER_CURVES["fuhrlaender_md77"]):
    speed = np.asarray(speed, dtype=float)
    if np.any(speed < 0):
        raise DataError(error_type="negative_speed", message="wind speed must be >= 0")
    ramp = np.minimum(
        0.5 * curve.efficiency * curve.rho * curve.rotor_area * speed ** 3 / 1000.0,
        curve.rated_power,
    )
    power = np.select(
        [speed < curve.cut_in, speed < curve.rated_speed, speed < curve.cut_out],
        [0.0, ramp, curve.rated_power],
        default=0.0,
    )
    return power if power.ndim else float(power)


def _power_gap(actual, forecast, curve: PowerCurve):
    # a forecast below zero speed produces no power
    return power_output(actual, curve) - power_output(np.maximum(forecast, 0.0), curve)


def _check_tau(tau: float) -> None:
    if not 0 <= tau <= 1:
        raise ConfigError(error_type="invalid_tau", message=f"tau={tau} outside [0, 1]")


def pce_loss(actual, forecast, tau: float, curve: PowerCurve = POWER_CURVES["fuhrlaender_md77"]):
    """
    tau (Pow(W) - Pow(W_hat)) when the speed is under-forecast, otherwise
    (1 - tau) (Pow(W_hat) - Pow(W)). Across the cut-out an under-forecast
    speed can be an over-forecast power, which makes the loss negative.
    """
    _check_tau(tau)
    actual = np.asarray(actual, dtype=float)
    forecast = np.asarray(forecast, dtype=float)
    gap = _power_gap(actual, forecast, curve)
    loss = np.where(forecast <= actual, tau * gap, -(1.0 - tau) * gap)
    return loss if loss.ndim else float(loss)


def _pairs(actuals, forecasts) -> Tuple[np.ndarray, np.ndarray]:
    actuals = np.asarray(actuals, dtype=float)
    forecasts = np.asarray(forecasts, dtype=float)
    if actuals.shape != forecasts.shape:
        raise DataError(
            error_type="length_mismatch",
            message=f"{actuals.size} actuals against {forecasts.size} forecasts",
        )
    if actuals.size == 0:
        raise DataError(error_type="empty_sample", message="nothing to score")
    return actuals, forecasts


def pce_split(actuals, forecasts, curve: PowerCurve = POWER_CURVES["fuhrlaender_md77"]) -> Tuple[float, float]:
    """(U, O): summed power gaps of speed under- and over-forecasts."""
    actuals, forecasts = _pairs(actuals, forecasts)
    gap = _power_gap(actuals, forecasts, curve)
    under = forecasts <= actuals
    return math.fsum(gap[under]), math.fsum(-gap[~under])


def pce_total(actuals, forecasts, tau: float, curve: PowerCurve = POWER_CURVES["fuhrlaender_md77"]) -> float:
    _check_tau(tau)
    under, over = pce_split(actuals, forecasts, curve)
    return tau * under + (1 - tau) * over


def pce(actuals, forecasts, tau: float, curve: PowerCurve = POWER_CURVES["fuhrlaender_md77"]) -> float:
    """Mean PCE; equals (tau U + (1 - tau) O) / n."""
    actuals, forecasts = _pairs(actuals, forecasts)
    return math.fsum(np.atleast_1d(pce_loss(actuals, forecasts, tau, curve))) / actuals.size


def rmse(actuals, forecasts) -> float:
    actuals, forecasts = _pairs(actuals, forecasts)
    errors = actuals - forecasts
    return math.sqrt(math.fsum(errors * errors) / errors.size)


def mae(actuals, forecasts) -> float:
    actuals, forecasts = _pairs(actuals, forecasts)
    return math.fsum(np.abs(actuals - forecasts)) / actuals.size


def metric_names(taus: Sequence[float]) -> Tuple[str, ...]:
    return ("RMSE", "MAE", *(f"PCE({tau:g})" for tau in taus))


def score(actuals, forecasts, taus: Sequence[float], curve: PowerCurve) -> List[float]:
    return [
        rmse(actuals, forecasts),
        mae(actuals, forecasts),
        *(pce(actuals, forecasts, tau, curve) for tau in taus),
    ]


class EvalReport(FrozenModel):
    """
    values[model, metric, column] with columns January..December then Total;
    months without scored targets hold NaN.
    """

    models: Tuple[str, ...]
    metrics: Tuple[str, ...]
    values: np.ndarray
    month_counts: np.ndarray
    origins_used: int
    horizon: int
    curve: str

    @root_validator(skip_on_failure=True)
    def _shape(cls, fields):
        expected = (len(fields["models"]), len(fields["metrics"]), len(MONTHS) + 1)
        if fields["values"].shape != expected:
            raise ValueError(f"values must have shape {expected}")
        errors = fields["values"][:, :2]
        if np.any(errors[~np.isnan(errors)] < 0):
            raise ValueError("RMSE and MAE cannot be negative")
        return fields

    def value(self, model: str, metric: str, month: Optional[int] = None) -> float:
        column = len(MONTHS) if month is None else month - 1
        return float(
            self.values[self.models.index(model), self.metrics.index(metric), column]
        )

    def total(self, model: str, metric: str) -> float:
        return self.value(model, metric)

    def to_frame(self) -> pd.DataFrame:
        rows = [f"{model} {metric}" for model in self.models for metric in self.metrics]
        return pd.DataFrame(
            self.values.reshape(len(rows), -1),
            index=rows,
            columns=[*MONTHS, TOTAL],
        )

    def write_csv(self, path) -> None:
        self.to_frame().to_csv(path, float_format="%.10g")

    def write_json(self, path) -> None:
        frame = self.to_frame()
        document = {
            "horizon": self.horizon,
            "origins_used": self.origins_used,
            "curve": self.curve,
            "columns": list(frame.columns),
            "rows": {
                row: [None if np.isnan(cell) else float(cell) for cell in frame.loc[row]]
                for row in frame.index
            },
        }
        with open(path, "w") as handle:
            json.dump(document, handle, indent=2)


def valid_origins(series: WindSeries, split: SampleSplit, horizon: int) -> np.ndarray:
    first = split.out_sample.start
    last = len(series) - 1 - horizon
    if last < first:
        raise DataError(
            error_type="insufficient_data",
            message=f"out-of-sample segment too short for horizon {horizon}",
        )
    return np.arange(first, last + 1)


def draw_origins(
    series: WindSeries,
    split: SampleSplit,
    horizon: int,
    n_origins: Optional[int],
    seed: int,
) -> np.ndarray:
    """Uniform draws with replacement, or every valid origin when n_origins is None."""
    candidates = valid_origins(series, split, horizon)
    if n_origins is None:
        return candidates
    if n_origins < 1:
        raise ConfigError(error_type="invalid_n_origins", message=str(n_origins))
    rng = np.random.default_rng(seed)
    return candidates[rng.integers(0, candidates.size, size=n_origins)]


def forecast_block(
    models: Sequence[Forecaster],
    series: WindSeries,
    origins: Sequence[int],
    horizon: int,
) -> np.ndarray:
    """Forecast paths, shape (models, origins, horizon)."""
    paths = np.empty((len(models), len(origins), horizon))
    for row, model in enumerate(models):
        for column, origin in enumerate(origins):
            paths[row, column] = model.forecast(series, int(origin), horizon)
    return paths


def _refit_block_forecasts(models, series, origins, horizon, refit_every):
    order = np.argsort(origins, kind="stable")
    paths = np.empty((len(models), len(origins), horizon))
    current = list(models)
    for block_start in range(0, order.size, refit_every):
        block = order[block_start : block_start + refit_every]
        first = int(origins[block[0]])
        current = [model.refit(series, first) for model in current]
        for model in current:
            model.prepare(series)
        paths[:, block] = forecast_block(current, series, origins[block], horizon)
    return paths


def summarize(
    models: Sequence[Forecaster],
    series: WindSeries,
    origins: np.ndarray,
    paths: np.ndarray,
    horizon: int,
    taus: Sequence[float],
    curve: PowerCurve,
    score_all_steps: bool = False,
) -> EvalReport:
    steps = np.arange(1, horizon + 1) if score_all_steps else np.array([horizon])
    targets = (origins[:, None] + steps[None, :]).ravel()
    actuals = np.asarray(series.values, dtype=float)[targets]
    scored = ~np.isnan(actuals)
    if not scored.all():
        app_log.warning("%d targets fall on gaps and are not scored", int((~scored).sum()))
    months = series.timestamps().month.to_numpy()[targets]
    names = metric_names(taus)

    values = np.full((len(models), len(names), len(MONTHS) + 1), np.nan)
    counts = np.zeros(len(MONTHS) + 1, dtype=int)
    for row in range(len(models)):
        predicted = paths[row][:, steps - 1].ravel()
        for month in range(1, len(MONTHS) + 1):
            selected = scored & (months == month)
            counts[month - 1] = selected.sum()
            if selected.any():
                values[row, :, month - 1] = score(
                    actuals[selected], predicted[selected], taus, curve
                )
        counts[-1] = scored.sum()
        values[row, :, -1] = score(actuals[scored], predicted[scored], taus, curve)
    return EvalReport(
        models=tuple(model.name for model in models),
        metrics=names,
        values=values,
        month_counts=counts,
        origins_used=int(origins.size),
        horizon=horizon,
        curve=curve.name,
    )


def _check_options(models, taus, refit_every):
    if not models:
        raise ConfigError(error_type="no_models", message="nothing to evaluate")
    for tau in taus:
        _check_tau(tau)
    if refit_every is not None and refit_every < 1:
        raise ConfigError(error_type="invalid_refit_every", message=str(refit_every))


def rolling_backtest(
    series: WindSeries,
    split: SampleSplit,
    models: Sequence[Forecaster],
    horizon: int = DEFAULT_HORIZON,
    n_origins: Optional[int] = DEFAULT_N_ORIGINS,
    seed: int = 0,
    taus: Sequence[float] = DEFAULT_TAUS,
    curve: PowerCurve = POWER_CURVES["fuhrlaender_md77"],
    score_all_steps: bool = False,
    refit_every: Optional[int] = None,
) -> EvalReport:
    """
    Scores the horizon-step forecast of every model at the same origins drawn
    from the out-of-sample segment, per calendar month of the target and in
    total.
    """
    _check_options(models, taus, refit_every)
    origins = draw_origins(series, split, horizon, n_origins, seed)
    app_log.info("backtest over %d origins, horizon %d", origins.size, horizon)
    if refit_every:
        paths = _refit_block_forecasts(models, series, origins, horizon, refit_every)
    else:
        for model in models:
            model.prepare(series)
        paths = forecast_block(models, series, origins, horizon)
    return summarize(models, series, origins, paths, horizon, taus, curve, score_all_steps)


async def rolling_backtest_async(
    series: WindSeries,
    split: SampleSplit,
    models: Sequence[Forecaster],
    horizon: int = DEFAULT_HORIZON,
    n_origins: Optional[int] = DEFAULT_N_ORIGINS,
    seed: int = 0,
    taus: Sequence[float] = DEFAULT_TAUS,
    curve: PowerCurve = POWER_CURVES["fuhrlaender_md77"],
    score_all_steps: bool = False,
    workers: int = 1,
    executor=None,
) -> EvalReport:
    """
    `rolling_backtest` with origin batches forecast on the IOLoop's executor;
    scoring happens in origin order, so the report does not depend on
    `workers`.
    """
    _check_options(models, taus, None)
    origins = draw_origins(series, split, horizon, n_origins, seed)
    for model in models:
        model.prepare(series)
    batches = np.array_split(origins, max(1, min(workers, origins.size)))
    app_log.info(
        "backtest over %d origins in %d batches, horizon %d",
        origins.size,
        len(batches),
        horizon,
    )
    loop = IOLoop.current()
    blocks = await gen.multi(
        [
            loop.run_in_executor(executor, forecast_block, models, series, batch, horizon)
            for batch in batches
        ]
    )
    paths = np.concatenate(blocks, axis=1)
    return summarize(models, series, origins, paths, horizon, taus, curve, score_all_steps)
