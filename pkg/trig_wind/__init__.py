from trig_wind.aparch import AparchParams, SkewTParams
from trig_wind.arfima import ArfimaParams
from trig_wind.diagnostics import DiagnosticsReport, diagnose
from trig_wind.estimation import (
    FitResult,
    ModelKind,
    ModelParams,
    Orders,
    fit,
    select_order,
    station_preset,
)
from trig_wind.evaluation import EvalReport, PowerCurve, power_curve, rolling_backtest
from trig_wind.forecast import (
    FittedModelForecaster,
    ForecastPath,
    PersistenceForecaster,
    forecast,
)
from trig_wind.ingestion import (
    CsvFormat,
    SampleSplit,
    WindSeries,
    interpolate_gaps,
    parse_station_csv,
    split,
)
from trig_wind.models import (
    ConfigError,
    ConvergenceError,
    DataError,
    InternalError,
    TrigWindError,
)
from trig_wind.seasonal import SeasonalSpec
from trig_wind.simulation import simulate
from trig_wind.spectral import PeriodSet, Periodogram, detect_peaks, periodogram, smooth

__all__ = [
    # Data
    "CsvFormat",
    "SampleSplit",
    "WindSeries",
    "interpolate_gaps",
    "parse_station_csv",
    "split",
    # Spectrum
    "PeriodSet",
    "Periodogram",
    "detect_peaks",
    "periodogram",
    "smooth",
    # Model
    "AparchParams",
    "ArfimaParams",
    "ModelKind",
    "ModelParams",
    "Orders",
    "SeasonalSpec",
    "SkewTParams",
    "station_preset",
    # Estimation
    "FitResult",
    "fit",
    "select_order",
    # Forecasting and evaluation
    "EvalReport",
    "FittedModelForecaster",
    "ForecastPath",
    "PersistenceForecaster",
    "PowerCurve",
    "forecast",
    "power_curve",
    "rolling_backtest",
    # Diagnostics and simulation
    "DiagnosticsReport",
    "diagnose",
    "simulate",
    # Errors
    "ConfigError",
    "ConvergenceError",
    "DataError",
    "InternalError",
    "TrigWindError",
]
