from trig_wind.estimation.fit import (
    FitResult,
    OrderSelection,
    SignificanceRow,
    choose_best,
    fit,
    information_criteria,
    select_order,
    significance_report,
)
from trig_wind.estimation.likelihood import ConditionalPath, conditional_path, qml_negloglik
from trig_wind.estimation.params import ModelKind, ModelParams, Orders, ParameterLayout
from trig_wind.estimation.presets import STATION_PRESETS, preset_spec, station_preset
from trig_wind.estimation.stage1 import stage1_start_values

__all__ = [
    # Parameters
    "ModelKind",
    "ModelParams",
    "Orders",
    "ParameterLayout",
    "STATION_PRESETS",
    "preset_spec",
    "station_preset",
    # Likelihood
    "ConditionalPath",
    "conditional_path",
    "qml_negloglik",
    # Fitting
    "FitResult",
    "OrderSelection",
    "SignificanceRow",
    "choose_best",
    "fit",
    "information_criteria",
    "select_order",
    "significance_report",
    "stage1_start_values",
]
