from typing import Dict, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from tornado.log import app_log

from trig_wind.estimation.params import P_FLOOR, ModelKind
from trig_wind.ingestion import IndexRange, WindSeries
from trig_wind.models import DataError
from trig_wind.seasonal import SeasonalSpec, column_labels, design_matrix

MAX_SWEEPS = 50
RSS_TOLERANCE = 1e-6


def in_sample_values(
    series: WindSeries, in_sample: Optional[IndexRange] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """(time indices, speeds) of the estimation window."""
    in_sample = in_sample or IndexRange(start=0, stop=len(series))
    values = np.asarray(series.values[in_sample.to_slice()], dtype=float)
    if np.isnan(values).any():
        raise DataError(
            error_type="unfilled_gaps",
            message="interpolate gaps before estimation",
        )
    return np.arange(in_sample.start, in_sample.stop), values


def resolve_spec(spec: SeasonalSpec, n_obs: int) -> SeasonalSpec:
    """Scale the trend by the in-sample length unless a scale is configured."""
    if spec.t_scale is None:
        return spec.with_t_scale(n_obs)
    return spec


def least_squares(design: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, float]:
    theta, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < design.shape[1]:
        raise DataError(
            error_type="rank_deficient",
            message=f"design matrix has rank {rank} < {design.shape[1]} columns",
        )
    residual = values - design @ theta
    return theta, float(residual @ residual)


def stage1_start_values(
    series: WindSeries,
    spec: SeasonalSpec,
    model: ModelKind = ModelKind.fourier,
    in_sample: Optional[IndexRange] = None,
) -> Tuple[np.ndarray, Dict[str, float]]:
    """
    Least-squares regression coefficients and, for the p-generalised model,
    exponents found by alternating OLS in theta with a bounded line search
    in each free exponent. Fixed exponents of `spec` keep their value and are
    left out of the returned dict.
    """
    t, values = in_sample_values(series, in_sample)
    spec = resolve_spec(spec, t.size)
    model = ModelKind(model)
    free = spec.free_exponent_names() if model == ModelKind.pgen else []
    n_params = len(column_labels(spec)) + len(free)
    if t.size < 10 * n_params:
        raise DataError(
            error_type="insufficient_data",
            message=f"{t.size} observations for {n_params} regression parameters",
        )

    if model == ModelKind.fourier:
        exponents = {name: 2.0 for name in spec.exponent_names()}
        return least_squares(design_matrix(spec.with_exponents(exponents), t), values)[0], exponents

    exponents = {name: 2.0 for name in free}
    theta, rss = least_squares(design_matrix(spec.with_exponents(exponents), t), values)

    def rss_at(name, p):
        trial = spec.with_exponents({**exponents, name: p})
        return least_squares(design_matrix(trial, t), values)[1]

    for sweep in range(1, MAX_SWEEPS + 1):
        previous = rss
        for name in exponents:
            found = minimize_scalar(
                lambda p: rss_at(name, p),
                bounds=(P_FLOOR, spec.p_bound),
                method="bounded",
            )
            if found.fun < rss_at(name, exponents[name]):
                exponents[name] = float(found.x)
        theta, rss = least_squares(design_matrix(spec.with_exponents(exponents), t), values)
        if previous == 0 or abs(previous - rss) <= RSS_TOLERANCE * previous:
            break
    app_log.info("stage 1 finished after %d sweeps, RSS %.6g", sweep, rss)
    return theta, exponents
