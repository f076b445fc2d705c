from typing import NamedTuple

import numpy as np

from trig_wind.aparch import aparch_scale_path, skew_t_logpdf
from trig_wind.arfima import filter_to_innovations
from trig_wind.estimation.params import ModelParams
from trig_wind.models import TrigWindError
from trig_wind.seasonal import SeasonalSpec, design_matrix


class ConditionalPath(NamedTuple):
    residuals: np.ndarray
    innovations: np.ndarray
    sigma: np.ndarray
    eta: np.ndarray


def conditional_path(values, t, params: ModelParams, spec: SeasonalSpec) -> ConditionalPath:
    """eps = W - mean, Z from the ARFIMA filter, sigma from APARCH, eta = Z / sigma."""
    spec = params.seasonal(spec)
    residuals = np.asarray(values, dtype=float) - design_matrix(spec, t) @ params.theta
    innovations = filter_to_innovations(residuals, params.arfima)
    scale_delta = aparch_scale_path(innovations, params.aparch)
    sigma = scale_delta ** (1.0 / params.aparch.delta)
    return ConditionalPath(residuals, innovations, sigma, innovations / sigma)


def pointwise_loglik(path: ConditionalPath, params: ModelParams) -> np.ndarray:
    return skew_t_logpdf(path.eta, params.skewt) - np.log(path.sigma)


def qml_negloglik(values, t, params: ModelParams, spec: SeasonalSpec) -> float:
    """
    Negative conditional skew-t log-likelihood with zero pre-sample residuals.
    Any parameter set the recursions cannot evaluate scores +inf.
    """
    try:
        path = conditional_path(values, t, params, spec)
    except (TrigWindError, ValueError, FloatingPointError):
        return np.inf
    if not np.all(path.sigma > 0):
        return np.inf
    value = -float(np.sum(pointwise_loglik(path, params)))
    return value if np.isfinite(value) else np.inf
