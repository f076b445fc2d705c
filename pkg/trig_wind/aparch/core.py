"""
APARCH conditional scale

    sigma_t^delta = alpha_0 + sum_l alpha_l (|Z_{t-l}| - gamma_l Z_{t-l})^delta
                            + sum_m beta_m sigma_{t-m}^delta

Z is the ARFIMA innovation and does not depend on sigma, so the recursion is a
linear filter of the asymmetric power terms.
"""
from typing import Tuple

import numpy as np
from pydantic import root_validator, validator
from scipy.signal import lfilter, lfiltic
from tornado.log import gen_log

from trig_wind.aparch.distribution import (
    SeedLike,
    SkewTParams,
    as_generator,
    asym_power_moment,
    skew_t_sample,
)
from trig_wind.models import DataError, FrozenModel


class AparchParams(FrozenModel):
    alpha0: float = 0.01
    alpha: Tuple[float, ...] = (0.1,)
    beta: Tuple[float, ...] = (0.4, 0.4)
    gamma: Tuple[float, ...] = (0.0,)
    delta: float = 1.0

    @validator("alpha0")
    def _positive_level(cls, value):
        if not value > 0:
            raise ValueError(f"alpha0={value} must be positive")
        return value

    @validator("alpha", "beta")
    def _non_negative(cls, value):
        if any(coef < 0 for coef in value):
            raise ValueError(f"coefficients {value} must be non-negative")
        return value

    @validator("gamma")
    def _asymmetry(cls, value):
        if any(not -1 < coef < 1 for coef in value):
            raise ValueError(f"asymmetry {value} must lie in (-1, 1)")
        return value

    @validator("delta")
    def _positive_power(cls, value):
        if not value > 0:
            raise ValueError(f"delta={value} must be positive")
        return value

    @root_validator(skip_on_failure=True)
    def _matching_orders(cls, fields):
        if len(fields["gamma"]) != len(fields["alpha"]):
            raise ValueError("one gamma per alpha is required")
        return fields

    @property
    def orders(self) -> Tuple[int, int]:
        return len(self.alpha), len(self.beta)


def asymmetric_power(z, gamma: float, delta: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return (np.abs(z) - gamma * z) ** delta


def aparch_scale_path(innovations, params: AparchParams) -> np.ndarray:
    """
    sigma^delta for every time index of `innovations`. Pre-sample asymmetric
    power terms and scales are set to the sample mean of
    (|Z| - gamma_1 Z)^delta.
    """
    z = np.asarray(innovations, dtype=float)
    if z.size == 0:
        raise DataError(error_type="empty_series", message="no innovations")
    q, p = params.orders
    first_gamma = params.gamma[0] if q else 0.0
    presample = float(np.mean(asymmetric_power(z, first_gamma, params.delta)))

    driven = np.full(z.size, params.alpha0)
    for lag, (alpha, gamma) in enumerate(zip(params.alpha, params.gamma), start=1):
        terms = asymmetric_power(z, gamma, params.delta)
        lagged = np.concatenate((np.full(min(lag, z.size), presample), terms[: z.size - lag]))
        driven += alpha * lagged
    if not p:
        return driven

    denominator = np.concatenate(([1.0], -np.asarray(params.beta)))
    state = lfiltic([1.0], denominator, y=np.full(p, presample))
    scale, _ = lfilter([1.0], denominator, driven, zi=state)
    return scale


def stationarity_margin(params: AparchParams, skewt: SkewTParams) -> float:
    """sum_l alpha_l kappa(gamma_l) + sum_m beta_m; the process is stationary below 1."""
    arch = sum(
        alpha * asym_power_moment(gamma, params.delta, skewt)
        for alpha, gamma in zip(params.alpha, params.gamma)
    )
    return float(arch + sum(params.beta))


def check_stationarity(params: AparchParams, skewt: SkewTParams) -> float:
    margin = stationarity_margin(params, skewt)
    if margin >= 1:
        gen_log.warning("APARCH persistence %.4f >= 1, no stationary scale level", margin)
    return margin


def unconditional_level(params: AparchParams, skewt: SkewTParams) -> float:
    """E[sigma^delta] of the stationary process."""
    margin = stationarity_margin(params, skewt)
    if margin >= 1:
        raise DataError(
            error_type="non_stationary",
            message=f"APARCH persistence {margin:.4f} >= 1",
        )
    return params.alpha0 / (1.0 - margin)


def simulate_aparch(
    params: AparchParams, skewt: SkewTParams, n: int, rng: SeedLike, burn: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """Forward simulation; returns (Z, sigma^delta) after discarding `burn` draws."""
    rng = as_generator(rng)
    eta = skew_t_sample(skewt, rng, n + burn)
    q, p = params.orders
    delta = params.delta
    try:
        level = unconditional_level(params, skewt)
    except DataError:
        level = params.alpha0 / max(1.0 - sum(params.beta), 1e-3)
    kappas = [asym_power_moment(gamma, delta, skewt) for gamma in params.gamma]

    depth = max(q, p, 1)
    scale = np.empty(depth + n + burn)
    scale[:depth] = level
    terms = np.empty((q, depth + n + burn))
    for row, kappa in enumerate(kappas):
        terms[row, :depth] = kappa * level
    z = np.zeros(depth + n + burn)
    alpha = np.asarray(params.alpha)
    beta = np.asarray(params.beta)
    gamma = np.asarray(params.gamma)
    for t in range(depth, depth + n + burn):
        value = params.alpha0
        for l in range(q):
            value += alpha[l] * terms[l, t - l - 1]
        for m in range(p):
            value += beta[m] * scale[t - m - 1]
        scale[t] = value
        z[t] = value ** (1.0 / delta) * eta[t - depth]
        terms[:, t] = (abs(z[t]) - gamma * z[t]) ** delta
    start = depth + burn
    return z[start:], scale[start:]
