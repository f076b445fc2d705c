"""
Fractional differencing and ARMA filtering of the regression residuals

    phi(B) (1 - B)^d eps_t = theta(B) Z_t,
    phi(B) = 1 - phi_1 B - ... - phi_j B^j,  theta(B) = 1 + theta_1 B + ... + theta_q B^q.

(1 - B)^d is truncated after `truncation` lags. The inverse direction runs the
exact recursive inverse of the truncated forward filter, so the two filters
round-trip. Pre-sample values are zero throughout.
"""
from typing import Sequence, Tuple

import numpy as np
from pydantic import root_validator, validator
from scipy.signal import fftconvolve, lfilter
from tornado.log import gen_log

from trig_wind.models import FrozenModel

DEFAULT_TRUNCATION = 1000


def _roots_outside_unit_circle(poly: np.ndarray) -> bool:
    """poly holds coefficients in increasing powers of B with poly[0] = 1."""
    trimmed = np.trim_zeros(poly, "b")
    if trimmed.size <= 1:
        return True
    return bool(np.all(np.abs(np.roots(trimmed[::-1])) > 1.0))


class ArfimaParams(FrozenModel):
    d: float = 0.0
    ar: Tuple[float, ...] = ()
    ma: Tuple[float, ...] = ()
    truncation: int = DEFAULT_TRUNCATION

    @validator("d")
    def _d_range(cls, value):
        if not -0.5 < value < 0.5:
            raise ValueError(f"d={value} outside (-0.5, 0.5)")
        return value

    @validator("truncation")
    def _truncation(cls, value):
        if value < 1:
            raise ValueError("truncation must be at least 1")
        return value

    @root_validator(skip_on_failure=True)
    def _stationary_invertible(cls, fields):
        if not _roots_outside_unit_circle(ar_polynomial(fields["ar"])):
            raise ValueError(f"AR polynomial {fields['ar']} is not stationary")
        if not _roots_outside_unit_circle(ma_polynomial(fields["ma"])):
            raise ValueError(f"MA polynomial {fields['ma']} is not invertible")
        return fields

    @property
    def orders(self) -> Tuple[int, int]:
        return len(self.ar), len(self.ma)


def ar_polynomial(ar: Sequence[float]) -> np.ndarray:
    return np.concatenate(([1.0], -np.asarray(ar, dtype=float)))


def ma_polynomial(ma: Sequence[float]) -> np.ndarray:
    return np.concatenate(([1.0], np.asarray(ma, dtype=float)))


def frac_diff_weights(d: float, n: int) -> np.ndarray:
    """Coefficients pi_0..pi_{n-1} of (1 - B)^d."""
    k = np.arange(1, n)
    return np.concatenate(([1.0], np.cumprod((k - 1 - d) / k)))


def frac_integrate_weights(d: float, n: int) -> np.ndarray:
    """Coefficients psi_0..psi_{n-1} of (1 - B)^{-d}."""
    return frac_diff_weights(-d, n)


def arfima_acf(d: float, max_lag: int) -> np.ndarray:
    """Autocorrelations rho_0..rho_max_lag of ARFIMA(0, d, 0)."""
    j = np.arange(1, max_lag + 1)
    return np.concatenate(([1.0], np.cumprod((j - 1 + d) / (j - d))))


def differencing_polynomial(params: ArfimaParams) -> np.ndarray:
    """phi(B) (1 - B)^d with the fractional part truncated."""
    ar = ar_polynomial(params.ar)
    if params.d == 0.0:
        return ar
    return np.convolve(ar, frac_diff_weights(params.d, params.truncation + 1))


def filter_to_innovations(eps, params: ArfimaParams) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    if eps.size <= params.truncation and params.d != 0.0:
        gen_log.warning(
            "series of %d points is not longer than the fractional filter (%d lags)",
            eps.size,
            params.truncation,
        )
    coefs = differencing_polynomial(params)
    if coefs.size > 64:
        differenced = fftconvolve(eps, coefs)[: eps.size]
    else:
        differenced = np.convolve(eps, coefs)[: eps.size]
    if not params.ma:
        return differenced
    return lfilter([1.0], ma_polynomial(params.ma), differenced)


def inverse_filter(innovations, params: ArfimaParams) -> np.ndarray:
    innovations = np.asarray(innovations, dtype=float)
    return lfilter(
        ma_polynomial(params.ma), differencing_polynomial(params), innovations
    )


def one_step_predictions(eps, params: ArfimaParams) -> np.ndarray:
    """E[eps_t | eps_{<t}] under the truncated filter, i.e. eps_t - Z_t."""
    eps = np.asarray(eps, dtype=float)
    return eps - filter_to_innovations(eps, params)


def forecast_residuals(eps, innovations, params: ArfimaParams, horizon: int) -> np.ndarray:
    """
    Propagate eps beyond its last observation through the AR(inf)
    representation with future innovations set to zero.
    """
    coefs = differencing_polynomial(params)
    ma = np.asarray(params.ma, dtype=float)
    depth = max(coefs.size - 1, ma.size, 1)
    eps = np.asarray(eps, dtype=float)[-depth:]
    innovations = np.asarray(innovations, dtype=float)[-depth:]

    past = np.concatenate((np.zeros(depth - eps.size), eps, np.zeros(horizon)))
    shocks = np.concatenate(
        (np.zeros(depth - innovations.size), innovations, np.zeros(horizon))
    )
    tail = coefs[1:][::-1]
    ma_tail = ma[::-1]
    for u in range(horizon):
        now = depth + u
        value = -np.dot(tail, past[now - tail.size : now]) if tail.size else 0.0
        if ma_tail.size:
            value += np.dot(ma_tail, shocks[now - ma_tail.size : now])
        past[now] = value
    return past[depth:]


def pacf_to_coefs(partials: Sequence[float]) -> np.ndarray:
    """
    Durbin-Levinson map from partial autocorrelations in (-1, 1) to the
    coefficients of a stationary 1 - sum phi_k B^k.
    """
    coefs = np.zeros(0)
    for r in partials:
        coefs = np.concatenate((coefs - r * coefs[::-1], [r]))
    return coefs


def coefs_to_pacf(coefs: Sequence[float]) -> np.ndarray:
    """Inverse of `pacf_to_coefs` (step-down recursion)."""
    coefs = np.asarray(coefs, dtype=float)
    partials = np.zeros(coefs.size)
    for k in range(coefs.size - 1, -1, -1):
        r = coefs[k]
        partials[k] = r
        head = coefs[:k]
        coefs = (head + r * head[::-1]) / (1.0 - r * r)
    return partials
