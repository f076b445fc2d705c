"""
Skewed Student-t innovations.

The raw law joins two differently scaled halves of a Student-t with nu degrees
of freedom, location 0 and scale sqrt(nu / (nu - 2)):

    f(x) = 2 xi / (xi^2 + 1) * t_nu(x / (sigma xi)) / sigma,   x >= 0
    f(x) = 2 xi / (xi^2 + 1) * t_nu(x xi / sigma) / sigma,     x < 0

Everything public here works on the standardised variable
eta = (x - mean_shift) / scale_factor, which has mean 0 and variance 1.
xi > 1 puts the long tail on the right.
"""
import functools
from typing import Tuple, Union

import numpy as np
from pydantic import validator
from scipy import integrate, stats
from scipy.special import gammaln

from trig_wind.models import DataError, FrozenModel

SeedLike = Union[None, int, np.random.Generator]


class SkewTParams(FrozenModel):
    xi: float = 1.0
    nu: float = 8.0

    @validator("xi")
    def _positive_xi(cls, value):
        if not value > 0:
            raise ValueError(f"xi={value} must be positive")
        return value

    @validator("nu")
    def _finite_variance(cls, value):
        if not value > 2:
            raise ValueError(f"nu={value} must exceed 2")
        return value


def _raw_sigma(nu: float) -> float:
    return float(np.sqrt(nu / (nu - 2.0)))


def _student_logpdf(x, nu: float):
    return (
        gammaln((nu + 1.0) / 2.0)
        - gammaln(nu / 2.0)
        - 0.5 * np.log(np.pi * nu)
        - (nu + 1.0) / 2.0 * np.log1p(x * x / nu)
    )


def _abs_t_mean(nu: float) -> float:
    """E|T| for a standard Student-t with nu > 1 degrees of freedom."""
    return float(
        2.0
        * np.sqrt(nu)
        * np.exp(gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0))
        / (np.sqrt(np.pi) * (nu - 1.0))
    )


def _unit_moments(params: SkewTParams) -> Tuple[float, float]:
    """Mean and standard deviation of the skewed law built on a unit-scale t_nu."""
    xi, nu = params.xi, params.nu
    mean = _abs_t_mean(nu) * (xi - 1.0 / xi)
    second = nu / (nu - 2.0) * (xi ** 3 + xi ** -3) / (xi + 1.0 / xi)
    return mean, float(np.sqrt(second - mean * mean))


def standardize(params: SkewTParams) -> Tuple[float, float]:
    """(mean_shift, scale_factor) such that (x_raw - mean_shift) / scale_factor is standard."""
    if not params.nu > 2:
        raise DataError(error_type="infinite_variance", message=f"nu={params.nu}")
    mean, sd = _unit_moments(params)
    sigma = _raw_sigma(params.nu)
    return sigma * mean, sigma * sd


def raw_logpdf(x, params: SkewTParams):
    """Log-density of the unstandardised law (location 0, scale sqrt(nu/(nu-2)))."""
    x = np.asarray(x, dtype=float)
    xi, nu = params.xi, params.nu
    sigma = _raw_sigma(nu)
    u = x / sigma
    scaled = np.where(u >= 0, u / xi, u * xi)
    return (
        np.log(2.0 * xi / (xi * xi + 1.0))
        - np.log(sigma)
        + _student_logpdf(scaled, nu)
    )


def skew_t_logpdf(x, params: SkewTParams):
    mean_shift, scale_factor = standardize(params)
    return np.log(scale_factor) + raw_logpdf(mean_shift + scale_factor * np.asarray(x), params)


def skew_t_pdf(x, params: SkewTParams):
    return np.exp(skew_t_logpdf(x, params))


def skew_t_cdf(x, params: SkewTParams):
    mean_shift, scale_factor = standardize(params)
    xi, nu = params.xi, params.nu
    u = (mean_shift + scale_factor * np.asarray(x, dtype=float)) / _raw_sigma(nu)
    norm = xi * xi + 1.0
    return np.where(
        u < 0,
        2.0 / norm * stats.t.cdf(u * xi, nu),
        1.0 / norm + 2.0 * xi * xi / norm * (stats.t.cdf(u / xi, nu) - 0.5),
    )


def skew_t_mode(params: SkewTParams) -> float:
    """The raw law peaks at 0, i.e. at -mean_shift / scale_factor after standardising."""
    mean_shift, scale_factor = standardize(params)
    return -mean_shift / scale_factor


def as_generator(rng: SeedLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def skew_t_sample(params: SkewTParams, rng: SeedLike, n: int) -> np.ndarray:
    if n < 1:
        raise DataError(error_type="invalid_count", message=f"n={n}")
    rng = as_generator(rng)
    xi = params.xi
    magnitude = np.abs(rng.standard_t(params.nu, size=n))
    upper = rng.random(n) < xi * xi / (1.0 + xi * xi)
    unit = np.where(upper, magnitude * xi, -magnitude / xi)
    mean, sd = _unit_moments(params)
    return (unit - mean) / sd


@functools.lru_cache(maxsize=1024)
def _partial_power_moments(delta: float, xi: float, nu: float) -> Tuple[float, float]:
    """(E[|eta|^delta; eta < 0], E[eta^delta; eta > 0]) by adaptive quadrature."""
    params = SkewTParams(xi=xi, nu=nu)
    mode = skew_t_mode(params)

    def integrand(eta):
        return abs(eta) ** delta * float(skew_t_pdf(eta, params))

    options = dict(epsabs=1e-13, epsrel=1e-11, limit=500)
    if mode < 0:
        lower = (
            integrate.quad(integrand, -np.inf, mode, **options)[0]
            + integrate.quad(integrand, mode, 0.0, **options)[0]
        )
        upper = integrate.quad(integrand, 0.0, np.inf, **options)[0]
    else:
        lower = integrate.quad(integrand, -np.inf, 0.0, **options)[0]
        upper = (
            integrate.quad(integrand, 0.0, mode, **options)[0]
            + integrate.quad(integrand, mode, np.inf, **options)[0]
        )
    return lower, upper


def asym_power_moment(gamma: float, delta: float, params: SkewTParams) -> float:
    """kappa = E[(|eta| - gamma eta)^delta]."""
    if not -1 < gamma < 1:
        raise DataError(error_type="invalid_gamma", message=f"gamma={gamma}")
    if not delta > 0:
        raise DataError(error_type="invalid_delta", message=f"delta={delta}")
    if delta >= params.nu:
        raise DataError(
            error_type="moment_does_not_exist",
            message=f"delta={delta} >= nu={params.nu}",
        )
    lower, upper = _partial_power_moments(float(delta), float(params.xi), float(params.nu))
    return (1.0 + gamma) ** delta * lower + (1.0 - gamma) ** delta * upper
