"""
Residual diagnostics of a fitted model: autocorrelations of eta and
|eta|^delta, Ljung-Box tests, in-sample MSE and R^2, and a chi-square
comparison of the eta histogram with the fitted skew-t law.
"""
import os
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import root_validator
from scipy import stats
from tornado.log import app_log

from trig_wind.aparch import SkewTParams, skew_t_cdf, skew_t_pdf
from trig_wind.estimation import FitResult
from trig_wind.models import ConfigError, DataError, FrozenModel, as_float_array

DEFAULT_MAX_LAG = 5000
DEFAULT_LB_LAGS = (10, 20, 50, 100)
DEFAULT_LB_LEVEL = 0.05
MIN_EXPECTED = 5.0


class AcfResult(FrozenModel):
    lags: np.ndarray
    acf: np.ndarray
    confidence_band: float
    n_obs: int

    @root_validator(skip_on_failure=True)
    def _bounded(cls, fields):
        values = fields["acf"]
        if values[0] != 1.0 or np.any(np.abs(values) > 1.0):
            raise ValueError("autocorrelations must start at 1 and lie in [-1, 1]")
        return fields


class LjungBoxResult(FrozenModel):
    lags: int
    statistic: float
    dof: int
    p_value: float


class HistogramFit(FrozenModel):
    edges: np.ndarray
    counts: np.ndarray
    centers: np.ndarray
    density: np.ndarray
    fitted_density: np.ndarray


class GofResult(FrozenModel):
    statistic: float
    dof: int
    p_value: float
    bins: int


class ResidualSummary(FrozenModel):
    mse: float
    r_squared: float
    histogram: HistogramFit


class DiagnosticsReport(FrozenModel):
    acf_eta: AcfResult
    acf_power: AcfResult
    ljung_box_eta: Tuple[LjungBoxResult, ...]
    ljung_box_power: Tuple[LjungBoxResult, ...]
    summary: ResidualSummary
    goodness_of_fit: GofResult
    level: float

    def acf_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "lag": self.acf_eta.lags,
                "acf_eta": self.acf_eta.acf,
                "acf_abs_eta_delta": self.acf_power.acf,
            }
        )

    def ljung_box_frame(self) -> pd.DataFrame:
        rows = [
            {"series": series, **result.dict(), "rejected": result.p_value < self.level}
            for series, results in (
                ("eta", self.ljung_box_eta),
                ("abs_eta_delta", self.ljung_box_power),
            )
            for result in results
        ]
        return pd.DataFrame(rows)

    def histogram_frame(self) -> pd.DataFrame:
        histogram = self.summary.histogram
        return pd.DataFrame(
            {
                "left": histogram.edges[:-1],
                "right": histogram.edges[1:],
                "center": histogram.centers,
                "count": histogram.counts,
                "density": histogram.density,
                "fitted_density": histogram.fitted_density,
            }
        )

    def write(self, directory) -> None:
        os.makedirs(directory, exist_ok=True)
        self.acf_frame().to_csv(os.path.join(directory, "acf.csv"), index=False)
        self.ljung_box_frame().to_csv(os.path.join(directory, "ljung_box.csv"), index=False)
        self.histogram_frame().to_csv(os.path.join(directory, "histogram.csv"), index=False)


def acf(x, max_lag: int, level: float = DEFAULT_LB_LEVEL) -> AcfResult:
    """Sample autocorrelations with the biased 1/n autocovariance."""
    x = as_float_array(x, "x")
    n = x.size
    if not 0 <= max_lag < n:
        raise ConfigError(
            error_type="invalid_max_lag", message=f"max_lag={max_lag} for {n} points"
        )
    centered = x - x.mean()
    if not np.any(centered):
        raise DataError(error_type="constant_series", message="autocorrelation undefined")
    size = 1 << int(np.ceil(np.log2(2 * n)))
    spectrum = np.fft.rfft(centered, size)
    autocov = np.fft.irfft(spectrum * np.conj(spectrum), size)[: max_lag + 1] / n
    values = np.clip(autocov / autocov[0], -1.0, 1.0)
    values[0] = 1.0
    return AcfResult(
        lags=np.arange(max_lag + 1),
        acf=values,
        confidence_band=float(stats.norm.ppf(1.0 - level / 2.0) / np.sqrt(n)),
        n_obs=n,
    )


def ljung_box(x, lags: int, fitted_params: int = 0) -> LjungBoxResult:
    if lags <= fitted_params:
        raise ConfigError(
            error_type="too_few_lags",
            message=f"{lags} lags for {fitted_params} fitted parameters",
        )
    x = as_float_array(x, "x")
    n = x.size
    rho = acf(x, lags).acf[1:]
    statistic = n * (n + 2.0) * float(np.sum(rho * rho / (n - np.arange(1, lags + 1))))
    dof = lags - fitted_params
    return LjungBoxResult(
        lags=lags,
        statistic=statistic,
        dof=dof,
        p_value=float(stats.chi2.sf(statistic, dof)),
    )


def histogram(eta, skewt: SkewTParams, bins="fd") -> HistogramFit:
    eta = as_float_array(eta, "eta")
    counts, edges = np.histogram(eta, bins=bins)
    widths = np.diff(edges)
    centers = edges[:-1] + widths / 2.0
    return HistogramFit(
        edges=edges,
        counts=counts,
        centers=centers,
        density=counts / (eta.size * widths),
        fitted_density=skew_t_pdf(centers, skewt),
    )


def _merge_bins(observed: np.ndarray, expected: np.ndarray):
    merged_observed, merged_expected = [], []
    pending_observed = pending_expected = 0.0
    for count, mass in zip(observed, expected):
        pending_observed += count
        pending_expected += mass
        if pending_expected >= MIN_EXPECTED:
            merged_observed.append(pending_observed)
            merged_expected.append(pending_expected)
            pending_observed = pending_expected = 0.0
    if pending_expected > 0 and merged_expected:
        merged_observed[-1] += pending_observed
        merged_expected[-1] += pending_expected
    return np.array(merged_observed), np.array(merged_expected)


def histogram_gof(eta, skewt: SkewTParams, bins="fd", estimated_params: int = 0) -> GofResult:
    """
    Pearson chi-square of the eta histogram against the skew-t law. The outer
    bins are open-ended and neighbours merge until each expects at least 5
    observations.
    """
    eta = as_float_array(eta, "eta")
    counts, edges = np.histogram(eta, bins=bins)
    probabilities = np.diff(skew_t_cdf(np.concatenate(([-np.inf], edges[1:-1], [np.inf])), skewt))
    observed, expected = _merge_bins(counts, eta.size * probabilities)
    dof = observed.size - 1 - estimated_params
    if dof < 1:
        raise DataError(
            error_type="insufficient_data",
            message=f"{observed.size} histogram bins after merging",
        )
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    return GofResult(
        statistic=statistic,
        dof=dof,
        p_value=float(stats.chi2.sf(statistic, dof)),
        bins=observed.size,
    )


def residual_summary(fit: FitResult, bins="fd") -> ResidualSummary:
    return ResidualSummary(
        mse=fit.mse,
        r_squared=fit.r_squared,
        histogram=histogram(fit.eta, fit.params.skewt, bins),
    )


def diagnose(
    fit: FitResult,
    max_lag: int = DEFAULT_MAX_LAG,
    lb_lags: Sequence[int] = DEFAULT_LB_LAGS,
    level: float = DEFAULT_LB_LEVEL,
    bins="fd",
) -> DiagnosticsReport:
    """
    Ljung-Box degrees of freedom subtract the ARMA orders j + q; lags not
    exceeding them are skipped.
    """
    eta = fit.eta
    power = np.abs(eta) ** fit.params.aparch.delta
    max_lag = min(max_lag, eta.size - 1)
    fitted = fit.orders.j + fit.orders.q
    usable = [lag for lag in lb_lags if fitted < lag < eta.size]

    def tests(x):
        return tuple(ljung_box(x, lag, fitted) for lag in usable)

    report = DiagnosticsReport(
        acf_eta=acf(eta, max_lag, level),
        acf_power=acf(power, max_lag, level),
        ljung_box_eta=tests(eta),
        ljung_box_power=tests(power),
        summary=residual_summary(fit, bins),
        goodness_of_fit=histogram_gof(eta, fit.params.skewt, bins),
        level=level,
    )
    rejected = [
        result.lags for result in report.ljung_box_eta if result.p_value < level
    ]
    if rejected:
        app_log.info("Ljung-Box rejects white noise of eta at lags %s", rejected)
    return report
