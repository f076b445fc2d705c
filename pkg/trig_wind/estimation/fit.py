from typing import Iterable, List, Optional, Sequence, Tuple

import numdifftools as nd
import numpy as np
from scipy import stats
from scipy.optimize import minimize
from tornado.log import app_log, gen_log

from trig_wind.aparch import AparchParams, SkewTParams, check_stationarity
from trig_wind.arfima import DEFAULT_TRUNCATION, ArfimaParams, pacf_to_coefs
from trig_wind.estimation.likelihood import conditional_path, qml_negloglik
from trig_wind.estimation.params import ModelKind, ModelParams, Orders, ParameterLayout
from trig_wind.estimation.stage1 import in_sample_values, resolve_spec, stage1_start_values
from trig_wind.ingestion import IndexRange, WindSeries
from trig_wind.models import (
    ConfigError,
    ConvergenceError,
    DataError,
    FrozenModel,
    TrigWindError,
)
from trig_wind.seasonal import SeasonalSpec, design_matrix

DEFAULT_MAX_ITER = 2000
HESSIAN_STEP = 1e-4
PENALTY = 1e10
CRITERIA = ("bic", "mse")


class FitResult(FrozenModel):
    model: ModelKind
    spec: SeasonalSpec
    orders: Orders
    params: ModelParams
    param_names: Tuple[str, ...]
    estimates: np.ndarray
    std_errors: Optional[np.ndarray] = None
    null_values: np.ndarray
    loglik: float
    bic: float
    aic: float
    n_obs: int
    start: int
    w_variance: float
    residuals: np.ndarray
    innovations: np.ndarray
    sigma: np.ndarray
    eta: np.ndarray
    converged: bool
    iterations: int

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    @property
    def stop(self) -> int:
        return self.start + self.n_obs

    @property
    def mse(self) -> float:
        """In-sample mean square error of the one-step mean predictions."""
        return float(np.mean(self.innovations ** 2))

    @property
    def r_squared(self) -> float:
        return 1.0 - self.mse / self.w_variance

    @property
    def has_std_errors(self) -> bool:
        return self.std_errors is not None

    def to_document(self) -> dict:
        errors = (
            self.std_errors.tolist() if self.std_errors is not None else [None] * self.n_params
        )
        return {
            "model": self.model.value,
            "orders": self.orders.dict(),
            "seasonal": self.spec.dict(),
            "parameters": {
                name: {"estimate": float(estimate), "std_error": error}
                for name, estimate, error in zip(self.param_names, self.estimates, errors)
            },
            "loglik": self.loglik,
            "bic": self.bic,
            "aic": self.aic,
            "mse": self.mse,
            "r_squared": self.r_squared,
            "n_obs": self.n_obs,
            "start": self.start,
            "converged": self.converged,
            "iterations": self.iterations,
        }

    def to_table(self) -> str:
        rows = ["%-14s %14s %12s" % ("", "Estimate", "Std. Error")]
        if self.has_std_errors:
            for row in significance_report(self):
                rows.append(
                    "%-14s %14s %12.6g"
                    % (row.name, f"{row.estimate:.6g}{row.stars}", row.std_error)
                )
        else:
            for name, estimate in zip(self.param_names, self.estimates):
                rows.append("%-14s %14.6g %12s" % (name, estimate, "n/a"))
        rows.append("%-14s %14.4f" % ("BIC", self.bic))
        rows.append("*** significance at 1%, ** at 5%, * at 10%")
        return "\n".join(rows)


class SignificanceRow(FrozenModel):
    name: str
    estimate: float
    std_error: float
    null: float
    t_stat: float
    p_value: float

    @property
    def stars(self) -> str:
        for level, stars in ((0.01, "***"), (0.05, "**"), (0.1, "*")):
            if self.p_value < level:
                return stars
        return ""


def significance_report(fit: FitResult) -> List[SignificanceRow]:
    """
    Wald t statistics against 0, except xi (null 1) and the p exponents
    (null 2); two-sided normal p-values.
    """
    if fit.std_errors is None:
        raise DataError(
            error_type="missing_std_errors",
            message="the fit has no standard errors",
        )
    report = []
    for name, estimate, error, null in zip(
        fit.param_names, fit.estimates, fit.std_errors, fit.null_values
    ):
        t_stat = (estimate - null) / error
        report.append(
            SignificanceRow(
                name=name,
                estimate=estimate,
                std_error=error,
                null=null,
                t_stat=t_stat,
                p_value=2.0 * stats.norm.sf(abs(t_stat)),
            )
        )
    return report


def information_criteria(loglik: float, n_params: int, n_obs: int) -> Tuple[float, float]:
    """Per-observation (BIC, AIC)."""
    bic = (-2.0 * loglik + n_params * np.log(n_obs)) / n_obs
    aic = (-2.0 * loglik + 2.0 * n_params) / n_obs
    return float(bic), float(aic)


def initial_params(
    theta, exponents, residuals, orders: Orders, truncation: int
) -> ModelParams:
    beta = (0.8 / orders.P,) * orders.P if orders.P else ()
    alpha = (0.1,) + (0.01,) * (orders.Q - 1)
    persistence = sum(alpha) * 0.8 + sum(beta)
    level = float(np.mean(np.abs(residuals))) or 1.0
    return ModelParams(
        theta=theta,
        p_exponents=exponents,
        arfima=ArfimaParams(
            d=0.1,
            ar=tuple(pacf_to_coefs([0.1] * orders.j)),
            ma=tuple(-pacf_to_coefs([0.1] * orders.q)),
            truncation=truncation,
        ),
        aparch=AparchParams(
            alpha0=max(level * (1.0 - persistence), 1e-4),
            alpha=alpha,
            gamma=(0.0,) * orders.Q,
            beta=beta,
            delta=1.0,
        ),
        skewt=SkewTParams(xi=1.0, nu=8.0),
    )


def _standard_errors(total, layout: ParameterLayout, u_hat: np.ndarray):
    try:
        hessian = nd.Hessian(total, step=HESSIAN_STEP)(u_hat)
        np.linalg.cholesky(hessian)
    except (np.linalg.LinAlgError, ValueError):
        gen_log.warning("Hessian is not positive definite, standard errors unavailable")
        return None
    jacobian = nd.Jacobian(layout.natural_from_free, step=1e-6)(u_hat)
    covariance = jacobian @ np.linalg.inv(hessian) @ jacobian.T
    variances = np.diag(covariance)
    if not np.all(np.isfinite(variances)) or np.any(variances < 0):
        gen_log.warning("negative variance estimates, standard errors unavailable")
        return None
    return np.sqrt(variances)


def fit(
    series: WindSeries,
    spec: SeasonalSpec,
    orders: Orders = Orders(),
    model: ModelKind = ModelKind.fourier,
    in_sample: Optional[IndexRange] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    truncation: int = DEFAULT_TRUNCATION,
    standard_errors: bool = True,
) -> FitResult:
    """
    Quasi-maximum-likelihood fit of mean, ARFIMA, APARCH and skew-t blocks
    jointly, started from the least-squares regression.
    """
    model = ModelKind(model)
    t, values = in_sample_values(series, in_sample)
    n_obs = t.size
    spec = resolve_spec(spec, n_obs)
    if model == ModelKind.fourier:
        spec = spec.with_exponents({name: 2.0 for name in spec.exponent_names()})
    layout = ParameterLayout(spec, orders, model, truncation)
    if n_obs < 10 * len(layout):
        raise DataError(
            error_type="insufficient_data",
            message=f"{n_obs} observations for {len(layout)} parameters",
        )

    theta, exponents = stage1_start_values(series, spec, model, in_sample)
    start_spec = spec.with_exponents(exponents)
    residuals = values - design_matrix(start_spec, t) @ theta
    start = initial_params(
        theta,
        exponents if model == ModelKind.pgen else {},
        residuals,
        orders,
        truncation,
    )

    def total(u) -> float:
        try:
            params = layout.unpack(u)
        except (ValueError, TrigWindError):
            return np.inf
        return qml_negloglik(values, t, params, spec)

    def objective(u) -> float:
        value = total(u) / n_obs
        return value if np.isfinite(value) else PENALTY

    app_log.info(
        "fitting %s model, orders %s, %d parameters on %d observations",
        model.value,
        orders,
        len(layout),
        n_obs,
    )
    solution = minimize(
        objective,
        layout.pack(start),
        method="L-BFGS-B",
        options={"maxiter": max_iter, "maxfun": 50 * max_iter, "ftol": 1e-8},
    )
    if solution.success:
        app_log.info(
            "converged after %d iterations, objective %.8f", solution.nit, solution.fun
        )
    else:
        gen_log.warning(
            "optimiser stopped after %d iterations without converging: %s",
            solution.nit,
            solution.message,
        )

    params = layout.unpack(solution.x)
    for name in layout.at_p_bound(params):
        gen_log.warning("exponent %s ended at its bound", name)
    check_stationarity(params.aparch, params.skewt)

    path = conditional_path(values, t, params, spec)
    loglik = -qml_negloglik(values, t, params, spec)
    if not np.isfinite(loglik):
        raise ConvergenceError(
            error_type="invalid_optimum", message="log-likelihood is not finite"
        )
    bic, aic = information_criteria(loglik, len(layout), n_obs)
    errors = _standard_errors(total, layout, solution.x) if standard_errors else None

    return FitResult(
        model=model,
        spec=spec,
        orders=orders,
        params=params,
        param_names=tuple(layout.names),
        estimates=layout.natural(params),
        std_errors=errors,
        null_values=layout.null_values(),
        loglik=loglik,
        bic=bic,
        aic=aic,
        n_obs=n_obs,
        start=int(t[0]),
        w_variance=float(np.var(values)),
        residuals=path.residuals,
        innovations=path.innovations,
        sigma=path.sigma,
        eta=path.eta,
        converged=bool(solution.success),
        iterations=int(solution.nit),
    )


class OrderSelection(FrozenModel):
    best: Orders
    criterion: str
    fits: Tuple[FitResult, ...]

    @property
    def best_fit(self) -> FitResult:
        for candidate in self.fits:
            if candidate.orders == self.best:
                return candidate
        raise KeyError(str(self.best))


def _score(candidate: FitResult, criterion: str) -> float:
    return candidate.bic if criterion == "bic" else candidate.mse


def choose_best(fits: Sequence[FitResult], criterion: str = "bic") -> OrderSelection:
    """Smallest criterion among converged fits; ties go to fewer parameters."""
    if criterion not in CRITERIA:
        raise ConfigError(error_type="invalid_criterion", message=criterion)
    if not fits:
        raise ConfigError(error_type="no_candidates", message="no candidate orders")
    if len(fits) == 1:
        return OrderSelection(best=fits[0].orders, criterion=criterion, fits=tuple(fits))
    converged = [candidate for candidate in fits if candidate.converged]
    if not converged:
        raise ConvergenceError(
            error_type="no_converged_candidate",
            message=f"none of {len(fits)} candidate fits converged",
        )
    best = min(converged, key=lambda candidate: (_score(candidate, criterion), candidate.n_params))
    return OrderSelection(best=best.orders, criterion=criterion, fits=tuple(fits))


def select_order(
    series: WindSeries,
    spec: SeasonalSpec,
    candidates: Iterable[Orders],
    model: ModelKind = ModelKind.fourier,
    criterion: str = "bic",
    **fit_options,
) -> OrderSelection:
    candidates = list(candidates)
    if not candidates:
        raise ConfigError(error_type="no_candidates", message="no candidate orders")
    fits = []
    for orders in candidates:
        candidate = fit(series, spec, orders, model, **fit_options)
        app_log.info(
            "candidate %s: BIC %.6f, MSE %.6f, converged %s",
            orders,
            candidate.bic,
            candidate.mse,
            candidate.converged,
        )
        fits.append(candidate)
    return choose_best(fits, criterion)
