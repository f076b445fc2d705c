import numpy as np


def write_rows(path, rows, header="timestamp,speed_ms"):
    path.write_text("\n".join([header, *rows]) + "\n")
    return path


def grid_rows(values, start="2010-01-01T00:00:00Z"):
    stamps = np.datetime64(start.rstrip("Z")) + np.arange(len(values)) * np.timedelta64(10, "m")
    return [f"{stamp}Z,{'' if value is None else value}" for stamp, value in zip(stamps, values)]


def desk_spec():
    from trig_wind.seasonal import SeasonalSpec

    return SeasonalSpec(s1=1440.0, s2=144.0, indicator=((0, 1), (1, 0)), t_scale=3000.0)


def desk_orders():
    from trig_wind.estimation import Orders

    return Orders(j=1, q=0, Q=1, P=1)


def desk_params():
    from trig_wind.aparch import AparchParams, SkewTParams
    from trig_wind.arfima import ArfimaParams
    from trig_wind.estimation import ModelParams

    return ModelParams(
        theta=[6.0, 0.5, 1.0, 0.5],
        arfima=ArfimaParams(d=0.2, ar=(0.3,), truncation=200),
        aparch=AparchParams(alpha0=0.05, alpha=(0.1,), gamma=(0.1,), beta=(0.8,), delta=1.5),
        skewt=SkewTParams(xi=1.2, nu=8.0),
    )


def desk_series(n=4000, seed=1):
    from trig_wind.simulation import simulate

    return simulate(desk_params(), desk_spec(), n, seed=seed, station="desk")


def params_fit(series, params=None, spec=None, model="fourier", orders=None):
    """FitResult holding fixed parameters, for tests that need no optimiser."""
    from trig_wind.estimation import FitResult, ParameterLayout, conditional_path, qml_negloglik
    from trig_wind.estimation.fit import information_criteria

    params = params or desk_params()
    spec = spec or desk_spec()
    spec = params.seasonal(spec)
    orders = orders or params.orders
    layout = ParameterLayout(spec, orders, model, params.arfima.truncation)
    t = np.arange(len(series))
    values = np.asarray(series.values, dtype=float)
    path = conditional_path(values, t, params, spec)
    loglik = -qml_negloglik(values, t, params, spec)
    bic, aic = information_criteria(loglik, len(layout), t.size)
    return FitResult(
        model=model,
        spec=spec,
        orders=orders,
        params=params,
        param_names=tuple(layout.names),
        estimates=layout.natural(params),
        null_values=layout.null_values(),
        loglik=loglik,
        bic=bic,
        aic=aic,
        n_obs=t.size,
        start=0,
        w_variance=float(np.var(values)),
        residuals=path.residuals,
        innovations=path.innovations,
        sigma=path.sigma,
        eta=path.eta,
        converged=True,
        iterations=0,
    )
