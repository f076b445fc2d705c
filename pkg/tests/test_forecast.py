import numpy as np
import pytest
from pydantic import ValidationError

from trig_wind.aparch import asymmetric_power, aparch_scale_path, skew_t_sample, unconditional_level
from trig_wind.arfima import ArfimaParams
from trig_wind.estimation import STATION_PRESETS
from trig_wind.forecast import (
    FittedModelForecaster,
    ForecastPath,
    OracleForecaster,
    PersistenceForecaster,
    forecast,
    forecast_mean,
    forecast_scale,
    persistence_forecast,
    scale_path,
)
from trig_wind.models import ConfigError, DataError
from trig_wind.seasonal import mean_curve
from tests import desk_params, desk_series, desk_spec, params_fit


@pytest.fixture(scope="module")
def series():
    return desk_series(n=2000, seed=3)


@pytest.fixture(scope="module")
def model(series):
    return params_fit(series)


def _with_arfima(arfima):
    return desk_params().copy(update={"arfima": arfima})


def test_white_noise_forecast_is_the_mean_curve(series):
    fitted = params_fit(series, _with_arfima(ArfimaParams()))
    mean = forecast_mean(fitted, series, origin=999, horizon=18)
    expected = mean_curve(desk_spec(), desk_params().theta, np.arange(1000, 1018))
    np.testing.assert_allclose(mean, expected)


def test_ar1_residual_decays_geometrically(series):
    fitted = params_fit(series, _with_arfima(ArfimaParams(ar=(0.5,))))
    origin = 1500
    mean = forecast_mean(fitted, series, origin=origin, horizon=6)
    deterministic = mean_curve(desk_spec(), desk_params().theta, np.arange(origin + 1, origin + 7))
    last = fitted.residuals[origin]
    np.testing.assert_allclose(mean - deterministic, last * 0.5 ** np.arange(1, 7))


def test_one_step_scale(model):
    aparch = model.params.aparch
    z = model.innovations[:800]
    scale = scale_path(model, z, 1)
    gamma, delta = aparch.gamma[0], aparch.delta
    expected = (
        aparch.alpha0
        + aparch.alpha[0] * asymmetric_power(z[-1], gamma, delta)
        + aparch.beta[0] * aparch_scale_path(z, aparch)[-1]
    )
    assert scale[0] == pytest.approx(float(expected))


def test_scale_converges_to_the_unconditional_level(model):
    scale = scale_path(model, model.innovations, 3000)
    level = unconditional_level(model.params.aparch, model.params.skewt)
    assert scale[-1] == pytest.approx(level, rel=1e-4)
    assert np.all(scale > 0)


def test_scale_forecast_matches_simulated_paths(series):
    preset = STATION_PRESETS["manschnow"]
    aparch, skewt, horizon, paths = preset.aparch, preset.skewt, 18, 100_000
    fitted = params_fit(series, desk_params().copy(update={"aparch": aparch, "skewt": skewt}))
    z = fitted.innovations
    past_scale = aparch_scale_path(z, aparch)
    past_terms = [asymmetric_power(z, gamma, aparch.delta) for gamma in aparch.gamma]

    rng = np.random.default_rng(17)
    scale = np.empty((horizon, paths))
    terms = np.empty((len(aparch.alpha), horizon, paths))
    for u in range(horizon):
        value = np.full(paths, aparch.alpha0)
        for l, alpha in enumerate(aparch.alpha, start=1):
            value += alpha * (terms[l - 1, u - l] if u >= l else past_terms[l - 1][u - l])
        for m, beta in enumerate(aparch.beta, start=1):
            value += beta * (scale[u - m] if u >= m else past_scale[u - m])
        scale[u] = value
        draws = value ** (1.0 / aparch.delta) * skew_t_sample(skewt, rng, paths)
        for row, gamma in enumerate(aparch.gamma):
            terms[row, u] = asymmetric_power(draws, gamma, aparch.delta)

    expected = forecast_scale(fitted, origin=len(series) - 1, horizon=horizon)
    np.testing.assert_allclose(scale.mean(axis=1), expected, rtol=0.01)


def test_scale_from_fit_matches_scale_from_history(series, model):
    inside = forecast_scale(model, origin=1200, horizon=10)
    replayed = forecast_scale(model, origin=1200, horizon=10, history=series)
    np.testing.assert_allclose(inside, replayed)


def test_scale_outside_the_estimation_window(model):
    with pytest.raises(DataError) as error:
        forecast_scale(model, origin=5000)
    assert error.value.type == "origin_outside_history"


def test_forecast_path(series, model):
    path = forecast(model, series, origin=1000, horizon=18)
    assert isinstance(path, ForecastPath)
    assert path.origin == 1000 and path.horizon == 18
    assert path.mean.shape == path.scale_delta.shape == (18,)
    np.testing.assert_allclose(path.mean, forecast_mean(model, series, 1000, 18))


def test_forecast_path_lengths_are_checked():
    with pytest.raises(ValidationError):
        ForecastPath(origin=0, horizon=3, mean=np.zeros(2), scale_delta=np.ones(3))
    with pytest.raises(ValidationError):
        ForecastPath(origin=0, horizon=2, mean=np.zeros(2), scale_delta=np.array([1.0, 0.0]))


@pytest.mark.parametrize(
    "origin, horizon, error_class, error_type",
    [
        (100, 0, ConfigError, "invalid_horizon"),
        (100, 145, ConfigError, "horizon_too_long"),
        (-1, 5, DataError, "origin_outside_history"),
        (2000, 5, DataError, "origin_outside_history"),
    ],
)
def test_invalid_requests(series, model, origin, horizon, error_class, error_type):
    with pytest.raises(error_class) as error:
        forecast_mean(model, series, origin, horizon)
    assert error.value.type == error_type


def test_persistence(series):
    np.testing.assert_array_equal(persistence_forecast(series, 10, 4), np.full(4, series.values[10]))
    forecaster = PersistenceForecaster()
    assert forecaster.name == "persistence"
    assert forecaster.refit(series, 10) is forecaster
    np.testing.assert_array_equal(forecaster.forecast(series, 10, 500), np.full(500, series.values[10]))


def test_oracle_returns_the_future(series):
    np.testing.assert_array_equal(OracleForecaster().forecast(series, 10, 3), series.values[11:14])


def test_fitted_forecaster_cache_matches_direct_filtering(series, model):
    forecaster = FittedModelForecaster(model)
    assert forecaster.name == "model fourier"
    forecaster.prepare(series)
    for origin in (300, 1000, 1900):
        np.testing.assert_allclose(
            forecaster.forecast(series, origin, 18),
            forecast_mean(model, series, origin, 18),
        )


def test_fitted_forecaster_trailing_window(series, model):
    forecaster = FittedModelForecaster(model, window=500)
    forecaster.prepare(series)
    np.testing.assert_allclose(
        forecaster.forecast(series, 1200, 6),
        forecast_mean(model, series, 1200, 6, window=500),
    )


def test_fitted_forecaster_stops_at_gaps(series, model):
    values = np.array(series.values)
    values[700] = np.nan
    gappy = series.copy(update={"values": values, "gap_mask": np.isnan(values)})
    forecaster = FittedModelForecaster(model)
    forecaster.prepare(gappy)
    forecaster.forecast(gappy, 699, 3)
    with pytest.raises(DataError) as error:
        forecaster.forecast(gappy, 800, 3)
    assert error.value.type == "unfilled_gaps"


def test_fitted_forecaster_ignores_cache_of_other_history(series, model):
    forecaster = FittedModelForecaster(model)
    forecaster.prepare(series)
    other = series.copy(update={"values": series.values * 1.5})
    np.testing.assert_allclose(
        forecaster.forecast(other, 1000, 6),
        forecast_mean(model, other, 1000, 6),
    )
    assert forecaster._prepared.history is series
