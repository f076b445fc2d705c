import numpy as np
import pytest

from trig_wind.aparch import AparchParams, SkewTParams
from trig_wind.arfima import ArfimaParams
from trig_wind.estimation import ModelKind, ModelParams, Orders, ParameterLayout
from trig_wind.models import ConfigError
from trig_wind.seasonal import SeasonalSpec
from tests import desk_params, desk_spec


def test_orders_from_tuple():
    orders = Orders.from_tuple((2, 1, 1, 2))
    assert orders == Orders()
    assert str(orders) == "2,1,1,2"
    assert orders.as_tuple() == (2, 1, 1, 2)


def test_invalid_orders():
    with pytest.raises(ConfigError) as error:
        Orders.from_tuple((2, 1, 1))
    assert error.value.type == "invalid_orders"
    with pytest.raises(ValueError):
        Orders(Q=0)
    with pytest.raises(ValueError):
        Orders(j=-1)


def test_model_params_orders_and_dimension_check():
    params = desk_params()
    assert params.orders == Orders(j=1, q=0, Q=1, P=1)
    params.check_against(desk_spec())
    with pytest.raises(ConfigError) as error:
        params.check_against(SeasonalSpec())
    assert error.value.type == "dimension_mismatch"


def test_theta_must_be_finite():
    with pytest.raises(ValueError):
        ModelParams(theta=[1.0, np.nan])


def full_params(spec):
    return ModelParams(
        theta=np.linspace(1.0, 2.0, 4),
        p_exponents={"p12": 3.5, "p21": 0.8},
        arfima=ArfimaParams(d=-0.15, ar=(0.5, -0.2), ma=(0.3,), truncation=50),
        aparch=AparchParams(alpha0=0.02, alpha=(0.12,), gamma=(-0.3,), beta=(0.5, 0.3), delta=1.4),
        skewt=SkewTParams(xi=1.1, nu=7.0),
    )


def test_layout_names():
    layout = ParameterLayout(desk_spec(), Orders(), ModelKind.pgen, truncation=50)
    assert layout.names == [
        "intercept", "trend", "theta_12", "theta_21",
        "p12", "p21",
        "d", "phi_1", "phi_2", "theta_ma_1",
        "alpha_0", "alpha_1", "gamma_1", "beta_1", "beta_2",
        "delta", "xi", "nu",
    ]
    assert len(layout) == 18
    fourier = ParameterLayout(desk_spec(), Orders(), ModelKind.fourier)
    assert "p12" not in fourier.names


def test_pack_unpack_round_trip():
    spec = desk_spec()
    layout = ParameterLayout(spec, Orders(), ModelKind.pgen, truncation=50)
    params = full_params(spec)
    restored = layout.unpack(layout.pack(params))
    np.testing.assert_allclose(layout.natural(restored), layout.natural(params), rtol=1e-10, atol=1e-12)
    assert restored.arfima.truncation == 50


def test_unpack_is_always_valid():
    layout = ParameterLayout(desk_spec(), Orders(), ModelKind.pgen)
    for seed in range(20):
        u = np.random.default_rng(seed).normal(scale=1.5, size=len(layout))
        params = layout.unpack(u)
        assert -0.5 < params.arfima.d < 0.5
        assert all(0.05 <= p <= 100.0 for p in params.p_exponents.values())
        assert params.skewt.nu > 2


def test_null_values():
    layout = ParameterLayout(desk_spec(), Orders(), ModelKind.pgen)
    nulls = dict(zip(layout.names, layout.null_values()))
    assert nulls["p12"] == 2.0
    assert nulls["xi"] == 1.0
    assert nulls["d"] == 0.0


def test_at_p_bound():
    layout = ParameterLayout(desk_spec(), Orders(), ModelKind.pgen)
    params = full_params(desk_spec()).copy(update={"p_exponents": {"p12": 100.0, "p21": 2.0}})
    assert layout.at_p_bound(params) == ["p12"]
