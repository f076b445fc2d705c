import numpy as np
import pytest

from trig_wind.models import ConfigError
from trig_wind.seasonal import (
    STATION_INDICATOR,
    SeasonalSpec,
    active_functions,
    basis_function,
    column_labels,
    cos_p,
    design_matrix,
    mean_curve,
    regressor_row,
    sin_p,
)

phi = np.linspace(-np.pi, np.pi, 101)


def test_p2_is_ordinary_trigonometry():
    np.testing.assert_allclose(sin_p(phi, 2.0), np.sin(phi), atol=1e-12)
    np.testing.assert_allclose(cos_p(phi, 2.0), np.cos(phi), atol=1e-12)


@pytest.mark.parametrize("p", [0.7, 1.0, 3.5, 40.0])
def test_points_lie_on_the_p_circle(p):
    total = np.abs(sin_p(phi, p)) ** p + np.abs(cos_p(phi, p)) ** p
    np.testing.assert_allclose(total, 1.0, rtol=1e-10)


def test_large_p_approaches_square_wave():
    assert sin_p(np.pi / 4, 100.0) == pytest.approx(2 ** -0.01)
    assert cos_p(np.pi / 4, 100.0) == pytest.approx(2 ** -0.01)


@pytest.mark.parametrize("p", [0.0, -1.0])
def test_invalid_exponent(p):
    with pytest.raises(ConfigError) as error:
        sin_p(phi, p)
    assert error.value.type == "invalid_exponent"


def test_basis_function_indices():
    t = np.arange(0, 300, 7.0)
    s = 144.0
    np.testing.assert_allclose(basis_function(1, s, t), 1.0)
    np.testing.assert_allclose(basis_function(2, s, t), np.cos(2 * np.pi * t / s), atol=1e-12)
    np.testing.assert_allclose(basis_function(3, s, t), np.sin(2 * np.pi * t / s), atol=1e-12)
    np.testing.assert_allclose(basis_function(4, s, t), np.cos(4 * np.pi * t / s), atol=1e-12)
    np.testing.assert_allclose(basis_function(5, s, t), np.sin(4 * np.pi * t / s), atol=1e-12)
    with pytest.raises(ConfigError):
        basis_function(0, s, t)


def test_default_layout():
    spec = SeasonalSpec()
    assert len(spec.active_cells()) == 12
    assert spec.exponent_names() == ["p12", "p13", "p14", "p15", "p21", "p31", "p41", "p51"]
    labels = column_labels(spec)
    assert labels[:3] == ("intercept", "trend", "theta_12")
    assert labels[-1] == "theta_51"
    assert len(labels) == 14


def test_active_functions_follow_indicator():
    spec = SeasonalSpec(indicator=((0, 1), (1, 0)))
    assert active_functions(spec) == [("diurnal", 2), ("annual", 2)]


def test_fourier_spec_fixes_exponents_at_two():
    spec = SeasonalSpec.fourier()
    assert set(spec.p_exponents.values()) == {2.0}
    assert len(spec.p_exponents) == 8


def test_with_exponents_accepts_a_vector():
    spec = SeasonalSpec(indicator=((0, 1), (1, 0))).with_exponents([1.5, 4.0])
    assert spec.p_exponents == {"p12": 1.5, "p21": 4.0}
    np.testing.assert_array_equal(spec.exponent_vector(), [1.5, 4.0])


def test_design_matrix_columns():
    spec = SeasonalSpec(s1=1000.0, s2=100.0, indicator=((0, 1), (1, 1)), t_scale=50.0)
    t = np.arange(10)
    design = design_matrix(spec, range(10))
    assert design.shape == (10, 5)
    np.testing.assert_allclose(design[:, 0], 1.0)
    np.testing.assert_allclose(design[:, 1], t / 50.0)
    np.testing.assert_allclose(design[:, 2], np.cos(2 * np.pi * t / 100.0), atol=1e-12)
    np.testing.assert_allclose(design[:, 3], np.cos(2 * np.pi * t / 1000.0), atol=1e-12)
    np.testing.assert_allclose(
        design[:, 4], np.cos(2 * np.pi * t / 1000.0) * np.cos(2 * np.pi * t / 100.0), atol=1e-12
    )


def test_design_matrix_without_trend():
    spec = SeasonalSpec(indicator=((0, 1),), include_trend=False, s1=1000.0, s2=100.0)
    assert column_labels(spec) == ("intercept", "theta_12")
    assert design_matrix(spec, range(3)).shape == (3, 2)


def test_mean_curve_and_regressor_row():
    spec = SeasonalSpec(indicator=((0, 1),), s1=1000.0, s2=100.0)
    theta = [5.0, 0.01, 1.5]
    t = np.arange(20)
    np.testing.assert_allclose(
        mean_curve(spec, theta, t), 5.0 + 0.01 * t + 1.5 * np.cos(2 * np.pi * t / 100.0)
    )
    row = regressor_row(spec, 7)
    assert row.labels == ("intercept", "trend", "theta_12")
    np.testing.assert_allclose(row.values @ theta, mean_curve(spec, theta, [7])[0])


def test_design_matrix_errors():
    with pytest.raises(ConfigError):
        design_matrix(SeasonalSpec(), [])
    with pytest.raises(ConfigError):
        regressor_row(SeasonalSpec(), -1)


@pytest.mark.parametrize(
    "fields",
    [
        {"indicator": ((1, 1), (1, 0))},
        {"indicator": ((0, 1), (1,))},
        {"indicator": ((0, 2),)},
        {"s1": 100.0, "s2": 144.0},
        {"p_exponents": {"p12": 150.0}},
        {"p_exponents": {"p12": -1.0}},
        {"t_scale": 0.0},
        {"fixed_exponents": ("p12",)},
    ],
)
def test_invalid_specs(fields):
    with pytest.raises(ValueError):
        SeasonalSpec(**fields)


def test_unscaled_trend_until_resolved():
    spec = SeasonalSpec()
    assert spec.trend_scale == 1.0
    assert spec.with_t_scale(400).trend_scale == 400.0
    assert spec.indicator == STATION_INDICATOR


def test_fixed_exponents_are_not_free():
    spec = SeasonalSpec(p_exponents={"p12": 1.5, "p31": 3.0}, fixed_exponents=("p12", "p31"))
    assert spec.free_exponent_names() == ["p13", "p14", "p15", "p21", "p41", "p51"]
    assert spec.exponent("diurnal", 2) == 1.5
    assert spec.with_t_scale(10).fixed_exponents == ("p12", "p31")


@pytest.mark.parametrize("p", [1.4, 2.0, 3.0])
def test_design_repeats_every_year(p):
    spec = SeasonalSpec(include_trend=False)
    spec = spec.with_exponents({name: p for name in spec.exponent_names()})
    t = np.arange(0, 52560, 997)
    rows = design_matrix(spec, t)
    np.testing.assert_allclose(design_matrix(spec, t + 52560), rows, atol=1e-9)
    np.testing.assert_allclose(design_matrix(spec, t + 3 * 52560), rows, atol=1e-9)
