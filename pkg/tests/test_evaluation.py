import json

import numpy as np
import pytest
from pydantic import ValidationError

from trig_wind.evaluation import (
    MONTHS,
    POWER_CURVES,
    EvalReport,
    PowerCurve,
    draw_origins,
    mae,
    metric_names,
    pce,
    pce_loss,
    pce_split,
    pce_total,
    power_curve,
    power_output,
    rmse,
    rolling_backtest,
    rolling_backtest_async,
    valid_origins,
)
from trig_wind.forecast import OracleForecaster, PersistenceForecaster
from trig_wind.ingestion import IndexRange, SampleSplit, WindSeries
from trig_wind.models import ConfigError, DataError

MD77 = POWER_CURVES["fuhrlaender_md77"]


@pytest.fixture(scope="module")
def series():
    rng = np.random.default_rng(7)
    n = 12_000
    values = 7.0 + 4.0 * np.sin(2 * np.pi * np.arange(n) / 144) + rng.normal(0, 1.5, n)
    return WindSeries(
        start_timestamp="2010-01-01T00:00:00Z",
        values=np.abs(values),
        gap_mask=np.zeros(n, dtype=bool),
    )


@pytest.fixture(scope="module")
def halves(series):
    middle = len(series) // 2
    return SampleSplit(
        in_sample=IndexRange(start=0, stop=middle),
        out_sample=IndexRange(start=middle, stop=len(series)),
    )


def test_power_curve_zones():
    assert power_output(2.9) == 0.0
    assert power_output(6.5) == pytest.approx(187.5)
    assert power_output(13.0) == 1500.0
    assert power_output(19.9) == 1500.0
    assert power_output(20.0) == 0.0
    np.testing.assert_allclose(power_output([0.0, 13.0, 25.0]), [0.0, 1500.0, 0.0])


def test_power_curve_with_fixed_efficiency():
    curve = MD77.copy(update={"cp": 0.4})
    expected = 0.5 * 0.4 * curve.rho * curve.rotor_area * 8.0 ** 3 / 1000.0
    assert power_output(8.0, curve) == pytest.approx(expected)
    assert power_output(12.9, curve) <= curve.rated_power


def test_power_curve_validation():
    with pytest.raises(ValidationError):
        PowerCurve(cut_in=5.0, rated_speed=4.0, cut_out=20.0, rated_power=1.0, rotor_area=1.0)
    with pytest.raises(ValidationError):
        PowerCurve(cut_in=1.0, rated_speed=4.0, cut_out=20.0, rated_power=1.0, rotor_area=1.0, cp=1.5)
    with pytest.raises(ConfigError) as error:
        power_curve("vestas")
    assert error.value.type == "unknown_power_curve"
    assert power_curve("ge_1_6").rated_power == 1600.0
    with pytest.raises(DataError):
        power_output(-1.0)


def test_pce_loss_cases():
    assert pce_loss(13.0, 6.5, 0.25) == pytest.approx(0.25 * 1312.5)
    assert pce_loss(6.5, 13.0, 0.25) == pytest.approx(0.75 * 1312.5)
    assert pce_loss(10.0, 10.0, 0.5) == 0.0
    # past the cut-out an under-forecast speed over-forecasts power
    assert pce_loss(21.0, 15.0, 0.25) == pytest.approx(-375.0)
    assert pce_loss(5.0, -1.0, 0.5) == pytest.approx(0.5 * power_output(5.0))
    with pytest.raises(ConfigError):
        pce_loss(5.0, 4.0, 1.5)


def test_pce_is_affine_in_tau():
    rng = np.random.default_rng(1)
    actuals = rng.uniform(0, 25, 400)
    forecasts = np.abs(actuals + rng.normal(0, 3, 400))
    under, over = pce_split(actuals, forecasts)
    for tau in (0.0, 0.25, 0.5, 1.0):
        assert pce(actuals, forecasts, tau) == pytest.approx((tau * under + (1 - tau) * over) / 400)
    assert pce(actuals, forecasts, 0.0) == pytest.approx(over / 400)
    assert pce(actuals, forecasts, 1.0) == pytest.approx(under / 400)
    assert pce_total(actuals, forecasts, 0.25) == pytest.approx(pce(actuals, forecasts, 0.25) * 400)
    with pytest.raises(ConfigError):
        pce_total(actuals, forecasts, -0.1)


def test_rmse_and_mae():
    assert rmse([1.0, 2.0], [1.0, 4.0]) == pytest.approx(np.sqrt(2.0))
    assert mae([1.0, 2.0], [1.0, 4.0]) == 1.0
    with pytest.raises(DataError) as error:
        rmse([1.0], [1.0, 2.0])
    assert error.value.type == "length_mismatch"
    with pytest.raises(DataError):
        mae([], [])


def test_metric_names():
    assert metric_names([0.25, 0.5]) == ("RMSE", "MAE", "PCE(0.25)", "PCE(0.5)")


def test_draw_origins(series, halves):
    first = draw_origins(series, halves, 18, 200, seed=3)
    again = draw_origins(series, halves, 18, 200, seed=3)
    np.testing.assert_array_equal(first, again)
    assert first.min() >= 6000 and first.max() <= len(series) - 19
    every = draw_origins(series, halves, 18, None, seed=3)
    np.testing.assert_array_equal(every, valid_origins(series, halves, 18))
    assert every.size == 6000 - 18
    with pytest.raises(ConfigError):
        draw_origins(series, halves, 18, 0, seed=3)
    with pytest.raises(DataError) as error:
        draw_origins(series, halves, 6000, 10, seed=3)
    assert error.value.type == "insufficient_data"


def test_oracle_scores_zero(series, halves):
    report = rolling_backtest(series, halves, [OracleForecaster()], n_origins=300, seed=1)
    assert report.models == ("oracle",)
    assert report.metrics == ("RMSE", "MAE", "PCE(0.25)", "PCE(0.5)", "PCE(0.75)")
    totals = report.values[0, :, -1]
    np.testing.assert_array_equal(totals, 0.0)


def test_report_layout(series, halves):
    models = [PersistenceForecaster(), OracleForecaster()]
    report = rolling_backtest(series, halves, models, horizon=6, n_origins=500, seed=2)
    assert report.values.shape == (2, 5, len(MONTHS) + 1)
    assert report.origins_used == 500 and report.horizon == 6
    assert report.month_counts[-1] == 500
    assert report.month_counts[:-1].sum() == 500
    assert np.isnan(report.value("persistence", "RMSE", month=6))
    assert report.total("persistence", "RMSE") > report.total("persistence", "MAE") > 0
    frame = report.to_frame()
    assert list(frame.index[:2]) == ["persistence RMSE", "persistence MAE"]
    assert list(frame.columns)[-1] == "Total"


def test_report_writers(tmp_path, series, halves):
    report = rolling_backtest(series, halves, [PersistenceForecaster()], n_origins=100)
    report.write_csv(tmp_path / "report.csv")
    report.write_json(tmp_path / "report.json")
    assert (tmp_path / "report.csv").read_text().splitlines()[0].endswith("December,Total")
    document = json.loads((tmp_path / "report.json").read_text())
    assert document["origins_used"] == 100
    assert document["rows"]["persistence RMSE"][-1] == pytest.approx(
        report.total("persistence", "RMSE")
    )
    assert None in document["rows"]["persistence MAE"]


def test_report_rejects_negative_errors():
    values = np.zeros((1, 2, len(MONTHS) + 1))
    values[0, 0, 0] = -1.0
    with pytest.raises(ValidationError):
        EvalReport(
            models=("m",),
            metrics=("RMSE", "MAE"),
            values=values,
            month_counts=np.zeros(13, dtype=int),
            origins_used=1,
            horizon=1,
            curve="fuhrlaender_md77",
        )


def test_scoring_every_step(series, halves):
    last = rolling_backtest(series, halves, [PersistenceForecaster()], horizon=4, n_origins=50)
    every = rolling_backtest(
        series, halves, [PersistenceForecaster()], horizon=4, n_origins=50, score_all_steps=True
    )
    assert every.month_counts[-1] == 4 * last.month_counts[-1]


def test_backtest_options(series, halves):
    with pytest.raises(ConfigError):
        rolling_backtest(series, halves, [])
    with pytest.raises(ConfigError):
        rolling_backtest(series, halves, [PersistenceForecaster()], taus=[2.0])
    with pytest.raises(ConfigError):
        rolling_backtest(series, halves, [PersistenceForecaster()], refit_every=0)


def test_refit_blocks_refit_once_per_block(series, halves):
    refits = []

    class Counting(PersistenceForecaster):
        def refit(self, history, origin):
            refits.append(origin)
            return self

    report = rolling_backtest(series, halves, [Counting()], n_origins=25, refit_every=10)
    assert len(refits) == 3
    assert refits == sorted(refits)
    plain = rolling_backtest(series, halves, [PersistenceForecaster()], n_origins=25)
    np.testing.assert_allclose(report.values, plain.values, equal_nan=True)


@pytest.mark.gen_test
async def test_async_backtest_matches_sync(series, halves):
    models = [PersistenceForecaster(), OracleForecaster()]
    expected = rolling_backtest(series, halves, models, horizon=6, n_origins=400, seed=5)
    report = await rolling_backtest_async(
        series, halves, models, horizon=6, n_origins=400, seed=5, workers=3
    )
    np.testing.assert_allclose(report.values, expected.values, equal_nan=True)
    np.testing.assert_array_equal(report.month_counts, expected.month_counts)


def test_persistence_over_every_origin_has_closed_form(series, halves):
    report = rolling_backtest(series, halves, [PersistenceForecaster()], horizon=1, n_origins=None)
    steps = np.diff(series.values[halves.out_sample.start:])
    assert report.origins_used == steps.size
    assert report.total("persistence", "RMSE") == pytest.approx(
        np.sqrt(np.mean(steps ** 2)), rel=1e-10
    )
    assert report.total("persistence", "MAE") == pytest.approx(np.mean(np.abs(steps)), rel=1e-10)


@pytest.mark.gen_test(timeout=60)
async def test_reports_are_byte_identical(tmp_path, series, halves):
    models = [PersistenceForecaster(), OracleForecaster()]
    written = []
    for run in range(3):
        if run < 2:
            report = rolling_backtest(series, halves, models, n_origins=300, seed=11)
        else:
            report = await rolling_backtest_async(
                series, halves, models, n_origins=300, seed=11, workers=4
            )
        report.write_csv(tmp_path / f"{run}.csv")
        report.write_json(tmp_path / f"{run}.json")
        written.append(((tmp_path / f"{run}.csv").read_bytes(), (tmp_path / f"{run}.json").read_bytes()))
    assert written[0] == written[1] == written[2]
