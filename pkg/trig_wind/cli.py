"""
Command line entry point.

    python -m trig_wind <subcommand> [--config=run.cfg] [--name=value ...]
    python -m trig_wind fit --model pgen --orders 2,1,1,2 --spec run.cfg
    python -m trig_wind forecast --origin 2010-06-01T12:00:00Z --horizon 18

Subcommands are registered with the `subcommand` decorator. Every stage writes
plain CSV/JSON artifacts into `output_dir`; the process exits with 0 on
success or the exit code of the `TrigWindError` that aborted it.
"""
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from functools import wraps
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from tornado import gen
from tornado.ioloop import IOLoop
from tornado.log import app_log

from trig_wind.config import RunConfig, load_config
from trig_wind.diagnostics import diagnose
from trig_wind.estimation import (
    FitResult,
    ModelKind,
    OrderSelection,
    choose_best,
    fit as fit_model,
    station_preset,
)
from trig_wind.evaluation import (
    EvalReport,
    power_curve,
    rolling_backtest,
    rolling_backtest_async,
)
from trig_wind.forecast import (
    FittedModelForecaster,
    PersistenceForecaster,
    forecast,
)
from trig_wind.ingestion import (
    SampleSplit,
    WindSeries,
    interpolate_gaps,
    parse_station_csv,
    split,
    split_fraction,
    write_station_csv,
)
from trig_wind.models import (
    ConfigError,
    ConvergenceError,
    DataError,
    InternalError,
    TrigWindError,
)
from trig_wind.simulation import simulate
from trig_wind.spectral import detect_peaks, periodogram, smooth, write_spectrum_csv

class Subcommand(NamedTuple):
    name: str
    summary: str
    handler: object


SUBCOMMANDS: Dict[str, Subcommand] = {}


def subcommand(name: str, summary: str):
    """
    Registers a coroutine `handler(config)` as `python -m trig_wind <name>`.
    The summary is printed by `python -m trig_wind help`.
    """

    def decorator(func):
        @wraps(func)
        async def wrapper(config: RunConfig):
            app_log.info("%s: started", name)
            await func(config)
            app_log.info("%s: finished", name)

        wrapper._subcommand = name
        SUBCOMMANDS[name] = Subcommand(name, summary, wrapper)
        return wrapper

    return decorator


class PipelineContext:
    """
    State shared by the stages of one run. The series, the split and the fits
    are computed on first use.
    """

    def __init__(self, config: RunConfig, executor=None):
        self.config = config
        self.executor = executor
        self._series: Optional[WindSeries] = None
        self._split: Optional[SampleSplit] = None
        self._selections: Optional[Dict[ModelKind, OrderSelection]] = None

    @property
    def series(self) -> WindSeries:
        if self._series is None:
            config = self.config
            if not config.data_path:
                raise ConfigError(error_type="missing_data_path", message="set data_path")
            raw = parse_station_csv(config.data_path, config.csv_format(), config.data_station)
            self._series = interpolate_gaps(raw, config.data_max_gap)
        return self._series

    @property
    def split(self) -> SampleSplit:
        if self._split is None:
            if self.config.data_split:
                self._split = split(self.series, self.config.data_split)
            else:
                self._split = split_fraction(self.series, self.config.data_split_fraction)
        return self._split

    def output_path(self, *parts: str) -> str:
        os.makedirs(self.config.output_dir, exist_ok=True)
        return self.config.output_path(*parts)

    def _fit(self, kind: ModelKind, orders) -> FitResult:
        config = self.config
        return fit_model(
            self.series,
            config.seasonal_spec(),
            orders,
            kind,
            in_sample=self.split.in_sample,
            max_iter=config.model_max_iter,
            truncation=config.model_truncation,
            standard_errors=config.model_std_errors,
        )

    async def selections(self) -> Dict[ModelKind, OrderSelection]:
        """Every model kind fitted at every candidate order, in parallel."""
        if self._selections is None:
            config = self.config
            candidates = config.candidate_orders() or [config.orders()]
            jobs = [(kind, orders) for kind in config.model_kinds for orders in candidates]
            loop = IOLoop.current()
            fits = await gen.multi(
                [
                    loop.run_in_executor(self.executor, self._fit, kind, orders)
                    for kind, orders in jobs
                ]
            )
            selections = {}
            for kind in config.model_kinds:
                kind_fits = [result for (job_kind, _), result in zip(jobs, fits) if job_kind == kind]
                selection = choose_best(kind_fits, config.model_criterion)
                best = selection.best_fit
                if config.model_require_converged and not best.converged:
                    raise ConvergenceError(
                        error_type="not_converged",
                        message=f"model {kind.value} at orders {best.orders}",
                    )
                selections[kind] = selection
            self._selections = selections
        return self._selections

    async def fits(self) -> Dict[ModelKind, FitResult]:
        return {kind: selection.best_fit for kind, selection in (await self.selections()).items()}

    def forecast_origin(self) -> int:
        if not self.config.backtest_origin:
            return self.split.in_sample.stop - 1
        position = self.series.index_of(self.config.backtest_origin)
        index = int(round(position))
        if not np.isclose(position, index) or not 0 <= index < len(self.series):
            raise DataError(
                error_type="origin_outside_history",
                message=f"{self.config.backtest_origin} is not a grid point of the series",
            )
        return index


async def spectrum_stage(context: PipelineContext) -> None:
    config = context.config
    values = context.series.values[context.split.in_sample.to_slice()]
    pg = smooth(periodogram(values), config.spectrum_bandwidth)
    peaks = detect_peaks(pg, max_period=values.size / 2.0, top_k=config.spectrum_top_k)
    write_spectrum_csv(pg, context.output_path("spectrum.csv"))
    pd.DataFrame({"period": peaks.periods, "power": peaks.strengths}).to_csv(
        context.output_path("peaks.csv"), index=False, float_format="%.10g"
    )
    app_log.info("spectral peaks at periods %s", peaks.ranked())


async def fit_stage(context: PipelineContext) -> None:
    for kind, selection in (await context.selections()).items():
        best = selection.best_fit
        document = best.to_document()
        document["selection"] = {
            "criterion": selection.criterion,
            "candidates": [
                {"orders": str(candidate.orders), "bic": candidate.bic, "mse": candidate.mse,
                 "converged": candidate.converged}
                for candidate in selection.fits
            ],
        }
        with open(context.output_path(f"fit_{kind.value}.json"), "w") as handle:
            json.dump(document, handle, indent=2)
        with open(context.output_path(f"fit_{kind.value}.txt"), "w") as handle:
            handle.write(best.to_table() + "\n")
        app_log.info(
            "model %s: orders %s, BIC %.6f, converged %s",
            kind.value,
            best.orders,
            best.bic,
            best.converged,
        )


async def forecast_stage(context: PipelineContext) -> None:
    config = context.config
    origin = context.forecast_origin()
    series = context.series
    for kind, result in (await context.fits()).items():
        path = forecast(
            result,
            series,
            origin,
            config.backtest_horizon,
            window=config.backtest_window,
        )
        steps = np.arange(1, path.horizon + 1)
        pd.DataFrame(
            {
                "step": steps,
                "timestamp": [
                    series.timestamp_at(origin + step).strftime("%Y-%m-%dT%H:%M:%SZ")
                    for step in steps
                ],
                "mean": path.mean,
                "scale": path.scale_delta ** (1.0 / result.params.aparch.delta),
            }
        ).to_csv(context.output_path(f"forecast_{kind.value}.csv"), index=False, float_format="%.10g")


async def evaluate_stage(context: PipelineContext) -> EvalReport:
    config = context.config
    models = [
        FittedModelForecaster(result, window=config.backtest_window)
        for result in (await context.fits()).values()
    ]
    models.append(PersistenceForecaster())
    options = dict(
        horizon=config.backtest_horizon,
        n_origins=config.n_origins,
        seed=config.backtest_seed,
        taus=config.backtest_taus,
        curve=power_curve(config.curve_name),
        score_all_steps=config.backtest_score_all_steps,
    )
    if config.refit_every:
        report = await IOLoop.current().run_in_executor(
            context.executor,
            lambda: rolling_backtest(
                context.series, context.split, models, refit_every=config.refit_every, **options
            ),
        )
    else:
        report = await rolling_backtest_async(
            context.series,
            context.split,
            models,
            workers=config.backtest_workers,
            executor=context.executor,
            **options,
        )
    report.write_csv(context.output_path("eval_report.csv"))
    report.write_json(context.output_path("eval_report.json"))
    return report


async def diagnose_stage(context: PipelineContext) -> None:
    config = context.config
    for kind, result in (await context.fits()).items():
        report = diagnose(
            result,
            max_lag=config.diagnose_max_lag,
            lb_lags=config.diagnose_lags,
            level=config.diagnose_level,
        )
        report.write(context.output_path(f"diagnostics_{kind.value}"))
        with open(context.output_path(f"diagnostics_{kind.value}", "summary.json"), "w") as handle:
            json.dump(
                {
                    "mse": report.summary.mse,
                    "r_squared": report.summary.r_squared,
                    "goodness_of_fit": report.goodness_of_fit.dict(),
                },
                handle,
                indent=2,
            )


STAGE_RUNNERS = {
    "spectrum": spectrum_stage,
    "fit": fit_stage,
    "forecast": forecast_stage,
    "evaluate": evaluate_stage,
    "diagnose": diagnose_stage,
}


async def run_pipeline(config: RunConfig, stages: Optional[Sequence[str]] = None) -> PipelineContext:
    """
    Runs `stages` (default `config.pipeline_stages`) in order. The first
    failing stage is logged by name and its error propagates.
    """
    stages = list(config.pipeline_stages if stages is None else stages)
    unknown = [stage for stage in stages if stage not in STAGE_RUNNERS]
    if unknown:
        raise ConfigError(error_type="unknown_stage", message=", ".join(unknown))
    with ThreadPoolExecutor(max_workers=config.backtest_workers) as executor:
        context = PipelineContext(config, executor)
        for stage in stages:
            app_log.info("stage %s", stage)
            try:
                await STAGE_RUNNERS[stage](context)
            except TrigWindError as error:
                app_log.error("stage %s failed: %s", stage, error.json())
                raise
    return context


@subcommand("spectrum", "smoothed periodogram and its strongest periods")
async def spectrum_command(config: RunConfig) -> None:
    await run_pipeline(config, ["spectrum"])


@subcommand("fit", "estimate the configured models and orders")
async def fit_command(config: RunConfig) -> None:
    await run_pipeline(config, ["fit"])


@subcommand("forecast", "mean and scale forecasts from one origin")
async def forecast_command(config: RunConfig) -> None:
    await run_pipeline(config, ["forecast"])


@subcommand("evaluate", "rolling-origin backtest against persistence")
async def evaluate_command(config: RunConfig) -> None:
    await run_pipeline(config, ["evaluate"])


@subcommand("diagnose", "residual autocorrelation, Ljung-Box and histogram checks")
async def diagnose_command(config: RunConfig) -> None:
    await run_pipeline(config, ["diagnose"])


@subcommand("pipeline", "run the stages listed in pipeline_stages")
async def pipeline_command(config: RunConfig) -> None:
    await run_pipeline(config)


@subcommand("simulate", "write a synthetic series from a station parameter preset")
async def simulate_command(config: RunConfig) -> None:
    params, spec = station_preset(config.simulate_station)
    series = simulate(
        params,
        spec,
        config.simulate_n,
        seed=config.simulate_seed,
        station=config.simulate_station,
    )
    path = config.simulate_output
    if not path:
        os.makedirs(config.output_dir, exist_ok=True)
        path = config.output_path(f"simulated_{config.simulate_station}.csv")
    write_station_csv(series, path, config.csv_format())
    app_log.info("wrote %d simulated points to %s", len(series), path)


@subcommand("help", "list the subcommands")
async def help_command(config: RunConfig) -> None:
    for command in SUBCOMMANDS.values():
        print(f"{command.name:10} {command.summary}")


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv if argv is None else argv
    try:
        positional, config, parser = load_config(argv)
        parser.run_parse_callbacks()
        name = positional[0] if positional else "pipeline"
        command = SUBCOMMANDS.get(name)
        if command is None:
            raise ConfigError(
                error_type="unknown_subcommand",
                message=f"{name}; choose one of {', '.join(SUBCOMMANDS)}",
            )
        io_loop = IOLoop()
        try:
            io_loop.run_sync(lambda: command.handler(config))
        finally:
            io_loop.close()
    except TrigWindError as error:
        app_log.error("%s", json.dumps(error.json()))
        return error.exit_code
    except Exception as exc:
        app_log.exception("internal error")
        error = InternalError(error_type="internal_error", message=repr(exc))
        app_log.error("%s", json.dumps(error.json()))
        return error.exit_code
    return 0
