"""
Run configuration.

Every `RunConfig` field is also a `tornado.options` option of the same name,
grouped by its prefix (data, spectrum, seasonal, model, backtest, curve,
diagnose, simulate, output, pipeline). Values come from an optional config
file of `name = value` lines, overridden by `--name=value` (or `--name value`)
on the command line. `--model`, `--orders`, `--origin`, `--horizon` and `--spec`
are short names of model_kinds, model_orders, backtest_origin,
backtest_horizon and config.
Composite values are written as strings and cast with `trig_wind.types`:

    model_orders = "2,1,1,2"
    seasonal_indicator = "01111,11100,11100,10000,10000"
    seasonal_p = "p12=4.5886,p14=51.313"
    backtest_taus = "0.25,0.5,0.75"
"""
import os
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import Field, ValidationError as PydanticValidationError, validator
from pydantic.fields import SHAPE_SINGLETON
from tornado.log import define_logging_options
from tornado.options import Error as OptionsError, OptionParser

from trig_wind.estimation import ModelKind, Orders
from trig_wind.estimation.fit import CRITERIA
from trig_wind.ingestion import CsvFormat, DEFAULT_MAX_GAP
from trig_wind.models import ConfigError, FrozenModel
from trig_wind.seasonal import DEFAULT_P_BOUND, STATION_INDICATOR, SeasonalSpec
from trig_wind.types import Matrix01, ValidationError, cast, format_matrix

LOG_LEVEL_VARIABLE = "TRIG_WIND_LOG_LEVEL"
STAGES = ("spectrum", "fit", "forecast", "evaluate", "diagnose")
CAST_OVERRIDES = {"seasonal_indicator": Matrix01}
# short command line names of RunConfig fields
ALIASES = {
    "model": "model_kinds",
    "orders": "model_orders",
    "origin": "backtest_origin",
    "horizon": "backtest_horizon",
}


class RunConfig(FrozenModel):
    data_path: Optional[str] = Field(None, description="station CSV file")
    data_station: Optional[str] = Field(None, description="station name stored with the series")
    data_timestamp_column: str = Field("timestamp", description="timestamp column")
    data_speed_column: str = Field("speed_ms", description="wind speed column in m/s")
    data_sentinel: Optional[float] = Field(-999.0, description="value marking a missing speed")
    data_delimiter: str = Field(",", description="CSV delimiter")
    data_max_gap: int = Field(DEFAULT_MAX_GAP, description="longest gap (steps) filled by interpolation")
    data_split: Optional[str] = Field(None, description="first out-of-sample timestamp")
    data_split_fraction: float = Field(0.8, description="in-sample share when no split timestamp is set")

    spectrum_bandwidth: int = Field(11, description="Daniell smoothing bandwidth (odd)")
    spectrum_top_k: int = Field(4, description="number of spectral peaks reported")

    seasonal_s1: float = Field(52560.0, description="annual period in steps")
    seasonal_s2: float = Field(144.0, description="diurnal period in steps")
    seasonal_indicator: Tuple[Tuple[int, ...], ...] = Field(
        STATION_INDICATOR, description="0/1 interaction matrix, rows comma separated"
    )
    seasonal_trend: bool = Field(True, description="include the linear trend")
    seasonal_t_scale: Optional[float] = Field(None, description="trend normaliser, default in-sample length")
    seasonal_p_bound: float = Field(DEFAULT_P_BOUND, description="upper bound of the p exponents")
    seasonal_p: Dict[str, float] = Field({}, description="p exponents held fixed in the pgen fit, e.g. p12=1.5")

    model_kinds: List[ModelKind] = Field(
        [ModelKind.fourier, ModelKind.pgen], description="models to fit: fourier, pgen"
    )
    model_orders: Tuple[int, int, int, int] = Field((2, 1, 1, 2), description="j,q,Q,P")
    model_candidates: str = Field("", description="candidate orders j,q,Q,P separated by ';'")
    model_criterion: str = Field("bic", description="order selection criterion: bic or mse")
    model_truncation: int = Field(1000, description="lags of the fractional filter")
    model_max_iter: int = Field(2000, description="optimiser iterations")
    model_std_errors: bool = Field(True, description="compute Hessian standard errors")
    model_require_converged: bool = Field(False, description="fail when a fit does not converge")
    model_significance: float = Field(0.01, description="coefficient significance level")

    backtest_horizon: int = Field(18, description="forecast steps")
    backtest_n_origins: int = Field(5000, description="random origins, 0 for every valid origin")
    backtest_seed: int = Field(0, description="origin sampling seed")
    backtest_taus: List[float] = Field([0.25, 0.5, 0.75], description="PCE weights")
    backtest_window: int = Field(220_000, description="trailing information window")
    backtest_refit_every: int = Field(0, description="refit models every n origins, 0 never")
    backtest_workers: int = Field(1, description="parallel forecast batches")
    backtest_score_all_steps: bool = Field(False, description="score every step, not only the last")
    backtest_origin: Optional[str] = Field(None, description="forecast origin timestamp")

    curve_name: str = Field("fuhrlaender_md77", description="power curve: fuhrlaender_md77, ge_1_6")

    diagnose_max_lag: int = Field(5000, description="largest autocorrelation lag")
    diagnose_lags: List[int] = Field([10, 20, 50, 100], description="Ljung-Box lags")
    diagnose_level: float = Field(0.05, description="Ljung-Box significance level")

    simulate_station: str = Field("manschnow", description="parameter preset to simulate")
    simulate_n: int = Field(60_000, description="simulated length")
    simulate_seed: int = Field(0, description="simulation seed")
    simulate_output: Optional[str] = Field(None, description="simulated CSV path")

    output_dir: str = Field("output", description="artifact directory")
    pipeline_stages: List[str] = Field(
        ["spectrum", "fit", "evaluate", "diagnose"], description="stages run by `pipeline`"
    )

    @validator("backtest_taus")
    def _taus(cls, value):
        if not value:
            raise ValueError("at least one tau is required")
        for tau in value:
            if not 0 <= tau <= 1:
                raise ValueError(f"tau={tau} outside [0, 1]")
        return value

    @validator("model_criterion")
    def _criterion(cls, value):
        if value not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        return value

    @validator("model_kinds")
    def _kinds(cls, value):
        if not value:
            raise ValueError("at least one model is required")
        return value

    @validator("pipeline_stages", each_item=True)
    def _stage(cls, value):
        if value not in STAGES:
            raise ValueError(f"unknown stage {value}")
        return value

    @validator("model_candidates")
    def _candidates(cls, value):
        for group in filter(None, (part.strip() for part in value.split(";"))):
            if len(group.split(",")) != 4:
                raise ValueError(f"candidate {group!r} is not j,q,Q,P")
        return value

    @validator("backtest_horizon", "backtest_workers", "backtest_window", "simulate_n")
    def _positive(cls, value):
        if value < 1:
            raise ValueError("must be positive")
        return value

    def seasonal_spec(self) -> SeasonalSpec:
        return SeasonalSpec(
            s1=self.seasonal_s1,
            s2=self.seasonal_s2,
            indicator=self.seasonal_indicator,
            p_exponents=self.seasonal_p,
            fixed_exponents=tuple(self.seasonal_p),
            include_trend=self.seasonal_trend,
            t_scale=self.seasonal_t_scale,
            p_bound=self.seasonal_p_bound,
        )

    def orders(self) -> Orders:
        return Orders.from_tuple(self.model_orders)

    def candidate_orders(self) -> List[Orders]:
        groups = [part.strip() for part in self.model_candidates.split(";") if part.strip()]
        try:
            return [
                Orders.from_tuple(cast(Tuple[int, int, int, int], group)) for group in groups
            ]
        except ValidationError as error:
            raise ConfigError(error_type="invalid_orders", message=str(error.value))
        except PydanticValidationError as error:
            raise ConfigError(error_type="invalid_orders", message=str(error))

    def csv_format(self) -> CsvFormat:
        return CsvFormat(
            timestamp_column=self.data_timestamp_column,
            speed_column=self.data_speed_column,
            sentinel=self.data_sentinel,
            delimiter=self.data_delimiter,
        )

    @property
    def n_origins(self) -> Optional[int]:
        return self.backtest_n_origins or None

    @property
    def refit_every(self) -> Optional[int]:
        return self.backtest_refit_every or None

    def output_path(self, *parts: str) -> str:
        return os.path.join(self.output_dir, *parts)

    @classmethod
    def from_values(cls, values: Dict[str, object]) -> "RunConfig":
        """Build from raw option values, casting strings to the field types."""
        casted = {}
        for name, raw in values.items():
            field = cls.__fields__.get(name)
            if field is None or raw is None:
                continue
            try:
                casted[name] = cast(CAST_OVERRIDES.get(name, field.outer_type_), raw)
            except ValidationError as error:
                raise ConfigError(error_type=error.type, message=f"{name}: {error.value!r}")
        try:
            return cls(**casted)
        except PydanticValidationError as error:
            raise ConfigError(error_type="invalid_config", message=str(error))


def _option_type(name: str, field):
    annotation = field.outer_type_
    if name in CAST_OVERRIDES or field.shape != SHAPE_SINGLETON:
        return str
    return annotation if annotation in (int, float, bool) else str


def define_options(parser: Optional[OptionParser] = None) -> OptionParser:
    """An OptionParser with one option per RunConfig field plus tornado's logging options."""
    parser = parser or OptionParser()
    for name, field in RunConfig.__fields__.items():
        parser.define(
            name,
            default=None,
            type=_option_type(name, field),
            help=field.field_info.description,
            group=name.split("_", 1)[0],
        )
    for alias, name in ALIASES.items():
        parser.define(
            alias,
            default=None,
            type=_option_type(name, RunConfig.__fields__[name]),
            help=f"same as --{name}",
            group=name.split("_", 1)[0],
        )
    parser.define("config", default=None, type=str, help="config file", group="general")
    parser.define("spec", default=None, type=str, help="same as --config", group="general")
    define_logging_options(parser)
    parser.logging = os.environ.get(LOG_LEVEL_VARIABLE, "info").lower()
    return parser


def option_values(parser: OptionParser) -> Dict[str, object]:
    values = {name: parser[name] for name in RunConfig.__fields__}
    for alias, name in ALIASES.items():
        if parser[alias] is not None:
            values[name] = parser[alias]
    return values


def _is_flag(name: str) -> bool:
    field = RunConfig.__fields__.get(name)
    return name in ("help", "log_to_stderr") or (field is not None and _option_type(name, field) is bool)


def split_arguments(argv: Sequence[str]) -> Tuple[List[str], List[str]]:
    """
    Separate options from positional arguments, joining `--name value` into
    `--name=value`. Boolean options never take the following argument.
    """
    options, positional = list(argv[:1]), []
    rest = list(argv[1:])
    while rest:
        arg = rest.pop(0)
        if not arg.startswith("-"):
            positional.append(arg)
        elif "=" in arg or _is_flag(arg.lstrip("-").replace("-", "_")) or not rest or rest[0].startswith("-"):
            options.append(arg)
        else:
            options.append(f"{arg}={rest.pop(0)}")
    return options, positional


def load_config(argv: Sequence[str], parser: Optional[OptionParser] = None) -> Tuple[List[str], RunConfig, OptionParser]:
    """
    Parse `argv` (program name first). Returns the positional arguments, the
    validated RunConfig and the parser, whose parse callbacks have not run.
    """
    parser = parser or define_options()
    # tornado stops at the first positional argument; options may follow the subcommand
    options, positional = split_arguments(argv)
    try:
        parser.parse_command_line(options, final=False)
        config_file = parser.config or parser.spec
        if config_file:
            if not os.path.exists(config_file):
                raise ConfigError(error_type="missing_file", message=config_file)
            parser.parse_config_file(config_file, final=False)
            parser.parse_command_line(options, final=False)
    except (OptionsError, ValueError) as error:
        raise ConfigError(error_type="invalid_option", message=str(error))
    return positional, RunConfig.from_values(option_values(parser)), parser


def to_config_text(config: RunConfig) -> str:
    """Config file reproducing `config`."""
    lines = []
    for name, field in RunConfig.__fields__.items():
        value = getattr(config, name)
        if value is None:
            continue
        if name == "seasonal_indicator":
            value = format_matrix(value)
        elif isinstance(value, dict):
            value = ",".join(f"{key}={item!r}" for key, item in sorted(value.items()))
        elif isinstance(value, (list, tuple)):
            value = ",".join(getattr(item, "value", str(item)) for item in value)
        elif _option_type(name, field) is str:
            value = str(getattr(value, "value", value))
        lines.append(f"{name} = {value!r}")
    return "\n".join(lines) + "\n"
