"""
p-generalised trigonometric functions and the deterministic mean

    mean_t = theta_11 + theta_trend * t / t_scale
             + sum_{i1,i2} I[i1,i2] theta_{i1 i2} f_{i1}^{s1}(t) f_{i2}^{s2}(t)

where f_1 = 1, f_i = cos_p(pi i t / s) for even i and sin_p(pi (i-1) t / s)
for odd i > 1. Row indices of the indicator belong to the annual period s1,
column indices to the diurnal period s2.
"""
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import root_validator, validator

from trig_wind.models import ConfigError, FrozenModel

ANNUAL = "annual"
DIURNAL = "diurnal"
DEFAULT_P_BOUND = 100.0

STATION_INDICATOR = (
    (0, 1, 1, 1, 1),
    (1, 1, 1, 0, 0),
    (1, 1, 1, 0, 0),
    (1, 0, 0, 0, 0),
    (1, 0, 0, 0, 0),
)

BasisKey = Tuple[str, int]


def _check_exponent(p):
    if np.any(np.asarray(p) <= 0):
        raise ConfigError(
            error_type="invalid_exponent", message=f"p must be positive, got {p}"
        )


def _radius(phi, p):
    return (np.abs(np.sin(phi)) ** p + np.abs(np.cos(phi)) ** p) ** (1.0 / p)


def sin_p(phi, p: float):
    """l_{2,p} generalised sine."""
    _check_exponent(p)
    return np.sin(phi) / _radius(phi, p)


def cos_p(phi, p: float):
    """l_{2,p} generalised cosine."""
    _check_exponent(p)
    return np.cos(phi) / _radius(phi, p)


def basis_function(i: int, s: float, t, p: float = 2.0):
    if i < 1:
        raise ConfigError(error_type="invalid_index", message=f"index {i} < 1")
    t = np.asarray(t, dtype=float)
    if i == 1:
        return np.ones_like(t)
    if i % 2 == 0:
        return cos_p(np.pi * i * t / s, p)
    return sin_p(np.pi * (i - 1) * t / s, p)


def exponent_key(family: str, index: int) -> str:
    """Name of the exponent of a marginal function, e.g. p12 (diurnal 2), p31 (annual 3)."""
    if family == ANNUAL:
        return f"p{index}1"
    return f"p1{index}"


class SeasonalSpec(FrozenModel):
    s1: float = 52560.0
    s2: float = 144.0
    indicator: Tuple[Tuple[int, ...], ...] = STATION_INDICATOR
    p_exponents: Dict[str, float] = {}
    fixed_exponents: Tuple[str, ...] = ()
    include_trend: bool = True
    t_scale: Optional[float] = None
    p_bound: float = DEFAULT_P_BOUND

    @validator("indicator", pre=True)
    def _indicator_rows(cls, value):
        rows = tuple(tuple(int(cell) for cell in row) for row in np.asarray(value))
        if not rows or len({len(row) for row in rows}) != 1:
            raise ValueError("indicator must be a non-empty rectangular matrix")
        if any(cell not in (0, 1) for row in rows for cell in row):
            raise ValueError("indicator entries must be 0 or 1")
        if rows[0][0] != 0:
            raise ValueError("indicator[1][1] must be 0, the intercept is separate")
        return rows

    @validator("t_scale")
    def _positive_scale(cls, value):
        if value is not None and value <= 0:
            raise ValueError("t_scale must be positive")
        return value

    @root_validator(skip_on_failure=True)
    def _check(cls, fields):
        if not fields["s1"] > fields["s2"] > 1:
            raise ValueError("periods must satisfy s1 > s2 > 1")
        bound = fields["p_bound"]
        for key, p in fields["p_exponents"].items():
            if not 0 < p <= bound:
                raise ValueError(f"exponent {key}={p} outside (0, {bound}]")
        unset = set(fields["fixed_exponents"]) - set(fields["p_exponents"])
        if unset:
            raise ValueError(f"fixed exponents without a value: {sorted(unset)}")
        return fields

    @classmethod
    def fourier(cls, **kwargs) -> "SeasonalSpec":
        spec = cls(**kwargs)
        return spec.with_exponents({key: 2.0 for key in spec.exponent_names()})

    @property
    def trend_scale(self) -> float:
        """Normaliser of the trend regressor; unscaled until resolved against a sample."""
        return self.t_scale if self.t_scale is not None else 1.0

    def active_cells(self) -> List[Tuple[int, int]]:
        return [
            (i1 + 1, i2 + 1)
            for i1, row in enumerate(self.indicator)
            for i2, cell in enumerate(row)
            if cell
        ]

    def exponent_names(self) -> List[str]:
        return [exponent_key(*key) for key in active_functions(self)]

    def free_exponent_names(self) -> List[str]:
        """Exponents the p-generalised fit estimates; fixed ones keep their value."""
        return [name for name in self.exponent_names() if name not in self.fixed_exponents]

    def exponent(self, family: str, index: int) -> float:
        return float(self.p_exponents.get(exponent_key(family, index), 2.0))

    def exponent_vector(self) -> np.ndarray:
        return np.array([self.exponent(*key) for key in active_functions(self)])

    def with_exponents(
        self, exponents: Union[Dict[str, float], Sequence[float]]
    ) -> "SeasonalSpec":
        if not isinstance(exponents, dict):
            exponents = dict(zip(self.exponent_names(), map(float, exponents)))
        return self.copy_with(p_exponents={**self.p_exponents, **exponents})

    def with_t_scale(self, t_scale: float) -> "SeasonalSpec":
        return self.copy_with(t_scale=float(t_scale))

    def copy_with(self, **changes) -> "SeasonalSpec":
        return SeasonalSpec(**{**self.dict(), **changes})


class RegressorRow(FrozenModel):
    values: np.ndarray
    labels: Tuple[str, ...]


def active_functions(spec: SeasonalSpec) -> List[BasisKey]:
    """
    Marginal basis functions (family, index > 1) used by active cells, in order of
    first appearance when the indicator is read row by row. Interaction cells
    reuse these functions and their exponents.
    """
    keys: List[BasisKey] = []
    for i1, i2 in spec.active_cells():
        for key in ((DIURNAL, i2), (ANNUAL, i1)):
            if key[1] > 1 and key not in keys:
                keys.append(key)
    return keys


def column_labels(spec: SeasonalSpec) -> Tuple[str, ...]:
    labels = ["intercept"]
    if spec.include_trend:
        labels.append("trend")
    labels.extend(f"theta_{i1}{i2}" for i1, i2 in spec.active_cells())
    return tuple(labels)


def _as_times(t_range) -> np.ndarray:
    if hasattr(t_range, "start") and hasattr(t_range, "stop"):
        return np.arange(t_range.start, t_range.stop, dtype=float)
    return np.atleast_1d(np.asarray(t_range, dtype=float))


def design_matrix(spec: SeasonalSpec, t_range) -> np.ndarray:
    """
    One row per time index; columns are intercept, trend (if enabled) and the
    active indicator cells in row-major order (see `column_labels`).
    """
    t = _as_times(t_range)
    if t.size == 0:
        raise ConfigError(error_type="empty_range", message="no time indices")
    marginals = {
        (family, 1): np.ones_like(t) for family in (ANNUAL, DIURNAL)
    }
    for family, index in active_functions(spec):
        period = spec.s1 if family == ANNUAL else spec.s2
        marginals[family, index] = basis_function(
            index, period, t, spec.exponent(family, index)
        )

    columns = [np.ones_like(t)]
    if spec.include_trend:
        columns.append(t / spec.trend_scale)
    for i1, i2 in spec.active_cells():
        columns.append(marginals[ANNUAL, i1] * marginals[DIURNAL, i2])
    return np.column_stack(columns)


def regressor_row(spec: SeasonalSpec, t: int) -> RegressorRow:
    if t < 0:
        raise ConfigError(error_type="negative_time", message=str(t))
    return RegressorRow(
        values=design_matrix(spec, [t])[0], labels=column_labels(spec)
    )


def mean_curve(spec: SeasonalSpec, theta, t_range) -> np.ndarray:
    return design_matrix(spec, t_range) @ np.asarray(theta, dtype=float)
