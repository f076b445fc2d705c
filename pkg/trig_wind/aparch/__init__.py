from trig_wind.aparch.core import (
    AparchParams,
    aparch_scale_path,
    asymmetric_power,
    check_stationarity,
    simulate_aparch,
    stationarity_margin,
    unconditional_level,
)
from trig_wind.aparch.distribution import (
    SkewTParams,
    asym_power_moment,
    skew_t_cdf,
    skew_t_logpdf,
    skew_t_pdf,
    skew_t_sample,
    standardize,
)

__all__ = [
    # Scale recursion
    "AparchParams",
    "aparch_scale_path",
    "asymmetric_power",
    "check_stationarity",
    "simulate_aparch",
    "stationarity_margin",
    "unconditional_level",
    # Innovation law
    "SkewTParams",
    "asym_power_moment",
    "skew_t_cdf",
    "skew_t_logpdf",
    "skew_t_pdf",
    "skew_t_sample",
    "standardize",
]
