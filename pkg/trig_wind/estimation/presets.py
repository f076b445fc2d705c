"""
Fourier-model (p = 2) parameter sets for the four Brandenburg stations, with
the trend coefficient on the unscaled time index. Used to simulate realistic
series.
"""
from typing import Dict, Tuple

from trig_wind.aparch import AparchParams, SkewTParams
from trig_wind.arfima import ArfimaParams
from trig_wind.estimation.params import ModelParams
from trig_wind.models import ConfigError
from trig_wind.seasonal import STATION_INDICATOR, SeasonalSpec


def preset_spec() -> SeasonalSpec:
    return SeasonalSpec.fourier(indicator=STATION_INDICATOR, t_scale=1.0)


def _preset(intercept, trend, cells, arfima, aparch, skewt) -> ModelParams:
    d, ar, ma = arfima
    alpha0, alpha, beta, gamma, delta = aparch
    xi, nu = skewt
    return ModelParams(
        theta=(intercept, trend, *cells),
        arfima=ArfimaParams(d=d, ar=ar, ma=ma),
        aparch=AparchParams(
            alpha0=alpha0, alpha=alpha, beta=beta, gamma=gamma, delta=delta
        ),
        skewt=SkewTParams(xi=xi, nu=nu),
    )


STATION_PRESETS: Dict[str, ModelParams] = {
    "manschnow": _preset(
        3.2941,
        -0.0000025,
        (-0.5588, -0.3730, 0.0752, 0.2098, 0.0451, 0.0531, 0.1079,
         0.6339, 0.4127, 0.2368, -0.0628, -0.1060),
        (0.4310, (1.2334, -0.2698), (-0.8065,)),
        (0.0012, (0.1426,), (0.5257, 0.3645), (-0.1208,), 0.9325),
        (1.0672, 7.8622),
    ),
    "lindenberg": _preset(
        4.0346,
        -0.0000040,
        (-0.1456, -0.1107, 0.0313, 0.1089, -0.2839, 0.0057, -0.0334,
         0.4167, 0.0656, 0.1021, -0.0418, -0.1549),
        (0.00003, (1.4033, -0.4104), (-0.6186,)),
        (0.0091, (0.1346,), (0.7160, 0.1618), (-0.2860,), 0.9529),
        (1.0512, 9.2202),
    ),
    "angermuende": _preset(
        4.1071,
        -0.0000027,
        (-0.5420, -0.4179, 0.0743, 0.2144, -0.3678, -0.0888, 0.0831,
         0.5400, 0.3795, 0.3114, 0.0166, -0.1123),
        (0.0913, (1.5345, -0.5412), (-0.7650,)),
        (0.0188, (0.1254,), (0.5523, 0.3015), (-0.1947,), 1.3877),
        (1.0534, 8.8646),
    ),
    "gruenow": _preset(
        4.6358,
        -0.0000028,
        (-0.5464, -0.4529, 0.1005, 0.1938, -0.1986, -0.1646, -0.0139,
         0.6472, 0.3441, 0.2975, 0.1447, -0.2368),
        (0.2323, (1.4446, -0.4562), (-0.7826,)),
        (0.0019, (0.1580,), (0.5526, 0.3252), (-0.1103,), 1.0750),
        (1.0160, 7.3534),
    ),
}


def station_preset(name: str) -> Tuple[ModelParams, SeasonalSpec]:
    try:
        return STATION_PRESETS[name.lower()], preset_spec()
    except KeyError:
        raise ConfigError(
            error_type="unknown_station",
            message=f"{name}; choose one of {', '.join(sorted(STATION_PRESETS))}",
        )
