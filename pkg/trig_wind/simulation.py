from datetime import datetime
from typing import Optional

import numpy as np
from tornado.log import app_log

from trig_wind.aparch import simulate_aparch
from trig_wind.aparch.distribution import SeedLike, as_generator
from trig_wind.arfima import inverse_filter
from trig_wind.estimation import ModelParams
from trig_wind.ingestion import WindSeries
from trig_wind.seasonal import SeasonalSpec, mean_curve

DEFAULT_START = datetime(2010, 1, 1)
DEFAULT_BURN = 1000


def simulate(
    params: ModelParams,
    spec: SeasonalSpec,
    n: int,
    seed: SeedLike = None,
    burn: int = DEFAULT_BURN,
    start_timestamp: datetime = DEFAULT_START,
    station: Optional[str] = None,
) -> WindSeries:
    """
    W = mean + eps with eps the ARFIMA image of APARCH innovations. The first
    `burn` innovations only warm up the filters. Negative speeds are clipped to 0.
    """
    params.check_against(spec)
    rng = as_generator(seed)
    innovations, _ = simulate_aparch(params.aparch, params.skewt, n + burn, rng)
    residuals = inverse_filter(innovations, params.arfima)[burn:]
    values = mean_curve(params.seasonal(spec), params.theta, range(n)) + residuals
    clipped = int(np.count_nonzero(values < 0))
    if clipped:
        app_log.info("clipped %d negative simulated speeds to 0", clipped)
    return WindSeries(
        start_timestamp=start_timestamp,
        values=np.maximum(values, 0.0),
        gap_mask=np.zeros(n, dtype=bool),
        station=station,
    )
