from trig_wind.cli import subcommand
from trig_wind.config import RunConfig
from trig_wind.estimation import station_preset

described = []


@subcommand("describe", "print the seasonal layout of a station preset")
async def describe_command(config: RunConfig) -> None:
    params, spec = station_preset(config.simulate_station)
    described.append(config.simulate_station)
    print(f"{config.simulate_station}: {params.theta.size} mean coefficients")
