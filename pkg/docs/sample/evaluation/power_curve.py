from trig_wind import power_curve
from trig_wind.evaluation import pce, pce_split, power_output

curve = power_curve("fuhrlaender_md77")

actuals = [4.0, 8.0, 14.0]
forecasts = [5.0, 8.0, 12.0]

print(power_output(actuals, curve))  # kW
under, over = pce_split(actuals, forecasts, curve)
balanced = pce(actuals, forecasts, tau=0.5, curve=curve)
