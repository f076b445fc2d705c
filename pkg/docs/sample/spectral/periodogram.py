import numpy as np

from trig_wind import detect_peaks, periodogram, smooth

rng = np.random.default_rng(7)
t = np.arange(144 * 60)
speeds = 5.0 + 1.5 * np.sin(2 * np.pi * t / 144) + rng.normal(0.0, 0.5, t.size)

pg = smooth(periodogram(speeds), bandwidth=3)
peaks = detect_peaks(pg, max_period=t.size / 2, top_k=2)
print(peaks.ranked())
