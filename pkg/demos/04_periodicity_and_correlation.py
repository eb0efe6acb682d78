"""Quantized angles make the gain periodic; far-apart positions decorrelate.

Part one snaps angles to a T-point grid and shows the period along x.
Part two estimates the spatial correlation of a rich-scattering channel.
"""
import numpy as np

from masim.channel import ChannelField
from masim.deterministic import quantize_virtual_aoas, quantized_grid, quantized_period_x
from masim.montecarlo import correlation_experiment, quantization_period_experiment
from masim.stochastic import spatial_correlation

v = np.array([-0.61, 0.05, 0.43])
for T in (4, 10, 32):
    est = quantized_period_x(v, T)
    snapped = quantized_grid(T)[quantize_virtual_aoas(v, T) - 1]
    f = ChannelField([1, 0.7j, -0.4], snapped)
    x = np.linspace(-3, 3, 7)
    drift = np.max(np.abs(f.gain(x + est.period_x, 0.0) - f.gain(x, 0.0)))
    print(f"T={T:3d}: tau*={est.tau_star}, X={est.period_x:6.2f}, "
          f"max |g(x+X)-g(x)| = {drift:.1e}, worst snap error {est.max_quantization_error:.3f}")

print("\nsearching one period vs ten periods on the true field:")
for r in quantization_period_experiment([2, 16, 128], 3, 200, step=0.02):
    print(f"  T={r.sweep_value:5.0f} {r.scheme:<12} {r.mean:.3f}")

print("\nspatial correlation, 200 paths, 20000 samples:")
for r in correlation_experiment([0.0, 0.25, 0.5, 0.75], 20000, l_r=200):
    print(f"  d={r.sweep_value:4.2f}: sampled {r.mean:+.3f}  sinc {spatial_correlation(r.sweep_value):+.3f}")
