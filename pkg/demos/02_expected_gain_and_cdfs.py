"""How much a movable antenna gains on average, and how its gain is distributed.

Compares the closed-form expected maximum gain with sampled channels and
tabulates the exact and approximate CDFs next to empirical ones.
"""
import math

import numpy as np

from masim.config import ExperimentConfig
from masim.montecarlo import ks_distance, run_sweep
from masim.stochastic import (RayleighSumModel, cdf_multi_ub_approx, cdf_two, expected_max_gain,
                              outage_probability)

print("L   closed form   exact?")
for L in range(1, 7):
    e = expected_max_gain(RayleighSumModel(L))
    print(f"{L}   {e.value:.4f}        {e.is_exact}")

# search a 6x6 region for 2000 random two-path channels
cfg = ExperimentConfig(experiment="cdf", l_r=2, region_side=6.0, grid_step=0.05,
                       n_realizations=2000, schemes=("FPA", "MA"))
res = {r.scheme: r for r in run_sweep(cfg)}
print(f"\nsampled mean relative gain: MA {res['MA'].mean:.3f} +- {res['MA'].stderr:.3f}, "
      f"FPA {res['FPA'].mean:.3f} (closed form {1 + math.pi / 4:.3f} and 1)")

model = RayleighSumModel(2)
print(f"KS distance of MA samples to the exact two-path CDF: "
      f"{ks_distance(res['MA'].samples, lambda t: cdf_two(t, model)):.4f}")

t = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
ecdf = res["MA"].empirical_cdf
print("\n   t   exact   empirical")
for tv, f in zip(t, cdf_two(t, model)):
    print(f"{tv:5.2f}  {f:.4f}  {ecdf(tv):.4f}")

# outage at 0 dB threshold: fixed antenna vs movable antenna with more paths
for L in (1, 2, 4, 8):
    p = outage_probability(1.0, 1.0, 1.0, RayleighSumModel(L))
    print(f"L={L}: outage below 0 dB = {p:.4f}")

rng = np.random.default_rng(0)
b = (rng.standard_normal((10**5, 5)) + 1j * rng.standard_normal((10**5, 5))) * math.sqrt(0.1)
s = np.abs(b).sum(axis=1) ** 2
gap = ks_distance(s, lambda t: cdf_multi_ub_approx(t, RayleighSumModel(5)))
print(f"\nfive paths: sup gap of the gamma-type approximation = {gap:.3f}")
