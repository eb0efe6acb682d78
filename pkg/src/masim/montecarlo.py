"""Monte Carlo experiments comparing the movable antenna with fixed baselines.

Every realization draws from its own Philox stream keyed by
``(seed, group, index)``, so results do not depend on the thread count or on
the order in which realizations finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import ChannelField, Region, virtual_aoa_arrays
from .config import ExperimentConfig
from .deterministic import (nested_square_maxima, quantized_period_x, scan_gain_grid, scan_gain_line)
from .exceptions import DimensionError, DomainError

__all__ = [
    "philox_stream",
    "ChannelSampler",
    "BaselineArray",
    "default_array_size",
    "sample_channel",
    "ma_max_gain",
    "fpa_gain",
    "as_gain",
    "dbf_gain",
    "EmpiricalCDF",
    "empirical_cdf",
    "ks_distance",
    "RunResult",
    "run_sweep",
    "quantization_period_experiment",
    "correlation_experiment",
]

CORRELATION_CHUNK = 1000


def philox_stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the given seed and integer keys."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *keys])))


@dataclass(frozen=True)
class ChannelSampler:
    """Random receive-side channels with ``l_r`` CSCG paths.

    Path powers are equal (``sigma2 / l_r`` each) unless ``power_ratios`` is
    given, in which case they are proportional to it and sum to ``sigma2``.
    Virtual AoAs follow from sin(theta) ~ U[-1, 1] and phi ~ U[-pi/2, pi/2].
    """

    l_r: int
    sigma2: float = 1.0
    power_ratios: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.l_r < 1:
            raise DomainError(f"path count must be >= 1, got {self.l_r}")
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")
        if self.power_ratios is not None:
            if len(self.power_ratios) != self.l_r:
                raise DimensionError(
                    f"{len(self.power_ratios)} power ratios for {self.l_r} paths")
            if any(p <= 0 for p in self.power_ratios):
                raise DomainError("power ratios must be positive")

    @property
    def path_variances(self) -> np.ndarray:
        if self.power_ratios is None:
            return np.full(self.l_r, self.sigma2 / self.l_r)
        w = np.asarray(self.power_ratios, dtype=float)
        return self.sigma2 * w / w.sum()

    def sample(self, rng: np.random.Generator) -> ChannelField:
        L = self.l_r
        z = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        b = z * np.sqrt(self.path_variances / 2)
        theta = np.arcsin(rng.uniform(-1.0, 1.0, L))
        phi = rng.uniform(-np.pi / 2, np.pi / 2, L)
        varphi, vartheta = virtual_aoa_arrays(theta, phi)
        return ChannelField(b, varphi, vartheta)


def default_array_size(side: float, geometry: str = "linear-x") -> int:
    """Element count that spans the region at half-wavelength spacing."""
    n = int(math.floor(2 * side + 1 + 1e-12))
    return n * n if geometry == "square" else n


@dataclass(frozen=True)
class BaselineArray:
    """Fixed array of ``m`` elements centered at the origin.

    ``linear-x`` places them along x; ``square`` needs ``m`` to be a perfect
    square and fills a sqrt(m) x sqrt(m) grid.
    """

    geometry: str
    m: int
    spacing: float = 0.5

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"array needs at least one element, got {self.m}")
        if self.geometry == "square":
            if math.isqrt(self.m) ** 2 != self.m:
                raise DomainError(f"square array needs a perfect-square size, got {self.m}")
        elif self.geometry != "linear-x":
            raise DomainError(f"unknown array geometry {self.geometry!r}")

    @property
    def positions(self) -> tuple[np.ndarray, np.ndarray]:
        if self.geometry == "linear-x":
            x = self.spacing * (np.arange(self.m) - (self.m - 1) / 2)
            return x, np.zeros_like(x)
        k = math.isqrt(self.m)
        c = self.spacing * (np.arange(k) - (k - 1) / 2)
        gx, gy = np.meshgrid(c, c, indexing="ij")
        return gx.ravel(), gy.ravel()


def sample_channel(sampler: ChannelSampler, rng: np.random.Generator) -> ChannelField:
    """Draw one channel; same as ``sampler.sample(rng)``."""
    return sampler.sample(rng)


def ma_max_gain(field: ChannelField, region: Region, step: float,
                max_cells: int = 10**8) -> float:
    """Movable antenna: lattice maximum of the gain over ``region``."""
    return scan_gain_grid(field, region, step, max_cells).max_value


def fpa_gain(field: ChannelField) -> float:
    """Fixed antenna at the origin."""
    return float(abs(field.eprv.sum()) ** 2)


def as_gain(field: ChannelField, array: BaselineArray) -> float:
    """Antenna selection: best single element."""
    return float(np.max(field.gain(*array.positions)))


def dbf_gain(field: ChannelField, array: BaselineArray) -> float:
    """Maximum-ratio combining over all elements."""
    return float(np.sum(field.gain(*array.positions)))


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous empirical distribution of a sample."""

    sorted_samples: np.ndarray

    def __call__(self, t):
        v = np.searchsorted(self.sorted_samples, np.asarray(t, dtype=float), side="right")
        v = v / self.sorted_samples.size
        return float(v) if np.ndim(v) == 0 else v


def empirical_cdf(samples) -> EmpiricalCDF:
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size == 0:
        raise DomainError("empirical CDF of an empty sample")
    return EmpiricalCDF(s)


def ks_distance(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov statistic sup |F_n - F| against a continuous CDF."""
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size == 0:
        raise DomainError("KS distance of an empty sample")
    f = np.asarray(cdf(s), dtype=float)
    n = s.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


@dataclass(frozen=True)
class RunResult:
    """Samples of one scheme at one sweep value, with summary statistics."""

    scheme: str
    sweep_value: float
    samples: np.ndarray = field(repr=False)
    mean: float
    stderr: float

    @classmethod
    def from_samples(cls, scheme: str, sweep_value: float, samples) -> "RunResult":
        s = np.asarray(samples, dtype=float)
        se = float(s.std(ddof=1) / math.sqrt(s.size)) if s.size > 1 else 0.0
        return cls(scheme, float(sweep_value), s, float(s.mean()), se)

    @property
    def empirical_cdf(self) -> EmpiricalCDF:
        return empirical_cdf(self.samples)


def _map(fn, n: int, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


@dataclass(frozen=True)
class _Group:
    sampler: ChannelSampler
    sides: tuple[float, ...]
    sweep_values: tuple[float, ...]


def _groups(cfg: ExperimentConfig) -> list[_Group]:
    base = ChannelSampler(cfg.l_r, cfg.sigma2)
    if cfg.experiment in ("sweep-region", "bounds"):
        sides = tuple(cfg.region_sizes)
        return [_Group(base, sides, sides)]
    if cfg.experiment == "sweep-paths":
        return [_Group(ChannelSampler(L, cfg.sigma2), (cfg.region_side,), (float(L),))
                for L in cfg.path_counts]
    if cfg.experiment == "power-ratio":
        return [_Group(ChannelSampler(2, cfg.sigma2, (r, 1.0)), (cfg.region_side,), (r,))
                for r in cfg.power_ratios]
    if cfg.experiment == "cdf":
        return [_Group(base, (cfg.region_side,), (cfg.region_side,))]
    raise DomainError(f"experiment {cfg.experiment!r} is not a scheme sweep")


def _arrays(cfg: ExperimentConfig, side: float) -> tuple[BaselineArray, BaselineArray]:
    def make(m):
        return BaselineArray(cfg.geometry, m or default_array_size(side, cfg.geometry))
    return make(cfg.as_m), make(cfg.dbf_m)


def run_sweep(cfg: ExperimentConfig, threads: int = 1,
              schemes: Sequence[str] | None = None) -> list[RunResult]:
    """Relative SNR gains (gain / sigma2) of each scheme over the sweep in ``cfg``.

    Handles the ``sweep-region``, ``sweep-paths``, ``power-ratio``, ``cdf`` and
    ``bounds`` experiments. Within a region sweep every side length sees the
    same channel realizations. Results are sorted by sweep value, then scheme.
    """
    schemes = sorted(set(schemes if schemes is not None else cfg.schemes))
    results = []
    for g_idx, group in enumerate(_groups(cfg)):
        arrays = [_arrays(cfg, s) for s in group.sides]

        def one(i, group=group, g_idx=g_idx, arrays=arrays):
            fld = group.sampler.sample(philox_stream(cfg.seed, g_idx, i))
            row = np.empty((len(group.sides), len(schemes)))
            ma = (nested_square_maxima(fld, group.sides, cfg.grid_step, cfg.max_cells)
                  if "MA" in schemes else None)
            for k, (a_arr, d_arr) in enumerate(arrays):
                for c, name in enumerate(schemes):
                    if name == "MA":
                        row[k, c] = ma[k]
                    elif name == "FPA":
                        row[k, c] = fpa_gain(fld)
                    elif name == "AS":
                        row[k, c] = as_gain(fld, a_arr)
                    else:
                        row[k, c] = dbf_gain(fld, d_arr)
            return row / cfg.sigma2

        data = np.stack(_map(one, cfg.n_realizations, threads))
        for k, value in enumerate(group.sweep_values):
            for c, name in enumerate(schemes):
                results.append(RunResult.from_samples(name, value, data[:, k, c]))
    results.sort(key=lambda r: (r.sweep_value, r.scheme))
    return results


def quantization_period_experiment(t_values: Sequence[int], l_r: int, n_realizations: int,
                                   step: float = 0.01, sigma2: float = 1.0, seed: int = 0,
                                   threads: int = 1) -> list[RunResult]:
    """Line search over one period versus ten periods after AoA quantization.

    For each resolution T, virtual AoAs along x are drawn uniformly on
    [-1, 1] and X is the period of their T-grid images. The gain of the true
    (unquantized) field along y = 0 is then maximized over [-X/2, X/2]
    (``one_period``) and [-5X, 5X] (``ten_periods``). When all AoAs share one
    grid index, X is undefined and both entries report the gain at the origin.
    """
    sampler = ChannelSampler(l_r, sigma2)
    results = []
    for g_idx, T in enumerate(t_values):
        def one(i, T=T, g_idx=g_idx):
            rng = philox_stream(seed, g_idx, i)
            v = rng.uniform(-1.0, 1.0, l_r)
            z = rng.standard_normal(l_r) + 1j * rng.standard_normal(l_r)
            b = z * np.sqrt(sampler.path_variances / 2)
            est = quantized_period_x(v, T) if l_r > 1 else None
            # X comes from the quantized AoAs; the searched field keeps the true ones
            fld = ChannelField(b, v)
            if est is None or est.constant:
                g = fpa_gain(fld) / sigma2
                return g, g
            X = est.period_x
            _, g1 = scan_gain_line(fld, -X / 2, X / 2, step)
            _, g10 = scan_gain_line(fld, -5 * X, 5 * X, step)
            return g1.max() / sigma2, g10.max() / sigma2

        data = np.array(_map(one, n_realizations, threads))
        results.append(RunResult.from_samples("one_period", T, data[:, 0]))
        results.append(RunResult.from_samples("ten_periods", T, data[:, 1]))
    return results


def correlation_experiment(distances: Sequence[float], n_samples: int, l_r: int = 500,
                           sigma2: float = 1.0, seed: int = 0,
                           threads: int = 1) -> list[RunResult]:
    """Empirical E[h(0) conj h(d)] along y under a many-path approximant.

    Returns one result per distance holding Re(h(0) conj h(d)) samples. Only
    vartheta matters for displacements along y, and sin(theta) is uniform.
    Samples are generated in fixed-size chunks with their own streams.
    """
    d = np.asarray(distances, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be >= 0")
    n_chunks = -(-n_samples // CORRELATION_CHUNK)
    std = math.sqrt(sigma2 / l_r / 2)

    def chunk(j):
        rng = philox_stream(seed, 0, j)
        n = min(CORRELATION_CHUNK, n_samples - j * CORRELATION_CHUNK)
        b = (rng.standard_normal((n, l_r)) + 1j * rng.standard_normal((n, l_r))) * std
        vt = rng.uniform(-1.0, 1.0, (n, l_r))
        h0 = b.sum(axis=1)
        out = np.empty((n, d.size))
        for k, dk in enumerate(d):
            hd = np.sum(b * np.exp(-2j * np.pi * dk * vt), axis=1)
            out[:, k] = (h0 * hd.conj()).real
        return out

    data = np.concatenate(_map(chunk, n_chunks, threads))
    return [RunResult.from_samples("empirical", dk, data[:, k]) for k, dk in enumerate(d)]
