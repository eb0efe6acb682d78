"""Closed-form statistics of the maximum channel gain under i.i.d. CSCG path coefficients.

With ``b_l ~ CN(0, sigma2 / L)`` the maximum gain over a large enough region
is ``(sum |b_l|)^2``. This module gives its expectation (exact for L <= 3,
an upper bound beyond), exact and approximate CDFs, outage probabilities,
the isotropic spatial correlation, and order-statistic bounds for the
infinite-path (Rayleigh) limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .exceptions import ArityError, DomainError

EULER_GAMMA = 0.5772156649015329

__all__ = [
    "RayleighSumModel",
    "RegionDiscretization",
    "Expectation",
    "expected_gain_reference",
    "expected_max_gain",
    "relative_snr_gain",
    "gaussian_q",
    "cdf_one",
    "cdf_two",
    "cdf_three_approx",
    "cdf_multi_ub_approx",
    "multi_path_scale",
    "outage_probability",
    "spatial_correlation",
    "harmonic_number",
    "infinite_path_bounds",
    "cdf_infinite_bounds",
]


@dataclass(frozen=True)
class RayleighSumModel:
    """``l_r`` i.i.d. CSCG paths sharing total average power ``sigma2``."""

    l_r: int
    sigma2: float = 1.0

    def __post_init__(self):
        if self.l_r < 1:
            raise DomainError(f"path count must be >= 1, got {self.l_r}")
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def path_variance(self) -> float:
        return self.sigma2 / self.l_r


@dataclass(frozen=True)
class RegionDiscretization:
    """Square A x A region with P grid points per wavelength for the upper bound."""

    a: float
    p: int = 8

    def __post_init__(self):
        if self.a < 0:
            raise DomainError(f"region side must be nonnegative, got {self.a}")
        if self.p < 1:
            raise DomainError(f"grid density must be a positive integer, got {self.p}")

    @property
    def n_lb(self) -> int:
        """Independent samples at half-wavelength spacing: floor(2A + 1)^2."""
        return int(math.floor(2 * self.a + 1 + 1e-12)) ** 2

    @property
    def n_ub(self) -> int:
        """Grid cells of size 1/P: ceil(P A + 1)^2."""
        return int(math.ceil(self.p * self.a + 1 - 1e-12)) ** 2


class Expectation(NamedTuple):
    value: float
    is_exact: bool


def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError("CDF argument must be >= 0")
    return t


def _out(v, t):
    return float(v) if np.ndim(t) == 0 else v


def expected_gain_reference(model: RayleighSumModel) -> float:
    """E|h(r0)|^2 = sigma2, whatever the path count."""
    return model.sigma2


def expected_max_gain(model: RayleighSumModel) -> Expectation:
    """E(sum |b_l|)^2 = (1 + (L - 1) pi / 4) sigma2.

    This is the expected maximum gain over an unbounded region for L <= 3
    (the bound is always attained there) and only an upper bound for L >= 4.
    """
    value = (1 + (model.l_r - 1) * math.pi / 4) * model.sigma2
    return Expectation(value, model.l_r <= 3)


def relative_snr_gain(model: RayleighSumModel) -> Expectation:
    """Average-SNR gain of the movable antenna over the fixed one."""
    g = expected_max_gain(model)
    return Expectation(g.value / expected_gain_reference(model), g.is_exact)


def gaussian_q(x):
    """Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2))


def cdf_one(t, model: RayleighSumModel):
    """P(|b|^2 <= t) for a single path: 1 - exp(-t / sigma2)."""
    tt = _check_t(t)
    return _out(-np.expm1(-tt / model.sigma2), t)


def cdf_two(t, model: RayleighSumModel):
    """Exact CDF of (|b1| + |b2|)^2 for two i.i.d. paths."""
    if model.l_r != 2:
        raise ArityError(f"cdf_two needs l_r = 2, got {model.l_r}")
    tt = _check_t(t)
    s2 = model.sigma2
    s = math.sqrt(s2)
    v = (-np.expm1(-2 * tt / s2)
         - np.sqrt(np.pi * tt) / s * np.exp(-tt / s2) * (1 - 2 * gaussian_q(np.sqrt(2 * tt) / s)))
    return _out(np.clip(v, 0.0, 1.0), t)


def cdf_three_approx(t, model: RayleighSumModel):
    """Approximate CDF of (|b1| + |b2| + |b3|)^2 with c3 = 15^(1/3) sigma2 / 3."""
    if model.l_r != 3:
        raise ArityError(f"cdf_three_approx needs l_r = 3, got {model.l_r}")
    tt = _check_t(t)
    c3 = 15 ** (1 / 3) * model.sigma2 / 3
    u = tt / c3
    return _out(1 - np.exp(-u) * (1 + u + u * u / 2), t)


def multi_path_scale(model: RayleighSumModel) -> float:
    """c = sigma2 / L * ((2L - 1)!!)^(1/L), in log space for L > 20."""
    L = model.l_r
    if L <= 20:
        dfact = math.prod(range(2 * L - 1, 0, -2))
        return model.sigma2 / L * dfact ** (1 / L)
    # (2L-1)!! = (2L)! / (2^L L!)
    log_dfact = special.gammaln(2 * L + 1) - L * math.log(2) - special.gammaln(L + 1)
    return model.sigma2 / L * math.exp(log_dfact / L)


def cdf_multi_ub_approx(t, model: RayleighSumModel):
    """Small-argument approximation 1 - e^{-t/c} sum_{k<L} (t/c)^k / k!."""
    tt = _check_t(t)
    c = multi_path_scale(model)
    return _out(special.gammainc(model.l_r, tt / c), t)


_CDFS = {
    "one": lambda t, m: cdf_one(t, m),
    "two": lambda t, m: cdf_two(t, m),
    "three": lambda t, m: cdf_three_approx(t, m),
    "multi": lambda t, m: cdf_multi_ub_approx(t, m),
}


def outage_probability(p_t: float, delta2: float, gamma_th: float, model: RayleighSumModel,
                       which: str = "auto"):
    """P(SNR < gamma_th) = F(delta2 * gamma_th / p_t) for the selected CDF.

    ``which`` is one of 'one', 'two', 'three', 'multi' or 'auto' (picked from
    the model's path count).
    """
    if p_t <= 0 or delta2 <= 0:
        raise DomainError(f"powers must be positive, got p_t={p_t}, delta2={delta2}")
    if np.any(np.asarray(gamma_th) < 0):
        raise DomainError("SNR threshold must be >= 0")
    if which == "auto":
        which = {1: "one", 2: "two", 3: "three"}.get(model.l_r, "multi")
    if which not in _CDFS:
        raise DomainError(f"unknown CDF selector {which!r}")
    return _CDFS[which](delta2 * np.asarray(gamma_th, dtype=float) / p_t, model)


def spatial_correlation(d, sigma2: float = 1.0):
    """R(d) = sigma2 sinc(2d) with sinc(u) = sin(pi u) / (pi u); d in wavelengths."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be >= 0")
    v = sigma2 * np.sinc(2 * d)
    return float(v) if v.ndim == 0 else v


def harmonic_number(n: int) -> float:
    """H_n = sum_{k=1}^{n} 1/k."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0.0
    if n <= 10**6:
        return float(np.sum(1.0 / np.arange(n, 0, -1, dtype=float)))
    return float(special.digamma(n + 1) + EULER_GAMMA)


def infinite_path_bounds(disc: RegionDiscretization, sigma2: float = 1.0) -> tuple[float, float]:
    """Lower/upper bounds on the expected max gain for isotropic (infinite-path) fading.

    Both are expected maxima of N i.i.d. exponentials of mean sigma2, i.e.
    sigma2 * H_N, with N = n_lb (lower) and N = n_ub (upper).
    """
    return sigma2 * harmonic_number(disc.n_lb), sigma2 * harmonic_number(disc.n_ub)


def cdf_infinite_bounds(t, disc: RegionDiscretization, sigma2: float = 1.0):
    """CDFs (1 - e^{-t/sigma2})^N for N = n_lb and N = n_ub."""
    tt = _check_t(t)
    base = -np.expm1(-tt / sigma2)
    lb, ub = base ** disc.n_lb, base ** disc.n_ub
    return _out(lb, t), _out(ub, t)
