"""Structure of the channel-gain field for a fixed EPRV and fixed AoAs.

Covers the two- and three-path closed forms (gain, gradient, maxima lines and
lattice, period vectors), the quantized-AoA period along x for any number of
paths, and numerical maximization over a region (lattice scan and gradient
ascent). Lengths are in wavelengths throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, TextIO

import numpy as np

from .channel import ChannelField, Position, Region, _as_position, _phasor
from .exceptions import (ArityError, DegenerateGeometryError, DomainError,
                         ResourceError)

DEFAULT_MAX_CELLS = 10**8
XI_TOL = 1e-12

__all__ = [
    "GainGrid",
    "MaxLineFamily",
    "PeriodEstimate",
    "gain_two_path",
    "gradient_two_path",
    "gain_three_path",
    "max_gain_bound",
    "max_line_family",
    "max_points_three",
    "adjacent_max_distances_three",
    "period_vector_three",
    "quantize_virtual_aoas",
    "quantized_period_x",
    "period_from_indices",
    "lattice",
    "scan_gain_grid",
    "scan_gain_line",
    "nested_square_maxima",
    "numerical_gradient",
    "gradient_ascent_search",
    "discretization_gap_bound",
]


@dataclass(frozen=True, eq=False)
class GainGrid:
    """Channel gain sampled on an inclusive lattice over a region.

    ``values[i, j]`` is the gain at ``(x[i], y[j])``.
    """

    region: Region
    step: float
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    argmax: Position
    max_value: float

    def to_csv(self, fh: TextIO) -> None:
        """Write ``x,y,gain`` rows in row-major order with 17 significant digits."""
        fh.write("x,y,gain\n")
        for i, xv in enumerate(self.x):
            xs = format(float(xv), ".17g")
            row = self.values[i]
            fh.write("".join(
                f"{xs},{format(float(yv), '.17g')},{format(float(g), '.17g')}\n"
                for yv, g in zip(self.y, row)
            ))


@dataclass(frozen=True)
class MaxLineFamily:
    """Parallel lines on which a two-path gain attains (|b1| + |b2|)^2.

    Line ``k`` is ``{(x, y): x * normal[0] + y * normal[1] = k + phase_offset}``.
    """

    normal: tuple[float, float]
    phase_offset: float
    spacing: float

    def offset(self, k: int) -> float:
        return k + self.phase_offset

    def point(self, k: int, s: float = 0.0) -> Position:
        """Point of line ``k`` at signed arc length ``s`` from its foot on the normal."""
        nx, ny = self.normal
        n2 = nx * nx + ny * ny
        c = self.offset(k)
        t = math.sqrt(n2)
        return Position(c * nx / n2 - s * ny / t, c * ny / n2 + s * nx / t)


@dataclass(frozen=True)
class PeriodEstimate:
    """Period along x of a gain field whose varphi values sit on the T-grid.

    ``constant`` is set when all paths share one quantized index; then the
    gain does not vary along x and ``period_x`` and ``tau_star`` are 0.
    """

    period_x: float
    resolution: int
    tau_star: int
    constant: bool = False
    max_quantization_error: float = 0.0


def _require_paths(field: ChannelField, n: int) -> None:
    if field.n_paths != n:
        raise ArityError(f"expected a {n}-path field, got {field.n_paths} paths")


def _two_path_terms(field: ChannelField, r) -> tuple[float, float, float, float, float]:
    x, y = _as_position(r)
    b1, b2 = field.eprv
    dphi = field.varphi[0] - field.varphi[1]
    dtheta = field.vartheta[0] - field.vartheta[1]
    omega = 2 * np.pi * (x * dphi + y * dtheta) + np.angle(b2) - np.angle(b1)
    return abs(b1), abs(b2), omega, dphi, dtheta


def gain_two_path(field: ChannelField, r: Position) -> float:
    """|b1|^2 + |b2|^2 + 2 |b1| |b2| cos(omega_12(r))."""
    _require_paths(field, 2)
    a1, a2, omega, _, _ = _two_path_terms(field, r)
    return float(a1 * a1 + a2 * a2 + 2 * a1 * a2 * np.cos(omega))


def gradient_two_path(field: ChannelField, r: Position) -> tuple[float, float]:
    """Analytic gradient of the two-path gain with respect to (x, y)."""
    _require_paths(field, 2)
    a1, a2, omega, dphi, dtheta = _two_path_terms(field, r)
    g = -4 * np.pi * a1 * a2 * np.sin(omega)
    return float(g * dphi), float(g * dtheta)


def gain_three_path(field: ChannelField, r: Position) -> float:
    """Three-path gain as the sum of per-path powers and pairwise cosine terms."""
    _require_paths(field, 3)
    x, y = _as_position(r)
    amp = np.abs(field.eprv)
    mu = np.angle(field.eprv)
    total = float(np.sum(amp**2))
    for m, n in ((0, 1), (0, 2), (1, 2)):
        omega = (2 * np.pi * (x * (field.varphi[m] - field.varphi[n])
                              + y * (field.vartheta[m] - field.vartheta[n]))
                 + mu[n] - mu[m])
        total += 2 * amp[m] * amp[n] * np.cos(omega)
    return total


def max_gain_bound(field: ChannelField) -> float:
    """(sum |b_l|)^2, the gain every path adding in phase would give."""
    return float(np.sum(np.abs(field.eprv)) ** 2)


def max_line_family(field: ChannelField) -> MaxLineFamily:
    _require_paths(field, 2)
    dphi = float(field.varphi[0] - field.varphi[1])
    dtheta = float(field.vartheta[0] - field.vartheta[1])
    norm = math.hypot(dphi, dtheta)
    if norm < XI_TOL:
        raise DegenerateGeometryError("both paths share one virtual AoA; the gain is constant")
    mu1, mu2 = np.angle(field.eprv)
    return MaxLineFamily((dphi, dtheta), float((mu1 - mu2) / (2 * np.pi)), 1.0 / norm)


def _xi(field: ChannelField) -> tuple[float, float, np.ndarray, np.ndarray]:
    _require_paths(field, 3)
    p, t = field.varphi, field.vartheta
    dp = np.array([p[0] - p[1], p[0] - p[2]])
    dt = np.array([t[0] - t[1], t[0] - t[2]])
    xi1 = float(dp[0] * dt[1] - dp[1] * dt[0])
    xi2 = float(dt[0] * dp[1] - dt[1] * dp[0])
    if abs(xi1) < XI_TOL or abs(xi2) < XI_TOL:
        raise DegenerateGeometryError(
            "the three virtual AoAs are collinear; maxima are not isolated points")
    return xi1, xi2, dp, dt


def max_points_three(field: ChannelField, k1: int, k2: int) -> Position:
    """Intersection of maximum lines ``k1`` (paths 1-2) and ``k2`` (paths 1-3)."""
    xi1, xi2, dp, dt = _xi(field)
    mu = np.angle(field.eprv)
    c1 = 2 * k1 * np.pi + mu[0] - mu[1]
    c2 = 2 * k2 * np.pi + mu[0] - mu[2]
    x = (c1 * dt[1] - c2 * dt[0]) / (2 * np.pi * xi1)
    y = (c1 * dp[1] - c2 * dp[0]) / (2 * np.pi * xi2)
    return Position(float(x), float(y))


def adjacent_max_distances_three(field: ChannelField) -> tuple[float, float, float]:
    """(d3_1, d3_2, d3): lattice spacings of the three-path maxima and their diagonal.

    Stepping ``k2`` in :func:`max_points_three` moves by ``d3_1``; stepping
    ``k1`` moves by ``d3_2``.
    """
    xi1, xi2, dp, dt = _xi(field)
    d1 = math.hypot(dt[0] / xi1, dp[0] / xi2)
    d2 = math.hypot(dt[1] / xi1, dp[1] / xi2)
    return d1, d2, math.hypot(d1, d2)


def period_vector_three(field: ChannelField, k12: int, k13: int) -> Position:
    """Translation leaving the three-path gain invariant, indexed by two integers."""
    xi1, xi2, dp, dt = _xi(field)
    x = (k12 * dt[1] - k13 * dt[0]) / xi1
    y = (k12 * dp[1] - k13 * dp[0]) / xi2
    return Position(float(x), float(y))


def quantized_grid(resolution: int) -> np.ndarray:
    """Grid points -1 + (2t - 1)/T for t = 1..T."""
    t = np.arange(1, resolution + 1)
    return -1.0 + (2 * t - 1) / resolution


def quantize_virtual_aoas(varphi, resolution: int) -> np.ndarray:
    """1-based index of the nearest T-grid point for each virtual AoA."""
    if resolution < 2:
        raise DomainError(f"quantization resolution must be >= 2, got {resolution}")
    idx = np.floor((np.asarray(varphi, dtype=float) + 1.0) * resolution / 2).astype(int) + 1
    return np.clip(idx, 1, resolution)


def period_from_indices(indices: Sequence[int], resolution: int) -> PeriodEstimate:
    if resolution < 2:
        raise DomainError(f"quantization resolution must be >= 2, got {resolution}")
    # coincident indices merged before differencing
    distinct = np.unique(np.asarray(indices, dtype=int))
    if distinct.size < 2:
        return PeriodEstimate(0.0, resolution, 0, constant=True)
    tau_star = reduce(math.gcd, (int(d) for d in np.diff(distinct)))
    return PeriodEstimate(resolution / (2 * tau_star), resolution, tau_star)


def quantized_period_x(virtual_aoas, resolution: int) -> PeriodEstimate:
    """Period along x after snapping the varphi values to the T-grid.

    Returns ``T / (2 tau*)`` where ``tau*`` is the gcd of the gaps between
    sorted, distinct grid indices.
    """
    varphi = np.asarray(virtual_aoas, dtype=float)
    if varphi.size < 2:
        raise DomainError("need at least two virtual AoAs")
    idx = quantize_virtual_aoas(varphi, resolution)
    est = period_from_indices(idx, resolution)
    err = float(np.max(np.abs(quantized_grid(resolution)[idx - 1] - varphi)))
    return PeriodEstimate(est.period_x, est.resolution, est.tau_star, est.constant, err)


def lattice(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive lattice lo, lo + step, ... not exceeding hi (up to 1e-9 steps)."""
    if step <= 0:
        raise DomainError(f"grid step must be positive, got {step}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _gain_matrix(field: ChannelField, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if field.n_paths == 1:
        # one path: constant gain, kept exact so ties resolve to the first cell
        return np.full((x.size, y.size), abs(field.eprv[0]) ** 2)
    # separable: h(x_i, y_j) = sum_l [b_l e^{-j2pi x_i varphi_l}] e^{-j2pi y_j vartheta_l}
    ex = _phasor(np.outer(x, field.varphi), -1) * field.eprv
    ey = _phasor(np.outer(y, field.vartheta), -1)
    h = ex @ ey.T
    return h.real**2 + h.imag**2


def scan_gain_grid(field: ChannelField, region: Region, step: float,
                   max_cells: int = DEFAULT_MAX_CELLS) -> GainGrid:
    """Exhaustive lattice search of the gain over ``region``.

    Ties are broken by the smallest (x-index, y-index) pair.
    """
    x = lattice(region.x_min, region.x_max, step)
    y = lattice(region.y_min, region.y_max, step)
    if x.size * y.size > max_cells:
        raise ResourceError(f"grid of {x.size}x{y.size} cells exceeds cap {max_cells}")
    values = _gain_matrix(field, x, y)
    flat = int(np.argmax(values))
    i, j = divmod(flat, y.size)
    return GainGrid(region, step, x, y, values, Position(float(x[i]), float(y[j])),
                    float(values[i, j]))


def scan_gain_line(field: ChannelField, x_min: float, x_max: float, step: float,
                   y0: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Gain along the horizontal segment y = y0, x in [x_min, x_max]."""
    x = lattice(x_min, x_max, step)
    return x, _gain_matrix(field, x, np.array([y0]))[:, 0]


def nested_square_maxima(field: ChannelField, sides: Sequence[float], step: float,
                         max_cells: int = DEFAULT_MAX_CELLS) -> np.ndarray:
    """Maximum lattice gain over each centered square of the given side lengths.

    When every smaller lattice is a centered sub-lattice of the largest one,
    the field is evaluated once and window maxima are grown ring by ring.
    Otherwise each square is scanned on its own.
    """
    sides = np.asarray(sides, dtype=float)
    if sides.size == 0:
        return np.empty(0)
    big = float(sides.max())
    margins = (big - sides) / (2 * step)
    if np.any(np.abs(margins - np.round(margins)) > 1e-9):
        return np.array([scan_gain_grid(field, Region.square(s), step, max_cells).max_value
                         for s in sides])
    x = lattice(-big / 2, big / 2, step)
    if x.size * x.size > max_cells:
        raise ResourceError(f"grid of {x.size}x{x.size} cells exceeds cap {max_cells}")
    values = _gain_matrix(field, x, x)
    n = x.size
    margin = np.round(margins).astype(int)
    out = np.empty(sides.size)
    cur, lo, hi = -np.inf, None, None
    # grow from the innermost window outwards, adding one border strip at a time
    for k in np.argsort(-margin, kind="stable"):
        m = int(margin[k])
        if lo is None:
            lo, hi = m, n - 1 - m
            cur = values[lo:hi + 1, lo:hi + 1].max()
        while lo > m:
            lo, hi = lo - 1, hi + 1
            cur = max(cur, values[lo, lo:hi + 1].max(), values[hi, lo:hi + 1].max(),
                      values[lo:hi + 1, lo].max(), values[lo:hi + 1, hi].max())
        out[k] = cur
    return out


def numerical_gradient(field: ChannelField, r, h: float = 1e-5) -> tuple[float, float]:
    """Central-difference gradient of the gain."""
    x, y = _as_position(r)
    g = field.gain(np.array([x + h, x - h, x, x]), np.array([y, y, y + h, y - h]))
    return float((g[0] - g[1]) / (2 * h)), float((g[2] - g[3]) / (2 * h))


def gradient_ascent_search(field: ChannelField, region: Region, start: Position,
                           step0: float = 0.1, iters: int = 500) -> Position:
    """Projected gradient ascent with step halving on failure.

    Moves a distance ``step`` along the normalized numerical gradient, clipped
    to the region. A move is kept only when the gain strictly improves;
    otherwise the step is halved. Stops after ``iters`` moves or when the
    step drops below 1e-8.
    """
    start = _as_position(start)
    if not region.contains(start):
        raise DomainError(f"start {start} lies outside {region}")
    x, y = start
    best = float(field.gain(x, y))
    step = step0
    for _ in range(iters):
        if step < 1e-8:
            break
        gx, gy = numerical_gradient(field, (x, y))
        norm = math.hypot(gx, gy)
        # central differences carry ~1e-11 roundoff noise on a flat field
        if norm < 1e-9 * max(1.0, best):
            break
        nx, ny = region.clip(x + step * gx / norm, y + step * gy / norm)
        g = float(field.gain(nx, ny))
        if g > best:
            x, y, best = nx, ny, g
        else:
            step /= 2
    return Position(float(x), float(y))


def discretization_gap_bound(field: ChannelField, step: float) -> float:
    """Upper bound on (true max - lattice max) over a region.

    Every point lies within ``step / sqrt(2)`` of the lattice and
    ``|grad |h|^2| <= 4 pi (sum |b|)^2 max ||v||``.
    """
    amp = float(np.sum(np.abs(field.eprv)))
    vmax = float(np.max(np.hypot(field.varphi, field.vartheta)))
    return 2 * math.sqrt(2) * math.pi * step * amp * amp * vmax
