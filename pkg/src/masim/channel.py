"""Field-response channel model.

All lengths are in wavelength units (x / lambda), so no carrier frequency is
ever needed. The receive-side channel at position ``r`` is

    h(r) = sum_l b_l * exp(-j 2 pi (x * varphi_l + y * vartheta_l))

where ``b`` is the effective path-response vector (EPRV) obtained by fixing
the transmitter, and ``(varphi_l, vartheta_l) = (cos(theta) sin(phi), sin(theta))``
are the virtual angles of arrival.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DimensionError, DomainError

__all__ = [
    "Position",
    "PhysicalAngles",
    "VirtualAngles",
    "PathResponseMatrix",
    "ChannelField",
    "Region",
    "virtual_aoa",
    "virtual_aoa_arrays",
    "propagation_difference",
    "frv",
    "channel_coefficient",
    "effective_eprv",
    "channel_gain",
    "snr",
    "rician_factor",
    "los_prm",
    "geometric_prm",
    "rayleigh_prm",
    "rician_prm",
    "classify_prm",
]

# Phase arguments (in turns) above this magnitude are reduced modulo 1 first.
_REDUCE_ABOVE = 1e6
_ANGLE_TOL = 1e-12


def _phasor(turns, sign: int = 1) -> np.ndarray:
    """exp(sign * j * 2 pi * turns), reducing very large arguments to [0, 1)."""
    turns = np.asarray(turns, dtype=float)
    big = np.abs(turns) > _REDUCE_ABOVE
    if np.any(big):
        turns = np.where(big, turns - np.floor(turns), turns)
    return np.exp(sign * 2j * np.pi * turns)


@dataclass(frozen=True)
class Position:
    """A point of the transmit or receive plane, in wavelengths."""

    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise DomainError(f"position must be finite, got ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


ORIGIN = Position(0.0, 0.0)


@dataclass(frozen=True)
class PhysicalAngles:
    """Elevation ``theta`` and azimuth ``phi`` of one path, both in [-pi/2, pi/2]."""

    theta: float
    phi: float

    def __post_init__(self):
        lim = np.pi / 2 + _ANGLE_TOL
        if not (abs(self.theta) <= lim and abs(self.phi) <= lim):
            raise DomainError(
                f"angles must lie in [-pi/2, pi/2], got theta={self.theta}, phi={self.phi}"
            )


@dataclass(frozen=True)
class VirtualAngles:
    """Virtual AoA pair ``(cos(theta) sin(phi), sin(theta))``."""

    varphi: float
    vartheta: float

    def __post_init__(self):
        if abs(self.varphi) > 1 + _ANGLE_TOL or abs(self.vartheta) > 1 + _ANGLE_TOL:
            raise DomainError(f"virtual angles must lie in [-1, 1]: {self}")
        if self.varphi**2 + self.vartheta**2 > 1 + 1e-9:
            raise DomainError(f"virtual angles must satisfy varphi^2 + vartheta^2 <= 1: {self}")


def _as_position(p) -> Position:
    return p if isinstance(p, Position) else Position(float(p[0]), float(p[1]))


def _virtual_arrays(v_list: Sequence[VirtualAngles]) -> tuple[np.ndarray, np.ndarray]:
    varphi = np.array([v.varphi for v in v_list], dtype=float)
    vartheta = np.array([v.vartheta for v in v_list], dtype=float)
    return varphi, vartheta


@dataclass(frozen=True, eq=False)
class PathResponseMatrix:
    """Complex L_r x L_t coupling matrix between receive and transmit paths."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError(f"PRM must be a non-empty 2-D matrix, got shape {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def l_r(self) -> int:
        return self.entries.shape[0]

    @property
    def l_t(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True, eq=False)
class ChannelField:
    """Receive-side channel once the transmitter is fixed.

    Attributes:
        eprv: complex effective path-response vector ``b`` of length L.
        varphi: virtual AoAs along x, length L.
        vartheta: virtual AoAs along y, length L.
    """

    eprv: np.ndarray
    varphi: np.ndarray
    vartheta: np.ndarray = None

    def __post_init__(self):
        b = np.atleast_1d(np.array(self.eprv, dtype=complex))
        vp = np.atleast_1d(np.array(self.varphi, dtype=float))
        vt = np.zeros_like(vp) if self.vartheta is None else np.atleast_1d(
            np.array(self.vartheta, dtype=float))
        if b.ndim != 1 or vp.shape != b.shape or vt.shape != b.shape:
            raise DimensionError(
                f"eprv and virtual AoAs must be 1-D of equal length, got "
                f"{b.shape}, {vp.shape}, {vt.shape}"
            )
        if b.size == 0:
            raise DimensionError("a channel field needs at least one path")
        for arr in (b, vp, vt):
            arr.flags.writeable = False
        object.__setattr__(self, "eprv", b)
        object.__setattr__(self, "varphi", vp)
        object.__setattr__(self, "vartheta", vt)

    @classmethod
    def from_virtual(cls, eprv, virtual_aoas: Sequence[VirtualAngles]) -> "ChannelField":
        varphi, vartheta = _virtual_arrays(virtual_aoas)
        return cls(eprv, varphi, vartheta)

    @classmethod
    def from_angles(cls, eprv, angles: Sequence[PhysicalAngles]) -> "ChannelField":
        return cls.from_virtual(eprv, [virtual_aoa(a) for a in angles])

    @property
    def n_paths(self) -> int:
        return self.eprv.size

    @property
    def virtual_aoas(self) -> list[VirtualAngles]:
        return [VirtualAngles(float(a), float(b)) for a, b in zip(self.varphi, self.vartheta)]

    def response(self, x, y) -> np.ndarray:
        """Complex channel h(x, y); ``x`` and ``y`` broadcast against each other."""
        x = np.asarray(x, dtype=float)[..., None]
        y = np.asarray(y, dtype=float)[..., None]
        return np.sum(self.eprv * _phasor(x * self.varphi + y * self.vartheta, -1), axis=-1)

    def gain(self, x, y) -> np.ndarray:
        """Channel power gain |h(x, y)|^2, vectorized."""
        return np.abs(self.response(x, y)) ** 2


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle, in wavelengths, where the receive antenna may move."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(np.isfinite(v) for v in vals):
            raise DomainError(f"region bounds must be finite: {vals}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise DomainError(f"region bounds are inverted: {vals}")

    @classmethod
    def square(cls, side: float, center: Position = ORIGIN) -> "Region":
        """The A x A square [-A/2, A/2]^2 (shifted to ``center``)."""
        if side < 0:
            raise DomainError(f"region side must be nonnegative, got {side}")
        h = side / 2
        return cls(center.x - h, center.x + h, center.y - h, center.y + h)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, pos, tol: float = 1e-12) -> bool:
        x, y = pos
        return (self.x_min - tol <= x <= self.x_max + tol
                and self.y_min - tol <= y <= self.y_max + tol)

    def clip(self, x: float, y: float) -> tuple[float, float]:
        return (min(max(x, self.x_min), self.x_max), min(max(y, self.y_min), self.y_max))


def virtual_aoa(angles: PhysicalAngles) -> VirtualAngles:
    """Map physical (theta, phi) to the virtual pair (cos theta sin phi, sin theta)."""
    varphi, vartheta = virtual_aoa_arrays(angles.theta, angles.phi)
    # Round-off can push the pair a hair outside the unit disk.
    varphi, vartheta = float(varphi), float(np.clip(vartheta, -1.0, 1.0))
    return VirtualAngles(varphi, vartheta)


def virtual_aoa_arrays(theta, phi) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`virtual_aoa` on arrays of physical angles."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.cos(theta) * np.sin(phi), np.sin(theta)


def propagation_difference(pos: Position, v: VirtualAngles) -> float:
    """Path-length difference between ``pos`` and the reference point, in wavelengths."""
    x, y = pos
    return x * v.varphi + y * v.vartheta


def frv(pos: Position, v_list: Sequence[VirtualAngles]) -> np.ndarray:
    """Field-response vector ``exp(j 2 pi rho_l(pos))`` over the given paths."""
    if len(v_list) == 0:
        raise DimensionError("frv needs at least one path")
    x, y = _as_position(pos)
    varphi, vartheta = _virtual_arrays(v_list)
    return _phasor(x * varphi + y * vartheta, +1)


def channel_coefficient(t: Position, r: Position, prm: PathResponseMatrix,
                        tx_v: Sequence[VirtualAngles], rx_v: Sequence[VirtualAngles]) -> complex:
    """h(t, r) = f(r)^H  Sigma  g(t)."""
    if len(tx_v) != prm.l_t or len(rx_v) != prm.l_r:
        raise DimensionError(
            f"PRM is {prm.l_r}x{prm.l_t} but got {len(rx_v)} receive and "
            f"{len(tx_v)} transmit angle pairs"
        )
    f = frv(r, rx_v)
    g = frv(t, tx_v)
    return complex(np.vdot(f, prm.entries @ g))


def effective_eprv(prm: PathResponseMatrix, t0: Position, tx_v: Sequence[VirtualAngles],
                   rx_v: Sequence[VirtualAngles]) -> ChannelField:
    """Fix the transmitter at ``t0`` and return the receive-side field b = Sigma g(t0)."""
    if len(tx_v) != prm.l_t:
        raise DimensionError(f"PRM has {prm.l_t} transmit paths, got {len(tx_v)} angle pairs")
    if len(rx_v) != prm.l_r:
        raise DimensionError(f"PRM has {prm.l_r} receive paths, got {len(rx_v)} angle pairs")
    b = prm.entries @ frv(t0, tx_v)
    return ChannelField.from_virtual(b, rx_v)


def channel_gain(field: ChannelField, r: Position) -> float:
    """|h(r)|^2 for a single position."""
    x, y = _as_position(r)
    return float(field.gain(x, y))


def snr(gain, p_t: float, delta2: float):
    """Receive SNR gain * p_t / delta2."""
    if delta2 <= 0:
        raise DomainError(f"noise power must be positive, got {delta2}")
    if p_t < 0:
        raise DomainError(f"transmit power must be nonnegative, got {p_t}")
    return gain * p_t / delta2


def rician_factor(prm: PathResponseMatrix, los_index: tuple[int, int], nlos_power: float) -> float:
    """Rician factor |sigma_LoS|^2 / E|sum of NLoS entries|^2.

    The NLoS power is an ensemble expectation and has to be supplied (or
    estimated) by the caller; one PRM realization cannot provide it.
    """
    if nlos_power <= 0:
        raise DomainError(f"NLoS power must be positive, got {nlos_power}")
    i, j = los_index
    if not (0 <= i < prm.l_r and 0 <= j < prm.l_t):
        raise DimensionError(f"LoS index {los_index} out of bounds for {prm.l_r}x{prm.l_t}")
    return float(abs(prm.entries[i, j]) ** 2 / nlos_power)


def los_prm(coefficient: complex) -> PathResponseMatrix:
    """Single-path (LoS) model: L_t = L_r = 1."""
    return PathResponseMatrix([[coefficient]])


def geometric_prm(coefficients: Iterable[complex]) -> PathResponseMatrix:
    """Geometric model: one-to-one transmit/receive paths, diagonal PRM."""
    c = np.asarray(list(coefficients), dtype=complex)
    if c.size == 0:
        raise DimensionError("geometric PRM needs at least one path")
    return PathResponseMatrix(np.diag(c))


def rayleigh_prm(rng: np.random.Generator, l_r: int, l_t: int,
                 total_power: float = 1.0) -> PathResponseMatrix:
    """Finite-L approximation of the Rayleigh model: i.i.d. CSCG entries.

    Entry variance is ``total_power / (l_r * l_t)`` so that h(t0, r0) has
    variance ``total_power``.
    """
    var = total_power / (l_r * l_t)
    a = rng.standard_normal((l_r, l_t)) + 1j * rng.standard_normal((l_r, l_t))
    return PathResponseMatrix(a * np.sqrt(var / 2))


def rician_prm(rng: np.random.Generator, l_r: int, l_t: int, los_amplitude: float,
               nlos_power: float, los_index: tuple[int, int] = (0, 0)) -> PathResponseMatrix:
    """Finite-L approximation of the Rician model.

    The LoS entry has fixed amplitude and uniform phase; the remaining
    ``l_r*l_t - 1`` entries are i.i.d. CSCG with total variance ``nlos_power``.
    """
    n_nlos = l_r * l_t - 1
    if n_nlos < 1:
        raise DimensionError("a Rician PRM needs at least one NLoS entry")
    a = rng.standard_normal((l_r, l_t)) + 1j * rng.standard_normal((l_r, l_t))
    a *= np.sqrt(nlos_power / n_nlos / 2)
    a[los_index] = los_amplitude * np.exp(2j * np.pi * rng.random())
    return PathResponseMatrix(a)


def classify_prm(prm: PathResponseMatrix, atol: float = 0.0) -> str:
    """Name the conventional model a PRM reduces to: 'los', 'geometric' or 'general'."""
    if prm.l_r == 1 and prm.l_t == 1:
        return "los"
    if prm.l_r == prm.l_t:
        off = prm.entries - np.diag(np.diag(prm.entries))
        if np.all(np.abs(off) <= atol):
            return "geometric"
    return "general"
