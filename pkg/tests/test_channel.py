import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masim.channel import (ChannelField, PathResponseMatrix, PhysicalAngles, Position, Region,
                           VirtualAngles, channel_coefficient, channel_gain, classify_prm,
                           effective_eprv, frv, geometric_prm, los_prm, propagation_difference,
                           rayleigh_prm, rician_factor, rician_prm, snr, virtual_aoa)
from masim.exceptions import DimensionError, DomainError

SQ3 = math.sqrt(3)
HALF_SQ2 = math.sqrt(2) / 2
FIG3_V = [VirtualAngles(1.0, 0.0), VirtualAngles(-0.5, SQ3 / 2)]

angles = st.floats(-math.pi / 2, math.pi / 2)
coords = st.floats(-50, 50)


# virtual_aoa

@pytest.mark.parametrize("theta, phi, expected", [
    (0.0, math.pi / 2, (1.0, 0.0)),
    (math.pi / 3, -math.pi / 2, (-0.5, SQ3 / 2)),
    (math.pi / 2, 0.3, (0.0, 1.0)),
    (math.pi / 2, -1.2, (0.0, 1.0)),
])
def test_virtual_aoa_examples(theta, phi, expected):
    v = virtual_aoa(PhysicalAngles(theta, phi))
    assert v.varphi == pytest.approx(expected[0], abs=1e-15)
    assert v.vartheta == pytest.approx(expected[1], abs=1e-15)


def test_virtual_aoa_image_in_unit_disk():
    rng = np.random.default_rng(1)
    th = rng.uniform(-math.pi / 2, math.pi / 2, 10**5)
    ph = rng.uniform(-math.pi / 2, math.pi / 2, 10**5)
    vp, vt = np.cos(th) * np.sin(ph), np.sin(th)
    assert np.all(vp**2 + vt**2 <= 1 + 1e-12)
    # the scalar path agrees with the array path
    for t, p in zip(th[:200], ph[:200]):
        v = virtual_aoa(PhysicalAngles(t, p))
        assert v.varphi**2 + v.vartheta**2 <= 1 + 1e-12


def test_angle_domain_checks():
    with pytest.raises(DomainError):
        PhysicalAngles(2.0, 0.0)
    with pytest.raises(DomainError):
        PhysicalAngles(0.0, -1.6)
    with pytest.raises(DomainError):
        VirtualAngles(0.9, 0.9)
    with pytest.raises(DomainError):
        Position(float("nan"), 0.0)


# propagation_difference and frv

@pytest.mark.parametrize("pos, v, expected", [
    ((0.0, 0.0), (0.3, -0.4), 0.0),
    ((1.0, 0.0), (1.0, 0.0), 1.0),
    ((0.5, 0.25), (-0.5, SQ3 / 2), -0.25 + 0.25 * SQ3 / 2),
])
def test_propagation_difference(pos, v, expected):
    got = propagation_difference(Position(*pos), VirtualAngles(*v))
    assert got == pytest.approx(expected, abs=1e-15)


def test_propagation_difference_arithmetic_value():
    got = propagation_difference(Position(0.5, 0.25), VirtualAngles(-0.5, SQ3 / 2))
    assert got == pytest.approx(-0.0335, abs=1e-4)


def test_frv_examples():
    v3 = [VirtualAngles(0.1, 0.2), VirtualAngles(-0.5, 0.5), VirtualAngles(0.0, -1.0)]
    np.testing.assert_allclose(frv(Position(0, 0), v3), np.ones(3), atol=0)
    np.testing.assert_allclose(frv(Position(0.5, 0), [VirtualAngles(1, 0)]), [-1.0], atol=1e-15)
    np.testing.assert_allclose(frv(Position(0.25, 0.25), [VirtualAngles(1, 0), VirtualAngles(0, 1)]),
                               [1j, 1j], atol=1e-15)
    with pytest.raises(DimensionError):
        frv(Position(0, 0), [])


@settings(max_examples=200)
@given(x=coords, y=coords, th=st.lists(angles, min_size=1, max_size=6), ph=angles)
def test_frv_unit_modulus(x, y, th, ph):
    vs = [virtual_aoa(PhysicalAngles(t, ph)) for t in th]
    f = frv(Position(x, y), vs)
    assert np.all(np.abs(np.abs(f) - 1) < 1e-12)


def test_frv_large_argument_reduction():
    # 2e6 turns is an integer, so the phase must be exactly zero after reduction
    f = frv(Position(2e6, 0.0), [VirtualAngles(1.0, 0.0)])
    assert abs(f[0] - 1) < 1e-9


# channel_coefficient / effective_eprv

def test_channel_coefficient_examples():
    o = Position(0, 0)
    v1 = [VirtualAngles(0.2, 0.1)]
    assert channel_coefficient(o, o, PathResponseMatrix([[0.3 + 0.4j]]), v1, v1) == pytest.approx(0.3 + 0.4j)
    v2 = [VirtualAngles(0.2, 0.1), VirtualAngles(-0.7, 0.3)]
    assert channel_coefficient(o, o, PathResponseMatrix(np.full((2, 2), 0.25)), v2, v2) == pytest.approx(1.0)
    h = channel_coefficient(o, Position(0.5, 0), PathResponseMatrix([[1]]), v1, [VirtualAngles(1, 0)])
    assert h == pytest.approx(-1.0, abs=1e-15)


def test_channel_coefficient_dimension_mismatch():
    v1 = [VirtualAngles(0, 0)]
    with pytest.raises(DimensionError):
        channel_coefficient(Position(0, 0), Position(0, 0), PathResponseMatrix(np.ones((2, 2))), v1, v1)


def test_reference_consistency():
    rng = np.random.default_rng(2)
    for _ in range(50):
        lr, lt = rng.integers(1, 6, 2)
        prm = rayleigh_prm(rng, lr, lt)
        rx = [VirtualAngles(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)) for _ in range(lr)]
        tx = [VirtualAngles(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)) for _ in range(lt)]
        h = channel_coefficient(Position(0, 0), Position(0, 0), prm, tx, rx)
        assert abs(h - prm.entries.sum()) < 1e-12


def test_effective_eprv_examples():
    vs = [VirtualAngles(0.1, 0.0), VirtualAngles(0.0, 0.2)]
    fld = effective_eprv(PathResponseMatrix([[1, 2], [3, 4]]), Position(0, 0), vs, vs)
    np.testing.assert_allclose(fld.eprv, [3, 7])
    b = [0.5 + 0.1j, -0.2j]
    fld = effective_eprv(geometric_prm(b), Position(0, 0), vs, vs)
    np.testing.assert_allclose(fld.eprv, b)
    fld = effective_eprv(PathResponseMatrix([[1]]), Position(0.25, 0), [VirtualAngles(1, 0)],
                         [VirtualAngles(0, 0)])
    np.testing.assert_allclose(fld.eprv, [1j], atol=1e-15)


def test_field_gain_matches_general_model():
    # |h|^2 through the EPRV equals |f^H Sigma g|^2 with a diagonal PRM
    rng = np.random.default_rng(3)
    for _ in range(200):
        L = int(rng.integers(1, 7))
        b = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        th, ph = rng.uniform(-1.5, 1.5, (2, L))
        rx = [virtual_aoa(PhysicalAngles(t, p)) for t, p in zip(th, ph)]
        fld = ChannelField.from_virtual(b, rx)
        r = Position(*rng.uniform(-10, 10, 2))
        h = channel_coefficient(Position(0, 0), r, geometric_prm(b), rx, rx)
        assert abs(channel_gain(fld, r) - abs(h) ** 2) < 1e-10


# channel_gain

def test_channel_gain_examples():
    one = ChannelField([0.6 + 0.8j], [0.3], [0.4])
    rng = np.random.default_rng(4)
    for r in rng.uniform(-20, 20, (100, 2)):
        assert abs(channel_gain(one, Position(*r)) - 1.0) < 1e-12
    fig3 = ChannelField.from_virtual([HALF_SQ2, HALF_SQ2], FIG3_V)
    assert channel_gain(fig3, Position(0, 0)) == pytest.approx(2.0, abs=1e-15)
    # minimum line: x * 1.5 - y * sqrt(3)/2 = 1/2
    assert channel_gain(fig3, Position(1 / 3, 0)) == pytest.approx(0.0, abs=1e-15)


def test_channel_field_validation():
    with pytest.raises(DimensionError):
        ChannelField([1, 2], [0.1])
    with pytest.raises(DimensionError):
        ChannelField([], [])
    fld = ChannelField([1, 2], [0.1, 0.2])
    assert fld.n_paths == 2
    with pytest.raises(ValueError):
        fld.eprv[0] = 3


def test_region():
    r = Region.square(4.0)
    assert (r.x_min, r.x_max, r.y_min, r.y_max) == (-2, 2, -2, 2)
    assert r.contains((2, -2)) and not r.contains((2.1, 0))
    assert r.clip(5, -5) == (2, -2)
    with pytest.raises(DomainError):
        Region(1, 0, 0, 1)
    with pytest.raises(DomainError):
        Region.square(-1)


# snr and PRM models

@pytest.mark.parametrize("args, expected", [((1.0, 1.0, 1.0), 1.0), ((2.0, 4.0, 2.0), 4.0),
                                            ((0.0, 3.0, 0.5), 0.0)])
def test_snr(args, expected):
    assert snr(*args) == expected


def test_snr_domain():
    with pytest.raises(DomainError):
        snr(1.0, 1.0, 0.0)


def test_rician_factor_examples():
    assert rician_factor(PathResponseMatrix([[1, 0.1]]), (0, 0), 1.0) == pytest.approx(1.0)
    assert rician_factor(PathResponseMatrix([[2, 0.1]]), (0, 0), 2.0) == pytest.approx(2.0)
    with pytest.raises(DimensionError):
        rician_factor(PathResponseMatrix([[2]]), (1, 0), 2.0)


def test_rician_factor_monte_carlo():
    # unit LoS entry, NLoS variance 0.5 in total -> kappa = 2
    rng = np.random.default_rng(5)
    draws = [rician_prm(rng, 2, 2, 1.0, 0.5) for _ in range(10**5)]
    nlos = np.array([d.entries.sum() - d.entries[0, 0] for d in draws])
    est = np.mean(np.abs(nlos) ** 2)
    kappa = rician_factor(draws[0], (0, 0), est)
    assert kappa == pytest.approx(2.0, rel=0.02)


def test_classify_prm():
    assert classify_prm(los_prm(0.5j)) == "los"
    assert classify_prm(geometric_prm([1, 2, 3])) == "geometric"
    assert classify_prm(rayleigh_prm(np.random.default_rng(0), 3, 3)) == "general"
    assert classify_prm(PathResponseMatrix(np.ones((2, 3)))) == "general"


def test_rayleigh_prm_variance():
    rng = np.random.default_rng(6)
    h0 = np.array([rayleigh_prm(rng, 3, 2, 2.0).entries.sum() for _ in range(20000)])
    assert np.mean(np.abs(h0) ** 2) == pytest.approx(2.0, rel=0.05)
