import numpy as np
import pytest

from broadbeam.array_model import (
    Direction,
    UlaGeometry,
    UraGeometry,
    beampattern,
    beampattern_grid,
    clamp_small_negative,
    steering_from_sines,
    steering_vector_ula,
    steering_vector_ura,
    ula_pattern_samples,
    ura_pattern_samples,
)
from broadbeam.errors import BroadbeamError


def test_geometry_validation():
    with pytest.raises(ValueError):
        UlaGeometry(0, 0.5)
    with pytest.raises(ValueError):
        UlaGeometry(4, 0.0)
    with pytest.raises(ValueError):
        UlaGeometry(4, -0.5)
    geom = UraGeometry(azimuth=UlaGeometry(4, 0.5), elevation=UlaGeometry(3, 0.5))
    assert geom.size == 12


def test_direction_validation():
    Direction(theta=0.0)
    Direction(theta=0.3, psi=-0.2)
    with pytest.raises(ValueError):
        Direction(theta=2.0)
    with pytest.raises(ValueError):
        Direction(theta=0.0, psi=2.0)


def test_ula_steering_quarter_turns():
    # sin(theta) = 1/2 at half-wavelength spacing steps the phase by pi/2
    geom = UlaGeometry(4, 0.5)
    a = steering_vector_ula(geom, float(np.arcsin(0.5)))
    expected = np.array([1.0, 1.0j, -1.0, -1.0j])
    assert np.allclose(a, expected, atol=1e-12)


def test_ula_steering_broadside_is_flat():
    geom = UlaGeometry(8, 0.5)
    assert np.allclose(steering_vector_ula(geom, 0.0), np.ones(8))


def test_steering_from_sines_matches_single_direction():
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = int(rng.integers(2, 12))
        rho = float(rng.uniform(0.1, 0.6))
        theta = float(rng.uniform(-np.pi / 2, np.pi / 2))
        geom = UlaGeometry(m, rho)
        rows = steering_from_sines(m, rho, np.array([np.sin(theta)]))
        assert np.allclose(rows[0], steering_vector_ula(geom, theta), atol=1e-12)


def test_unit_vector_pattern_is_constant():
    # a single active antenna radiates the same power in every direction
    geom = UlaGeometry(6, 0.5)
    v = np.zeros(6, dtype=complex)
    v[2] = 1.0
    thetas = np.linspace(-np.pi / 2, np.pi / 2, 41)
    power = ula_pattern_samples(geom, v, thetas)
    assert np.allclose(power, 1.0, atol=1e-12)


def test_pattern_scales_quadratically():
    rng = np.random.default_rng(11)
    geom = UlaGeometry(5, 0.5)
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    thetas = np.linspace(-1.2, 1.2, 17)
    base = ula_pattern_samples(geom, v, thetas)
    scaled = ula_pattern_samples(geom, 3.0 * v, thetas)
    assert np.allclose(scaled, 9.0 * base, rtol=1e-12)


def test_beampattern_accepts_theta_or_direction():
    geom = UlaGeometry(4, 0.5)
    v = np.array([0.5, 0.5, 0.5, 0.5], dtype=complex)
    f1 = beampattern(geom, v, 0.3)
    f2 = beampattern(geom, v, Direction(theta=0.3))
    assert f1 == pytest.approx(f2, abs=1e-15)


def test_ura_steering_kronecker_oracle():
    # 2x2 half-wavelength array steered to psi=pi/2, theta=0: the azimuth
    # factor sees sine 0 and the elevation factor sees sine 1
    geom = UraGeometry(azimuth=UlaGeometry(2, 0.5), elevation=UlaGeometry(2, 0.5))
    a = steering_vector_ura(geom, Direction(theta=0.0, psi=np.pi / 2))
    assert np.allclose(a, np.array([1.0, -1.0, 1.0, -1.0]), atol=1e-12)


def test_ura_pattern_factorizes():
    rng = np.random.default_rng(23)
    geom = UraGeometry(azimuth=UlaGeometry(3, 0.5), elevation=UlaGeometry(4, 0.5))
    va = rng.normal(size=3) + 1j * rng.normal(size=3)
    ve = rng.normal(size=4) + 1j * rng.normal(size=4)
    v = np.kron(va, ve)
    psis = np.linspace(-1.5, 1.5, 11)
    thetas = np.linspace(-1.5, 1.5, 13)
    grid = ura_pattern_samples(geom, v, psis, thetas)
    pg, tg = np.meshgrid(psis, thetas, indexing="ij")
    s_az = (np.sin(pg) * np.sin(tg)).ravel()
    s_el = (np.sin(pg) * np.cos(tg)).ravel()
    fa = np.abs(steering_from_sines(3, 0.5, s_az) @ np.conj(va)) ** 2
    fe = np.abs(steering_from_sines(4, 0.5, s_el) @ np.conj(ve)) ** 2
    assert np.allclose(grid, (fa * fe).reshape(grid.shape), rtol=1e-10, atol=1e-12)


def test_ura_beampattern_matches_steering_product():
    geom = UraGeometry(azimuth=UlaGeometry(2, 0.5), elevation=UlaGeometry(3, 0.5))
    rng = np.random.default_rng(5)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    d = Direction(theta=0.4, psi=-0.7)
    a = steering_vector_ura(geom, d)
    assert beampattern(geom, v, d) == pytest.approx(abs(np.vdot(v, a)) ** 2, rel=1e-12)


def test_clamp_small_negative():
    out = clamp_small_negative(np.array([1.0, -1e-13, 0.5]))
    assert out[1] == 0.0
    with pytest.raises(BroadbeamError):
        clamp_small_negative(np.array([-1e-3]))


def test_beampattern_grid():
    geom = UlaGeometry(4, 0.5)
    v = np.ones(4) / 2.0
    rows = beampattern_grid(geom, v, 19)
    assert len(rows) == 19
    assert rows[0][0].theta == pytest.approx(-np.pi / 2)
    assert rows[-1][0].theta == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        beampattern_grid(geom, v, 1)
