"""Tests for the multi-cell downlink simulator."""

import numpy as np
import pytest

from broadbeam.cell_simulator import (
    NetworkConfig,
    SimulationResult,
    _inside_hexagon,
    build_topology,
    downlink_sinr,
    drop_users,
    rayleigh_fading,
    simulate,
)
from broadbeam.errors import BroadbeamError


def _small_config(**overrides):
    base = dict(cells=19, users_per_cell=3, drops=2, draws_per_drop=20, seed=7)
    base.update(overrides)
    return NetworkConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        NetworkConfig(cells=7)
    with pytest.raises(ValueError):
        NetworkConfig(path_loss_exponent=2.0)
    with pytest.raises(ValueError):
        NetworkConfig(cell_hole=1600.0)
    with pytest.raises(ValueError):
        NetworkConfig(users_per_cell=0)


def test_transmit_snr_frozen():
    # 46 dBm over -174 dBm/Hz * 20 MHz
    cfg = NetworkConfig()
    assert cfg.transmit_snr_db == pytest.approx(146.98970004336019, abs=1e-9)
    assert cfg.transmit_snr == pytest.approx(10.0 ** (cfg.transmit_snr_db / 10.0))


def test_topology_two_rings():
    cfg = NetworkConfig()
    sites = build_topology(cfg)
    assert sites.shape == (19, 2)
    assert np.all(sites[0] == 0.0)
    radii = np.sort(np.linalg.norm(sites, axis=1))
    r = cfg.cell_radius
    expected = np.sort(
        [0.0]
        + [np.sqrt(3.0) * r] * 6  # first ring
        + [3.0 * r] * 6  # second ring, edge midpoints
        + [2.0 * np.sqrt(3.0) * r] * 6  # second ring, corners
    )
    assert np.allclose(radii, expected, atol=1e-9)
    # all sites distinct
    assert len({tuple(np.round(s, 6)) for s in sites}) == 19


def test_topology_single_cell():
    sites = build_topology(NetworkConfig(cells=1))
    assert sites.shape == (1, 2)
    assert np.all(sites == 0.0)


def test_inside_hexagon_pointy_top():
    r = 1600.0
    inradius = np.sqrt(3.0) / 2.0 * r
    inside = np.array(
        [[0.0, 0.999 * r], [0.0, -0.999 * r], [0.999 * inradius, 0.0], [-0.999 * inradius, 0.0]]
    )
    outside = np.array(
        [[0.0, 1.001 * r], [0.0, -1.001 * r], [1.001 * inradius, 0.0], [-1.001 * inradius, 0.0]]
    )
    assert np.all(_inside_hexagon(inside, r))
    assert not np.any(_inside_hexagon(outside, r))


def test_drop_users_membership():
    cfg = _small_config(users_per_cell=40)
    rng = np.random.default_rng(3)
    users = drop_users(cfg, rng)
    assert users.shape == (19, 40, 2)
    sites = build_topology(cfg)
    for cell in range(cfg.cells):
        local = users[cell] - sites[cell]
        assert np.all(_inside_hexagon(local, cfg.cell_radius))
        assert np.all(np.hypot(local[:, 0], local[:, 1]) >= cfg.cell_hole)


def test_rayleigh_fading_moments():
    rng = np.random.default_rng(11)
    h = rayleigh_fading(rng, (200000,))
    assert abs(h.mean()) < 0.01
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.01)


def test_downlink_sinr_frozen():
    assert downlink_sinr(10.0, 2.0, 3.0) == pytest.approx(20.0 / 31.0, abs=1e-15)
    # no interference reduces to snr * useful
    assert downlink_sinr(4.0, 0.5, 0.0) == pytest.approx(2.0, abs=1e-15)


def test_simulate_rejects_antenna_mismatch():
    cfg = _small_config(antennas=16)
    with pytest.raises(BroadbeamError, match="8.*16"):
        simulate(cfg, np.ones(8) / np.sqrt(8.0))


def test_simulate_deterministic_across_runs_and_threads():
    cfg = _small_config(antennas=4)
    v = np.ones(4) / 2.0
    first = simulate(cfg, v, threads=1)
    second = simulate(cfg, v, threads=1)
    third = simulate(cfg, v, threads=3)
    assert np.array_equal(first.sinr_broadbeam_db, second.sinr_broadbeam_db)
    assert np.array_equal(first.sinr_geometry_db, second.sinr_geometry_db)
    assert np.array_equal(first.sinr_broadbeam_db, third.sinr_broadbeam_db)
    assert np.array_equal(first.sinr_geometry_db, third.sinr_geometry_db)
    expected = cfg.drops * cfg.draws_per_drop * cfg.users_per_cell
    assert len(first.sinr_broadbeam_db) == expected


def test_single_cell_power_shift():
    # without interference, doubling the transmit power shifts every SINR
    # sample by exactly 10*log10(2) dB
    v = np.ones(4) / 2.0
    base = _small_config(cells=1, antennas=4, drops=1)
    boosted = _small_config(cells=1, antennas=4, drops=1, bs_power_dbm=base.bs_power_dbm + 3.0)
    low = simulate(base, v)
    high = simulate(boosted, v)
    shift = 3.0
    assert np.allclose(high.sinr_broadbeam_db - low.sinr_broadbeam_db, shift, atol=1e-9)
    assert np.allclose(high.sinr_geometry_db - low.sinr_geometry_db, shift, atol=1e-9)


def test_result_structure():
    rng = np.random.default_rng(5)
    cfg = _small_config()
    samples_bb = rng.normal(10.0, 5.0, size=4000)
    samples_geo = rng.normal(10.5, 5.0, size=4000)
    result = SimulationResult(cfg, samples_bb, samples_geo)
    assert len(result.bin_edges_db) == 321
    assert result.bin_edges_db[0] == -20.0
    assert result.bin_edges_db[-1] == 60.0
    for cdf in (result.cdf_broadbeam, result.cdf_geometry):
        assert np.all(np.diff(cdf) >= 0.0)
        assert 0.0 <= cdf[0] and cdf[-1] <= 1.0
    assert set(result.quantiles_broadbeam) == {5, 50, 95}
    assert set(result.quantiles_geometry) == {5, 50, 95}
    gap = abs(result.quantiles_broadbeam[50] - result.quantiles_geometry[50])
    assert result.median_gap_db == pytest.approx(gap, abs=1e-15)


def test_result_cdf_frozen():
    cfg = _small_config()
    samples = np.array([0.0, 10.0, 20.0, 30.0])
    result = SimulationResult(cfg, samples, samples)
    at_10 = np.searchsorted(result.bin_edges_db, 10.0)
    assert result.bin_edges_db[at_10] == 10.0
    assert result.cdf_broadbeam[at_10] == pytest.approx(0.5, abs=1e-15)
    at_0 = np.searchsorted(result.bin_edges_db, 0.0)
    assert result.cdf_broadbeam[at_0] == pytest.approx(0.25, abs=1e-15)
    assert result.cdf_broadbeam[0] == 0.0
    assert result.cdf_broadbeam[-1] == 1.0
