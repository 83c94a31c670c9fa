"""Figure rendering for the command-line report path.

Each report command writes its figures next to the delimited output.  The
CSV/JSON files remain the machine-readable contract; these figures are the
human-readable rendering of the same data.  All rendering uses the Agg
backend and produces byte-deterministic PNG files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 120


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_pattern_figure(path, theta_deg, power, ripple_band=None):
    """Beampattern over angle, with the ripple band overlaid when given."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(theta_deg, power, lw=1.2, color="tab:blue")
    if ripple_band is not None:
        low, high = ripple_band
        ax.axhspan(low, high, color="tab:orange", alpha=0.2, label="ripple band")
        ax.legend(loc="lower center")
    ax.set_xlabel("theta (deg)")
    ax.set_ylabel("radiated power")
    ax.set_xlim(theta_deg[0], theta_deg[-1])
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def save_pattern2d_figure(path, psi_deg, theta_deg, power_grid):
    """2-D URA pattern as a pseudocolor map (psi vertical, theta horizontal)."""
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    mesh = ax.pcolormesh(theta_deg, psi_deg, power_grid, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="radiated power")
    ax.set_xlabel("theta (deg)")
    ax.set_ylabel("psi (deg)")
    _finish(fig, path)


def save_antenna_power_figure(path, v):
    """Per-antenna power of a precoder with the uniform level for reference."""
    powers = np.abs(np.asarray(v)) ** 2
    count = len(powers)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.bar(np.arange(1, count + 1), powers, color="tab:blue", width=0.8)
    ax.axhline(powers.sum() / count, color="tab:red", ls="--", lw=1.0, label="uniform level")
    ax.set_xlabel("antenna")
    ax.set_ylabel("power")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    _finish(fig, path)


def save_sweep_figure(path, rows):
    """Sweep metrics against ripple: radiated fraction and dynamic range."""
    good = [row for row in rows if row.error is None]
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.0))
    if good:
        xi = [row.xi for row in good]
        axes[0].plot(xi, [100.0 * row.radiated_fraction for row in good], "o-", color="tab:blue")
        axes[1].plot(xi, [row.dr_db for row in good], "s-", color="tab:red")
    for ax in axes:
        ax.set_xscale("log")
        ax.set_xlabel("ripple xi")
        ax.grid(True, which="both", alpha=0.3)
    axes[0].set_ylabel("radiated power (% of peak budget)")
    axes[1].set_ylabel("dynamic range (dB)")
    _finish(fig, path)


def save_cdf_figure(path, edges_db, cdf_broadbeam, cdf_geometry):
    """Empirical SINR CDFs of the broadbeam and geometry-only variants."""
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    ax.plot(edges_db, cdf_broadbeam, lw=1.4, color="tab:blue", label="broadbeam")
    ax.plot(edges_db, cdf_geometry, lw=1.4, ls="--", color="tab:red", label="geometry baseline")
    ax.set_xlabel("SINR (dB)")
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.0)
    ax.legend(loc="lower right")
    ax.grid(True, alpha=0.3)
    _finish(fig, path)
