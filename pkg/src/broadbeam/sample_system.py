"""Sample directions, the node matrix W, its inverse P, and ripple targets.

For an M-element ULA the beampattern is a trigonometric polynomial with
2M-1 lag coefficients, so it is pinned down by its values at 2M-1
directions.  The canonical samples are

    sin(theta_k) = 2*(k - M) / (2M - 1),   k = 1..2M-1,

which puts broadside (theta = 0) at k = M.  Column k of W is the lag
carrier at node z_k = exp(j*2*pi*spacing_ratio*sin(theta_k)):

    W[m, k] = z_k^(m - M),   m = 1..2M-1,

and P = W^-1.  Writing r for the sampled pattern targets, the inner
products r^T p_i recover the precoder correlation sums lag by lag; with
r identically 1 those sums collapse to the M-th unit vector, which is the
numerical certificate that perfectly flat patterns admit only
single-active-antenna precoders.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_model import UlaGeometry
from .errors import BroadbeamError, DegenerateSystemError

RESIDUAL_TOL = 1e-9
NODE_TOL = 1e-10
IMAG_TOL = 1e-10

PROFILE_KINDS = ("zero", "alternating", "sinusoidal", "seeded-random")


@dataclass(frozen=True)
class RippleProfile:
    """Ripple specification epsilon(theta_k) on the sample grid.

    kind:
      zero          epsilon = 0 everywhere (useful only for the flatness check)
      alternating   epsilon_k = xi * (-1)^k, k = 1..2M-1
      sinusoidal    epsilon_k = xi * cos(pi * harmonic * sin(theta_k))
      seeded-random epsilon_k iid uniform on [-xi, xi] from `seed`
    """

    kind: str
    xi: float = 0.0
    seed: int = 0
    harmonic: int = 1

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown ripple kind {self.kind!r}, expected one of {PROFILE_KINDS}")
        if not 0.0 <= self.xi < 1.0:
            raise ValueError(f"xi must satisfy 0 <= xi < 1, got {self.xi}")
        if self.harmonic < 1:
            raise ValueError(f"harmonic must be >= 1, got {self.harmonic}")


def sample_sines(antennas: int) -> np.ndarray:
    """The 2M-1 canonical sample sines 2*(k-M)/(2M-1), k = 1..2M-1."""
    if antennas < 2:
        raise ValueError(f"antennas must be >= 2, got {antennas}")
    count = 2 * antennas - 1
    k = np.arange(1, count + 1)
    return 2.0 * (k - antennas) / count


def ripple_samples(profile: RippleProfile, sines: np.ndarray) -> np.ndarray:
    """Evaluate a ripple profile on the sample sines."""
    count = len(sines)
    if profile.kind == "zero":
        return np.zeros(count)
    if profile.kind == "alternating":
        k = np.arange(1, count + 1)
        return profile.xi * (-1.0) ** k
    if profile.kind == "sinusoidal":
        return profile.xi * np.cos(np.pi * profile.harmonic * np.asarray(sines))
    rng = np.random.default_rng(profile.seed)
    return rng.uniform(-profile.xi, profile.xi, count)


@dataclass
class SampleSystem:
    """Node matrix, inverse, ripple targets and correlation sums for one design."""

    geometry: UlaGeometry
    profile: RippleProfile
    sines: np.ndarray
    w_matrix: np.ndarray
    p_matrix: np.ndarray
    ripple: np.ndarray
    target: np.ndarray
    correlation_sums: np.ndarray = field(init=False)

    def __post_init__(self):
        m = self.geometry.antennas
        sums = self.target @ self.p_matrix[:, :m]
        center = sums[m - 1]
        if abs(center.imag) > IMAG_TOL:
            raise BroadbeamError(
                f"lag-0 correlation sum has imaginary residue {center.imag}, expected real"
            )
        self.correlation_sums = sums


def _node_matrix(antennas: int, spacing_ratio: float):
    sines = sample_sines(antennas)
    count = 2 * antennas - 1
    nodes = np.exp(2j * np.pi * spacing_ratio * sines)
    offsets = np.arange(count) - (antennas - 1)
    w = nodes[None, :] ** offsets[:, None]
    return sines, nodes, w


def _invert_node_matrix(w: np.ndarray, nodes: np.ndarray, spacing_ratio: float) -> np.ndarray:
    count = len(nodes)
    if spacing_ratio == 0.5:
        # nodes are the (2M-1)-th roots of unity, so W is a scaled DFT
        p = w.conj().T / count
    else:
        if spacing_ratio > 0.5:
            diff = np.abs(nodes[:, None] - nodes[None, :])
            np.fill_diagonal(diff, np.inf)
            if diff.min() < NODE_TOL:
                raise DegenerateSystemError(
                    f"sample nodes coincide within {NODE_TOL} at spacing_ratio {spacing_ratio}"
                )
        p = np.linalg.solve(w, np.eye(count, dtype=complex))
    residual = np.abs(w @ p - np.eye(count)).max()
    if residual > RESIDUAL_TOL:
        raise DegenerateSystemError(
            f"node matrix inversion residual {residual} exceeds {RESIDUAL_TOL}"
        )
    return p


def build_sample_system(geom: UlaGeometry, profile: RippleProfile) -> SampleSystem:
    """Assemble the sample system for a geometry and ripple profile.

    Raises DegenerateSystemError when nodes coincide or the inversion
    residual exceeds tolerance.
    """
    sines, nodes, w = _node_matrix(geom.antennas, geom.spacing_ratio)
    p = _invert_node_matrix(w, nodes, geom.spacing_ratio)
    ripple = ripple_samples(profile, sines)
    target = 1.0 + ripple
    return SampleSystem(
        geometry=geom,
        profile=profile,
        sines=sines,
        w_matrix=w,
        p_matrix=p,
        ripple=ripple,
        target=target,
    )


@dataclass(frozen=True)
class FlatnessVerdict:
    """Column sums of P together with the flatness-impossibility verdict.

    A perfectly flat target (r = 1) forces the correlation sums to equal
    the column sums of P.  The verdict is True when those sums match the
    M-th unit vector to within tolerance, i.e. when the only precoders
    with a perfectly flat pattern put all power on a single antenna.
    """

    column_sums: np.ndarray
    max_off_target: float
    target_error: float
    verdict: bool


def verify_impossibility(geom: UlaGeometry, tol: float = 1e-9) -> FlatnessVerdict:
    """Check numerically that the column sums of P form the M-th unit vector."""
    sines, nodes, w = _node_matrix(geom.antennas, geom.spacing_ratio)
    p = _invert_node_matrix(w, nodes, geom.spacing_ratio)
    sums = p.sum(axis=0)
    m = geom.antennas
    off = np.abs(np.delete(sums, m - 1))
    max_off = float(off.max())
    target_err = float(abs(sums[m - 1] - 1.0))
    return FlatnessVerdict(
        column_sums=sums,
        max_off_target=max_off,
        target_error=target_err,
        verdict=bool(max_off <= tol and target_err <= tol),
    )
