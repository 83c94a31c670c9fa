"""Precoder selection: metrics, mask enumeration, and the design entry points.

Every choice of one root per conjugate-reciprocal pair reproduces the
target pattern exactly, so the selector's only job is to pick the mask
minimizing peak-to-average power ratio or dynamic range.  Masks are
visited in Gray-code order so consecutive candidates differ by a single
root swap (one synthetic division plus one multiplication, O(M) work).
Every 64th candidate is re-expanded from scratch at a fixed absolute
position in the sequence, which bounds round-off drift and makes each
candidate's arithmetic independent of how the sequence is partitioned
across workers; results are therefore identical for any thread count.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .array_model import UlaGeometry, UraGeometry, steering_from_sines
from .errors import BroadbeamError
from .sample_system import RippleProfile, build_sample_system
from .spectral_factorization import (
    LaurentSpectrum,
    RootPairing,
    expand_selection,
    find_roots,
    laurent_from_system,
    pair_roots,
    spectrum_matched_scale,
)

METRICS = ("papr", "dynamic_range")
EXHAUSTIVE_LIMIT = 2 ** 24
REFRESH_BLOCK = 64
HEURISTIC_RESTARTS = 64
HEURISTIC_SEED = 817460531


def papr(v) -> float:
    """Peak-to-average power ratio M * max|v_m|^2 / sum|v_m|^2, in [1, M]."""
    powers = np.abs(np.asarray(v)) ** 2
    total = powers.sum()
    if total == 0:
        raise ValueError("papr is undefined for the zero vector")
    return float(len(powers) * powers.max() / total)


def dynamic_range(v) -> float:
    """Power dynamic range max|v_m|^2 / min|v_m|^2; inf when an entry is 0."""
    powers = np.abs(np.asarray(v)) ** 2
    if powers.sum() == 0:
        raise ValueError("dynamic range is undefined for the zero vector")
    low = powers.min()
    return float("inf") if low == 0 else float(powers.max() / low)


def to_db(value: float) -> float:
    """Power ratio in decibels, 10*log10."""
    return float(10.0 * np.log10(value))


@dataclass(frozen=True)
class PeakConstrainedDesign:
    """A precoder rescaled to per-antenna peak power v_max."""

    v: np.ndarray
    v_max: float
    radiated_power: float
    radiated_fraction: float


def peak_power_normalize(v, v_max: float) -> PeakConstrainedDesign:
    """Scale v so its largest per-antenna power equals v_max exactly.

    The radiated fraction (radiated power over the all-antennas-at-peak
    budget M*v_max) equals 1/papr(v) identically, so maximizing radiated
    power under a peak constraint is the same problem as minimizing PAPR.
    """
    if v_max <= 0:
        raise ValueError(f"v_max must be > 0, got {v_max}")
    v = np.asarray(v, dtype=complex)
    peak = np.abs(v).max()
    if peak == 0:
        raise ValueError("cannot peak-normalize the zero vector")
    scaled = v / peak * np.sqrt(v_max)
    radiated = float(np.sum(np.abs(scaled) ** 2))
    return PeakConstrainedDesign(
        v=scaled,
        v_max=float(v_max),
        radiated_power=radiated,
        radiated_fraction=radiated / (len(v) * v_max),
    )


@dataclass(frozen=True)
class DesignRequest:
    """What to design: geometry, ripple profile, objective, optional peak budget."""

    geometry: object
    profile: RippleProfile
    metric: str = "papr"
    v_max: float | None = None

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.v_max is not None and self.v_max <= 0:
            raise ValueError(f"v_max must be > 0, got {self.v_max}")


@dataclass
class BeamDesign:
    """A designed ULA precoder with its metrics and sample-level evidence.

    `v` is unit-norm.  `sample_pattern` is the beampattern of the
    spectrum-matched scaling sqrt(lag-0 correlation) * v, which is the
    scaling that interpolates the target exactly; the unit-norm vector's
    pattern is the same shape divided by that lag-0 value.
    """

    v: np.ndarray
    mask: np.ndarray
    metric: str
    papr: float
    papr_db: float
    dynamic_range: float
    dynamic_range_db: float
    radiated_fraction: float
    sample_sines: np.ndarray
    sample_target: np.ndarray
    sample_pattern: np.ndarray
    max_sample_error: float
    exhaustive: bool
    geometry: UlaGeometry = None
    profile: RippleProfile = None
    peak: PeakConstrainedDesign | None = None


@dataclass
class UraBeamDesign:
    """A URA precoder composed from per-axis designs, v = v_az kron v_el."""

    v: np.ndarray
    azimuth: BeamDesign
    elevation: BeamDesign
    metric: str
    papr: float
    papr_db: float
    dynamic_range: float
    dynamic_range_db: float
    radiated_fraction: float
    exhaustive: bool
    geometry: UraGeometry = None
    profile: RippleProfile = None
    peak: PeakConstrainedDesign | None = None


def _metric_value(coeffs: np.ndarray, metric: str) -> float:
    powers = np.abs(coeffs) ** 2
    if metric == "papr":
        return len(powers) * powers.max() / powers.sum()
    low = powers.min()
    return float("inf") if low == 0 else powers.max() / low


def _selected_roots(pairing: RootPairing, effective, mask_int: int) -> np.ndarray:
    roots = [pair.primary for pair in pairing.pairs]
    for bit, pair_index in enumerate(effective):
        if (mask_int >> bit) & 1:
            roots[pair_index] = pairing.pairs[pair_index].partner
    return np.array(roots, dtype=complex)


def _expand_roots(roots: np.ndarray) -> np.ndarray:
    coeffs = np.ones(1, dtype=complex)
    for root in roots:
        grown = np.zeros(len(coeffs) + 1, dtype=complex)
        grown[1:] = coeffs
        grown[:-1] -= root * coeffs
        coeffs = grown
    return coeffs


def _deflate(coeffs: np.ndarray, root: complex) -> np.ndarray:
    degree = len(coeffs) - 1
    out = np.empty(degree, dtype=complex)
    acc = coeffs[degree]
    out[degree - 1] = acc
    for k in range(degree - 1, 0, -1):
        acc = coeffs[k] + root * acc
        out[k - 1] = acc
    return out


def _grow(coeffs: np.ndarray, root: complex) -> np.ndarray:
    grown = np.zeros(len(coeffs) + 1, dtype=complex)
    grown[1:] = coeffs
    grown[:-1] -= root * coeffs
    return grown


def iter_gray_candidates(pairing: RootPairing, start: int = 0, stop: int | None = None):
    """Yield (mask_int, monic coefficients) along the Gray-code sequence.

    Sequence position t maps to mask t ^ (t >> 1) over the effective
    (non-collapsed) pairs.  Candidates at positions that are multiples of
    64 are fully re-expanded; the rest are produced by one root swap from
    their predecessor.
    """
    effective = [i for i, pair in enumerate(pairing.pairs) if not pair.on_unit_circle]
    total = 1 << len(effective)
    if stop is None:
        stop = total
    coeffs = None
    for t in range(start, stop):
        gray = t ^ (t >> 1)
        if coeffs is None or t % REFRESH_BLOCK == 0:
            coeffs = _expand_roots(_selected_roots(pairing, effective, gray))
        else:
            flipped = (t & -t).bit_length() - 1
            pair = pairing.pairs[effective[flipped]]
            now_partner = (gray >> flipped) & 1
            old = pair.primary if now_partner else pair.partner
            new = pair.partner if now_partner else pair.primary
            coeffs = _grow(_deflate(coeffs, old), new)
        yield gray, coeffs


def _scan_range(pairing: RootPairing, metric: str, start: int, stop: int):
    best_value = float("inf")
    best_mask = -1
    for gray, coeffs in iter_gray_candidates(pairing, start, stop):
        value = _metric_value(coeffs, metric)
        if value < best_value or (value == best_value and gray < best_mask):
            best_value = value
            best_mask = gray
    return best_value, best_mask


def _search_exhaustive(pairing: RootPairing, metric: str, threads: int):
    effective = [i for i, pair in enumerate(pairing.pairs) if not pair.on_unit_circle]
    total = 1 << len(effective)
    if threads <= 1 or total <= REFRESH_BLOCK:
        best_value, best_mask = _scan_range(pairing, metric, 0, total)
    else:
        blocks = (total + REFRESH_BLOCK - 1) // REFRESH_BLOCK
        workers = min(threads, blocks)
        per_worker = (blocks + workers - 1) // workers
        ranges = []
        for w in range(workers):
            start = w * per_worker * REFRESH_BLOCK
            stop = min(total, (w + 1) * per_worker * REFRESH_BLOCK)
            if start < stop:
                ranges.append((start, stop))
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            results = list(pool.map(lambda r: _scan_range(pairing, metric, *r), ranges))
        best_value, best_mask = min(results, key=lambda item: (item[0], item[1]))
    return best_value, best_mask, effective


def _search_heuristic(pairing: RootPairing, metric: str):
    effective = [i for i, pair in enumerate(pairing.pairs) if not pair.on_unit_circle]
    bits = len(effective)
    best_value = float("inf")
    best_mask = -1
    for restart in range(HEURISTIC_RESTARTS):
        rng = np.random.default_rng([HEURISTIC_SEED, restart])
        mask = 0
        for bit in rng.integers(0, 2, bits).nonzero()[0]:
            mask |= 1 << int(bit)
        value = _metric_value(_expand_roots(_selected_roots(pairing, effective, mask)), metric)
        improved = True
        while improved:
            improved = False
            for bit in range(bits):
                candidate = mask ^ (1 << bit)
                cand_value = _metric_value(
                    _expand_roots(_selected_roots(pairing, effective, candidate)), metric
                )
                if cand_value < value:
                    value, mask = cand_value, candidate
                    improved = True
        if value < best_value or (value == best_value and mask < best_mask):
            best_value = value
            best_mask = mask
    return best_value, best_mask, effective


def _full_mask(pairing: RootPairing, effective, mask_int: int) -> np.ndarray:
    mask = np.zeros(len(pairing.pairs), dtype=bool)
    for bit, pair_index in enumerate(effective):
        mask[pair_index] = bool((mask_int >> bit) & 1)
    return mask


def select_mask(pairing: RootPairing, metric: str, threads: int = 1):
    """Best selection mask for a metric.

    Exhaustive Gray-code enumeration up to 2^24 candidates, with exact
    ties broken toward the lowest mask integer; beyond that a greedy
    bit-flip descent from 64 seeded restarts takes over and the result is
    flagged non-exhaustive.  Returns (mask bool array, exhaustive flag).
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    effective = [i for i, pair in enumerate(pairing.pairs) if not pair.on_unit_circle]
    exhaustive = (1 << len(effective)) <= EXHAUSTIVE_LIMIT
    if exhaustive:
        _, best_mask, effective = _search_exhaustive(pairing, metric, threads)
    else:
        _, best_mask, effective = _search_heuristic(pairing, metric)
    return _full_mask(pairing, effective, best_mask), exhaustive


def _factorize(system):
    spectrum = laurent_from_system(system)
    spectrum.check_nonnegative()
    rootset = find_roots(spectrum.to_polynomial())
    pairing = pair_roots(rootset)
    return spectrum, pairing


def design_broadbeam_ula(request: DesignRequest, threads: int = 1) -> BeamDesign:
    """Design a ULA broadbeam precoder minimizing the requested metric.

    Builds the sample system, factorizes the interpolated spectrum,
    searches the selection masks, and returns the unit-norm winner with
    sample-level evidence attached.
    """
    geom = request.geometry
    if not isinstance(geom, UlaGeometry):
        raise ValueError("design_broadbeam_ula requires a UlaGeometry")
    if geom.antennas < 2:
        raise ValueError(f"broadbeam design needs at least 2 antennas, got {geom.antennas}")
    system = build_sample_system(geom, request.profile)
    spectrum, pairing = _factorize(system)
    mask, exhaustive = select_mask(pairing, request.metric, threads)
    monic = expand_selection(pairing, mask)
    # the factor's autocorrelation equals the spectrum lags c_d, while the
    # beampattern exposes the conjugate autocorrelation of the precoder, so
    # the physical vector is the conjugate of the spectral factor (visible
    # only for targets without left-right symmetry, where c_d is complex)
    matched = np.conj(expand_selection(pairing, mask, spectrum_matched_scale(spectrum, monic)))
    if len(matched) < geom.antennas:
        # degree-deficient spectrum: the remaining antennas stay dark
        matched = np.concatenate([matched, np.zeros(geom.antennas - len(matched), dtype=complex)])

    carriers = steering_from_sines(geom.antennas, geom.spacing_ratio, system.sines)
    pattern = np.abs(carriers @ np.conj(matched)) ** 2
    max_error = float(np.abs(pattern - system.target).max())

    v = matched / np.linalg.norm(matched)
    delta = papr(v)
    spread = dynamic_range(v)
    design = BeamDesign(
        v=v,
        mask=mask,
        metric=request.metric,
        papr=delta,
        papr_db=to_db(delta),
        dynamic_range=spread,
        dynamic_range_db=to_db(spread),
        radiated_fraction=1.0 / delta,
        sample_sines=system.sines,
        sample_target=system.target,
        sample_pattern=pattern,
        max_sample_error=max_error,
        exhaustive=exhaustive,
        geometry=geom,
        profile=request.profile,
    )
    if request.v_max is not None:
        design.peak = peak_power_normalize(v, request.v_max)
    return design


def split_ripple(xi: float) -> float:
    """Per-axis ripple budget: (1 + xi_axis)^2 = 1 + xi."""
    return float(np.sqrt(1.0 + xi) - 1.0)


def _trivial_axis_design(geom: UlaGeometry, profile: RippleProfile, metric: str) -> BeamDesign:
    v = np.ones(1, dtype=complex)
    return BeamDesign(
        v=v,
        mask=np.zeros(0, dtype=bool),
        metric=metric,
        papr=1.0,
        papr_db=0.0,
        dynamic_range=1.0,
        dynamic_range_db=0.0,
        radiated_fraction=1.0,
        sample_sines=np.zeros(1),
        sample_target=np.ones(1),
        sample_pattern=np.ones(1),
        max_sample_error=0.0,
        exhaustive=True,
        geometry=geom,
        profile=profile,
    )


def design_broadbeam_ura(request: DesignRequest, threads: int = 1) -> UraBeamDesign:
    """Design a URA precoder as the Kronecker product of two axis designs.

    The ripple budget splits multiplicatively: each axis is designed at
    xi_axis = sqrt(1 + xi) - 1 so the product pattern stays within the
    requested ripple.  A length-1 axis contributes the scalar 1 and the
    design reduces exactly to the other axis's ULA design.
    """
    geom = request.geometry
    if not isinstance(geom, UraGeometry):
        raise ValueError("design_broadbeam_ura requires a UraGeometry")
    xi_axis = split_ripple(request.profile.xi)
    axis_profile = dataclasses.replace(request.profile, xi=xi_axis)

    designs = []
    for axis_geom in (geom.azimuth, geom.elevation):
        if axis_geom.antennas == 1:
            designs.append(_trivial_axis_design(axis_geom, axis_profile, request.metric))
        else:
            axis_request = DesignRequest(
                geometry=axis_geom, profile=axis_profile, metric=request.metric
            )
            designs.append(design_broadbeam_ula(axis_request, threads=threads))
    azimuth, elevation = designs

    v = np.kron(azimuth.v, elevation.v)
    delta = papr(v)
    spread = dynamic_range(v)
    design = UraBeamDesign(
        v=v,
        azimuth=azimuth,
        elevation=elevation,
        metric=request.metric,
        papr=delta,
        papr_db=to_db(delta),
        dynamic_range=spread,
        dynamic_range_db=to_db(spread),
        radiated_fraction=1.0 / delta,
        exhaustive=azimuth.exhaustive and elevation.exhaustive,
        geometry=geom,
        profile=request.profile,
    )
    if request.v_max is not None:
        design.peak = peak_power_normalize(v, request.v_max)
    return design


def design_broadbeam(request: DesignRequest, threads: int = 1):
    """Dispatch to the ULA or URA design path based on the geometry."""
    if isinstance(request.geometry, UraGeometry):
        return design_broadbeam_ura(request, threads=threads)
    return design_broadbeam_ula(request, threads=threads)


@dataclass
class SweepRow:
    """One ripple level of a sweep: metrics of the design at that xi."""

    xi: float
    papr_db: float | None = None
    dr_db: float | None = None
    radiated_fraction: float | None = None
    error: str | None = None


def sweep_xi(
    geom,
    kind: str,
    xi_values,
    metric: str = "papr",
    seed: int = 0,
    harmonic: int = 1,
    threads: int = 1,
) -> list:
    """Design once per ripple level and tabulate the metrics.

    The profile shape is held fixed (same kind, seed and harmonic) and only
    rescaled through xi, so rows are comparable.  A level that fails to
    design (xi = 0, negative spectrum, ...) produces a row carrying the
    error message instead of metrics.
    """
    rows = []
    for xi in xi_values:
        try:
            profile = RippleProfile(kind=kind, xi=float(xi), seed=seed, harmonic=harmonic)
            request = DesignRequest(geometry=geom, profile=profile, metric=metric)
            design = design_broadbeam(request, threads=threads)
        except (BroadbeamError, ValueError) as exc:
            rows.append(SweepRow(xi=float(xi), error=str(exc)))
            continue
        rows.append(
            SweepRow(
                xi=float(xi),
                papr_db=design.papr_db,
                dr_db=design.dynamic_range_db,
                radiated_fraction=design.radiated_fraction,
            )
        )
    return rows
