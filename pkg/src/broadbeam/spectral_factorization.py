"""Spectral factorization of the sampled-pattern correlation spectrum.

The correlation sums r^T p_i are the nonpositive-lag coefficients of a
Laurent polynomial g(x) whose value on the unit circle is the beampattern.
Multiplying by x^(M-1) turns g into an ordinary degree-(2M-2) polynomial
whose roots come in conjugate-reciprocal pairs (x, 1/conj(x)).  Choosing
one root from each pair and expanding the monic product

    phi(x) = prod_m (x - alpha_m) = v_1 + v_2 x + ... + v_M x^(M-1)

yields a precoder whose pattern interpolates the target at every sample,
so the full solution set has at most 2^(M-1) members.

Roots are found with a simultaneous (Aberth-Ehrlich) iteration written
here rather than delegated to an eigensolver: the polynomials involved
are hermitian-palindromic with roots clustered near the unit circle, and
the iteration plus a Newton polish holds the planted-root recovery error
below 1e-7 through degree 30.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FlatSpectrumError, NegativeSpectrumError, PairingError, RootFindingError
from .sample_system import SampleSystem

LEADING_TOL = 1e-12
NEGATIVE_SPECTRUM_TOL = -1e-9
SPECTRUM_GRID_PER_ANTENNA = 64
ROOT_RESIDUAL_TOL = 1e-8
UNIT_CIRCLE_TOL = 1e-6
PAIRING_TOL = 1e-5
MAX_ITERATIONS = 200
STEP_TOL = 1e-13


@dataclass
class LaurentSpectrum:
    """Two-sided coefficient vector of g(x) = sum_k c_k x^k, k = -(M-1)..M-1.

    `coefficients[j]` holds c_(j - (M-1)); the same array read as ascending
    powers is the ordinary polynomial x^(M-1) * g(x).
    """

    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if len(self.coefficients) % 2 != 1:
            raise ValueError("a Laurent spectrum has an odd number of coefficients")

    @property
    def order(self) -> int:
        """Largest lag M-1."""
        return (len(self.coefficients) - 1) // 2

    def lag(self, k: int) -> complex:
        """Coefficient c_k for lag k in [-(M-1), M-1]."""
        return complex(self.coefficients[k + self.order])

    def to_polynomial(self) -> np.ndarray:
        """Ascending coefficients of x^(M-1) * g(x), degree 2M-2."""
        return self.coefficients.copy()

    def evaluate_on_circle(self, omegas) -> np.ndarray:
        """Real value of g at x = exp(j*omega) for an array of omegas."""
        lags = np.arange(-self.order, self.order + 1)
        carriers = np.exp(1j * np.multiply.outer(np.asarray(omegas, dtype=float), lags))
        return (carriers @ self.coefficients).real

    def check_nonnegative(self) -> float:
        """Reject spectra that dip below zero anywhere on the unit circle.

        Samples a dense omega grid (64 points per antenna); a minimum below
        -1e-9 means the ripple profile admits no factorization and raises
        NegativeSpectrumError.  Returns the grid minimum.
        """
        grid = SPECTRUM_GRID_PER_ANTENNA * (self.order + 1)
        omegas = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
        worst = float(self.evaluate_on_circle(omegas).min())
        if worst < NEGATIVE_SPECTRUM_TOL:
            raise NegativeSpectrumError(
                f"interpolated power spectrum reaches {worst} between samples; "
                "this ripple profile cannot be realized by any precoder"
            )
        return worst


def laurent_from_system(system: SampleSystem) -> LaurentSpectrum:
    """Build the Laurent spectrum from a sample system's correlation sums.

    The nonpositive lags are r^T p_i for i = 1..M and the positive lags
    follow by hermitian symmetry.  Negligible extreme lags are trimmed:
    some targets (a pure sinusoidal ripple of low harmonic, say) only
    excite a few lags, and the factor polynomial is genuinely shorter than
    the array.  When every lag but the zeroth is negligible the target is
    flat and no multi-antenna factorization exists.
    """
    sums = system.correlation_sums
    scale = np.abs(sums).max()
    active = np.flatnonzero(np.abs(sums) > LEADING_TOL * scale)
    order = len(sums) - 1 - active[0]
    if order == 0:
        raise FlatSpectrumError(
            "all correlation lags but the zeroth vanish: a flat target admits only "
            "single-active-antenna precoders and the spectrum has no roots; use xi > 0"
        )
    kept = sums[len(sums) - 1 - order :]
    coefficients = np.concatenate([kept, np.conj(kept[:-1])[::-1]])
    return LaurentSpectrum(coefficients)


def _two_sum(a, b):
    """Error-free split of a + b into (sum, round-off), componentwise complex."""
    s = a + b
    t = s - a
    e = (a - (s - t)) + (b - t)
    return s, e


def _horner(coefficients: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner evaluation with compensated summation of the additive errors."""
    acc = np.full_like(z, coefficients[-1], dtype=complex)
    err = np.zeros_like(z, dtype=complex)
    for a in coefficients[-2::-1]:
        prod = acc * z
        acc, e = _two_sum(prod, a)
        err = err * z + e
    return acc + err


def _derivative(coefficients: np.ndarray) -> np.ndarray:
    powers = np.arange(1, len(coefficients))
    return coefficients[1:] * powers


@dataclass
class RootSet:
    """Roots of one polynomial plus the monic coefficients they came from."""

    roots: np.ndarray
    monic: np.ndarray
    residual: float


def find_roots(coefficients) -> RootSet:
    """All complex roots of a polynomial given by ascending coefficients.

    Simultaneous Aberth-Ehrlich iteration: initial guesses sit on a
    perturbed circle at the Cauchy root bound, every root is refined
    against all others each pass (cap 200), convergence requires the
    largest step to drop below 1e-13*(1+|root|), and a single Newton
    polish pass runs afterwards.  Deterministic for a fixed input.

    Raises RootFindingError on non-convergence or when the scaled residual
    max |p(root)| / (max|c| * max(1,|root|)^degree) exceeds 1e-8.
    """
    coefficients = np.asarray(coefficients, dtype=complex)
    if len(coefficients) == 0 or coefficients[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    degree = len(coefficients) - 1
    monic = coefficients / coefficients[-1]
    if degree == 0:
        return RootSet(roots=np.zeros(0, dtype=complex), monic=monic, residual=0.0)

    # exact zero roots deflate immediately
    zero_roots = 0
    while monic[zero_roots] == 0:
        zero_roots += 1
    reduced = monic[zero_roots:]
    n = len(reduced) - 1

    if n == 0:
        roots = np.zeros(zero_roots, dtype=complex)
    else:
        if n == 1:
            live = np.array([-reduced[0]], dtype=complex)
        else:
            live = _aberth(reduced)
        live = _newton_polish(reduced, live)
        roots = np.concatenate([np.zeros(zero_roots, dtype=complex), live])

    scale = np.abs(coefficients).max()
    values = np.abs(_horner(coefficients, roots))
    bounds = scale * np.maximum(1.0, np.abs(roots)) ** degree
    residual = float((values / bounds).max()) if degree else 0.0
    if residual > ROOT_RESIDUAL_TOL:
        raise RootFindingError(
            f"scaled root residual {residual} exceeds {ROOT_RESIDUAL_TOL} at degree {degree}"
        )
    return RootSet(roots=roots, monic=monic, residual=residual)


def _initial_estimates(monic: np.ndarray) -> np.ndarray:
    """Starting points on circles sized by the coefficient magnitude hull.

    The upper convex hull of (k, log|c_k|) partitions the index range into
    segments whose slopes estimate the moduli of successive root clusters;
    each segment's share of starting points goes on a circle of that radius.
    A single circle at a global coefficient bound can sit orders of magnitude
    away from every root and exhaust the iteration budget closing in.
    """
    n = len(monic) - 1
    mags = np.abs(monic)
    ks = np.flatnonzero(mags > 0)
    logs = np.log(mags[ks])
    hull = []
    for i in range(len(ks)):
        while len(hull) >= 2:
            x1, y1 = ks[hull[-2]], logs[hull[-2]]
            x2, y2 = ks[hull[-1]], logs[hull[-1]]
            x3, y3 = ks[i], logs[i]
            if (x2 - x1) * (y3 - y1) >= (y2 - y1) * (x3 - x1):
                hull.pop()
            else:
                break
        hull.append(i)
    estimates = np.empty(n, dtype=complex)
    pos = 0
    for a, b in zip(hull, hull[1:]):
        segment = int(ks[b] - ks[a])
        radius = np.exp((logs[a] - logs[b]) / segment)
        # full-circle spread per segment, rotated per segment plus a fixed
        # offset so no starting layout is symmetric about a root constellation
        angles = (
            2.0 * np.pi * np.arange(segment) / segment
            + 2.0 * np.pi * pos / n
            + 0.4
            + 1.0 / (2.0 * n)
        )
        estimates[pos : pos + segment] = radius * np.exp(1j * angles)
        pos += segment
    return estimates


def _magnitude_bound(monic: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Sum_k |c_k| |z|^k, the scale against which |p(z)| can be trusted."""
    acc = np.zeros(z.shape)
    az = np.abs(z)
    for c in np.abs(monic)[::-1]:
        acc = acc * az + c
    return acc


def _aberth(monic: np.ndarray) -> np.ndarray:
    n = len(monic) - 1
    deriv = _derivative(monic)
    z = _initial_estimates(monic)
    settle = 8.0 * np.finfo(float).eps

    for _ in range(MAX_ITERATIONS):
        pv = _horner(monic, z)
        # an iterate whose value is below the evaluation noise floor cannot be
        # improved in this precision; freeze it and stop once all are frozen
        at_floor = np.abs(pv) <= settle * _magnitude_bound(monic, z)
        if np.all(at_floor):
            return z
        dv = _horner(deriv, z)
        stalled = (dv == 0) & ~at_floor
        dv = np.where(dv == 0, 1.0, dv)
        newton = pv / dv
        newton = np.where(stalled, 0.1 * (1.0 + np.abs(z)), newton)

        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = (1.0 / diff).sum(axis=1)

        denom = 1.0 - newton * repulsion
        denom = np.where(denom == 0, 1.0, denom)
        step = np.where(at_floor, 0.0, newton / denom)
        z = z - step
        if not np.all(np.isfinite(z)):
            raise RootFindingError("root iteration diverged to non-finite values")
        if np.max(np.abs(step) / (1.0 + np.abs(z))) < STEP_TOL:
            return z
    raise RootFindingError(f"root iteration did not converge within {MAX_ITERATIONS} passes")


def _newton_polish(monic: np.ndarray, roots: np.ndarray) -> np.ndarray:
    deriv = _derivative(monic)
    pv = _horner(monic, roots)
    dv = _horner(deriv, roots)
    safe = dv != 0
    step = np.where(safe, pv / np.where(safe, dv, 1.0), 0.0)
    polished = roots - step
    # a polish step should be a small correction; anything large means the
    # derivative is untrustworthy there (multiple root), keep the original
    keep = np.abs(step) > 1e-3 * (1.0 + np.abs(roots))
    return np.where(keep, roots, polished)


@dataclass(frozen=True)
class RootPair:
    """One conjugate-reciprocal pair; primary is the member with |x| <= 1."""

    primary: complex
    partner: complex
    on_unit_circle: bool


@dataclass
class RootPairing:
    """Roots grouped into (x, 1/conj(x)) pairs, plus the residual diagnostic."""

    pairs: list
    residual: float

    @property
    def mask_bits(self) -> int:
        return len(self.pairs)


def pair_roots(rootset: RootSet) -> RootPairing:
    """Group roots into conjugate-reciprocal pairs.

    Greedy matching: repeatedly take the unmatched root farthest from the
    unit circle (largest |log|x||) and pair it with the unmatched root
    closest to its reciprocal conjugate.  A pair is flagged on_unit_circle
    when both members sit within 1e-6 of the circle; for such collapsed
    pairs the two selections coincide.  A best match farther than
    1e-5*(1+|1/conj(x)|) from the reciprocal raises PairingError.

    Pairs are sorted by primary root (real, then imaginary part) so mask
    semantics do not depend on the root finder's output order.
    """
    roots = np.asarray(rootset.roots, dtype=complex)
    if len(roots) % 2 != 0:
        raise PairingError(f"odd root count {len(roots)} cannot form pairs")
    magnitudes = np.abs(roots)
    if np.any(magnitudes == 0):
        raise PairingError("zero root has no finite reciprocal conjugate")

    order = np.argsort(-np.abs(np.log(magnitudes)), kind="stable")
    taken = np.zeros(len(roots), dtype=bool)
    pairs = []
    for idx in order:
        if taken[idx]:
            continue
        taken[idx] = True
        root = roots[idx]
        mirror = 1.0 / np.conj(root)
        distances = np.where(taken, np.inf, np.abs(roots - mirror))
        j = int(np.argmin(distances))
        if distances[j] > PAIRING_TOL * (1.0 + abs(mirror)):
            raise PairingError(
                f"no reciprocal partner for root {root}: best distance {distances[j]}"
            )
        taken[j] = True
        partner = roots[j]
        on_circle = (
            abs(abs(root) - 1.0) <= UNIT_CIRCLE_TOL
            and abs(abs(partner) - 1.0) <= UNIT_CIRCLE_TOL
        )
        if abs(partner) < abs(root):
            root, partner = partner, root
        pairs.append(RootPair(primary=complex(root), partner=complex(partner), on_unit_circle=on_circle))

    pairs.sort(key=lambda pair: (pair.primary.real, pair.primary.imag))
    residual = float(np.abs(_horner(rootset.monic, roots)).max())
    return RootPairing(pairs=pairs, residual=residual)


def expand_selection(pairing: RootPairing, mask, scale: complex = 1.0) -> np.ndarray:
    """Expand one root selection into precoder coefficients.

    `mask` holds one boolean per pair: False picks the primary root, True
    its partner.  The monic product over the selected roots is expanded to
    ascending coefficients [v_1 ... v_M] (v_M = 1) and multiplied by
    `scale`.  Pass the result of `spectrum_matched_scale` to reproduce the
    target spectrum, or scale = 1 for the raw monic coefficients.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (len(pairing.pairs),):
        raise ValueError(f"mask length {mask.shape} does not match pair count {len(pairing.pairs)}")
    coeffs = np.ones(1, dtype=complex)
    for bit, pair in zip(mask, pairing.pairs):
        root = pair.partner if bit else pair.primary
        grown = np.zeros(len(coeffs) + 1, dtype=complex)
        grown[1:] = coeffs
        grown[:-1] -= root * coeffs
        coeffs = grown
    return scale * coeffs


def autocorrelation(v: np.ndarray) -> np.ndarray:
    """Nonnegative-lag autocorrelation sums sum_n v[n+d] * conj(v[n])."""
    v = np.asarray(v, dtype=complex)
    n = len(v)
    return np.array([np.sum(v[d:] * np.conj(v[: n - d])) for d in range(n)])


def spectrum_matched_scale(spectrum: LaurentSpectrum, monic: np.ndarray) -> complex:
    """Scale making a monic expansion reproduce the spectrum.

    Magnitude sqrt(c_0 / autocorr_0(monic)); phase chosen so the first
    coefficient of the scaled vector is real and nonnegative.
    """
    lag0 = spectrum.lag(0).real
    energy = float(np.sum(np.abs(monic) ** 2))
    magnitude = np.sqrt(lag0 / energy)
    first = monic[0]
    phase = np.conj(first) / abs(first) if abs(first) > 0 else 1.0
    return complex(magnitude * phase)
