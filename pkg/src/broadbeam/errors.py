"""Exception types raised by the broadbeam design and simulation pipeline."""


class BroadbeamError(Exception):
    """Base class for domain errors (as opposed to caller mistakes)."""


class DegenerateSystemError(BroadbeamError):
    """Sample nodes coincide or the node matrix is too ill-conditioned to invert."""


class FlatSpectrumError(BroadbeamError):
    """The target pattern is perfectly flat, so the correlation spectrum has no
    roots and only single-active-antenna precoders exist."""


class NegativeSpectrumError(BroadbeamError):
    """The interpolated power spectrum dips below zero between samples, so no
    precoding vector can reproduce it."""


class RootFindingError(BroadbeamError):
    """The simultaneous root iteration failed to converge."""


class PairingError(BroadbeamError):
    """Roots could not be grouped into conjugate-reciprocal pairs."""
