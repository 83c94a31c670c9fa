"""Constant-power broadbeam precoder design for large antenna arrays.

The package answers three questions about sectorwide beams: why a perfectly
flat radiated pattern cannot be produced by more than one active antenna,
how to synthesize precoders whose pattern stays inside a chosen ripple
corridor while minimizing peak-to-average power ratio or dynamic range, and
how much downlink SINR such beams deliver in a multi-cell network.
"""

from .array_model import (
    Direction,
    UlaGeometry,
    UraGeometry,
    beampattern,
    beampattern_grid,
    steering_vector_ula,
    steering_vector_ura,
)
from .beam_selector import (
    BeamDesign,
    DesignRequest,
    PeakConstrainedDesign,
    SweepRow,
    UraBeamDesign,
    design_broadbeam,
    design_broadbeam_ula,
    design_broadbeam_ura,
    dynamic_range,
    papr,
    peak_power_normalize,
    sweep_xi,
)
from .cell_simulator import NetworkConfig, SimulationResult, build_topology, simulate
from .errors import (
    BroadbeamError,
    DegenerateSystemError,
    FlatSpectrumError,
    NegativeSpectrumError,
    PairingError,
    RootFindingError,
)
from .sample_system import (
    FlatnessVerdict,
    RippleProfile,
    SampleSystem,
    build_sample_system,
    sample_sines,
    verify_impossibility,
)
from .spectral_factorization import (
    LaurentSpectrum,
    RootPair,
    RootPairing,
    RootSet,
    autocorrelation,
    expand_selection,
    find_roots,
    laurent_from_system,
    pair_roots,
    spectrum_matched_scale,
)

__version__ = "0.1.0"

__all__ = [
    "BeamDesign",
    "BroadbeamError",
    "DegenerateSystemError",
    "DesignRequest",
    "Direction",
    "FlatSpectrumError",
    "FlatnessVerdict",
    "LaurentSpectrum",
    "NegativeSpectrumError",
    "NetworkConfig",
    "PairingError",
    "PeakConstrainedDesign",
    "RippleProfile",
    "RootFindingError",
    "RootPair",
    "RootPairing",
    "RootSet",
    "SampleSystem",
    "SimulationResult",
    "SweepRow",
    "UlaGeometry",
    "UraBeamDesign",
    "UraGeometry",
    "autocorrelation",
    "beampattern",
    "beampattern_grid",
    "build_sample_system",
    "build_topology",
    "design_broadbeam",
    "design_broadbeam_ula",
    "design_broadbeam_ura",
    "dynamic_range",
    "expand_selection",
    "find_roots",
    "laurent_from_system",
    "pair_roots",
    "papr",
    "peak_power_normalize",
    "sample_sines",
    "simulate",
    "spectrum_matched_scale",
    "steering_vector_ula",
    "steering_vector_ura",
    "sweep_xi",
    "verify_impossibility",
    "__version__",
]
