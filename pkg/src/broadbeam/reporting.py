"""File formats: design JSON, delimited tables, and the run-config schema.

CSV cells carry 9 significant digits; JSON keeps full precision (Python's
round-trip float repr).  All writers are deterministic: identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .array_model import UlaGeometry, UraGeometry
from .beam_selector import BeamDesign, PeakConstrainedDesign, UraBeamDesign
from .cell_simulator import NetworkConfig, SimulationResult
from .errors import BroadbeamError
from .sample_system import RippleProfile

SCHEMA_VERSION = 1


def _g9(value) -> str:
    return format(float(value), ".9g")


def _complex_pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def _pairs_to_complex(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def geometry_to_dict(geom) -> dict:
    if isinstance(geom, UraGeometry):
        return {
            "kind": "ura",
            "azimuth": {"antennas": geom.azimuth.antennas, "spacing_ratio": geom.azimuth.spacing_ratio},
            "elevation": {
                "antennas": geom.elevation.antennas,
                "spacing_ratio": geom.elevation.spacing_ratio,
            },
        }
    return {"kind": "ula", "antennas": geom.antennas, "spacing_ratio": geom.spacing_ratio}


def _check_keys(mapping: dict, allowed, context: str):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise BroadbeamError(f"unknown {context} keys: {sorted(unknown)}")


def geometry_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "ula":
        _check_keys(doc, {"kind", "antennas", "spacing_ratio"}, "geometry")
        return UlaGeometry(antennas=int(doc["antennas"]), spacing_ratio=float(doc.get("spacing_ratio", 0.5)))
    if kind == "ura":
        _check_keys(doc, {"kind", "azimuth", "elevation"}, "geometry")
        axes = []
        for axis in ("azimuth", "elevation"):
            sub = doc[axis]
            _check_keys(sub, {"antennas", "spacing_ratio"}, f"geometry.{axis}")
            axes.append(UlaGeometry(antennas=int(sub["antennas"]), spacing_ratio=float(sub.get("spacing_ratio", 0.5))))
        return UraGeometry(azimuth=axes[0], elevation=axes[1])
    raise BroadbeamError(f"geometry kind must be 'ula' or 'ura', got {kind!r}")


def profile_to_dict(profile: RippleProfile) -> dict:
    return {"kind": profile.kind, "xi": profile.xi, "seed": profile.seed, "harmonic": profile.harmonic}


def profile_from_dict(doc: dict) -> RippleProfile:
    _check_keys(doc, {"kind", "xi", "seed", "harmonic"}, "profile")
    try:
        return RippleProfile(
            kind=doc.get("kind", "alternating"),
            xi=float(doc.get("xi", 0.0)),
            seed=int(doc.get("seed", 0)),
            harmonic=int(doc.get("harmonic", 1)),
        )
    except ValueError as exc:
        raise BroadbeamError(str(exc)) from exc


NETWORK_KEYS = (
    "cells",
    "cell_radius",
    "cell_hole",
    "users_per_cell",
    "bs_power_dbm",
    "bandwidth_hz",
    "noise_density_dbm_hz",
    "path_loss_exponent",
    "antennas",
    "drops",
    "draws_per_drop",
    "seed",
    "measure_all_cells",
)


def network_from_dict(doc: dict, **overrides) -> NetworkConfig:
    _check_keys(doc, NETWORK_KEYS, "network")
    merged = dict(doc)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return NetworkConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise BroadbeamError(str(exc)) from exc


def load_run_config(path) -> dict:
    """Read and validate a run-config JSON document (schema 1)."""
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise BroadbeamError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise BroadbeamError("config must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise BroadbeamError(f"config schema must be {SCHEMA_VERSION}, got {doc.get('schema')!r}")
    _check_keys(doc, {"schema", "geometry", "profile", "metric", "v_max", "network"}, "config")
    return doc


def _finite_or_none(value):
    # designs with dark antennas have infinite dynamic range; JSON has no inf
    return float(value) if np.isfinite(value) else None


def _metrics_dict(design) -> dict:
    return {
        "papr": design.papr,
        "papr_db": design.papr_db,
        "dynamic_range": _finite_or_none(design.dynamic_range),
        "dynamic_range_db": _finite_or_none(design.dynamic_range_db),
        "radiated_fraction": design.radiated_fraction,
    }


def _peak_dict(peak: PeakConstrainedDesign | None):
    if peak is None:
        return None
    return {
        "v_max": peak.v_max,
        "radiated_power": peak.radiated_power,
        "radiated_fraction": peak.radiated_fraction,
        "coefficients": _complex_pairs(peak.v),
    }


def _ula_design_dict(design: BeamDesign) -> dict:
    return {
        "geometry": geometry_to_dict(design.geometry),
        "profile": profile_to_dict(design.profile),
        "metric": design.metric,
        "coefficients": _complex_pairs(design.v),
        "mask": [int(bit) for bit in design.mask],
        "exhaustive": design.exhaustive,
        "metrics": _metrics_dict(design),
        "max_sample_error": design.max_sample_error,
    }


def design_to_dict(design) -> dict:
    doc = {"schema": SCHEMA_VERSION}
    if isinstance(design, UraBeamDesign):
        doc["kind"] = "ura"
        doc["geometry"] = geometry_to_dict(design.geometry)
        doc["profile"] = profile_to_dict(design.profile)
        doc["metric"] = design.metric
        doc["coefficients"] = _complex_pairs(design.v)
        doc["exhaustive"] = design.exhaustive
        doc["metrics"] = _metrics_dict(design)
        doc["azimuth"] = _ula_design_dict(design.azimuth)
        doc["elevation"] = _ula_design_dict(design.elevation)
    else:
        doc["kind"] = "ula"
        doc.update(_ula_design_dict(design))
    doc["peak"] = _peak_dict(design.peak)
    return doc


def write_design_json(path, design):
    with open(path, "w") as handle:
        json.dump(design_to_dict(design), handle, indent=2)
        handle.write("\n")


def load_design_json(path):
    """Read a design JSON; returns (geometry, v, document)."""
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise BroadbeamError(f"cannot read design {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise BroadbeamError(f"design file schema must be {SCHEMA_VERSION}")
    geometry = geometry_from_dict(doc["geometry"])
    v = _pairs_to_complex(doc["coefficients"])
    return geometry, v, doc


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def write_pattern_csv(path, theta_deg, power):
    rows = [(_g9(t), _g9(p)) for t, p in zip(theta_deg, power)]
    _write_csv(path, ("theta_deg", "power"), rows)


def write_pattern2d_csv(path, psi_deg, theta_deg, power_grid):
    rows = [
        (_g9(psi_deg[i]), _g9(theta_deg[j]), _g9(power_grid[i, j]))
        for i in range(len(psi_deg))
        for j in range(len(theta_deg))
    ]
    _write_csv(path, ("psi_deg", "theta_deg", "power"), rows)


def write_antenna_power_csv(path, v):
    powers = np.abs(np.asarray(v)) ** 2
    rows = [(str(m + 1), _g9(p)) for m, p in enumerate(powers)]
    _write_csv(path, ("antenna", "power"), rows)


def write_sweep_csv(path, rows):
    table = []
    for row in rows:
        if row.error is not None:
            marker = f"ERROR: {row.error}"
            table.append((_g9(row.xi), marker, marker, marker))
        else:
            table.append(
                (_g9(row.xi), _g9(row.papr_db), _g9(row.dr_db), _g9(row.radiated_fraction))
            )
    _write_csv(path, ("xi", "papr_db", "dr_db", "radiated_fraction"), table)


def write_cdf_csv(path, result: SimulationResult):
    rows = [
        (_g9(edge), _g9(cb), _g9(cg))
        for edge, cb, cg in zip(result.bin_edges_db, result.cdf_broadbeam, result.cdf_geometry)
    ]
    _write_csv(path, ("sinr_db", "cdf_broadbeam", "cdf_geometry"), rows)


def network_to_dict(cfg: NetworkConfig) -> dict:
    return {key: getattr(cfg, key) for key in NETWORK_KEYS}


def write_summary_json(path, result: SimulationResult, extra: dict | None = None):
    doc = {
        "schema": SCHEMA_VERSION,
        "network": network_to_dict(result.config),
        "transmit_snr_db": result.config.transmit_snr_db,
        "samples": int(len(result.sinr_broadbeam_db)),
        "quantiles_db": {
            "broadbeam": {str(k): v for k, v in result.quantiles_broadbeam.items()},
            "geometry": {str(k): v for k, v in result.quantiles_geometry.items()},
        },
        "median_gap_db": result.median_gap_db,
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")
