"""Command-line interface.

Subcommands: verify-theorem, design, sweep, simulate, pattern.  Angles
cross this boundary in degrees; the library works in radians.  Exit codes:
0 success, 1 domain error (impossible target, mismatched design, ...),
2 usage error (bad flags).  Report commands write delimited data plus a
rendered PNG figure per table; reruns with identical inputs produce
byte-identical files for any --threads value.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import plots
from .array_model import UlaGeometry, UraGeometry, ula_pattern_samples, ura_pattern_samples
from .beam_selector import METRICS, DesignRequest, design_broadbeam, sweep_xi
from .errors import BroadbeamError
from .reporting import (
    geometry_from_dict,
    load_design_json,
    load_run_config,
    network_from_dict,
    profile_from_dict,
    write_antenna_power_csv,
    write_cdf_csv,
    write_design_json,
    write_pattern2d_csv,
    write_pattern_csv,
    write_summary_json,
    write_sweep_csv,
)
from .cell_simulator import simulate
from .sample_system import PROFILE_KINDS, RippleProfile, verify_impossibility

PATTERN_GRID = 1801
PATTERN_GRID_2D = 181


def _antenna_count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 2:
        raise argparse.ArgumentTypeError("antenna count must be >= 2")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if value <= 0:
        raise argparse.ArgumentTypeError("value must be > 0")
    return value


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if value < 0:
        raise argparse.ArgumentTypeError("value must be >= 0")
    return value


def _thread_count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError("thread count must be >= 1")
    return value


def _ura_shape(text: str):
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("URA shape must look like 8x8")
    try:
        m, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError("URA shape must look like 8x8")
    if m < 1 or n < 1 or m * n < 2:
        raise argparse.ArgumentTypeError("URA axes must be >= 1 with at least 2 elements total")
    return m, n


def _xi_list(text: str):
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError("xi list must be comma-separated numbers")
    if not values:
        raise argparse.ArgumentTypeError("xi list is empty")
    return values


def _add_profile_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--xi", type=_nonnegative_float, default=None, help="ripple amplitude (default 0.01)")
    parser.add_argument("--profile", choices=PROFILE_KINDS, default=None, help="ripple profile kind (default alternating)")
    parser.add_argument("--ripple-seed", type=int, default=None, help="seed for seeded-random profiles (default 0)")
    parser.add_argument("--harmonic", type=int, default=None, help="harmonic for sinusoidal profiles (default 1)")


def _add_geometry_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--antennas", type=_antenna_count, default=None, help="ULA element count (default 16)")
    parser.add_argument("--ura", type=_ura_shape, default=None, metavar="MxN", help="design for an M x N URA instead of a ULA")
    parser.add_argument("--spacing", type=_positive_float, default=None, help="element spacing in wavelengths (default 0.5)")
    parser.add_argument("--elevation-spacing", type=_positive_float, default=None, help="URA elevation spacing when different from --spacing")


def _resolve_geometry(args, config: dict):
    if args.ura is not None:
        spacing = args.spacing if args.spacing is not None else 0.5
        el_spacing = args.elevation_spacing if args.elevation_spacing is not None else spacing
        return UraGeometry(
            azimuth=UlaGeometry(args.ura[0], spacing),
            elevation=UlaGeometry(args.ura[1], el_spacing),
        )
    if args.antennas is not None:
        spacing = args.spacing if args.spacing is not None else 0.5
        return UlaGeometry(args.antennas, spacing)
    if "geometry" in config:
        return geometry_from_dict(config["geometry"])
    return UlaGeometry(16, args.spacing if args.spacing is not None else 0.5)


def _resolve_profile(args, config: dict) -> RippleProfile:
    base = config.get("profile", {})
    kind = args.profile if args.profile is not None else base.get("kind", "alternating")
    xi = args.xi if args.xi is not None else base.get("xi", 0.01)
    seed = args.ripple_seed if args.ripple_seed is not None else base.get("seed", 0)
    harmonic = args.harmonic if args.harmonic is not None else base.get("harmonic", 1)
    try:
        return RippleProfile(kind=kind, xi=float(xi), seed=int(seed), harmonic=int(harmonic))
    except ValueError as exc:
        raise BroadbeamError(str(exc)) from exc


def _theta_grid_deg(points: int) -> np.ndarray:
    return np.linspace(-90.0, 90.0, points)


def _export_ula_pattern(prefix, geom, v, grid_size, figures, band=None):
    theta_deg = _theta_grid_deg(grid_size)
    power = ula_pattern_samples(geom, v, np.deg2rad(theta_deg))
    write_pattern_csv(f"{prefix}_pattern.csv", theta_deg, power)
    written = [f"{prefix}_pattern.csv"]
    if figures:
        plots.save_pattern_figure(f"{prefix}_pattern.png", theta_deg, power, ripple_band=band)
        written.append(f"{prefix}_pattern.png")
    return written


def _export_ura_pattern(prefix, geom, v, v_azimuth, v_elevation, grid_2d, grid_cut, figures):
    angles_deg = _theta_grid_deg(grid_2d)
    angles = np.deg2rad(angles_deg)
    grid = ura_pattern_samples(geom, v, angles, angles)
    write_pattern2d_csv(f"{prefix}_pattern2d.csv", angles_deg, angles_deg, grid)
    written = [f"{prefix}_pattern2d.csv"]
    if figures:
        plots.save_pattern2d_figure(f"{prefix}_pattern2d.png", angles_deg, angles_deg, grid)
        written.append(f"{prefix}_pattern2d.png")
    cuts = (
        ("azimuth_cut", geom.azimuth, v_azimuth),
        ("elevation_cut", geom.elevation, v_elevation),
    )
    cut_deg = _theta_grid_deg(grid_cut)
    for name, axis_geom, axis_v in cuts:
        power = ula_pattern_samples(axis_geom, axis_v, np.deg2rad(cut_deg))
        write_pattern_csv(f"{prefix}_{name}.csv", cut_deg, power)
        written.append(f"{prefix}_{name}.csv")
        if figures:
            plots.save_pattern_figure(f"{prefix}_{name}.png", cut_deg, power)
            written.append(f"{prefix}_{name}.png")
    return written


def cmd_verify_theorem(args) -> int:
    geom = UlaGeometry(args.antennas, args.spacing)
    report = verify_impossibility(geom)
    print(f"antennas={geom.antennas} spacing_ratio={geom.spacing_ratio}")
    print(f"max off-target column-sum magnitude = {report.max_off_target:.3e}")
    print(f"center column-sum deviation from 1 = {report.target_error:.3e}")
    if report.verdict:
        print("PASS: flat-target correlation sums collapse to a single lag; "
              "perfectly flat patterns admit only single-active-antenna precoders")
        return 0
    print("FAIL: column sums do not match the single-lag certificate")
    return 1


def cmd_design(args) -> int:
    config = load_run_config(args.config) if args.config else {}
    geometry = _resolve_geometry(args, config)
    profile = _resolve_profile(args, config)
    metric = args.metric if args.metric is not None else config.get("metric", "papr")
    if metric not in METRICS:
        raise BroadbeamError(f"metric must be one of {METRICS}, got {metric!r}")
    v_max = args.v_max if args.v_max is not None else config.get("v_max")
    request = DesignRequest(geometry=geometry, profile=profile, metric=metric, v_max=v_max)
    design = design_broadbeam(request, threads=args.threads)

    prefix = args.out
    write_design_json(f"{prefix}.json", design)
    written = [f"{prefix}.json"]
    figures = not args.no_figures
    if isinstance(geometry, UraGeometry):
        written += _export_ura_pattern(
            prefix, geometry, design.v, design.azimuth.v, design.elevation.v,
            args.grid_size_2d, args.grid_size, figures,
        )
    else:
        # The exported pattern uses the unit-norm coefficients; the stored sample
        # pattern sits at the spectrum-matched scale.  Their ratio at broadside
        # rescales the ripple corridor onto the exported curve.
        mid = len(design.sample_pattern) // 2
        broadside = np.arcsin(np.asarray(design.sample_sines)[mid])
        unit_mid = ula_pattern_samples(geometry, design.v, np.array([broadside]))[0]
        lag0 = design.sample_pattern[mid] / unit_mid
        band = ((1.0 - profile.xi) / lag0, (1.0 + profile.xi) / lag0)
        written += _export_ula_pattern(prefix, geometry, design.v, args.grid_size, figures, band)
    write_antenna_power_csv(f"{prefix}_antenna_power.csv", design.v)
    written.append(f"{prefix}_antenna_power.csv")
    if figures:
        plots.save_antenna_power_figure(f"{prefix}_antenna_power.png", design.v)
        written.append(f"{prefix}_antenna_power.png")

    print(f"metric={metric} exhaustive={design.exhaustive}")
    print(f"papr = {design.papr:.6f} ({design.papr_db:.4f} dB)")
    print(f"dynamic range = {design.dynamic_range:.6f} ({design.dynamic_range_db:.4f} dB)")
    print(f"radiated fraction under a per-antenna peak budget = {design.radiated_fraction:.6f} (= 1/papr)")
    if design.peak is not None:
        print(f"peak budget v_max = {design.peak.v_max}: radiated power {design.peak.radiated_power:.6f} "
              f"({100.0 * design.peak.radiated_fraction:.2f}% of the all-at-peak budget)")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    config = load_run_config(args.config) if args.config else {}
    geometry = _resolve_geometry(args, config)
    base = _resolve_profile(args, config)
    metric = args.metric if args.metric is not None else config.get("metric", "papr")
    if metric not in METRICS:
        raise BroadbeamError(f"metric must be one of {METRICS}, got {metric!r}")
    rows = sweep_xi(
        geometry, base.kind, args.xi_list, metric=metric,
        seed=base.seed, harmonic=base.harmonic, threads=args.threads,
    )
    prefix = args.out
    write_sweep_csv(f"{prefix}.csv", rows)
    written = [f"{prefix}.csv"]
    if not args.no_figures:
        plots.save_sweep_figure(f"{prefix}.png", rows)
        written.append(f"{prefix}.png")

    good = [row for row in rows if row.error is None]
    for row in rows:
        if row.error is not None:
            print(f"xi={row.xi:g}: ERROR: {row.error}")
    if len(good) >= 2:
        first, last = good[0], good[-1]
        rising = last.radiated_fraction >= first.radiated_fraction
        print(f"radiated fraction {100 * first.radiated_fraction:.2f}% at xi={first.xi:g} -> "
              f"{100 * last.radiated_fraction:.2f}% at xi={last.xi:g} "
              f"({'non-decreasing' if rising else 'DECREASING'} across the sweep)")
        falling = last.dr_db <= first.dr_db
        print(f"dynamic range {first.dr_db:.2f} dB at xi={first.xi:g} -> {last.dr_db:.2f} dB "
              f"at xi={last.xi:g} ({'non-increasing' if falling else 'INCREASING'} across the sweep)")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_simulate(args) -> int:
    config = load_run_config(args.config) if args.config else {}
    _, v, _ = load_design_json(args.design)
    cfg = network_from_dict(
        config.get("network", {}),
        cells=args.cells,
        users_per_cell=args.users,
        drops=args.drops,
        draws_per_drop=args.draws,
        seed=args.seed,
        path_loss_exponent=args.gamma,
        antennas=args.antennas,
    )
    result = simulate(cfg, v, threads=args.threads)

    prefix = args.out
    write_cdf_csv(f"{prefix}_cdf.csv", result)
    extra = {"design_file": args.design}
    write_summary_json(f"{prefix}_summary.json", result, extra=extra)
    written = [f"{prefix}_cdf.csv", f"{prefix}_summary.json"]
    if not args.no_figures:
        plots.save_cdf_figure(
            f"{prefix}_cdf.png", result.bin_edges_db, result.cdf_broadbeam, result.cdf_geometry
        )
        written.append(f"{prefix}_cdf.png")

    print(f"samples per variant = {len(result.sinr_broadbeam_db)}")
    print(f"transmit SNR = {cfg.transmit_snr_db:.2f} dB")
    qb, qg = result.quantiles_broadbeam, result.quantiles_geometry
    print(f"broadbeam SINR quantiles (dB): 5%={qb[5]:.2f} 50%={qb[50]:.2f} 95%={qb[95]:.2f}")
    print(f"geometry SINR quantiles (dB): 5%={qg[5]:.2f} 50%={qg[50]:.2f} 95%={qg[95]:.2f}")
    print(f"median gap = {result.median_gap_db:.3f} dB")
    if cfg.cells == 1:
        spread = max(abs(qb[level] - qg[level]) for level in (5, 50, 95))
        print(f"single-cell distributional identity: max quantile gap = {spread:.3f} dB")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_pattern(args) -> int:
    geometry, v, doc = load_design_json(args.design)
    prefix = args.out
    figures = not args.no_figures
    if isinstance(geometry, UraGeometry):
        from .reporting import _pairs_to_complex

        v_az = _pairs_to_complex(doc["azimuth"]["coefficients"])
        v_el = _pairs_to_complex(doc["elevation"]["coefficients"])
        written = _export_ura_pattern(
            prefix, geometry, v, v_az, v_el, args.grid_size_2d, args.grid_size, figures
        )
    else:
        written = _export_ula_pattern(prefix, geometry, v, args.grid_size, figures)
    for path in written:
        print(f"wrote {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="broadbeam",
        description="Design constant-power broadbeam precoders and validate them in a downlink simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify-theorem", help="certify that perfectly flat patterns are unreachable")
    p_verify.add_argument("--antennas", type=_antenna_count, default=16)
    p_verify.add_argument("--spacing", type=_positive_float, default=0.5)
    p_verify.set_defaults(func=cmd_verify_theorem)

    p_design = sub.add_parser("design", help="design a precoder and export pattern tables")
    _add_geometry_flags(p_design)
    _add_profile_flags(p_design)
    p_design.add_argument("--metric", choices=METRICS, default=None, help="objective (default papr)")
    p_design.add_argument("--v-max", type=_positive_float, default=None, help="per-antenna peak power budget")
    p_design.add_argument("--config", default=None, help="run-config JSON (flags override config values)")
    p_design.add_argument("--out", default="design", help="output file prefix")
    p_design.add_argument("--grid-size", type=int, default=PATTERN_GRID, help="pattern grid points (default 1801)")
    p_design.add_argument("--grid-size-2d", type=int, default=PATTERN_GRID_2D, help="URA 2-D grid points per axis")
    p_design.add_argument("--threads", type=_thread_count, default=1, help="worker cap; does not change results")
    p_design.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p_design.set_defaults(func=cmd_design)

    p_sweep = sub.add_parser("sweep", help="tabulate design metrics across ripple levels")
    _add_geometry_flags(p_sweep)
    _add_profile_flags(p_sweep)
    p_sweep.add_argument("--metric", choices=METRICS, default=None)
    p_sweep.add_argument("--xi-list", type=_xi_list, required=True, help="comma-separated ripple levels")
    p_sweep.add_argument("--config", default=None)
    p_sweep.add_argument("--out", default="sweep", help="output file prefix")
    p_sweep.add_argument("--threads", type=_thread_count, default=1)
    p_sweep.add_argument("--no-figures", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_sim = sub.add_parser("simulate", help="19-cell downlink SINR comparison for a saved design")
    p_sim.add_argument("--design", required=True, help="design JSON produced by the design command")
    p_sim.add_argument("--config", default=None, help="run-config JSON with a network section")
    p_sim.add_argument("--cells", type=int, choices=(1, 19), default=None)
    p_sim.add_argument("--users", type=int, default=None, help="users per cell")
    p_sim.add_argument("--drops", type=int, default=None)
    p_sim.add_argument("--draws", type=int, default=None, help="channel draws per drop")
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--gamma", type=float, default=None, help="path loss exponent")
    p_sim.add_argument("--antennas", type=int, default=None)
    p_sim.add_argument("--out", default="simulate", help="output file prefix")
    p_sim.add_argument("--threads", type=_thread_count, default=1)
    p_sim.add_argument("--no-figures", action="store_true")
    p_sim.set_defaults(func=cmd_simulate)

    p_pattern = sub.add_parser("pattern", help="re-export pattern tables from a saved design")
    p_pattern.add_argument("--design", required=True)
    p_pattern.add_argument("--out", default="pattern", help="output file prefix")
    p_pattern.add_argument("--grid-size", type=int, default=PATTERN_GRID)
    p_pattern.add_argument("--grid-size-2d", type=int, default=PATTERN_GRID_2D)
    p_pattern.add_argument("--no-figures", action="store_true")
    p_pattern.set_defaults(func=cmd_pattern)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BroadbeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
