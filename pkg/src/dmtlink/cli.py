"""Command line front end: points, sweeps, calibration, notch tables.

Exit codes: 0 clean, 1 configuration problems, 2 when the link came
up but the measurement failed (FEC fail, infeasible rate, lost sync,
calibration that cannot converge).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import calibrate as _calibrate
from .channel import EmlParams, FiberParams, imdd_response, notch_frequencies
from .config import apply_settings, default_settings_text, load_scenario
from .errors import CalibrationError, ConfigError, InsufficientStatisticsError
from .link import BAND_PRESETS, run_point
from .loading import write_loading_csv
from .sweep import (SweepSpec, manifest_path_for, run_sweep,
                    write_run_manifest, write_sweep_csv)


def _parse_values(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("value range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError("value range must ascend with positive step")
        n = int(round((stop - start) / step))
        values = [start + i * step for i in range(n + 1)]
        if values and values[-1] > stop + 1e-9 * max(1.0, abs(stop)):
            values.pop()
        return values
    values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ConfigError("no sweep values given")
    return values


def _scenario_from(args) -> "ScenarioConfig":
    scenario = load_scenario(getattr(args, "config", None),
                             getattr(args, "override", None))
    cal_file = getattr(args, "calibration", None)
    if cal_file:
        scenario = apply_settings(scenario,
                                  _calibrate.read_calibration(cal_file))
    return scenario


def _cmd_run(args) -> int:
    scenario = _scenario_from(args)
    result = run_point(scenario)
    print(f"status={result.status}")
    print(f"band={scenario.band} rate={scenario.data_rate} "
          f"length_km={scenario.length_km:g}")
    print(f"p_rec_dbm={result.p_rec_dbm:.3f} voa_db={result.voa_db:.3f} "
          f"clip_ratio={result.clip_ratio:.3f}")
    if result.report is None:
        if "achievable_bits" in result.details:
            print(f"achievable_bits={result.details['achievable_bits']} "
                  f"target_bits={result.details['target_bits']}")
        return 2
    report = result.report
    print(f"pre_fec_ber={report.pre_fec_ber:.6e} "
          f"bits_counted={report.bits_counted}")
    print(f"gross_bits_per_frame={report.gross_bits_per_frame} "
          f"net_rate_gbps={report.net_rate_bps / 1e9:.4f}")
    if args.loading_out:
        write_loading_csv(args.loading_out, result.profile, result.plan)
        print(f"loading_csv={args.loading_out}")
    try:
        ok = report.fec_pass
    except InsufficientStatisticsError as exc:
        print(f"fec_verdict=unavailable ({exc})")
        return 2
    print(f"fec_pass={int(ok)}")
    return 0 if ok else 2


def _cmd_sweep(args) -> int:
    scenario = _scenario_from(args)
    spec = SweepSpec(variable=args.sweep,
                     values=tuple(_parse_values(args.values)),
                     base=scenario, workers=args.workers)
    results = run_sweep(spec)
    write_sweep_csv(args.out, spec, results)
    manifest = args.manifest or manifest_path_for(args.out)
    write_run_manifest(manifest, spec, results)
    n_fail = 0
    for x, result in zip(spec.values, results):
        ber = result.pre_fec_ber
        passed = result.report is not None and result.fec_pass
        n_fail += not passed
        print(f"x={x:g} status={result.status} ber={ber:.4e} "
              f"fec_pass={int(passed)}")
    print(f"csv={args.out}")
    print(f"manifest={manifest}")
    return 2 if n_fail else 0


def _cmd_calibrate(args) -> int:
    extra = {}
    if args.override:
        pairs = {}
        for item in args.override:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"override must look like key=value, "
                                  f"got {item!r}")
            pairs[key.strip()] = value.strip()
        extra = pairs
    result = _calibrate.calibrate(seed=args.seed, extra_overrides=extra)
    _calibrate.write_calibration(args.out, result)
    print(f"thermal_noise_density={result.thermal_noise_density:.6e}")
    print(f"chirp_alpha={result.chirp_alpha:.6f}")
    print(f"density_evals={len(result.density_trace)} "
          f"alpha_evals={len(result.alpha_trace)}")
    print(f"calibration={args.out}")
    return 0


def _cmd_notch(args) -> int:
    if args.band not in BAND_PRESETS:
        raise ConfigError(f"unknown band {args.band!r}")
    preset = BAND_PRESETS[args.band]
    fiber = FiberParams(length_km=args.distance_km,
                        wavelength_nm=preset["wavelength_nm"],
                        loss_db_per_km=preset["loss_db_per_km"])
    alpha = args.alpha if args.alpha is not None else EmlParams().chirp_alpha
    f_max = args.max_ghz * 1e9
    notches = notch_frequencies(fiber, alpha, f_max)
    grid = np.linspace(0.0, f_max, 1025)
    response = imdd_response(grid, fiber, alpha)
    mag_db = 20.0 * np.log10(np.maximum(np.abs(response), 1e-12))
    print(f"band={args.band} distance_km={args.distance_km:g} "
          f"chirp_alpha={alpha:g}")
    if notches.size:
        print("notches_ghz=" + ",".join(f"{f / 1e9:.3f}" for f in notches))
    else:
        print(f"notches_ghz=none_below_{args.max_ghz:g}")
    print(f"min_response_db={mag_db.min():.2f} at "
          f"{grid[mag_db.argmin()] / 1e9:.3f} GHz")
    if args.out:
        lines = ["f_ghz,response_db"]
        lines += [f"{f / 1e9:.6f},{m:.6f}" for f, m in zip(grid, mag_db)]
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"csv={args.out}")
    return 0


def _cmd_defaults(_args) -> int:
    sys.stdout.write(default_settings_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmtlink",
        description="Bit-true DMT link simulator for PON rate/reach studies")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("-o", "--override", action="append", default=[],
                       metavar="KEY=VALUE", help="set one config key")
        p.add_argument("--calibration",
                       help="fitted-parameters file from 'calibrate'")

    p_run = sub.add_parser("run", help="measure a single point")
    common(p_run)
    p_run.add_argument("--loading-out",
                       help="write the per-tone SNR/bits/power CSV")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep power or distance")
    common(p_sweep)
    p_sweep.add_argument("--sweep", required=True,
                         choices=("received_power_dbm", "length_km"))
    p_sweep.add_argument("--values", required=True,
                         help="comma list or start:stop:step")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--manifest", help="manifest path "
                         "(default: next to the CSV)")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cal = sub.add_parser("calibrate", help="fit noise density and chirp")
    p_cal.add_argument("--out", required=True, help="where to write the fit")
    p_cal.add_argument("--seed", type=int, default=20_000)
    p_cal.add_argument("-o", "--override", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="component overrides held fixed during the fit")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_notch = sub.add_parser("notch",
                             help="dispersion notch table for a span")
    p_notch.add_argument("--band", required=True)
    p_notch.add_argument("--distance-km", "--length", dest="distance_km",
                         type=float, required=True)
    p_notch.add_argument("--alpha", type=float, default=None)
    p_notch.add_argument("--max-ghz", type=float, default=64.0)
    p_notch.add_argument("--out", help="per-frequency response CSV")
    p_notch.set_defaults(func=_cmd_notch)

    p_def = sub.add_parser("defaults", help="print every config key")
    p_def.set_defaults(func=_cmd_defaults)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
