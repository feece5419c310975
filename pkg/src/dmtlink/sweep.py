"""Sweeps over received power or fiber length, with CSV artifacts.

The CSV layout is the stable interface consumed by the plotting
front end: one row per point, columns
x, pre_fec_ber, fec_pass, p_rec_dbm, gross_bits, seed.
A JSON manifest written next to the CSV records the resolved scenario
so a result file is reproducible from its own directory.
"""

from __future__ import annotations

import dataclasses
import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .link import PointResult, ScenarioConfig, run_point

SWEEP_VARIABLES = ("received_power_dbm", "length_km")
SWEEP_COLUMNS = ("x", "pre_fec_ber", "fec_pass", "p_rec_dbm",
                 "gross_bits", "seed")


@dataclass
class SweepSpec:
    variable: str
    values: tuple
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    workers: int = 1

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"cannot sweep {self.variable!r}; choose from "
                              f"{SWEEP_VARIABLES}")
        self.values = tuple(float(v) for v in self.values)
        if not self.values:
            raise ConfigError("sweep needs at least one value")


def _seed_for(base_seed: int, x: float) -> int:
    # Derived from the swept value, not the position, so a value listed
    # twice reproduces the identical row.
    tag = zlib.crc32(f"{float(x):.9e}".encode()) & 0xFFFFF
    return int(base_seed) + tag


def point_scenarios(spec: SweepSpec) -> list[ScenarioConfig]:
    """Per-point scenarios; each point gets its own value-derived seed."""
    return [replace(spec.base, seed=_seed_for(spec.base.seed, x),
                    **{spec.variable: x})
            for x in spec.values]


def run_sweep(spec: SweepSpec) -> list[PointResult]:
    scenarios = point_scenarios(spec)
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(run_point, scenarios))
    return [run_point(s) for s in scenarios]


def _format_row(x: float, result: PointResult) -> str:
    ber = result.pre_fec_ber
    ber_text = "nan" if not np.isfinite(ber) else f"{ber:.10e}"
    ok = result.fec_pass if result.report is not None else False
    gross = result.plan.bits_per_frame if result.plan is not None else 0
    return (f"{x:.6f},{ber_text},{int(ok)},{result.p_rec_dbm:.6f},"
            f"{gross},{result.scenario.seed}")


def write_sweep_csv(path, spec: SweepSpec,
                    results: list[PointResult]) -> Path:
    path = Path(path)
    lines = [",".join(SWEEP_COLUMNS)]
    for x, result in zip(spec.values, results):
        lines.append(_format_row(x, result))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_sweep_csv(path) -> dict[str, np.ndarray]:
    """Columns as arrays; fec_pass comes back as bool."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    if tuple(header) != SWEEP_COLUMNS:
        raise ConfigError(f"unexpected sweep CSV header {header}")
    rows = [line.split(",") for line in lines[1:]]
    cols = {name: np.array([row[i] for row in rows], dtype=float)
            for i, name in enumerate(SWEEP_COLUMNS)}
    cols["fec_pass"] = cols["fec_pass"] > 0.5
    cols["gross_bits"] = cols["gross_bits"].astype(int)
    cols["seed"] = cols["seed"].astype(int)
    return cols


def _package_version() -> str:
    try:
        from importlib.metadata import version
        return version("dmtlink")
    except Exception:
        return "0+unknown"


def manifest_path_for(csv_path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".manifest.json")


def write_run_manifest(path, spec: SweepSpec,
                       results: list[PointResult]) -> Path:
    path = Path(path)
    scenario = dataclasses.asdict(spec.base)
    scenario["overrides"] = {k: str(v)
                             for k, v in scenario["overrides"].items()}
    doc = {
        "tool": "dmtlink",
        "version": _package_version(),
        "columns": list(SWEEP_COLUMNS),
        "sweep": {"variable": spec.variable,
                  "values": list(spec.values),
                  "workers": spec.workers},
        "scenario": scenario,
        "points": [
            {"x": x, "status": r.status, "clip_ratio": r.clip_ratio,
             "voa_db": r.voa_db, "p_rec_dbm": r.p_rec_dbm}
            for x, r in zip(spec.values, results)
        ],
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
