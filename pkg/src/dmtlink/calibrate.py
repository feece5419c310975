"""Fits the two free model knobs against anchor measurements.

Everything else in the chain is nailed down by data sheets or
geometry; what remains free is the receiver thermal noise density and
the modulator chirp factor. They are fitted sequentially:

1. density: the 25G O-band back-to-back curve must cross the FEC
   limit at the anchor sensitivity. Chirp plays no role here because
   there is no fiber, so this fit is independent of step 2.
2. chirp: the 100G C-band point at the anchor distance must land at a
   fixed fraction below the FEC limit, which pins how deep the first
   dispersion notch has cut into the signal band by that distance.

Both are 1-D monotone root finds done by bisection. The per-point
noise realization is frozen by the seed, so the objective is smooth
in the knob and bisection stays reliable at Monte Carlo resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CalibrationError
from .link import ScenarioConfig, run_point
from .rxdsp import FEC_LIMIT

ANCHOR_SENSITIVITY_DBM = -9.3   # 25G O-band back-to-back FEC crossing
ANCHOR_DISTANCE_KM = 2.2        # 100G C-band operating distance
ANCHOR_BER_FRACTION = 0.75      # BER at that distance, relative to limit

DENSITY_BOUNDS = (5e-12, 300e-12)   # A / sqrt(Hz)
ALPHA_BOUNDS = (0.3, 0.95)
MAX_ITERS = 50
REL_TOL = 1e-3

CAL_KEYS = ("receiver.thermal_noise_density", "eml.chirp_alpha")


@dataclass
class CalibrationResult:
    thermal_noise_density: float
    chirp_alpha: float
    density_trace: list = field(default_factory=list)
    alpha_trace: list = field(default_factory=list)
    seed: int = 0

    def as_overrides(self) -> dict:
        return {"receiver.thermal_noise_density": self.thermal_noise_density,
                "eml.chirp_alpha": self.chirp_alpha}


def _measure_ber(scenario: ScenarioConfig) -> float:
    """BER for one condition; link failures count as worst case."""
    result = run_point(scenario)
    if result.report is None:
        return 1.0
    return result.pre_fec_ber


def _bisect(f, lo: float, hi: float, log_space: bool,
            what: str) -> tuple[float, list]:
    """Root of a monotonically increasing objective on [lo, hi]."""
    trace = []

    def eval_at(x):
        y = f(x)
        trace.append((x, y))
        return y

    f_lo, f_hi = eval_at(lo), eval_at(hi)
    if f_lo > 0 or f_hi < 0:
        raise CalibrationError(
            f"{what}: no sign change on [{lo:g}, {hi:g}] "
            f"(f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e})")
    for _ in range(MAX_ITERS):
        mid = (math.sqrt(lo * hi) if log_space else 0.5 * (lo + hi))
        if eval_at(mid) > 0:
            hi = mid
        else:
            lo = mid
        if (hi - lo) / max(abs(hi), 1e-30) < REL_TOL:
            break
    else:
        raise CalibrationError(f"{what}: no convergence in {MAX_ITERS} "
                               "iterations")
    mid = math.sqrt(lo * hi) if log_space else 0.5 * (lo + hi)
    return mid, trace


def fit_thermal_density(anchor_dbm: float = ANCHOR_SENSITIVITY_DBM,
                        seed: int = 20_101,
                        min_payload_bits: int = 240_000,
                        extra_overrides: dict | None = None):
    """Noise density such that BER(anchor power) equals the FEC limit."""
    base = dict(extra_overrides or {})

    def objective(density: float) -> float:
        overrides = dict(base)
        overrides["receiver.thermal_noise_density"] = density
        sc = ScenarioConfig(band="O", data_rate="25G", length_km=0.0,
                            received_power_dbm=anchor_dbm, seed=seed,
                            min_payload_bits=min_payload_bits,
                            overrides=overrides)
        return _measure_ber(sc) - FEC_LIMIT

    return _bisect(objective, *DENSITY_BOUNDS, log_space=True,
                   what="thermal noise density")


def fit_chirp_alpha(density: float,
                    anchor_km: float = ANCHOR_DISTANCE_KM,
                    ber_fraction: float = ANCHOR_BER_FRACTION,
                    seed: int = 20_202,
                    min_payload_bits: int = 220_000,
                    extra_overrides: dict | None = None):
    """Chirp factor such that BER at the anchor distance hits its mark."""
    base = dict(extra_overrides or {})
    target = ber_fraction * FEC_LIMIT

    def objective(alpha: float) -> float:
        overrides = dict(base)
        overrides["receiver.thermal_noise_density"] = density
        overrides["eml.chirp_alpha"] = alpha
        sc = ScenarioConfig(band="C", data_rate="100G", length_km=anchor_km,
                            seed=seed, min_payload_bits=min_payload_bits,
                            overrides=overrides)
        return _measure_ber(sc) - target

    return _bisect(objective, *ALPHA_BOUNDS, log_space=False,
                   what="chirp factor")


def calibrate(seed: int = 20_000,
              extra_overrides: dict | None = None) -> CalibrationResult:
    """Run both fits in their dependency order."""
    density, d_trace = fit_thermal_density(seed=seed + 101,
                                           extra_overrides=extra_overrides)
    alpha, a_trace = fit_chirp_alpha(density, seed=seed + 202,
                                     extra_overrides=extra_overrides)
    return CalibrationResult(thermal_noise_density=density,
                             chirp_alpha=alpha, density_trace=d_trace,
                             alpha_trace=a_trace, seed=seed)


def write_calibration(path, result: CalibrationResult) -> Path:
    path = Path(path)
    lines = [
        "# fitted link model parameters",
        f"# anchors: {ANCHOR_SENSITIVITY_DBM} dBm sensitivity (O band 25G"
        " B2B), BER at "
        f"{ANCHOR_DISTANCE_KM} km C band 100G = "
        f"{ANCHOR_BER_FRACTION:g} x FEC limit",
        f"receiver.thermal_noise_density={result.thermal_noise_density:.6e}",
        f"eml.chirp_alpha={result.chirp_alpha:.6f}",
    ]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_calibration(path) -> dict:
    """Calibration file back as an overrides dict."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CAL_KEYS:
            raise CalibrationError(f"unexpected calibration key {key!r}")
        out[key] = float(value)
    missing = [k for k in CAL_KEYS if k not in out]
    if missing:
        raise CalibrationError(f"calibration file lacks {missing}")
    return out
