"""Bit-true DMT transceiver and intensity-modulation link simulator."""

from .channel import (EmlParams, FiberParams, ReceiverParams, beta2, detect,
                      dispersion_coefficient, eml_modulate, fiber_propagate,
                      imdd_response, noise_equivalent_bandwidth,
                      notch_frequencies)
from .dmt import (DmtParams, SubcarrierPlan, WaveformBuffer, clip, demodulate,
                  drive_scale, map_bits, modulate, quantize, uniform_plan)
from .errors import (CalibrationError, ConfigError, FrameSizeError,
                     InfeasibleRateError, InsufficientDataError,
                     InsufficientStatisticsError, PlanError,
                     RecordLengthError, SyncFailureError)
from .link import (BAND_PRESETS, NET_RATES_BPS, LinkSetup, PointResult,
                   ScenarioConfig, resolve_setup, run_point)
from .loading import (SnrProfile, estimate_snr, read_loading_csv, waterfill,
                      write_loading_csv)
from .calibrate import CalibrationResult, calibrate, read_calibration
from .rxdsp import (FEC_LIMIT, FEC_OVERHEAD, BerReport, demap,
                    equalize_frames, fec_gate, synchronize, train_equalizer)
from .sweep import (SweepSpec, read_sweep_csv, run_sweep, write_run_manifest,
                    write_sweep_csv)
from . import qam

__version__ = "0.1.0"

__all__ = [
    "BAND_PRESETS", "BerReport", "CalibrationError", "CalibrationResult",
    "ConfigError", "DmtParams", "EmlParams", "FEC_LIMIT", "FEC_OVERHEAD",
    "FiberParams", "FrameSizeError", "InfeasibleRateError",
    "InsufficientDataError", "InsufficientStatisticsError", "LinkSetup",
    "NET_RATES_BPS", "PlanError", "PointResult", "ReceiverParams",
    "RecordLengthError", "ScenarioConfig", "SnrProfile", "SubcarrierPlan",
    "SweepSpec", "SyncFailureError", "WaveformBuffer", "beta2", "calibrate",
    "clip", "demap", "demodulate", "detect", "dispersion_coefficient",
    "drive_scale", "eml_modulate", "equalize_frames", "estimate_snr",
    "fec_gate", "fiber_propagate", "imdd_response", "map_bits", "modulate",
    "noise_equivalent_bandwidth", "notch_frequencies", "qam", "quantize",
    "read_calibration", "read_loading_csv", "read_sweep_csv", "resolve_setup",
    "run_point", "run_sweep", "synchronize", "train_equalizer",
    "uniform_plan", "waterfill", "write_loading_csv", "write_run_manifest",
    "write_sweep_csv",
]
