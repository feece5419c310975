"""Single measurement points over the full transmit/receive chain.

A scenario (band, rate label, fiber length, optional received-power
setpoint) resolves to concrete component parameters. Running a point
then mirrors the bring-up sequence of the real hardware: probe the
channel with known QPSK frames, pick the clip level, derive a bit and
power plan that carries the target net rate, transmit a payload burst
and count errors after adaptive equalization.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import dmt, loading, rxdsp
from .channel import (EmlParams, FiberParams, ReceiverParams, detect,
                      eml_modulate, fiber_propagate, front_end_equalization)
from .dmt import DmtParams, SubcarrierPlan, WaveformBuffer
from .errors import ConfigError, InfeasibleRateError, SyncFailureError
from .loading import SnrProfile
from .rxdsp import FEC_OVERHEAD, BerReport

# Net (post-FEC) payload rates keyed by the commercial label.
NET_RATES_BPS = {
    "25G": 25.78125e9,
    "50G": 51.5625e9,
    "100G": 103.125e9,
}

# The 25G configuration runs the converters at the lower clock.
SAMPLE_RATES = {"25G": 42e9, "50G": 64e9, "100G": 64e9}
# Optional clocks phase-locked to the Ethernet symbol quantum.
EXACT_SAMPLE_RATES = {"25G": 42.5984e9, "50G": 63.8976e9, "100G": 63.8976e9}

BAND_PRESETS = {
    "O": dict(wavelength_nm=1309.0, loss_db_per_km=0.33,
              launch_power_dbm=2.5, insertion_loss_db=0.0),
    "C": dict(wavelength_nm=1565.4, loss_db_per_km=0.20,
              launch_power_dbm=-2.0, insertion_loss_db=1.0),
}

CLIP_SEARCH_BOUNDS = (2.0, 4.5)
CLIP_SEARCH_ITERS = 12
PAD_FRAMES = 2  # sacrificial frames on each end of a burst

_PREAMBLE_SEED = 314159


@dataclass
class ScenarioConfig:
    """One link condition plus the run-control knobs.

    received_power_dbm picks a VOA setting; None means whatever the
    passive budget delivers. overrides carries dotted component keys
    like "eml.chirp_alpha" or "receiver.thermal_noise_density".
    """

    band: str = "O"
    data_rate: str = "25G"
    length_km: float = 0.0
    received_power_dbm: float | None = None
    seed: int = 1234
    payload_frames: int | None = None
    min_payload_bits: int = 200_000
    train_frames: int = 16
    snr_frames: int = 32
    gamma_db: float = 6.0
    clip_ratio: float = 3.2
    optimize_clip: bool = True
    tx_equalization: bool = True
    exact_ethernet_rates: bool = False
    launch_power_dbm: float | None = None
    target_bits: int | None = None
    overrides: dict = field(default_factory=dict)


@dataclass
class LinkSetup:
    """Scenario resolved to concrete component parameters."""

    scenario: ScenarioConfig
    params: DmtParams
    eml: EmlParams
    fiber: FiberParams
    rx: ReceiverParams
    launch_power_dbm: float
    net_rate_bps: float
    target_bits: int
    voa_db: float
    voa_clamped: bool
    tx_gain: np.ndarray | None = None


@dataclass
class PointResult:
    status: str  # "ok" | "infeasible" | "sync_failure"
    scenario: ScenarioConfig
    report: BerReport | None
    profile: SnrProfile | None
    plan: SubcarrierPlan | None
    clip_ratio: float
    voa_db: float
    p_rec_dbm: float
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def pre_fec_ber(self) -> float:
        return self.report.pre_fec_ber if self.report is not None else math.nan

    @property
    def fec_pass(self) -> bool:
        return bool(self.report is not None and self.report.fec_pass)


def _coerce_like(value, current):
    if isinstance(current, bool):
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    return value


def resolve_setup(scenario: ScenarioConfig) -> LinkSetup:
    """Expand band/rate presets and overrides into component params."""
    if scenario.band not in BAND_PRESETS:
        raise ConfigError(f"unknown band {scenario.band!r}, expected one of "
                          f"{sorted(BAND_PRESETS)}")
    if scenario.data_rate not in NET_RATES_BPS:
        raise ConfigError(f"unknown data rate {scenario.data_rate!r}, "
                          f"expected one of {sorted(NET_RATES_BPS)}")
    if scenario.length_km < 0:
        raise ConfigError("fiber length cannot be negative")

    preset = BAND_PRESETS[scenario.band]
    clocks = EXACT_SAMPLE_RATES if scenario.exact_ethernet_rates else SAMPLE_RATES
    groups: dict[str, object] = {
        "dmt": DmtParams(sample_rate=clocks[scenario.data_rate],
                         clip_ratio=scenario.clip_ratio),
        "eml": EmlParams(),
        "fiber": FiberParams(length_km=scenario.length_km,
                             wavelength_nm=preset["wavelength_nm"],
                             loss_db_per_km=preset["loss_db_per_km"]),
        "receiver": ReceiverParams(insertion_loss_db=preset["insertion_loss_db"]),
    }
    for key, value in scenario.overrides.items():
        group, _, name = key.partition(".")
        obj = groups.get(group)
        if obj is None or not name:
            raise ConfigError(f"unknown override key {key!r}")
        if name not in {f.name for f in dataclasses.fields(obj)}:
            raise ConfigError(f"{group} has no parameter {name!r}")
        groups[group] = replace(obj, **{name: _coerce_like(value,
                                                           getattr(obj, name))})

    params: DmtParams = groups["dmt"]
    fiber: FiberParams = groups["fiber"]
    rx: ReceiverParams = groups["receiver"]

    launch = preset["launch_power_dbm"]
    if scenario.launch_power_dbm is not None:
        launch = float(scenario.launch_power_dbm)

    net = NET_RATES_BPS[scenario.data_rate]
    target = scenario.target_bits
    if target is None:
        target = math.ceil(net * (1.0 + FEC_OVERHEAD)
                           * params.frame_len / params.sample_rate)

    p_passive = (launch - fiber.loss_db_per_km * fiber.length_km
                 - rx.insertion_loss_db)
    voa = rx.voa_db
    clamped = False
    if scenario.received_power_dbm is not None:
        voa = p_passive - float(scenario.received_power_dbm)
        if voa < 0.0:
            # the budget cannot deliver that much power; run wide open
            voa, clamped = 0.0, True
    rx = replace(rx, voa_db=voa)

    eml: EmlParams = groups["eml"]
    tx_gain = None
    if scenario.tx_equalization:
        tx_gain = front_end_equalization(params.fft_size // 2 - 1,
                                         params.fft_size, params.sample_rate,
                                         eml)

    return LinkSetup(scenario=scenario, params=params, eml=eml,
                     fiber=fiber, rx=rx, launch_power_dbm=launch,
                     net_rate_bps=net, target_bits=int(target),
                     voa_db=voa, voa_clamped=clamped, tx_gain=tx_gain)


def preamble_frame(params: DmtParams) -> np.ndarray:
    """The fixed QPSK frame every burst leads with."""
    rng = np.random.default_rng(_PREAMBLE_SEED)
    plan = dmt.uniform_plan(params, bits=2)
    bits = rng.integers(0, 2, size=plan.bits_per_frame, dtype=np.int64)
    return dmt.map_bits(bits, plan, params)


def _qpsk_frames(n: int, plan: SubcarrierPlan, params: DmtParams,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    bits = rng.integers(0, 2, size=n * plan.bits_per_frame, dtype=np.int64)
    frames = np.atleast_2d(dmt.map_bits(bits, plan, params))
    return bits, frames


def _golden_max(f, lo: float, hi: float, iters: int = CLIP_SEARCH_ITERS):
    """Golden-section maximization with a fixed iteration count."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = f(c), f(d)
    trace = [(c, fc), (d, fd)]
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
            trace.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
            trace.append((d, fd))
    return (c if fc >= fd else d), trace


def _through_channel(tx_wave: np.ndarray, setup: LinkSetup,
                     noise_rng: np.random.Generator) -> WaveformBuffer:
    buf = WaveformBuffer(np.asarray(tx_wave, dtype=float),
                         setup.params.sample_rate)
    buf = eml_modulate(buf, setup.eml, setup.launch_power_dbm)
    buf = fiber_propagate(buf, setup.fiber)
    return detect(buf, setup.rx, noise_rng)


def run_point(scenario: ScenarioConfig) -> PointResult:
    """Bring the link up under one condition and measure its BER."""
    setup = resolve_setup(scenario)
    params = setup.params
    train_plan = dmt.uniform_plan(params, bits=2)

    ss = np.random.SeedSequence(int(scenario.seed))
    (s_pad, s_train, s_payload,
     s_probe_noise, s_plan_noise, s_payload_noise) = ss.spawn(6)

    rng_pad = np.random.default_rng(s_pad)
    _, pad_frames = _qpsk_frames(2 * PAD_FRAMES, train_plan, params, rng_pad)
    head_frames, tail_frames = pad_frames[:PAD_FRAMES], pad_frames[PAD_FRAMES:]
    pre_frame = preamble_frame(params)
    pre_wave = dmt.modulate(pre_frame, train_plan, params,
                            tx_gain=setup.tx_gain)

    rng_train = np.random.default_rng(s_train)
    _, probe_frames = _qpsk_frames(scenario.snr_frames, train_plan, params,
                                   rng_train)
    probe_stack = np.vstack([head_frames, pre_frame[None, :], probe_frames,
                             tail_frames])
    probe_clean = dmt.modulate(probe_stack, train_plan, params,
                               tx_gain=setup.tx_gain)
    probe_start = (PAD_FRAMES + 1) * params.frame_len
    probe_len = scenario.snr_frames * params.frame_len

    pilot_mask = np.zeros(params.fft_size // 2 - 1, dtype=bool)
    pilot_mask[np.asarray(params.pilot_indices, dtype=np.int64) - 1] = True
    gamma = 10.0 ** (scenario.gamma_db / 10.0)

    def probe(clip_ratio: float, noise_seed) -> tuple[SnrProfile, dict]:
        tx = dmt.quantize(dmt.clip(probe_clean, clip_ratio),
                          params.dac_bits, params.converter_full_scale)
        buf = _through_channel(tx, setup, np.random.default_rng(noise_seed))
        rxw = dmt.quantize(buf.samples, params.adc_bits,
                           params.converter_full_scale)
        frames = dmt.demodulate(rxw[probe_start:probe_start + probe_len],
                                params)
        return loading.estimate_snr(frames, probe_frames), buf.meta

    def objective(clip_ratio: float) -> float:
        # capacity-style figure of merit under the loading gap
        prof, _ = probe(clip_ratio, s_probe_noise)
        usable = prof.alive & ~pilot_mask
        return float(np.sum(np.log2(1.0 + prof.linear[usable] / gamma)))

    clip_trace = []
    clip_ratio = params.clip_ratio
    if scenario.optimize_clip:
        clip_ratio, clip_trace = _golden_max(objective, *CLIP_SEARCH_BOUNDS)
    params = replace(params, clip_ratio=clip_ratio)
    setup = replace(setup, params=params)

    # fresh noise for the plan-making estimate so the clip search has
    # not been fitted to the realization the plan is built from
    profile, probe_meta = probe(clip_ratio, s_plan_noise)
    details = {
        "clip_trace": clip_trace,
        "snr_frames": scenario.snr_frames,
        "voa_clamped": setup.voa_clamped,
        "target_bits": setup.target_bits,
    }

    try:
        plan = loading.waterfill(profile, setup.target_bits, params,
                                 scenario.gamma_db)
    except InfeasibleRateError as exc:
        details["achievable_bits"] = exc.max_bits
        return PointResult(status="infeasible", scenario=scenario, report=None,
                           profile=profile, plan=None, clip_ratio=clip_ratio,
                           voa_db=setup.voa_db,
                           p_rec_dbm=probe_meta["p_rec_dbm"], details=details)

    n_payload = scenario.payload_frames
    if n_payload is None:
        n_payload = max(1, math.ceil(scenario.min_payload_bits
                                     / plan.bits_per_frame))
    rng_payload = np.random.default_rng(s_payload)
    payload_bits = rng_payload.integers(
        0, 2, size=n_payload * plan.bits_per_frame, dtype=np.int64)
    payload_frames = np.atleast_2d(dmt.map_bits(payload_bits, plan, params))
    _, eq_train_frames = _qpsk_frames(scenario.train_frames, train_plan,
                                      params, rng_train)

    lead = dmt.modulate(
        np.vstack([head_frames, pre_frame[None, :], eq_train_frames]),
        train_plan, params, tx_gain=setup.tx_gain)
    body = dmt.modulate(payload_frames, plan, params, tx_gain=setup.tx_gain)
    tail = dmt.modulate(tail_frames, train_plan, params,
                        tx_gain=setup.tx_gain)
    record = np.concatenate([lead, body, tail])
    tx = dmt.quantize(dmt.clip(record, clip_ratio),
                      params.dac_bits, params.converter_full_scale)
    buf = _through_channel(tx, setup, np.random.default_rng(s_payload_noise))
    rxw = dmt.quantize(buf.samples, params.adc_bits,
                       params.converter_full_scale)

    n_frames = 1 + scenario.train_frames + n_payload
    try:
        offset = rxdsp.synchronize(rxw, pre_wave)
        if offset + n_frames * params.frame_len > len(rxw):
            raise SyncFailureError(
                f"correlation peak at {offset} leaves no room for the burst")
    except SyncFailureError as exc:
        details["sync_error"] = str(exc)
        return PointResult(status="sync_failure", scenario=scenario,
                           report=None, profile=profile, plan=plan,
                           clip_ratio=clip_ratio, voa_db=setup.voa_db,
                           p_rec_dbm=buf.meta["p_rec_dbm"], details=details)

    frames = dmt.demodulate(
        rxw[offset:offset + n_frames * params.frame_len], params)
    rx_train = frames[1:1 + scenario.train_frames]
    state = rxdsp.train_equalizer(rx_train, eq_train_frames)

    # payload tones arrive at sqrt(p_k) times the plan's drive scale,
    # while the equalizer was trained at the uniform plan's scale
    g_ratio = (dmt.drive_scale(plan, params)
               / dmt.drive_scale(train_plan, params))
    amplitude = np.where(plan.active_mask,
                         np.sqrt(plan.power) * g_ratio, 1.0)
    eq = rxdsp.equalize_frames(state, frames[1 + scenario.train_frames:],
                               plan, params, amplitude=amplitude, update=True)
    rx_bits = rxdsp.demap(eq, plan)
    errors, per_tone = rxdsp.count_errors(rx_bits, payload_bits, plan)

    net_rate = (plan.bits_per_frame / params.frame_len * params.sample_rate
                / (1.0 + FEC_OVERHEAD))
    report = BerReport(
        bit_errors=int(errors), bits_counted=int(payload_bits.size),
        per_tone_errors=per_tone, p_rec_dbm=buf.meta["p_rec_dbm"],
        gross_bits_per_frame=plan.bits_per_frame, net_rate_bps=net_rate,
        meta={"sync_offset": int(offset),
              "pilot_fallbacks": state.pilot_fallbacks,
              "overload_penalty_db": buf.meta["overload_penalty_db"],
              "noise_rms_amps": buf.meta["noise_rms_amps"]})
    details["n_payload_frames"] = n_payload
    return PointResult(status="ok", scenario=scenario, report=report,
                       profile=profile, plan=plan, clip_ratio=clip_ratio,
                       voa_db=setup.voa_db, p_rec_dbm=report.p_rec_dbm,
                       details=details)
