"""DMT framing: Hermitian-symmetric multicarrier modulation over 256 tones.

A frame carries 255 usable subcarriers (index 1..255 of a 512-point
transform; DC and Nyquist stay empty), a 16-sample cyclic prefix, and
comes out as 528 real samples. Frames are plain complex arrays of
shape (..., 255); subcarrier k lives at column k-1.

The time-domain scaling is deterministic: the inverse transform is
orthonormal and the stream is multiplied by sqrt(fft_size / (2 sum p_k))
so the expected RMS is exactly 1 for any plan. A sparse plan therefore
concentrates the fixed drive swing into fewer tones, which is how the
hardware behaves when subcarriers are switched off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qam
from .errors import FrameSizeError, PlanError

N_SUBCARRIERS = 256
PILOT_INDICES = tuple(range(8, 256, 32))  # 8, 40, ..., 232


@dataclass(frozen=True)
class DmtParams:
    """Static modem geometry and converter settings."""

    sample_rate: float = 64e9
    n_subcarriers: int = N_SUBCARRIERS
    cp_len: int = 16
    clip_ratio: float = 3.2
    dac_bits: int = 8
    adc_bits: int = 8
    converter_full_scale: float = 4.0  # in units of the unit-RMS drive
    pilot_indices: tuple = PILOT_INDICES
    max_bits: int = 8

    @property
    def fft_size(self) -> int:
        return 2 * self.n_subcarriers

    @property
    def frame_len(self) -> int:
        return self.fft_size + self.cp_len

    @property
    def n_data(self) -> int:
        return self.fft_size // 2 - 1 - len(self.pilot_indices)

    @property
    def data_indices(self) -> np.ndarray:
        mask = np.ones(self.fft_size // 2 - 1, dtype=bool)
        mask[np.asarray(self.pilot_indices, dtype=np.int64) - 1] = False
        return np.nonzero(mask)[0] + 1

    @property
    def symbol_rate(self) -> float:
        return self.sample_rate / self.frame_len

    def subcarrier_freqs(self) -> np.ndarray:
        """Center frequency of subcarriers 1..255 in Hz."""
        k = np.arange(1, self.fft_size // 2)
        return k * self.sample_rate / self.fft_size


@dataclass
class WaveformBuffer:
    """A sampled record with its rate and free-form bookkeeping."""

    samples: np.ndarray
    sample_rate: float
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass
class SubcarrierPlan:
    """Per-subcarrier bit and power assignment for columns k=1..255.

    bits[j] = 0 marks an unloaded tone, pilots carry fixed QPSK with
    power[j] = 1. Powers are normalized so their sum over active tones
    (loaded or pilot) equals the active count.
    """

    bits: np.ndarray
    power: np.ndarray
    pilot_mask: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.int64)
        self.power = np.asarray(self.power, dtype=float)
        self.pilot_mask = np.asarray(self.pilot_mask, dtype=bool)
        n = len(self.bits)
        if len(self.power) != n or len(self.pilot_mask) != n:
            raise PlanError("bits/power/pilot arrays must share one length")
        if np.any(self.bits < 0):
            raise PlanError("negative bit counts")
        if np.any(self.bits[self.pilot_mask] != 0):
            raise PlanError("pilot tones cannot carry payload bits")
        if np.any(self.power < 0):
            raise PlanError("negative powers")
        if np.any((self.power > 0) & ~self.active_mask):
            raise PlanError("power assigned to inactive tones")

    @property
    def active_mask(self) -> np.ndarray:
        return (self.bits > 0) | self.pilot_mask

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.active_mask))

    @property
    def bits_per_frame(self) -> int:
        return int(self.bits.sum())

    @property
    def total_power(self) -> float:
        return float(self.power[self.active_mask].sum())


def uniform_plan(params: DmtParams, bits: int = 2) -> SubcarrierPlan:
    """Same constellation on every data tone; used for training bursts."""
    n = params.fft_size // 2 - 1
    b = np.zeros(n, dtype=np.int64)
    p = np.zeros(n)
    pilot = np.zeros(n, dtype=bool)
    pilot[np.asarray(params.pilot_indices, dtype=np.int64) - 1] = True
    b[~pilot] = bits
    p[:] = 1.0
    return SubcarrierPlan(b, p, pilot)


def pilot_symbols(params: DmtParams) -> np.ndarray:
    """The fixed unit-power QPSK pilot values, one per pilot tone."""
    rng = np.random.default_rng(271828)
    labels = rng.integers(0, 4, size=len(params.pilot_indices))
    return qam.map_labels(labels, 4)


def bit_offsets(plan: SubcarrierPlan) -> np.ndarray:
    """Start position of each tone's bit group within a frame's bits."""
    return np.concatenate([[0], np.cumsum(plan.bits)[:-1]])


def map_bits(bits: np.ndarray, plan: SubcarrierPlan,
             params: DmtParams) -> np.ndarray:
    """Pack a bit stream into frequency frames according to the plan.

    Bits are consumed in ascending subcarrier order, MSB first within a
    symbol. Accepts any whole number of frames' worth of bits; returns
    a (n_frames, 255) complex array (squeezed to (255,) for one frame).
    """
    bits = np.asarray(bits).ravel()
    per_frame = plan.bits_per_frame
    if per_frame == 0:
        raise PlanError("plan carries no bits")
    if len(bits) % per_frame:
        raise FrameSizeError(
            f"{len(bits)} bits do not tile into {per_frame}-bit frames")
    n_frames = len(bits) // per_frame
    bits = bits.reshape(n_frames, per_frame)

    frames = np.zeros((n_frames, len(plan.bits)), dtype=complex)
    amp = np.sqrt(plan.power)
    offs = bit_offsets(plan)
    for b in np.unique(plan.bits[plan.bits > 0]):
        cols = np.nonzero(plan.bits == b)[0]
        # Tones sharing an order are mapped in one vectorized pass.
        pick = (offs[cols][:, None] + np.arange(b)).ravel()
        chunk = bits[:, pick].reshape(n_frames, len(cols), b)
        weights = 1 << np.arange(b - 1, -1, -1)
        labels = chunk @ weights
        frames[:, cols] = qam.constellation(1 << b)[labels] * amp[cols]
    frames[:, plan.pilot_mask] = pilot_symbols_for(plan, params)
    return frames if n_frames > 1 else frames[0]


def pilot_symbols_for(plan: SubcarrierPlan, params: DmtParams) -> np.ndarray:
    return pilot_symbols(params) * np.sqrt(plan.power[plan.pilot_mask])


def drive_scale(plan: SubcarrierPlan, params: DmtParams) -> float:
    """Deterministic factor giving the unit-RMS time waveform."""
    total = plan.total_power
    if total <= 0:
        raise PlanError("plan has no transmit power")
    return float(np.sqrt(params.fft_size / (2.0 * total)))


def modulate(frames: np.ndarray, plan: SubcarrierPlan,
             params: DmtParams, tx_gain: np.ndarray | None = None) -> np.ndarray:
    """Frames -> real sample stream (cyclic prefix included, RMS ~ 1).

    tx_gain, when given, is a per-tone real gain table applied right
    before the IFFT (front-end flattening lives there in the chip).
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=complex))
    n_frames, width = frames.shape
    half = params.fft_size // 2
    if width != half - 1:
        raise FrameSizeError(f"expected {half - 1} subcarriers, got {width}")
    if tx_gain is not None:
        frames = frames * tx_gain
    spectrum = np.zeros((n_frames, half + 1), dtype=complex)
    spectrum[:, 1:half] = frames
    x = np.fft.irfft(spectrum, n=params.fft_size, norm="ortho", axis=1)
    x = x * drive_scale(plan, params)
    with_cp = np.concatenate([x[:, -params.cp_len:], x], axis=1)
    return with_cp.reshape(-1)


def demodulate(samples: np.ndarray, params: DmtParams) -> np.ndarray:
    """Sample stream -> raw frequency frames (no scaling undone)."""
    samples = np.asarray(samples, dtype=float).ravel()
    if len(samples) % params.frame_len:
        raise FrameSizeError(
            f"{len(samples)} samples do not tile into "
            f"{params.frame_len}-sample frames")
    blocks = samples.reshape(-1, params.frame_len)[:, params.cp_len:]
    spectrum = np.fft.rfft(blocks, norm="ortho", axis=1)
    frames = spectrum[:, 1:params.fft_size // 2]
    return frames if frames.shape[0] > 1 else frames[0]


def clip(samples: np.ndarray, ratio: float, rms: float | None = None) -> np.ndarray:
    """Symmetric hard clip at ratio x RMS."""
    samples = np.asarray(samples, dtype=float)
    if rms is None:
        rms = float(np.sqrt(np.mean(samples ** 2)))
    limit = ratio * rms
    return np.clip(samples, -limit, limit)


def quantize(samples: np.ndarray, bits: int, full_scale: float) -> np.ndarray:
    """Mid-rise uniform quantizer with saturation at +-full_scale.

    Levels sit at (m + 1/2) * step for m in [-2^(bits-1), 2^(bits-1)-1],
    so a level center passes through unchanged.
    """
    if bits < 1:
        raise ValueError("quantizer needs at least 1 bit")
    n = 1 << bits
    step = 2.0 * full_scale / n
    idx = np.floor(np.asarray(samples, dtype=float) / step)
    np.clip(idx, -(n // 2), n // 2 - 1, out=idx)
    return (idx + 0.5) * step
