"""Receiver DSP: burst sync, one-tap equalization, demapping, FEC gate.

The equalizer is trained by least squares on known frames and then
tracks slow channel motion with a decision-directed leaky update,
falling back to pilot-only updates whenever the decided-symbol error
power exceeds twice the pilot error power (a bad-decision guard at low
SNR). All symbol decisions are deterministic, including boundary ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from . import qam
from .dmt import DmtParams, SubcarrierPlan, pilot_symbols
from .errors import (InsufficientDataError, InsufficientStatisticsError,
                     SyncFailureError)

FEC_LIMIT = 4.4e-3
FEC_OVERHEAD = 0.067
SYNC_THRESHOLD = 0.3


def synchronize(record: np.ndarray, preamble: np.ndarray,
                threshold: float = SYNC_THRESHOLD) -> int:
    """Locate the preamble by normalized cross-correlation.

    Returns the sample offset of the preamble start. Raises
    SyncFailureError when the best normalized peak is below threshold.
    """
    r = np.asarray(record, dtype=float).ravel()
    p = np.asarray(preamble, dtype=float).ravel()
    if len(r) < len(p):
        raise SyncFailureError("record shorter than the preamble")
    num = fftconvolve(r, p[::-1], mode="valid")
    csum = np.concatenate([[0.0], np.cumsum(r * r)])
    window_energy = csum[len(p):] - csum[:len(r) - len(p) + 1]
    denom = np.sqrt(window_energy * float(np.dot(p, p))) + 1e-30
    ncc = num / denom
    peak = int(np.argmax(ncc))
    if ncc[peak] < threshold:
        raise SyncFailureError(
            f"correlation peak {ncc[peak]:.3f} below threshold {threshold}")
    return peak


@dataclass
class EqualizerState:
    """One-tap frequency-domain equalizer with a leaky channel tracker."""

    h: np.ndarray
    delta: float = 1e-6
    rho: float = 0.99
    pilot_fallbacks: int = 0

    @property
    def weights(self) -> np.ndarray:
        return np.conj(self.h) / (np.abs(self.h) ** 2 + self.delta)


def train_equalizer(rx_frames: np.ndarray, ref_frames: np.ndarray,
                    delta: float = 1e-6, rho: float = 0.99) -> EqualizerState:
    """Least-squares channel fit over at least 16 known frames."""
    rx = np.atleast_2d(np.asarray(rx_frames, dtype=complex))
    ref = np.atleast_2d(np.asarray(ref_frames, dtype=complex))
    if rx.shape != ref.shape:
        raise InsufficientDataError("rx/ref training blocks differ in shape")
    if rx.shape[0] < 16:
        raise InsufficientDataError(
            f"{rx.shape[0]} training frames, need at least 16")
    energy = np.sum(np.abs(ref) ** 2, axis=0)
    good = energy > 1e-30
    h = np.zeros(rx.shape[1], dtype=complex)
    h[good] = np.sum(rx * np.conj(ref), axis=0)[good] / energy[good]
    return EqualizerState(h=h, delta=delta, rho=rho)


def _order_groups(plan: SubcarrierPlan) -> list[tuple[int, np.ndarray]]:
    """(order, tone columns) pairs for every constellation in the plan."""
    return [(1 << int(b), np.nonzero(plan.bits == b)[0])
            for b in np.unique(plan.bits[plan.bits > 0])]


def _decide_unit(z: np.ndarray, groups) -> np.ndarray:
    """Hard decisions on the unit-energy grid, grouped by order."""
    out = np.zeros_like(z)
    for m, cols in groups:
        out[cols] = qam.map_labels(qam.demap_symbols(z[cols], m), m)
    return out


def equalize_frames(state: EqualizerState, rx_frames: np.ndarray,
                    plan: SubcarrierPlan, params: DmtParams,
                    amplitude: np.ndarray | None = None,
                    update: bool = True) -> np.ndarray:
    """Equalize a frame block and track the channel in the background.

    amplitude[k] is the expected received magnitude of tone k relative
    to the unit constellation (plan power times any drive-scale ratio
    against the training normalization); defaults to sqrt(plan.power).
    Returns unit-grid symbols ready for demapping.
    """
    rx = np.atleast_2d(np.asarray(rx_frames, dtype=complex))
    if amplitude is None:
        amplitude = np.sqrt(plan.power)
    amplitude = np.where(plan.active_mask, amplitude, 1.0)

    pilots = pilot_symbols(params) * amplitude[plan.pilot_mask]
    data_mask = plan.bits > 0
    groups = _order_groups(plan)
    out = np.empty_like(rx)
    w = state.weights
    for i in range(rx.shape[0]):
        y = rx[i]
        z = w * y / amplitude
        out[i] = z
        decided = _decide_unit(z, groups)[data_mask]

        if not update:
            continue
        err_dd = np.mean(np.abs(z[data_mask] - decided) ** 2) if data_mask.any() else 0.0
        err_pilot = np.mean(np.abs(y[plan.pilot_mask] * w[plan.pilot_mask]
                                   - pilots) ** 2)
        x_hat = np.zeros_like(y)
        x_hat[data_mask] = decided * amplitude[data_mask]
        x_hat[plan.pilot_mask] = pilots
        if err_dd > 2.0 * err_pilot:
            upd = plan.pilot_mask
            state.pilot_fallbacks += 1
        else:
            upd = data_mask | plan.pilot_mask
        h_new = state.h.copy()
        h_new[upd] = (state.rho * state.h[upd]
                      + (1.0 - state.rho) * y[upd] / x_hat[upd])
        state.h = h_new
        w = state.weights
    return out if out.shape[0] > 1 else out[0]


def demap(eq_frames: np.ndarray, plan: SubcarrierPlan) -> np.ndarray:
    """Unit-grid symbols -> hard bits in subcarrier order, per frame."""
    z = np.atleast_2d(np.asarray(eq_frames, dtype=complex))
    n_frames = z.shape[0]
    per_frame = plan.bits_per_frame
    bits = np.zeros((n_frames, per_frame), dtype=np.int64)
    offs = np.concatenate([[0], np.cumsum(plan.bits)[:-1]])
    for b in np.unique(plan.bits[plan.bits > 0]):
        cols = np.nonzero(plan.bits == b)[0]
        m = 1 << int(b)
        labels = qam.demap_symbols(z[:, cols], m)
        shifts = np.arange(b - 1, -1, -1)
        group = (labels[..., None] >> shifts) & 1
        pos = (offs[cols][:, None] + np.arange(b)).ravel()
        bits[:, pos] = group.reshape(n_frames, -1)
    return bits.reshape(-1) if n_frames == 1 else bits


@dataclass
class BerReport:
    """Counted errors for one measurement point."""

    bit_errors: int
    bits_counted: int
    per_tone_errors: np.ndarray
    p_rec_dbm: float
    gross_bits_per_frame: int
    net_rate_bps: float
    fec_limit: float = FEC_LIMIT
    meta: dict = field(default_factory=dict)

    @property
    def pre_fec_ber(self) -> float:
        return self.bit_errors / self.bits_counted if self.bits_counted else 0.0

    @property
    def fec_pass(self) -> bool:
        return fec_gate(self.pre_fec_ber, self.bits_counted, self.fec_limit)


def fec_gate(pre_fec_ber: float, bits_counted: int,
             limit: float = FEC_LIMIT) -> bool:
    """Hard-decision FEC verdict; strictly below the limit passes.

    Demands enough bits that a BER at the limit would show about ten
    errors, otherwise the verdict would be noise.
    """
    needed = int(np.ceil(10.0 / limit))
    if bits_counted < needed:
        raise InsufficientStatisticsError(
            f"{bits_counted} bits counted, need {needed} to gate at {limit}")
    return pre_fec_ber < limit


def count_errors(rx_bits: np.ndarray, tx_bits: np.ndarray,
                 plan: SubcarrierPlan) -> tuple[int, np.ndarray]:
    """Total and per-tone bit error counts for whole frames."""
    rx_bits = np.asarray(rx_bits).reshape(-1, plan.bits_per_frame)
    tx_bits = np.asarray(tx_bits).reshape(rx_bits.shape)
    diff = rx_bits != tx_bits
    per_tone = np.zeros(len(plan.bits), dtype=np.int64)
    offs = np.concatenate([[0], np.cumsum(plan.bits)[:-1]])
    for j in np.nonzero(plan.bits > 0)[0]:
        b = plan.bits[j]
        per_tone[j] = int(diff[:, offs[j]:offs[j] + b].sum())
    return int(diff.sum()), per_tone
