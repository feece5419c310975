"""Per-subcarrier SNR estimation and rate-adaptive bit/power loading.

The loader runs in three stages: continuous water-filling against the
gap-adjusted SNR, an integer refinement that grants or removes single
bits by marginal power cost, and an equal-margin power assignment that
is renormalized to the active-tone budget. The marginal cost of the
(b+1)-th bit on tone k is gamma * 2^b / snr_k, which is convex in b,
so the greedy refinement reaches the minimum-power integer allocation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import qam
from .dmt import DmtParams, SubcarrierPlan
from .errors import InfeasibleRateError, InsufficientDataError, PlanError

SNR_CAP_DB = 60.0
SNR_FLOOR_DB = -60.0
# Reference error ratio at which the per-order SNR requirements are
# evaluated; matches the hard-decision FEC input limit.
BER_REFERENCE = 4.4e-3


@lru_cache(maxsize=None)
def gamma_requirements(max_bits: int,
                       ber: float = BER_REFERENCE) -> np.ndarray:
    """Linear SNR each order b=1..max_bits needs to sit at `ber`."""
    need = np.empty(max_bits)
    for b in range(1, max_bits + 1):
        m = 1 << b
        need[b - 1] = brentq(
            lambda s: qam.analytic_ber(m, s) - ber, 1e-3, 1e7, xtol=1e-9)
    need.setflags(write=False)
    return need


@dataclass
class SnrProfile:
    """Per-subcarrier SNR in dB for tones k=1..255 at unit tone power."""

    snr_db: np.ndarray

    def __post_init__(self):
        self.snr_db = np.asarray(self.snr_db, dtype=float)

    @property
    def linear(self) -> np.ndarray:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def alive(self) -> np.ndarray:
        return self.snr_db > SNR_FLOOR_DB + 0.5


def estimate_snr(rx_frames: np.ndarray, ref_frames: np.ndarray,
                 measured: np.ndarray | None = None) -> SnrProfile:
    """Least-squares channel fit and residual-based SNR per subcarrier.

    rx_frames, ref_frames: (n_frames, 255) received and known symbols.
    measured: optional bool mask of tones actually probed; the rest are
    filled by linear interpolation in dB.

    SNR_k = |H_k|^2 E[|X_k|^2] / E[|Y_k - H_k X_k|^2], clamped to
    [-60, +60] dB with -60 as the dead-tone sentinel.
    """
    rx = np.atleast_2d(np.asarray(rx_frames, dtype=complex))
    ref = np.atleast_2d(np.asarray(ref_frames, dtype=complex))
    if rx.shape != ref.shape:
        raise InsufficientDataError("rx/ref frame blocks differ in shape")
    if rx.shape[0] < 2:
        raise InsufficientDataError("need at least 2 frames to split signal "
                                    "from noise")

    ref_energy = np.mean(np.abs(ref) ** 2, axis=0)
    cross = np.mean(rx * np.conj(ref), axis=0)
    dead = ref_energy < 1e-30
    h = np.where(dead, 0.0, cross / np.where(dead, 1.0, ref_energy))
    resid = np.mean(np.abs(rx - h[None, :] * ref) ** 2, axis=0)
    sig = np.abs(h) ** 2 * ref_energy
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.where((resid > 0) & ~dead, sig / resid, np.inf)
    snr_db = 10.0 * np.log10(np.maximum(snr, 1e-30))
    snr_db = np.clip(snr_db, SNR_FLOOR_DB, SNR_CAP_DB)
    snr_db[dead | (sig <= 0)] = SNR_FLOOR_DB

    if measured is not None:
        measured = np.asarray(measured, dtype=bool)
        if not measured.any():
            raise InsufficientDataError("no measured tones to interpolate from")
        idx = np.arange(len(snr_db))
        snr_db = np.interp(idx, idx[measured], snr_db[measured])
    return SnrProfile(snr_db)


def _bisect_waterlevel(inv_quality: np.ndarray, budget: float) -> float:
    """Find mu with sum(max(0, mu - inv_quality)) = budget."""
    lo = float(inv_quality.min())
    hi = float(inv_quality.min()) + budget + float(inv_quality.max())
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(0.0, mid - inv_quality)) < budget:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def waterfill(profile: SnrProfile, target_bits: int, params: DmtParams,
              gamma_db: float = 6.0) -> SubcarrierPlan:
    """Allocate target_bits per frame across the data tones.

    Raises InfeasibleRateError (carrying the achievable maximum) when
    even max_bits on every usable tone cannot meet the target.
    """
    if target_bits < 1:
        raise PlanError("bit target must be positive")
    n = len(profile.snr_db)
    gamma = 10.0 ** (gamma_db / 10.0)
    pilot_mask = np.zeros(n, dtype=bool)
    pilot_mask[np.asarray(params.pilot_indices, dtype=np.int64) - 1] = True

    snr = profile.linear.copy()
    usable = profile.alive & ~pilot_mask
    ceiling = int(params.max_bits) * int(np.count_nonzero(usable))
    if target_bits > ceiling:
        raise InfeasibleRateError(target_bits, ceiling)

    bits = np.zeros(n, dtype=np.int64)
    if usable.any():
        inv_q = gamma / snr[usable]
        mu = _bisect_waterlevel(inv_q, float(np.count_nonzero(usable)))
        p_cont = np.maximum(0.0, mu - inv_q)
        b_cont = np.log2(1.0 + p_cont / inv_q)
        bits[usable] = np.clip(np.floor(b_cont), 0, params.max_bits).astype(np.int64)

    # Marginal cost of the next bit on each tone; inf where not allowed.
    def grant_cost(b):
        c = np.full(n, np.inf)
        ok = usable & (b < params.max_bits)
        c[ok] = gamma * (2.0 ** b[ok]) / snr[ok]
        return c

    def removal_saving(b):
        s = np.full(n, -np.inf)
        ok = usable & (b > 0)
        s[ok] = gamma * (2.0 ** (b[ok] - 1)) / snr[ok]
        return s

    total = int(bits.sum())
    while total < target_bits:
        k = int(np.argmin(grant_cost(bits)))  # argmin takes the lowest index on ties
        bits[k] += 1
        total += 1
    while total > target_bits:
        k = int(np.argmax(removal_saving(bits)))
        bits[k] -= 1
        total -= 1

    # Equal post-equalizer margin at each tone's assigned order: power
    # proportional to the SNR that order actually requires, so the
    # per-tone error ratio comes out uniform across mixed orders. The
    # 2^b-1 capacity proxy would over-protect square constellations
    # against the odd-bit ones by up to ~1.8 dB.
    power = np.zeros(n)
    loaded = bits > 0
    if loaded.any():
        need = gamma_requirements(params.max_bits)[bits[loaded] - 1] \
            / snr[loaded]
        power[loaded] = need * (np.count_nonzero(loaded) / need.sum())
    power[pilot_mask] = 1.0
    return SubcarrierPlan(bits, power, pilot_mask)


def plan_total_power_cost(bits: np.ndarray, snr_linear: np.ndarray,
                          gamma: float) -> float:
    """Total power gamma * (2^b - 1) / snr needed by an allocation."""
    bits = np.asarray(bits)
    return float(np.sum(gamma * (2.0 ** bits - 1.0) / snr_linear * (bits > 0)))


def write_loading_csv(path, profile: SnrProfile,
                      plan: SubcarrierPlan | None = None) -> None:
    """Serialize the per-tone profile (and plan, if given) to CSV."""
    n = len(profile.snr_db)
    bits = plan.bits if plan is not None else np.zeros(n, dtype=int)
    power = plan.power if plan is not None else np.zeros(n)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "snr_db", "bits", "power"])
        for j in range(n):
            w.writerow([j + 1, f"{profile.snr_db[j]:.6f}",
                        int(bits[j]), f"{power[j]:.6f}"])


def read_loading_csv(path) -> tuple[SnrProfile, SubcarrierPlan]:
    """Inverse of write_loading_csv; pilot tones are inferred from the
    standard pilot grid."""
    idx, snr_db, bits, power = [], [], [], []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header[:4] != ["index", "snr_db", "bits", "power"]:
            raise PlanError(f"unexpected loading CSV header {header}")
        for row in r:
            idx.append(int(row[0]))
            snr_db.append(float(row[1]))
            bits.append(int(row[2]))
            power.append(float(row[3]))
    order = np.argsort(idx)
    snr_db = np.asarray(snr_db)[order]
    bits = np.asarray(bits, dtype=np.int64)[order]
    power = np.asarray(power)[order]
    pilot_mask = np.zeros(len(bits), dtype=bool)
    pilots = [i for i in DmtParams().pilot_indices if i <= len(bits)]
    pilot_mask[np.asarray(pilots) - 1] = True
    return SnrProfile(snr_db), SubcarrierPlan(bits, power, pilot_mask)
