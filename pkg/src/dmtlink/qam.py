"""Gray-coded QAM constellations and closed-form bit-error rates.

Orders 2..256 in powers of two. Square orders (4, 16, 64, 256) use the
classic per-axis reflected-binary Gray layout; the in-between orders
(8, 32, 128) use rectangular grids (2^ceil(b/2) x 2^floor(b/2) levels)
which keep an exact per-axis Gray labelling at a small average-power
penalty over true cross constellations. All constellations are scaled
to unit average energy.

A symbol label is the integer formed by its bits MSB-first; the high
ceil(b/2) bits select the I level, the rest the Q level. BPSK puts
label 0 at -1+0j and label 1 at +1+0j.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erfc

SUPPORTED_ORDERS = (2, 4, 8, 16, 32, 64, 128, 256)


class ModulationOrderError(ValueError):
    """Raised for QAM orders outside the supported set."""


def qfunc(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def _check_order(m: int) -> int:
    if m not in SUPPORTED_ORDERS:
        raise ModulationOrderError(
            f"unsupported QAM order {m}; expected one of {SUPPORTED_ORDERS}")
    return int(np.log2(m))


def _axis_bits(b: int) -> tuple[int, int]:
    # I axis gets the extra bit for odd b (rectangular grid, wide in I).
    return (b + 1) // 2, b // 2


def _gray_encode(idx: np.ndarray) -> np.ndarray:
    return idx ^ (idx >> 1)


def _pam_levels(nbits: int) -> np.ndarray:
    """Gray-ordered PAM levels for an axis: index by the Gray label."""
    n = 1 << nbits
    if nbits == 0:
        return np.zeros(1)
    idx = np.arange(n)
    levels = np.empty(n)
    levels[_gray_encode(idx)] = 2 * idx - (n - 1)
    return levels


def average_energy(m: int) -> float:
    """Unnormalized mean symbol energy of the rectangular grid for order m."""
    b = _check_order(m)
    bi, bq = _axis_bits(b)
    li, lq = 1 << bi, 1 << bq
    return ((li * li - 1) + (lq * lq - 1)) / 3.0


def constellation(m: int) -> np.ndarray:
    """Unit-energy constellation, indexed by the b-bit symbol label."""
    b = _check_order(m)
    bi, bq = _axis_bits(b)
    lev_i = _pam_levels(bi)
    lev_q = _pam_levels(bq)
    labels = np.arange(m)
    gi = labels >> bq
    gq = labels & ((1 << bq) - 1)
    pts = lev_i[gi] + 1j * lev_q[gq]
    return pts / np.sqrt(average_energy(m))


def bits_to_labels(bits: np.ndarray, b: int) -> np.ndarray:
    """Pack groups of b bits (MSB first) into integer symbol labels."""
    bits = np.asarray(bits, dtype=np.int64).reshape(-1, b)
    weights = 1 << np.arange(b - 1, -1, -1)
    return bits @ weights


def labels_to_bits(labels: np.ndarray, b: int) -> np.ndarray:
    """Unpack integer labels into bits, MSB first, flattened."""
    labels = np.asarray(labels, dtype=np.int64).reshape(-1, 1)
    shifts = np.arange(b - 1, -1, -1)
    return ((labels >> shifts) & 1).reshape(-1)


def map_labels(labels: np.ndarray, m: int) -> np.ndarray:
    """Labels -> unit-energy symbols."""
    return constellation(m)[np.asarray(labels, dtype=np.int64)]


def demap_symbols(symbols: np.ndarray, m: int) -> np.ndarray:
    """Hard per-axis slicing of unit-energy symbols back to labels.

    A sample exactly on a decision boundary goes to the lower level
    index (ceil(u - 1/2) slicing), which keeps the decision
    deterministic across platforms.
    """
    b = _check_order(m)
    bi, bq = _axis_bits(b)
    scale = np.sqrt(average_energy(m))
    z = np.asarray(symbols) * scale

    def slice_axis(x, nbits):
        n = 1 << nbits
        u = (x + (n - 1)) / 2.0
        idx = np.ceil(u - 0.5).astype(np.int64)
        np.clip(idx, 0, n - 1, out=idx)
        return _gray_encode(idx)

    gi = slice_axis(z.real, bi)
    if bq == 0:
        return gi
    gq = slice_axis(z.imag, bq)
    return (gi << bq) | gq


def analytic_ber(m: int, snr):
    """Gray-QAM bit-error rate on AWGN at per-symbol SNR (linear).

    Nearest-boundary expression plus the standard second Q term; exact
    for BPSK, within a few percent of exact elsewhere down to 1e-6.
    For rectangular orders the two axes contribute independently.
    """
    b = _check_order(m)
    snr = np.asarray(snr, dtype=float)
    if m == 2:
        return qfunc(np.sqrt(2.0 * snr))
    bi, bq = _axis_bits(b)
    li, lq = 1 << bi, 1 << bq
    x = np.sqrt(6.0 * snr / (li * li + lq * lq - 2))
    errs = np.zeros_like(snr)
    for n in (li, lq):
        if n < 2:
            continue
        errs = errs + 2.0 * (n - 1) / n * qfunc(x) + 2.0 * (n - 2) / n * qfunc(3.0 * x)
    return errs / b
