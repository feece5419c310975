"""Constellation mapping, Gray labeling, and the analytic BER curve."""

import numpy as np
import pytest
from scipy import special

from dmtlink import qam


def q_oracle(x):
    # Standard normal tail, written out independently of the package.
    return 0.5 * special.erfc(np.asarray(x) / np.sqrt(2.0))


def test_unit_average_energy():
    for m in qam.SUPPORTED_ORDERS:
        pts = qam.constellation(m)
        assert len(pts) == m
        assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_map_demap_roundtrip_all_orders():
    rng = np.random.default_rng(7)
    for m in qam.SUPPORTED_ORDERS:
        labels = rng.integers(0, m, size=4096)
        sym = qam.map_labels(labels, m)
        assert np.array_equal(qam.demap_symbols(sym, m), labels)


def test_bits_labels_roundtrip():
    rng = np.random.default_rng(11)
    for b in range(1, 9):
        labels = rng.integers(0, 1 << b, size=1000)
        bits = qam.labels_to_bits(labels, b)
        assert bits.shape == (1000 * b,)
        assert np.array_equal(qam.bits_to_labels(bits, b), labels)
    # MSB first: label 1 with 3 bits is 001
    assert list(qam.labels_to_bits(np.array([1]), 3)) == [0, 0, 1]


def test_bpsk_points():
    sym = qam.map_labels(np.array([0, 1]), 2)
    assert sym[0] == pytest.approx(-1 + 0j)
    assert sym[1] == pytest.approx(1 + 0j)


def test_qpsk_points_and_gray_property():
    pts = qam.constellation(4)
    want = {(s * (a + 1j * b)) for a in (-1, 1) for b in (-1, 1)
            for s in (1 / np.sqrt(2),)}
    got = {complex(round(p.real, 12), round(p.imag, 12)) for p in pts}
    assert got == {complex(round(w.real, 12), round(w.imag, 12)) for w in want}


def _nearest_pairs(pts):
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    dmin = d.min()
    return np.argwhere(np.isclose(d, dmin, rtol=1e-9))


@pytest.mark.parametrize("m", [4, 16, 64, 256])
def test_gray_neighbors_differ_in_one_bit(m):
    pts = qam.constellation(m)
    for i, j in _nearest_pairs(pts):
        assert bin(i ^ j).count("1") == 1


def test_cross_constellations_use_both_axes():
    # Odd bit counts put the extra bit on the in-phase axis.
    for m, ni, nq in [(8, 4, 2), (32, 8, 4), (128, 16, 8)]:
        pts = qam.constellation(m)
        assert len(np.unique(np.round(pts.real, 9))) == ni
        assert len(np.unique(np.round(pts.imag, 9))) == nq


def test_demap_boundary_is_deterministic():
    # A symbol exactly between two levels goes to the lower level.
    m = 16
    z = np.array([0.0 + 3j / np.sqrt(10.0)])
    lab = qam.demap_symbols(z, m)
    back = qam.map_labels(lab, m)
    assert back[0].real == pytest.approx(-1 / np.sqrt(10.0))
    assert back[0].imag == pytest.approx(3 / np.sqrt(10.0))


def test_unsupported_order_raises():
    with pytest.raises(qam.ModulationOrderError):
        qam.constellation(3)
    with pytest.raises(qam.ModulationOrderError):
        qam.map_labels(np.array([0]), 512)


def test_analytic_ber_bpsk_closed_form():
    snr = 10 ** (np.linspace(-1, 1.2, 12))
    got = qam.analytic_ber(2, snr)
    assert np.allclose(got, q_oracle(np.sqrt(2 * snr)), rtol=1e-12)


def test_analytic_ber_monotone():
    snr = 10 ** (np.linspace(-0.5, 2.5, 40))
    for m in (4, 16, 64, 256):
        ber = qam.analytic_ber(m, snr)
        assert np.all(np.diff(ber) < 0)
    # Denser constellations are strictly worse at a fixed SNR.
    at20 = [qam.analytic_ber(m, 100.0) for m in (4, 16, 64, 256)]
    assert np.all(np.diff(at20) > 0)


def _mc_ber(m, snr, n_sym, seed):
    """Monte Carlo bit error rate through an AWGN channel."""
    rng = np.random.default_rng(seed)
    b = int(np.log2(m))
    labels = rng.integers(0, m, size=n_sym)
    x = qam.map_labels(labels, m)
    sigma = np.sqrt(1.0 / snr)
    noise = (rng.standard_normal(n_sym) + 1j * rng.standard_normal(n_sym))
    y = x + sigma * noise / np.sqrt(2.0)
    errs = qam.labels_to_bits(qam.demap_symbols(y, m), b) \
        ^ qam.labels_to_bits(labels, b)
    return errs.sum() / (n_sym * b), n_sym * b


@pytest.mark.parametrize("m,snr_db", [(4, 9.8), (16, 16.5), (64, 22.0)])
def test_analytic_ber_matches_monte_carlo(m, snr_db):
    snr = 10 ** (snr_db / 10.0)
    ber, nbits = _mc_ber(m, snr, 2_000_000, seed=100 + m)
    pred = float(qam.analytic_ber(m, snr))
    # three-sigma band from the binomial counting error
    sigma = np.sqrt(pred * (1 - pred) / nbits)
    assert abs(ber - pred) < 3 * sigma + 0.02 * pred


def test_qpsk_ber_scale_at_ten_db():
    # 4-QAM around 9.8 dB sits at the 1e-3 decade.
    val = float(qam.analytic_ber(4, 10 ** 0.98))
    assert 0.5e-3 < val < 2e-3
