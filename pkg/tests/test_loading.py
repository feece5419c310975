"""Bit/power loading: gap requirements, water-filling optimality, SNR probes."""

import itertools

import numpy as np
import pytest

from dmtlink import qam
from dmtlink.dmt import DmtParams, PILOT_INDICES
from dmtlink.errors import InfeasibleRateError, InsufficientDataError, PlanError
from dmtlink.loading import (BER_REFERENCE, SnrProfile, estimate_snr,
                             gamma_requirements, plan_total_power_cost,
                             read_loading_csv, waterfill, write_loading_csv)

TONE8 = DmtParams(n_subcarriers=9, pilot_indices=(), max_bits=4)


def test_gamma_requirements_hit_the_reference_ber():
    req = gamma_requirements(8)
    assert len(req) == 8
    for b, snr in enumerate(req, start=1):
        assert qam.analytic_ber(1 << b, snr) == pytest.approx(BER_REFERENCE,
                                                              rel=1e-6)
    assert np.all(np.diff(req) > 0)


def test_gamma_requirements_cache_and_custom_target():
    assert gamma_requirements(8) is gamma_requirements(8)
    stricter = gamma_requirements(8, ber=1e-4)
    assert np.all(np.asarray(stricter) > np.asarray(gamma_requirements(8)))


def brute_force_cost(snr_lin, gamma, target, max_bits):
    """Exhaustive minimum of sum gamma (2^b - 1) / snr over bit vectors."""
    n = len(snr_lin)
    combos = np.stack(np.meshgrid(*[np.arange(max_bits + 1)] * n,
                                  indexing="ij"), axis=-1).reshape(-1, n)
    combos = combos[combos.sum(axis=1) == target]
    cost = np.where(combos > 0, gamma * (2.0 ** combos - 1) / snr_lin, 0.0)
    return cost.sum(axis=1).min()


def test_waterfill_matches_exhaustive_search():
    """Greedy allocation reaches the global power optimum (200 draws)."""
    rng = np.random.default_rng(41)
    gamma_db = 6.0
    gamma = 10.0 ** (gamma_db / 10.0)
    for trial in range(200):
        snr_db = rng.uniform(-2.0, 28.0, size=8)
        if trial % 5 == 0:
            snr_db[rng.integers(0, 8)] = -60.0  # a dead tone now and then
        prof = SnrProfile(snr_db)
        ceiling = TONE8.max_bits * int(prof.alive.sum())
        target = int(rng.integers(1, ceiling + 1))
        plan = waterfill(prof, target, TONE8, gamma_db=gamma_db)
        assert plan.bits.sum() == target
        assert np.all(plan.bits[~prof.alive] == 0)
        got = plan_total_power_cost(plan.bits, prof.linear, gamma)
        best = brute_force_cost(prof.linear, gamma, target, TONE8.max_bits)
        assert got == pytest.approx(best, rel=1e-9), \
            f"trial {trial}: cost {got} vs exhaustive {best}"


def test_waterfill_flat_profile_loads_uniformly():
    params = DmtParams()
    prof = SnrProfile(np.full(255, 20.0))
    plan = waterfill(prof, 2 * params.n_data, params)
    assert np.all(plan.bits[~plan.pilot_mask] == 2)
    assert np.all(plan.bits[plan.pilot_mask] == 0)
    assert np.all(plan.power[plan.pilot_mask] == 1.0)


def test_waterfill_bits_follow_snr_ordering():
    rng = np.random.default_rng(42)
    for _ in range(20):
        snr_db = rng.uniform(0.0, 30.0, size=255)
        prof = SnrProfile(snr_db)
        plan = waterfill(prof, 600, DmtParams())
        data = ~plan.pilot_mask
        s, b = snr_db[data], plan.bits[data]
        # strictly better tone never carries fewer bits
        order = np.argsort(s)
        bs = b[order]
        ss = s[order]
        worse = np.maximum.accumulate(bs)
        jump = np.nonzero(np.diff(ss) > 1e-9)[0]
        assert np.all(bs[jump + 1] >= worse[jump] - TONE8.max_bits * 0 - 0), \
            "bit loads out of order vs SNR"


def test_waterfill_scale_covariance():
    rng = np.random.default_rng(43)
    snr_db = rng.uniform(5.0, 25.0, size=8)
    lo = waterfill(SnrProfile(snr_db), 16, TONE8)
    hi = waterfill(SnrProfile(snr_db + 10.0), 16, TONE8)
    assert hi.bits.sum() == lo.bits.sum() == 16
    # a uniformly better channel never demands more total power
    g = 10.0 ** 0.6
    c_lo = plan_total_power_cost(lo.bits, 10 ** (snr_db / 10), g)
    c_hi = plan_total_power_cost(hi.bits, 10 ** ((snr_db + 10) / 10), g)
    assert c_hi < c_lo


def test_waterfill_power_normalization():
    rng = np.random.default_rng(44)
    prof = SnrProfile(rng.uniform(5.0, 25.0, size=255))
    plan = waterfill(prof, 700, DmtParams())
    assert plan.total_power == pytest.approx(plan.n_active, rel=1e-9)
    assert np.all(plan.power[plan.pilot_mask] == 1.0)
    loaded = plan.bits > 0
    assert np.all(plan.power[loaded] > 0)
    assert np.all(plan.power[~loaded & ~plan.pilot_mask] == 0)


def test_waterfill_infeasible_target():
    prof = SnrProfile(np.full(8, 20.0))
    with pytest.raises(InfeasibleRateError) as exc:
        waterfill(prof, 8 * TONE8.max_bits + 1, TONE8)
    assert exc.value.max_bits == 8 * TONE8.max_bits
    assert exc.value.target_bits == 8 * TONE8.max_bits + 1
    with pytest.raises(PlanError):
        waterfill(prof, 0, TONE8)


def test_estimate_snr_flat_awgn():
    rng = np.random.default_rng(45)
    n_frames, n_tones = 256, 255
    snr_true = 10 ** (15.0 / 10)
    ref = (rng.standard_normal((n_frames, n_tones)) +
           1j * rng.standard_normal((n_frames, n_tones))) / np.sqrt(2)
    noise = (rng.standard_normal((n_frames, n_tones)) +
             1j * rng.standard_normal((n_frames, n_tones))) / np.sqrt(2)
    rx = ref + noise / np.sqrt(snr_true)
    prof = estimate_snr(rx, ref)
    dev = prof.snr_db - 15.0
    # per-tone spread is counting noise; the ensemble must be unbiased
    assert abs(dev.mean()) < 0.1
    assert np.percentile(np.abs(dev), 95) < 1.0
    assert np.max(np.abs(dev)) < 2.0


def test_estimate_snr_sentinels_and_caps():
    rng = np.random.default_rng(46)
    ref = (rng.standard_normal((32, 8)) + 1j * rng.standard_normal((32, 8)))
    rx = ref.copy()
    rx[:, 3] = 0.0  # dead lane
    prof = estimate_snr(rx, ref)
    assert prof.snr_db[3] == -60.0
    assert not prof.alive[3]
    assert np.all(prof.snr_db[[0, 1, 2, 4, 5, 6, 7]] == 60.0)  # noiseless cap
    with pytest.raises(InsufficientDataError):
        estimate_snr(rx[:1], ref[:1])


def test_estimate_snr_interpolates_unmeasured_tones():
    rng = np.random.default_rng(47)
    n_frames, n_tones = 64, 11
    true_db = np.linspace(10.0, 30.0, n_tones)
    ref = (rng.standard_normal((n_frames, n_tones)) +
           1j * rng.standard_normal((n_frames, n_tones))) / np.sqrt(2)
    sigma = 10 ** (-true_db / 20)
    noise = (rng.standard_normal((n_frames, n_tones)) +
             1j * rng.standard_normal((n_frames, n_tones))) / np.sqrt(2)
    rx = ref + sigma * noise
    measured = np.zeros(n_tones, dtype=bool)
    measured[::2] = True
    prof = estimate_snr(rx, ref, measured=measured)
    # interior holes sit on the dB line between their neighbors
    interp = prof.snr_db[1:-1:2]
    straddle = 0.5 * (prof.snr_db[0:-2:2] + prof.snr_db[2::2])
    assert np.allclose(interp, straddle, atol=1e-9)


def test_loading_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(48)
    params = DmtParams()
    prof = SnrProfile(rng.uniform(0.0, 30.0, size=255))
    plan = waterfill(prof, 500, params)
    path = tmp_path / "loading.csv"
    write_loading_csv(path, prof, plan)
    prof2, plan2 = read_loading_csv(path)
    assert np.allclose(prof2.snr_db, prof.snr_db, atol=1e-6)
    assert np.array_equal(plan2.bits, plan.bits)
    assert np.allclose(plan2.power, plan.power, atol=1e-6)
    assert np.array_equal(np.nonzero(plan2.pilot_mask)[0] + 1,
                          np.array(PILOT_INDICES))


def test_loading_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("tone,snr\n1,20\n")
    with pytest.raises(PlanError):
        read_loading_csv(path)
