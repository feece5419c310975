"""Electro-optic link model: chirped EML, dispersive fiber, photodiode.

The complex optical envelope is sampled at the DMT rate; numpy FFT sign
conventions are used throughout, so a tone exp(+j 2 pi f t) lives at
bin +f and the dispersive all-pass is exp(-j (beta2/2) w^2 L) on those
bins. With the intensity-to-field chirp model E = sqrt(P) exp(j (a/2)
ln(P/P0)), the detected small-signal response of the full link is

    H(f) = sqrt(1 + a^2) * cos(theta + arctan a),
    theta = pi D L lambda^2 f^2 / c   (signed by D),

so positive chirp over positive-D fiber pulls the first fading notch
below the unchirped pi/2 point, and pushes it up over negative-D
fiber. Analog filters are 2nd-order Bessel prototypes applied as exact
frequency responses on the record grid:

    H2(f) = 3 / (3 + 3 j x - x^2),  x = 1.3617 f / f3db,

where 1.3617 scales the phase-normalized polynomial B2(s) = s^2+3s+3 so
|H2(f3db)|^2 = 1/2. Receiver thermal and shot noise occupy the analog
photodiode band and alias when sampled below twice that band, which the
noise synthesis reproduces by folding the filtered PSD onto the
sampling grid; total receiver noise is therefore the same at 42 and
64 GS/s, as shared receiver hardware implies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dmt import WaveformBuffer
from .errors import ConfigError, RecordLengthError

C_LIGHT = 299792458.0
Q_ELECTRON = 1.602176634e-19
BESSEL2_MAG_X = 1.361654129  # |B2(j x)|^2 = 2 |B2(0)|^2 at this x

FIBER_GUARD = 1024  # samples tapered at each record end before the FFT


@dataclass(frozen=True)
class EmlParams:
    """Driver plus electro-absorption modulator."""

    driver_bandwidth_hz: float = 30e9
    eml_bandwidth_hz: float = 25e9
    modulation_index: float = 0.25
    chirp_alpha: float = 0.4604  # fitted, see calibrate.fit_chirp_alpha
    clamp_epsilon: float = 1e-3
    tanh_knee: float = 0.0  # 0 disables the soft compressor
    filters_enabled: bool = True


@dataclass(frozen=True)
class FiberParams:
    """A span of standard single-mode fiber."""

    length_km: float = 0.0
    wavelength_nm: float = 1309.0
    loss_db_per_km: float = 0.33
    dispersion_slope_s0: float = 0.092  # ps / (nm^2 km)
    lambda_zero_nm: float = 1310.0


@dataclass(frozen=True)
class ReceiverParams:
    """Photodiode, TIA and the attenuation in front of them."""

    responsivity: float = 0.8
    # A / sqrt(Hz), fitted by calibrate.fit_thermal_density
    thermal_noise_density: float = 48.863e-12
    shot_noise: bool = True
    pd_bandwidth_hz: float = 35e9
    voa_db: float = 0.0
    insertion_loss_db: float = 0.0
    tia_overload_dbm: float = -3.0
    tia_overload_slope: float = 1.5  # dB SNR lost per dB above overload
    noise_enabled: bool = True
    filters_enabled: bool = True


def bessel2_response(f: np.ndarray, f3db: float) -> np.ndarray:
    """Complex 2nd-order Bessel low-pass response, -3 dB at f3db."""
    x = BESSEL2_MAG_X * np.asarray(f, dtype=float) / f3db
    return 3.0 / (3.0 + 3j * x - x * x)


def bessel2_mag_sq(f: np.ndarray, f3db: float) -> np.ndarray:
    x = BESSEL2_MAG_X * np.asarray(f, dtype=float) / f3db
    x2 = x * x
    return 9.0 / (x2 * x2 + 3.0 * x2 + 9.0)


def _filter_real(samples: np.ndarray, sample_rate: float, f3db: float) -> np.ndarray:
    spec = np.fft.rfft(samples)
    freqs = np.fft.rfftfreq(len(samples), d=1.0 / sample_rate)
    return np.fft.irfft(spec * bessel2_response(freqs, f3db), n=len(samples))


def front_end_equalization(n_tones: int, fft_size: int, sample_rate: float,
                           eml: EmlParams, max_boost_db: float = 12.0) -> np.ndarray:
    """Per-tone drive gains that flatten the driver+EML magnitude response.

    The transmit chip carries a static gain table for its own front end
    (the response is known from characterization), so the spectrum at
    the modulator is flat no matter where the converter Nyquist edge
    sits relative to the analog roll-off. Because the driver restores
    the rated swing after the analog chain, the table costs nothing;
    without it the loading budget would price roll-off tones as if the
    swing were spent at the DAC rather than at the modulator. Gains are
    amplitude-domain, unit mean square, and capped at max_boost_db so a
    pathological clock override cannot demand unbounded boost. Phase is
    left to the receiver equalizer.
    """
    if not eml.filters_enabled:
        return np.ones(n_tones)
    f = np.arange(1, n_tones + 1) * (sample_rate / fft_size)
    mag2 = (bessel2_mag_sq(f, eml.driver_bandwidth_hz)
            * bessel2_mag_sq(f, eml.eml_bandwidth_hz))
    gain = mag2 ** -0.5
    gain = np.minimum(gain, 10.0 ** (max_boost_db / 20.0))
    gain /= np.sqrt(np.mean(gain ** 2))
    return gain


def dispersion_coefficient(wavelength_nm: float, s0: float = 0.092,
                           lambda_zero_nm: float = 1310.0) -> float:
    """Ordinary G.652 dispersion D(lambda) in ps/(nm km)."""
    lam = wavelength_nm
    if not 1260.0 <= lam <= 1650.0:
        raise ConfigError(f"wavelength {lam} nm outside the single-mode "
                          "window [1260, 1650]")
    return (s0 / 4.0) * (lam - lambda_zero_nm ** 4 / lam ** 3)


def beta2(fiber: FiberParams) -> float:
    """Group-velocity dispersion in s^2/m for the span's wavelength."""
    d_si = dispersion_coefficient(
        fiber.wavelength_nm, fiber.dispersion_slope_s0,
        fiber.lambda_zero_nm) * 1e-6  # ps/(nm km) -> s/m^2
    lam = fiber.wavelength_nm * 1e-9
    return -d_si * lam * lam / (2.0 * np.pi * C_LIGHT)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def eml_modulate(drive: WaveformBuffer, eml: EmlParams,
                 launch_power_dbm: float) -> WaveformBuffer:
    """Unit-RMS drive -> complex optical field at the launch power.

    The drive passes the driver and modulator bandwidth limits, maps to
    instantaneous power P = P0 (1 + m s) clamped at epsilon * P0, and
    picks up the transient chirp phase (a/2) ln(P/P0). The field is
    rescaled so its mean power equals the launch power exactly, which
    keeps the downstream dB bookkeeping closed-form.
    """
    s = np.asarray(drive.samples, dtype=float)
    if eml.filters_enabled:
        s = _filter_real(s, drive.sample_rate, eml.driver_bandwidth_hz)
        s = _filter_real(s, drive.sample_rate, eml.eml_bandwidth_hz)
        # The driver runs the modulator at its rated swing no matter
        # what the converter clock is, so the swing lost to the analog
        # roll-off is restored here rather than left as a hidden
        # penalty that scales with the sample rate.
        rms = np.sqrt(np.mean(s ** 2))
        if rms > 0:
            s = s / rms
    if eml.tanh_knee > 0:
        s = eml.tanh_knee * np.tanh(s / eml.tanh_knee)

    p0 = dbm_to_watt(launch_power_dbm)
    power = p0 * (1.0 + eml.modulation_index * s)
    floor = eml.clamp_epsilon * p0
    clamped = power < floor
    power = np.maximum(power, floor)

    field = np.sqrt(power) * np.exp(
        0.5j * eml.chirp_alpha * np.log(power / p0))
    field *= np.sqrt(p0 / np.mean(np.abs(field) ** 2))
    return WaveformBuffer(field, drive.sample_rate, meta={
        "power_dbm": launch_power_dbm,
        "clamp_fraction": float(np.mean(clamped)),
    })


def _dispersion_memory_samples(fiber: FiberParams, sample_rate: float) -> float:
    w_max = np.pi * sample_rate
    return abs(beta2(fiber)) * fiber.length_km * 1e3 * w_max * sample_rate


def fiber_propagate(field: WaveformBuffer, fiber: FiberParams) -> WaveformBuffer:
    """All-pass dispersion plus flat loss over one span.

    The record is extended by a cyclically wrapped, cosine-tapered
    guard of FIBER_GUARD samples at each end before the single whole-
    record FFT, then trimmed back, so edge wraparound never touches the
    interior. Records must be comfortably longer than the dispersion
    memory.
    """
    x = np.asarray(field.samples, dtype=complex)
    meta = dict(field.meta)
    loss_db = fiber.loss_db_per_km * fiber.length_km
    meta["power_dbm"] = meta.get("power_dbm", 0.0) - loss_db
    if fiber.length_km == 0:
        return WaveformBuffer(x.copy(), field.sample_rate, meta)

    g = FIBER_GUARD
    memory = _dispersion_memory_samples(fiber, field.sample_rate)
    if len(x) < max(4.0 * memory, 2 * g):
        raise RecordLengthError(
            f"record of {len(x)} samples too short for {fiber.length_km} km "
            f"(dispersion memory ~{memory:.0f} samples, guard {g})")

    ext = np.concatenate([x[-g:], x, x[:g]])
    ramp = 0.5 * (1.0 - np.cos(np.pi * (np.arange(g) + 0.5) / g))
    ext[:g] *= ramp
    ext[-g:] *= ramp[::-1]

    w = 2.0 * np.pi * np.fft.fftfreq(len(ext), d=1.0 / field.sample_rate)
    phase = np.exp(-0.5j * beta2(fiber) * w * w * fiber.length_km * 1e3)
    amp = 10.0 ** (-loss_db / 20.0)
    out = np.fft.ifft(np.fft.fft(ext) * phase) * amp
    return WaveformBuffer(out[g:-g], field.sample_rate, meta)


def imdd_response(f_hz: np.ndarray, fiber: FiberParams,
                  chirp_alpha: float) -> np.ndarray:
    """Small-signal intensity gain magnitude of the dispersive link.

    Normalized to 1 at DC by construction. Valid for modulation depths
    where second-order intermodulation is negligible.
    """
    d_si = dispersion_coefficient(
        fiber.wavelength_nm, fiber.dispersion_slope_s0,
        fiber.lambda_zero_nm) * 1e-6
    lam = fiber.wavelength_nm * 1e-9
    f = np.asarray(f_hz, dtype=float)
    theta = np.pi * d_si * lam * lam * fiber.length_km * 1e3 * f * f / C_LIGHT
    return np.abs(np.sqrt(1.0 + chirp_alpha ** 2)
                  * np.cos(theta + np.arctan(chirp_alpha)))


def notch_frequencies(fiber: FiberParams, chirp_alpha: float,
                      f_max_hz: float) -> np.ndarray:
    """Fading-null frequencies of the chirped link below f_max_hz."""
    d_si = dispersion_coefficient(
        fiber.wavelength_nm, fiber.dispersion_slope_s0,
        fiber.lambda_zero_nm) * 1e-6
    lam = fiber.wavelength_nm * 1e-9
    coef = np.pi * abs(d_si) * lam * lam * fiber.length_km * 1e3 / C_LIGHT
    if coef == 0:
        return np.array([])
    a = np.arctan(chirp_alpha)
    # cos(theta + a) = 0; theta carries the sign of D.
    first = np.pi / 2 - a if d_si > 0 else np.pi / 2 + a
    roots = []
    k = 0
    while True:
        theta_k = first + k * np.pi
        f_k = np.sqrt(theta_k / coef)
        if f_k > f_max_hz:
            break
        roots.append(f_k)
        k += 1
    return np.asarray(roots)


def folded_noise_shape(freqs: np.ndarray, sample_rate: float,
                       pd_bandwidth_hz: float, n_folds: int = 12) -> np.ndarray:
    """Aliased magnitude-squared PD response on the sampled grid.

    G(f) = sum_m |H2(f - m fs)|^2; multiplying a white density by G
    gives the in-band PSD an ideal sampler would see after the analog
    photodiode filter.
    """
    g = np.zeros_like(np.asarray(freqs, dtype=float))
    for m in range(-n_folds, n_folds + 1):
        g += bessel2_mag_sq(freqs - m * sample_rate, pd_bandwidth_hz)
    return g


def noise_equivalent_bandwidth(sample_rate: float, pd_bandwidth_hz: float,
                               n: int = 1 << 16) -> float:
    """Integral of the folded PD shape over [0, fs/2] in Hz."""
    f = np.linspace(0.0, sample_rate / 2.0, n)
    g = folded_noise_shape(f, sample_rate, pd_bandwidth_hz)
    return float(np.trapezoid(g, f))


def detect(field: WaveformBuffer, rx: ReceiverParams,
           rng: np.random.Generator | None = None) -> WaveformBuffer:
    """Square-law detection, receiver noise, AC coupling and AGC.

    Returns the unit-RMS electrical record; meta carries the exact
    closed-form received power and the overload penalty applied.
    """
    fs = field.sample_rate
    att_db = rx.voa_db + rx.insertion_loss_db
    p_rec_dbm = field.meta.get("power_dbm", 0.0) - att_db
    p_rec_w = dbm_to_watt(p_rec_dbm)

    current = rx.responsivity * np.abs(np.asarray(field.samples)) ** 2
    current = current * 10.0 ** (-att_db / 10.0)

    penalty_db = max(0.0, p_rec_dbm - rx.tia_overload_dbm) * rx.tia_overload_slope
    if penalty_db > 0:
        # Overdriving the TIA costs SNR; modeled as signal compression
        # ahead of the noise sources. The slope is stated against the
        # optical power axis, so it is doubled in electrical dB; a
        # received-power step of +1 dB then nets 2 - 2*slope dB of
        # electrical SNR, which turns the BER curve over at the
        # overload threshold for slopes above 1.
        current = current * 10.0 ** (-penalty_db / 10.0)

    if rx.filters_enabled:
        current = _filter_real(current, fs, rx.pd_bandwidth_hz)

    noise_rms = 0.0
    if rx.noise_enabled:
        if rng is None:
            rng = np.random.default_rng()
        density_sq = rx.thermal_noise_density ** 2
        if rx.shot_noise:
            density_sq += 2.0 * Q_ELECTRON * rx.responsivity * p_rec_w
        white = rng.standard_normal(len(current))
        if rx.filters_enabled:
            spec = np.fft.rfft(white)
            freqs = np.fft.rfftfreq(len(current), d=1.0 / fs)
            shape = folded_noise_shape(freqs, fs, rx.pd_bandwidth_hz)
            white = np.fft.irfft(spec * np.sqrt(shape), n=len(current))
        noise = white * np.sqrt(density_sq * fs / 2.0)
        noise_rms = float(np.sqrt(np.mean(noise ** 2)))
        current = current + noise

    current = current - np.mean(current)
    rms = np.sqrt(np.mean(current ** 2))
    if rms > 0:
        current = current / rms

    meta = dict(field.meta)
    meta.update({
        "p_rec_dbm": p_rec_dbm,
        "overload_penalty_db": penalty_db,
        "noise_rms_amps": noise_rms,
    })
    return WaveformBuffer(current, fs, meta)
