"""Electrical composition and IM/DD optical link model.

Composite construction: each radio band is hard-clipped at baseband,
upsampled to the DAC rate, shifted to its IF slot around center_freq_hz, and
taken real; the PAM lane is added at baseband with the wired-to-wireless
power ratio set by configuration.

Optical chain: quadrature-biased MZM field response, chromatic dispersion as
an all-pass on the field, square-law detection, a single-pole receiver
lowpass, and additive Gaussian noise whose variance follows a calibrated
received-optical-power curve.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dsp import frequency_shift, gaussian_band_response, resample_rational
from .signals import ComplexSignal

C_LIGHT = 299792458.0


class CompositeLayoutError(ValueError):
    """Configured band placement overlaps spectrally."""


@dataclass(frozen=True)
class NoiseCalibration:
    """Received-power to noise-sigma curve for the detector.

    sigma applies to the unit-RMS normalized photocurrent:
    sigma(P) = ref_sigma * 10^(-slope_db_per_db * (P - ref_power_dbm) / 20),
    i.e. electrical SNR moves slope_db_per_db dB per optical dB. The default
    slope of 1.0 models a shot/excess-noise limited APD front end.
    """

    ref_power_dbm: float = -16.0
    ref_sigma: float = 0.174
    slope_db_per_db: float = 1.0

    def sigma(self, rx_power_dbm: float) -> float:
        exp = -self.slope_db_per_db * (rx_power_dbm - self.ref_power_dbm) / 20.0
        return self.ref_sigma * 10.0 ** exp


@dataclass(frozen=True)
class LinkConfig:
    dac_rate: float = 20e9
    center_freq_hz: float = 5.5e9
    guard_band_hz: float = 15e6
    clip_ratio: float = 0.8
    mzm_index: float = 0.065
    fiber_km: float = 25.0
    dispersion_ps_nm_km: float = 17.0
    wavelength_nm: float = 1550.0
    apd_f3db_hz: float = 5.5e9
    pam_baud: float = 5.5e9
    wwpr_target_db: float = -1.36
    rx_power_dbm: float | None = None
    noise: NoiseCalibration | None = NoiseCalibration()

    def __post_init__(self):
        if self.dac_rate <= 0 or self.center_freq_hz <= 0:
            raise ValueError("rates and center frequency must be positive")
        if not 0 < self.clip_ratio <= 1:
            raise ValueError("clip_ratio must be in (0, 1]")
        if self.guard_band_hz < 0:
            raise ValueError("guard band must be non-negative")
        if self.rx_power_dbm is not None and self.noise is None:
            raise ValueError("rx_power_dbm set but no noise calibration given")


def clip(x: np.ndarray, ratio: float) -> np.ndarray:
    """Hard clip at ratio * max magnitude.

    Complex signals are clipped in envelope (phase kept); real signals are
    clipped in absolute value with sign kept. ratio = 1 is the identity.
    """
    if not 0 < ratio <= 1:
        raise ValueError("ratio must be in (0, 1]")
    x = np.asarray(x)
    if x.size == 0:
        return x.copy()
    limit = ratio * np.max(np.abs(x))
    if np.iscomplexobj(x):
        mag = np.abs(x)
        factor = np.where(mag > limit, limit / np.maximum(mag, 1e-300), 1.0)
        return x * factor
    return np.clip(x, -limit, limit)


def band_centers(cfg: LinkConfig, band_bw_hz: float) -> np.ndarray:
    """The three IF band centers: {f_c - S, f_c, f_c + S}, S = bw + guard."""
    s = band_bw_hz + cfg.guard_band_hz
    return np.array([cfg.center_freq_hz - s, cfg.center_freq_hz, cfg.center_freq_hz + s])


def _check_layout(cfg: LinkConfig, band_bw_hz: float) -> np.ndarray:
    centers = band_centers(cfg, band_bw_hz)
    half = band_bw_hz / 2
    problems = []
    for i in range(len(centers) - 1):
        gap = (centers[i + 1] - half) - (centers[i] + half)
        if gap < 0:
            problems.append(f"bands {i} and {i + 1} overlap by {-gap:g} Hz")
    if centers[0] - half <= 0:
        problems.append("lowest band extends below DC")
    if centers[-1] + half >= cfg.dac_rate / 2:
        problems.append("highest band extends beyond Nyquist")
    # bands must stay out of the strong part of the PAM main lobe; the slot
    # near the first sinc null (at the baud rate) is the intended parking spot
    if centers[0] - half < 0.85 * cfg.pam_baud:
        problems.append(
            f"band edge {centers[0] - half:g} Hz reaches into the PAM main lobe "
            f"(below 0.85 x baud = {0.85 * cfg.pam_baud:g} Hz)")
    if problems:
        raise CompositeLayoutError("; ".join(problems))
    return centers


def assemble_composite(bands, pam: ComplexSignal | None, cfg: LinkConfig,
                       band_bw_hz: float) -> ComplexSignal:
    """Clip, upsample, IF-shift and sum the radio bands; add the PAM lane.

    bands are complex baseband ComplexSignals at a common modem rate; pam (if
    given) is a real waveform already at the DAC rate. Band power is
    equalized; the PAM is scaled to the configured wired-to-wireless ratio.
    """
    if len(bands) == 0:
        raise ValueError("need at least one band")
    centers = _check_layout(cfg, band_bw_hz)
    if len(bands) > len(centers):
        raise ValueError(f"{len(bands)} bands but only {len(centers)} slots")
    up = cfg.dac_rate / bands[0].sample_rate
    if abs(up - round(up)) > 1e-9:
        raise ValueError("DAC rate must be an integer multiple of the modem rate")
    wireless = None
    for sig, fc in zip(bands, centers):
        if sig.sample_rate != bands[0].sample_rate:
            raise ValueError("bands must share one sample rate")
        x = clip(sig.samples, cfg.clip_ratio)
        p = np.mean(np.abs(x) ** 2)
        if p > 0:
            x = x / np.sqrt(p)
        hi = resample_rational(ComplexSignal(x, sig.sample_rate), int(round(up)), 1)
        shifted = frequency_shift(hi, fc).samples.real
        wireless = shifted if wireless is None else wireless + shifted
    p_wireless = float(np.mean(wireless ** 2))
    if pam is None:
        return ComplexSignal(wireless, cfg.dac_rate)
    if pam.sample_rate != cfg.dac_rate:
        raise ValueError("PAM lane must be sampled at the DAC rate")
    pam_x = np.real(pam.samples)
    if pam_x.size != wireless.size:
        raise ValueError(f"PAM length {pam_x.size} != band length {wireless.size}")
    if p_wireless == 0:
        return ComplexSignal(pam_x.copy(), cfg.dac_rate)
    p_pam = float(np.mean(pam_x ** 2))
    if p_pam == 0:
        return ComplexSignal(wireless, cfg.dac_rate)
    target = 10.0 ** (cfg.wwpr_target_db / 10.0) * p_wireless
    return ComplexSignal(wireless + pam_x * np.sqrt(target / p_pam), cfg.dac_rate)


def dispersion_phase(cfg: LinkConfig, freq_hz) -> np.ndarray:
    """Group-velocity dispersion phase pi lambda^2 D L f^2 / c (radians)."""
    lam = cfg.wavelength_nm * 1e-9
    d = cfg.dispersion_ps_nm_km * 1e-6  # s/m^2
    length = cfg.fiber_km * 1e3
    return np.pi * lam * lam * d * length * np.asarray(freq_hz, dtype=float) ** 2 / C_LIGHT


def apply_optical_link(sig: ComplexSignal, cfg: LinkConfig,
                       rng: np.random.Generator | None = None) -> ComplexSignal:
    """Drive the MZM, propagate, detect, filter, and add calibrated noise.

    Returns the unit-RMS normalized AC-coupled photocurrent. Noise is drawn
    from rng only when cfg.rx_power_dbm is set; with noise off the output is
    a deterministic function of the input.
    """
    x = np.real(sig.samples)
    rms = np.sqrt(np.mean(x ** 2))
    if rms <= 0:
        raise ValueError("zero-power drive signal")
    drive = (cfg.mzm_index * np.pi / 4.0) * (x / rms)
    field = np.cos(np.pi / 4.0 + drive)
    if cfg.fiber_km > 0:
        f = np.fft.fftfreq(field.size, d=1.0 / sig.sample_rate)
        h = np.exp(1j * dispersion_phase(cfg, f))
        field = np.fft.ifft(np.fft.fft(field) * h)
    current = np.abs(field) ** 2
    f = np.fft.fftfreq(current.size, d=1.0 / sig.sample_rate)
    apd = 1.0 / (1.0 + 1j * f / cfg.apd_f3db_hz)
    current = np.fft.ifft(np.fft.fft(current) * apd).real
    current = current - current.mean()
    out_rms = np.sqrt(np.mean(current ** 2))
    if out_rms <= 0:
        raise ValueError("photocurrent vanished; check mzm_index")
    current = current / out_rms
    if cfg.rx_power_dbm is not None:
        if rng is None:
            raise ValueError("rx_power_dbm set: a seeded Generator is required")
        sigma = cfg.noise.sigma(cfg.rx_power_dbm)
        current = current + sigma * rng.standard_normal(current.size)
    return ComplexSignal(current, sig.sample_rate)


def extract_band(sig: ComplexSignal, center_hz: float, bandwidth_hz: float,
                 out_rate: float, order: int = 12) -> ComplexSignal:
    """Select one IF band and return its complex baseband at out_rate.

    Analytic-signal conversion, shift to baseband, super-Gaussian band mask,
    then rational decimation to out_rate.
    """
    x = sig.samples
    n = x.size
    spec = np.fft.fft(np.real(x)) if not np.iscomplexobj(x) else np.fft.fft(x)
    if not np.iscomplexobj(x):
        # analytic signal: keep positive frequencies (doubled)
        mask = np.zeros(n)
        mask[0] = 1.0
        if n % 2 == 0:
            mask[n // 2] = 1.0
            mask[1:n // 2] = 2.0
        else:
            mask[1:(n + 1) // 2] = 2.0
        spec = spec * mask
    analytic = np.fft.ifft(spec)
    base = frequency_shift(ComplexSignal(analytic, sig.sample_rate), -center_hz)
    h = gaussian_band_response(n, sig.sample_rate, 0.0, bandwidth_hz, order)
    filtered = np.fft.ifft(np.fft.fft(base.samples) * h)
    down = sig.sample_rate / out_rate
    if abs(down - round(down)) > 1e-9:
        raise ValueError("sample rate must be an integer multiple of out_rate")
    return resample_rational(ComplexSignal(filtered, sig.sample_rate), 1, int(round(down)))


def awgn(sig: ComplexSignal, snr_db: float,
         rng: np.random.Generator | None = None, seed=None) -> ComplexSignal:
    """Add white Gaussian noise at an exactly measured SNR.

    The generated noise vector is rescaled so that the realized
    signal-to-noise power ratio equals snr_db. Complex signals get circular
    noise, real signals real noise.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    x = sig.samples
    if x.size == 0:
        raise ValueError("empty signal")
    p_sig = np.mean(np.abs(x) ** 2)
    if p_sig <= 0:
        raise ValueError("zero-power signal")
    target = p_sig / 10.0 ** (snr_db / 10.0)
    if np.iscomplexobj(x):
        noise = rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size)
    else:
        noise = rng.standard_normal(x.size)
    noise = noise * np.sqrt(target / np.mean(np.abs(noise) ** 2))
    return ComplexSignal(x + noise, sig.sample_rate)
