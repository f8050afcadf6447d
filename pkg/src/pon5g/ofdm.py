"""CP-OFDM modem with single-tap frequency-domain equalization.

The numerology config here is shared by the filtered waveforms: N-point IFFT,
n_active subcarriers straddling DC symmetrically with the DC bin unused.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import ComplexSignal

EQ_MAGNITUDE_FLOOR = 1e-6


@dataclass(frozen=True)
class MulticarrierConfig:
    n_fft: int = 1024
    n_active: int = 78
    cp_len: int = 32
    subcarrier_spacing_hz: float = 1.953125e6

    def __post_init__(self):
        if self.n_fft < 2 or self.n_active < 2:
            raise ValueError("n_fft and n_active must be >= 2")
        if self.n_active % 2:
            raise ValueError("n_active must be even (bins straddle DC)")
        if self.n_active >= self.n_fft - 1:
            raise ValueError("n_active must leave room for DC and guards")
        if self.cp_len < 0 or self.cp_len >= self.n_fft:
            raise ValueError("cp_len must be in [0, n_fft)")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("subcarrier spacing must be positive")

    @property
    def sample_rate(self) -> float:
        return self.n_fft * self.subcarrier_spacing_hz

    @property
    def band_bw_hz(self) -> float:
        """Occupied bandwidth of the active subcarriers."""
        return self.n_active * self.subcarrier_spacing_hz

    @property
    def symbol_len(self) -> int:
        return self.n_fft + self.cp_len

    @property
    def bit_rate_qam16(self) -> float:
        """Raw payload rate ignoring CP overhead."""
        return self.n_active * self.subcarrier_spacing_hz * 4


def active_bins(cfg: MulticarrierConfig) -> np.ndarray:
    """Signed active bin indices in ascending spectral order (DC skipped)."""
    half = cfg.n_active // 2
    return np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])


def active_bin_indices(cfg: MulticarrierConfig) -> np.ndarray:
    """Active bins as indices into a length-n_fft FFT vector."""
    return active_bins(cfg) % cfg.n_fft


@dataclass
class ChannelEstimate:
    """Per-active-subcarrier complex gains, spectral order."""

    gains: np.ndarray

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=complex)
        if self.gains.ndim != 1:
            raise ValueError("gains must be a 1-D complex vector")


def equalize(grid: np.ndarray, est: ChannelEstimate | None) -> np.ndarray:
    """Single-tap zero-forcing division with a magnitude floor on the gains."""
    if est is None:
        return grid
    h = est.gains
    mag = np.abs(h)
    # tiny gains are floored in magnitude (phase kept); exact zeros divide by
    # the real-valued floor so the result stays finite
    unit = np.where(mag > 0, h / np.maximum(mag, 1e-300), 1.0)
    h_safe = np.where(mag >= EQ_MAGNITUDE_FLOOR, h, unit * EQ_MAGNITUDE_FLOOR)
    return grid / h_safe


def ofdm_modulate(grid: np.ndarray, cfg: MulticarrierConfig) -> ComplexSignal:
    """IFFT each row of an (n_symbols, n_active) grid and prepend the CP."""
    grid = np.atleast_2d(np.asarray(grid))
    if grid.shape[1] != cfg.n_active:
        raise ValueError(f"grid has {grid.shape[1]} columns, config wants {cfg.n_active}")
    spec = np.zeros((grid.shape[0], cfg.n_fft), dtype=complex)
    spec[:, active_bin_indices(cfg)] = grid
    body = np.fft.ifft(spec, axis=1)
    sym = np.concatenate([body[:, cfg.n_fft - cfg.cp_len:], body], axis=1)
    return ComplexSignal(sym.reshape(-1), cfg.sample_rate)


def ofdm_demodulate(sig: ComplexSignal, cfg: MulticarrierConfig,
                    est: ChannelEstimate | None = None) -> np.ndarray:
    """Strip CP, FFT, extract active bins, equalize. Returns a symbol grid."""
    x = sig.samples
    if x.size == 0 or x.size % cfg.symbol_len:
        raise ValueError(f"signal length {x.size} is not a multiple of "
                         f"symbol length {cfg.symbol_len}")
    frames = x.reshape(-1, cfg.symbol_len)[:, cfg.cp_len:]
    spec = np.fft.fft(frames, axis=1)
    return equalize(spec[:, active_bin_indices(cfg)], est)


def estimate_channel_ls(raw_grid: np.ndarray, known_grid: np.ndarray) -> ChannelEstimate:
    """Per-subcarrier least-squares gain from training symbols.

    raw_grid is the unequalized receive grid for the same known_grid payload;
    the LS solution is sum(Y conj(D)) / sum(|D|^2) per subcarrier.
    """
    raw = np.atleast_2d(np.asarray(raw_grid))
    known = np.atleast_2d(np.asarray(known_grid))
    if raw.shape != known.shape:
        raise ValueError("raw and known grids must have identical shapes")
    if np.any(known == 0):
        raise ValueError("known training grid contains zero symbols")
    num = np.sum(raw * np.conj(known), axis=0)
    den = np.sum(np.abs(known) ** 2, axis=0)
    return ChannelEstimate(num / den)
