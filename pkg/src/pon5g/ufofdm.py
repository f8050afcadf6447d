"""UF-OFDM (universal-filtered) modem.

Each group of adjacent subcarriers is shaped by a Dolph-Chebyshev bandpass
after its own IFFT; one transmit symbol spans n_fft + filter_len - 1 samples
with no cyclic prefix. Receive processing zero-pads each symbol window to
2*n_fft, transforms, and keeps every second bin (the ones aligned with the
subcarrier grid); an equivalent receiver folds the window into n_fft samples
first and uses a single length-n_fft transform.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from .dsp import design_dolph_chebyshev
from .ofdm import ChannelEstimate, MulticarrierConfig, active_bins, equalize
from .signals import ComplexSignal, FilterTaps


@dataclass(frozen=True)
class UfofdmConfig(MulticarrierConfig):
    cp_len: int = 0
    n_subbands: int = 13
    subband_size: int = 6
    filter_len: int = 74
    filter_atten_db: float = 40.0

    def __post_init__(self):
        super().__post_init__()
        if self.cp_len != 0:
            raise ValueError("UF-OFDM transmits without a cyclic prefix")
        if self.n_subbands * self.subband_size != self.n_active:
            raise ValueError(
                f"{self.n_subbands} sub-bands of {self.subband_size} subcarriers "
                f"do not cover {self.n_active} active bins")
        if not 1 <= self.filter_len <= self.n_fft:
            raise ValueError("filter_len must be in [1, n_fft]")

    @property
    def symbol_span(self) -> int:
        """Transmit samples per symbol: linear convolution length."""
        return self.n_fft + self.filter_len - 1


def subband_bin_groups(cfg: UfofdmConfig) -> np.ndarray:
    """Signed bins grouped per sub-band, shape (n_subbands, subband_size)."""
    return active_bins(cfg).reshape(cfg.n_subbands, cfg.subband_size)


@lru_cache(maxsize=8)
def subband_filters(cfg: UfofdmConfig) -> tuple[FilterTaps, ...]:
    """Per-sub-band bandpass taps, centered on each group's arithmetic mean."""
    groups = subband_bin_groups(cfg)
    taps = []
    for bins in groups:
        center = float(np.mean(bins)) / cfg.n_fft
        taps.append(design_dolph_chebyshev(cfg.filter_len, cfg.filter_atten_db, center))
    return tuple(taps)


@lru_cache(maxsize=8)
def subband_filter_gains(cfg: UfofdmConfig) -> np.ndarray:
    """Transmit filter response at each active subcarrier frequency.

    Demodulation divides by these gains so an identity channel round-trips
    exactly; a channel estimate multiplies on top.
    """
    groups = subband_bin_groups(cfg)
    k = np.arange(cfg.filter_len)
    gains = np.empty(cfg.n_active, dtype=complex)
    for i, taps in enumerate(subband_filters(cfg)):
        for j, b in enumerate(groups[i]):
            gains[i * cfg.subband_size + j] = np.sum(
                taps.coefficients * np.exp(-2j * np.pi * (b / cfg.n_fft) * k))
    return gains


def ufofdm_modulate(grid: np.ndarray, cfg: UfofdmConfig) -> ComplexSignal:
    """Sum of per-sub-band filtered IFFTs, one span per symbol row."""
    grid = np.atleast_2d(np.asarray(grid))
    if grid.shape[1] != cfg.n_active:
        raise ValueError(f"grid has {grid.shape[1]} columns, config wants {cfg.n_active}")
    n_sym = grid.shape[0]
    groups = subband_bin_groups(cfg)
    out = np.zeros((n_sym, cfg.symbol_span), dtype=complex)
    for i, taps in enumerate(subband_filters(cfg)):
        spec = np.zeros((n_sym, cfg.n_fft), dtype=complex)
        cols = slice(i * cfg.subband_size, (i + 1) * cfg.subband_size)
        spec[:, groups[i] % cfg.n_fft] = grid[:, cols]
        body = np.fft.ifft(spec, axis=1)
        out += fftconvolve(body, taps.coefficients[None, :], axes=1)
    return ComplexSignal(out.reshape(-1), cfg.sample_rate)


def _symbol_windows(sig: ComplexSignal, cfg: UfofdmConfig):
    """Split into per-symbol windows; trailing channel tail joins the last one."""
    span = cfg.symbol_span
    x = sig.samples
    if x.size < span:
        raise ValueError(f"signal shorter than one symbol span ({span})")
    n_sym = x.size // span
    leftover = x.size - n_sym * span
    if leftover > 2 * cfg.n_fft - span:
        raise ValueError(f"signal length {x.size} is misaligned: {leftover} "
                         f"samples beyond {n_sym} spans of {span}")
    for m in range(n_sym):
        end = x.size if m == n_sym - 1 else (m + 1) * span
        yield x[m * span:end]


def ufofdm_demodulate(sig: ComplexSignal, cfg: UfofdmConfig,
                      est: ChannelEstimate | None = None) -> np.ndarray:
    """Zero-pad each symbol window to 2N, transform, keep every second bin."""
    idx2 = (2 * active_bins(cfg)) % (2 * cfg.n_fft)
    rows = []
    for win in _symbol_windows(sig, cfg):
        spec = np.fft.fft(win, n=2 * cfg.n_fft)
        rows.append(spec[idx2])
    grid = np.asarray(rows) / subband_filter_gains(cfg)[None, :]
    return equalize(grid, est)


def ufofdm_demodulate_aliased(sig: ComplexSignal, cfg: UfofdmConfig,
                              est: ChannelEstimate | None = None) -> np.ndarray:
    """Time-aliased receiver: fold the 2N window into N samples, then one FFT.

    Folding x'[k] + x'[k+N] and transforming with length N yields exactly the
    kept bins of the zero-padded 2N receiver.
    """
    n = cfg.n_fft
    idx = active_bins(cfg) % n
    rows = []
    for win in _symbol_windows(sig, cfg):
        padded = np.zeros(2 * n, dtype=complex)
        padded[:win.size] = win
        folded = padded[:n] + padded[n:]
        rows.append(np.fft.fft(folded)[idx])
    grid = np.asarray(rows) / subband_filter_gains(cfg)[None, :]
    return equalize(grid, est)
