"""GFDM modem: circularly pulse-shaped blocks with a zero-forcing receiver.

A block carries n_subsymbols time slots on the same n_fft subcarrier lattice
as OFDM and is protected by one cyclic prefix. The prototype pulse is built
from 2K-1 Mirabbasi-Martin frequency coefficients placed on consecutive
block-DFT bins, so each subcarrier's shaped spectrum overlaps its neighbors.

The fast transmit/receive path works per block-spectrum residue r = b mod M:
on each residue the block spectrum is a length-N circular convolution of the
M-point-DFT'd data with the decimated prototype spectrum G[r::M]; the ZF
receiver divides by that kernel's DFT. This is algebraically identical to
applying the dense modulation matrix (and its inverse), which is kept as a
small-size oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ofdm import MulticarrierConfig, active_bin_indices
from .signals import ComplexSignal

# Mirabbasi-Martin prototype frequency coefficients (one-sided, H_0 = 1).
# Published filter-bank construction values; each set satisfies the
# power-complementarity H_k^2 + H_{K-k}^2 = 1, checked in phydyas_coefficients.
_MM_COEFFS = {
    2: [np.sqrt(2.0) / 2.0],
    3: [0.91143783, 0.41143783],
    4: [0.97195983, np.sqrt(2.0) / 2.0, 0.23514695],
    5: [0.99184131, 0.86541624, 0.50105361, 0.12747868],
}


class SingularPrototypeError(ValueError):
    """The prototype makes the modulation matrix (near-)singular."""


@dataclass(frozen=True)
class GfdmConfig(MulticarrierConfig):
    n_subsymbols: int = 5
    overlap: int = 5

    def __post_init__(self):
        super().__post_init__()
        if self.n_subsymbols < 1:
            raise ValueError("n_subsymbols must be >= 1")
        if not 1 <= self.overlap <= self.n_subsymbols:
            raise ValueError("overlap must be in [1, n_subsymbols]")

    @property
    def block_len(self) -> int:
        return self.n_subsymbols * self.n_fft

    @property
    def block_latency_samples(self) -> int:
        """Samples per transmitted block including the cyclic prefix."""
        return self.block_len + self.cp_len


def phydyas_coefficients(overlap: int) -> np.ndarray:
    """One-sided prototype coefficients [1, H_1, ..., H_{K-1}] for overlap K."""
    if overlap == 1:
        return np.array([1.0])
    if overlap not in _MM_COEFFS:
        raise ValueError(f"no published coefficient set for overlap {overlap}")
    h = np.array([1.0] + _MM_COEFFS[overlap])
    comp = h[1:] ** 2 + h[:0:-1] ** 2
    if not np.allclose(comp, 1.0, atol=1e-6):
        raise AssertionError("prototype table violates power complementarity")
    return h


def prototype_pulse(cfg: GfdmConfig) -> np.ndarray:
    """Unit-energy real prototype, length block_len.

    n_subsymbols == 1 with overlap 1 degenerates to the rectangular (OFDM)
    pulse; otherwise the 2K-1 coefficients sit on block-DFT bins -(K-1)..K-1.
    """
    m, k = cfg.n_subsymbols, cfg.overlap
    spec = np.zeros(cfg.block_len)
    coeffs = phydyas_coefficients(k)
    spec[0] = coeffs[0]
    for i in range(1, min(k, cfg.block_len // 2 + 1)):
        spec[i] = coeffs[i]
        spec[-i] = coeffs[i]
    g = np.fft.ifft(spec).real
    return g / np.linalg.norm(g)


@lru_cache(maxsize=8)
def _zf_kernels(cfg: GfdmConfig):
    """(G, kernel DFTs per residue) for the fast path; validates conditioning."""
    m, n = cfg.n_subsymbols, cfg.n_fft
    g = prototype_pulse(cfg)
    big_g = np.fft.fft(g)
    kernels = np.fft.fft(big_g.reshape(n, m).T, axis=1)  # row r: fft(G[r::M])
    mags = np.abs(kernels)
    cond = mags.max() / max(mags.min(), 1e-300)
    if mags.min() <= 1e-9 * mags.max():
        raise SingularPrototypeError(
            f"zero-forcing kernel is singular (condition estimate {cond:.3e})")
    return g, big_g, kernels


def gfdm_build_matrix(cfg: GfdmConfig) -> np.ndarray:
    """Dense block modulation matrix A[k, m*N + n] = g[(k - mN) % MN] e^{j2pi nk/N}.

    O((MN)^2) memory; intended as a small-size oracle and for analysis.
    """
    m, n = cfg.n_subsymbols, cfg.n_fft
    mn = cfg.block_len
    g = prototype_pulse(cfg)
    k = np.arange(mn)
    cols = []
    for mm in range(m):
        shifted = g[(k - mm * n) % mn]
        for nn in range(n):
            cols.append(shifted * np.exp(2j * np.pi * nn * k / n))
    return np.asarray(cols).T


def _modulate_block(d_full: np.ndarray, cfg: GfdmConfig) -> np.ndarray:
    m, n = cfg.n_subsymbols, cfg.n_fft
    _, _, kernels = _zf_kernels(cfg)
    df = np.fft.fft(d_full, axis=0)          # (M, N): M-point DFT per subcarrier
    spec = np.empty(cfg.block_len, dtype=complex)
    spec_v = spec.reshape(n, m)               # [t, r] <-> block bin r + M*t
    conv = np.fft.ifft(np.fft.fft(df, axis=1) * kernels, axis=1)
    spec_v[:, :] = conv.T
    return np.fft.ifft(spec)


def _demodulate_block(y: np.ndarray, cfg: GfdmConfig,
                      block_response: np.ndarray | None) -> np.ndarray:
    m, n = cfg.n_subsymbols, cfg.n_fft
    _, _, kernels = _zf_kernels(cfg)
    spec = np.fft.fft(y)
    if block_response is not None:
        spec = spec / block_response
    xr = spec.reshape(n, m).T                  # row r: bins r + M*t
    df = np.fft.ifft(np.fft.fft(xr, axis=1) / kernels, axis=1)
    return np.fft.ifft(df, axis=0)


def gfdm_modulate(grid: np.ndarray, cfg: GfdmConfig) -> ComplexSignal:
    """Shape (n_blocks * n_subsymbols, n_active) grid into CP-prefixed blocks."""
    grid = np.atleast_2d(np.asarray(grid))
    m = cfg.n_subsymbols
    if grid.shape[1] != cfg.n_active:
        raise ValueError(f"grid has {grid.shape[1]} columns, config wants {cfg.n_active}")
    if grid.shape[0] % m:
        raise ValueError(f"grid rows {grid.shape[0]} not a multiple of "
                         f"n_subsymbols {m}")
    idx = active_bin_indices(cfg)
    out = []
    for b in range(grid.shape[0] // m):
        d_full = np.zeros((m, cfg.n_fft), dtype=complex)
        d_full[:, idx] = grid[b * m:(b + 1) * m]
        x = _modulate_block(d_full, cfg)
        out.append(x[cfg.block_len - cfg.cp_len:] if cfg.cp_len else x[:0])
        out.append(x)
    return ComplexSignal(np.concatenate(out), cfg.sample_rate)


def gfdm_demodulate_zf(sig: ComplexSignal, cfg: GfdmConfig,
                       block_response: np.ndarray | None = None) -> np.ndarray:
    """FDE on the block spectrum, then the zero-forcing inverse.

    block_response, if given, is the channel's length-block_len frequency
    response (see block_response_from_taps); the equalized output is exact for
    any FIR channel no longer than cp_len + 1.
    """
    m = cfg.n_subsymbols
    lat = cfg.block_latency_samples
    x = sig.samples
    if x.size == 0 or x.size % lat:
        raise ValueError(f"signal length {x.size} is not a multiple of "
                         f"block latency {lat}")
    if block_response is not None:
        block_response = np.asarray(block_response, dtype=complex)
        if block_response.shape != (cfg.block_len,):
            raise ValueError("block_response must have length block_len")
        mag = np.abs(block_response)
        floor = 1e-6
        unit = np.where(mag > 0, block_response / np.maximum(mag, 1e-300), 1.0)
        block_response = np.where(mag >= floor, block_response, unit * floor)
    idx = active_bin_indices(cfg)
    rows = []
    for blk in x.reshape(-1, lat)[:, cfg.cp_len:]:
        d_full = _demodulate_block(blk, cfg, block_response)
        rows.append(d_full[:, idx])
    return np.concatenate(rows, axis=0)


def noise_enhancement_db(cfg: GfdmConfig) -> float:
    """Average ZF output-noise power gain over a matched orthogonal receiver.

    Closed form from the per-residue kernels: N * mean(1/|C|^2) for the
    unit-energy prototype; equals the mean row energy of the dense inverse.
    """
    _, _, kernels = _zf_kernels(cfg)
    nef = cfg.n_fft * np.mean(1.0 / np.abs(kernels) ** 2)
    return float(10 * np.log10(nef))


def block_response_from_taps(taps: np.ndarray, cfg: GfdmConfig) -> np.ndarray:
    """Block-spectrum response of an FIR channel (for the FDE)."""
    taps = np.asarray(taps)
    if taps.size > cfg.cp_len + 1:
        raise ValueError(f"channel ({taps.size} taps) exceeds CP protection "
                         f"({cfg.cp_len + 1})")
    return np.fft.fft(taps, n=cfg.block_len)


def block_response_from_gains(gains: np.ndarray, cfg: GfdmConfig) -> np.ndarray:
    """Interpolate per-active-subcarrier gains onto the block-frequency grid.

    Exact for channels that vary slowly across one subcarrier spacing, which
    holds for the smooth responses this package simulates; synthetic multipath
    tests should use block_response_from_taps instead.
    """
    gains = np.asarray(gains, dtype=complex)
    if gains.shape != (cfg.n_active,):
        raise ValueError("need one gain per active subcarrier")
    m, n = cfg.n_subsymbols, cfg.n_fft
    half = cfg.n_active // 2
    signed_bins = np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])
    pos = signed_bins * m                      # block-bin positions, signed
    grid = np.arange(-(cfg.block_len // 2), cfg.block_len - cfg.block_len // 2)
    re = np.interp(grid, pos, gains.real)
    im = np.interp(grid, pos, gains.imag)
    return np.fft.ifftshift(re + 1j * im)
