"""Bit sources, Gray-coded 16-QAM and PAM-4 mapping, analytic AWGN BER.

Both constellations are normalized to unit average symbol power. Per-rail
Gray labeling is fixed as (MSB, LSB): 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
"""
from __future__ import annotations

import numpy as np
from scipy.special import erfc

# ascending level index <-> Gray label value; the permutation is an involution
_GRAY_PERM = np.array([0, 1, 3, 2])
_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])
QAM16_SCALE = 1.0 / np.sqrt(10.0)  # E[|s|^2] = 1 over the 16 points
PAM4_SCALE = 1.0 / np.sqrt(5.0)    # E[s^2] = 1 over the 4 levels


def random_bits(n_bits: int, seed) -> np.ndarray:
    """Reproducible pseudo-random bits (uint8 0/1) from an explicit seed.

    seed may be an int, a numpy SeedSequence, or a Generator.
    """
    if n_bits < 0:
        raise ValueError("n_bits must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.integers(0, 2, size=n_bits, dtype=np.uint8)


def _rail_map(msb: np.ndarray, lsb: np.ndarray) -> np.ndarray:
    return _LEVELS[_GRAY_PERM[(msb.astype(np.int64) << 1) | lsb]]


def _rail_demap(levels: np.ndarray):
    idx = np.digitize(levels, [-2.0, 0.0, 2.0])
    gray = _GRAY_PERM[idx]
    return (gray >> 1).astype(np.uint8), (gray & 1).astype(np.uint8)


def qam16_map(bits: np.ndarray) -> np.ndarray:
    """Map bit groups [I_msb, I_lsb, Q_msb, Q_lsb] to unit-power 16-QAM."""
    bits = np.asarray(bits)
    if bits.size % 4:
        raise ValueError("bit count must be a multiple of 4")
    b = bits.reshape(-1, 4)
    i = _rail_map(b[:, 0], b[:, 1])
    q = _rail_map(b[:, 2], b[:, 3])
    return (i + 1j * q) * QAM16_SCALE


def qam16_demap(symbols: np.ndarray) -> np.ndarray:
    """Hard-decision demap to bits (inverse of qam16_map on clean input)."""
    s = np.asarray(symbols).reshape(-1) / QAM16_SCALE
    im, il = _rail_demap(s.real)
    qm, ql = _rail_demap(s.imag)
    return np.stack([im, il, qm, ql], axis=1).reshape(-1)


def pam4_map(bits: np.ndarray) -> np.ndarray:
    """Map bit pairs [msb, lsb] to unit-power PAM-4 levels."""
    bits = np.asarray(bits)
    if bits.size % 2:
        raise ValueError("bit count must be a multiple of 2")
    b = bits.reshape(-1, 2)
    return _rail_map(b[:, 0], b[:, 1]) * PAM4_SCALE


def pam4_demap(levels: np.ndarray) -> np.ndarray:
    s = np.asarray(levels).reshape(-1) / PAM4_SCALE
    msb, lsb = _rail_demap(np.real(s))
    return np.stack([msb, lsb], axis=1).reshape(-1)


def pam4_decide(levels: np.ndarray) -> np.ndarray:
    """Nearest PAM-4 level (same normalization as pam4_map)."""
    s = np.real(np.asarray(levels)) / PAM4_SCALE
    return _LEVELS[np.digitize(s, [-2.0, 0.0, 2.0])] * PAM4_SCALE


def qam16_constellation():
    """All 16 points and their 4-bit labels, for geometry checks."""
    bits = ((np.arange(16)[:, None] >> np.arange(3, -1, -1)) & 1).astype(np.uint8)
    return qam16_map(bits.reshape(-1)), bits


def pam4_constellation():
    bits = ((np.arange(4)[:, None] >> np.arange(1, -1, -1)) & 1).astype(np.uint8)
    return pam4_map(bits.reshape(-1)), bits


def _q(x):
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def qam16_awgn_ber(esn0_db) -> np.ndarray:
    """Exact Gray-16-QAM bit error rate over complex AWGN.

    esn0_db is Es/N0 with N0 the total complex noise variance. Derived from
    the two independent Gray 4-PAM rails (d = 1/sqrt(10), per-rail noise
    variance N0/2): Pb = 3/4 Q(x) + 1/2 Q(3x) - 1/4 Q(5x), x = sqrt(Es/N0/5).
    """
    gamma = 10.0 ** (np.asarray(esn0_db, dtype=float) / 10.0)
    x = np.sqrt(gamma / 5.0)
    return 0.75 * _q(x) + 0.5 * _q(3 * x) - 0.25 * _q(5 * x)


def pam4_awgn_ber(esn0_db) -> np.ndarray:
    """Exact Gray PAM-4 bit error rate over real AWGN of variance N0."""
    gamma = 10.0 ** (np.asarray(esn0_db, dtype=float) / 10.0)
    x = np.sqrt(gamma / 5.0)
    return 0.75 * _q(x) + 0.5 * _q(3 * x) - 0.25 * _q(5 * x)
