"""Quality metrics: EVM, counted BER, PSD-derived levels, sensitivity."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

PSD_FLOOR_DB = -200.0


def evm_percent(rx: np.ndarray, ref: np.ndarray, ref_power: float = 1.0) -> float:
    """EVM% = 100 sqrt(E|rx - ref|^2 / ref_power).

    ref_power is the average power of the reference constellation (1 for the
    unit-power mappings in this package).
    """
    rx = np.asarray(rx)
    ref = np.asarray(ref)
    if rx.shape != ref.shape:
        raise ValueError("rx and ref shapes differ")
    if rx.size == 0:
        raise ValueError("empty input")
    if ref_power <= 0:
        raise ValueError("ref_power must be positive")
    return float(100.0 * np.sqrt(np.mean(np.abs(rx - ref) ** 2) / ref_power))


def per_subcarrier_evm(rx_grid: np.ndarray, ref_grid: np.ndarray,
                       ref_power: float = 1.0) -> np.ndarray:
    """Column-wise EVM% of symbol grids (symbols x subcarriers).

    The symbol-count-weighted RMS of the output equals the aggregate EVM.
    """
    rx = np.atleast_2d(np.asarray(rx_grid))
    ref = np.atleast_2d(np.asarray(ref_grid))
    if rx.shape != ref.shape:
        raise ValueError("rx and ref shapes differ")
    return 100.0 * np.sqrt(np.mean(np.abs(rx - ref) ** 2, axis=0) / ref_power)


def ber_count(tx_bits: np.ndarray, rx_bits: np.ndarray):
    """(errors, bits, ber) from hard bit streams of equal length."""
    tx = np.asarray(tx_bits)
    rx = np.asarray(rx_bits)
    if tx.shape != rx.shape:
        raise ValueError("bit streams differ in length")
    if tx.size == 0:
        raise ValueError("empty bit streams")
    errors = int(np.count_nonzero(tx != rx))
    return errors, tx.size, errors / tx.size


def wilson_interval(errors: int, n: int, z: float = 1.96):
    """Wilson score interval for a counted error ratio."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = errors / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def _linear(psd_db: np.ndarray) -> np.ndarray:
    return 10.0 ** (np.asarray(psd_db) / 10.0)


def _mean_in(freqs, lin, lo, hi) -> float:
    sel = (freqs >= lo) & (freqs <= hi)
    if not np.any(sel):
        raise ValueError(f"no PSD bins in [{lo:g}, {hi:g}] Hz")
    return float(np.mean(lin[sel]))


def oob_level_db(freqs: np.ndarray, psd_db: np.ndarray, band_lo: float,
                 band_hi: float, offset_hz: float, window_hz: float = 1e6) -> float:
    """Out-of-band level at offset_hz beyond the band edges, dB vs in-band.

    Mean linear PSD in window_hz-wide windows centered at band_hi + offset and
    band_lo - offset; the worse (higher) side is reported, floored at -200 dB.
    """
    if band_hi <= band_lo:
        raise ValueError("band_hi must exceed band_lo")
    if offset_hz <= 0:
        raise ValueError("offset must be positive")
    freqs = np.asarray(freqs)
    lin = _linear(psd_db)
    inband = _mean_in(freqs, lin, band_lo, band_hi)
    h = window_hz / 2
    upper = _mean_in(freqs, lin, band_hi + offset_hz - h, band_hi + offset_hz + h)
    lower = _mean_in(freqs, lin, band_lo - offset_hz - h, band_lo - offset_hz + h)
    ratio = max(upper, lower) / inband
    return float(max(10 * np.log10(max(ratio, 1e-300)), PSD_FLOOR_DB))


def integrate_psd(freqs: np.ndarray, psd_db: np.ndarray, lo: float, hi: float) -> float:
    """Trapezoidal band power from a dB-scale PSD."""
    freqs = np.asarray(freqs)
    sel = (freqs >= lo) & (freqs <= hi)
    if np.count_nonzero(sel) < 2:
        raise ValueError(f"fewer than 2 PSD bins in [{lo:g}, {hi:g}] Hz")
    return float(np.trapezoid(_linear(psd_db)[sel], freqs[sel]))


def wwpr_db(freqs: np.ndarray, psd_db: np.ndarray, wired_region,
            wireless_regions) -> float:
    """Wired-to-wireless power ratio by PSD integration, in dB."""
    lo_w, hi_w = wired_region
    for lo, hi in wireless_regions:
        if lo < hi_w and hi > lo_w:
            raise ValueError(f"wireless region [{lo:g}, {hi:g}] overlaps the "
                             f"wired region [{lo_w:g}, {hi_w:g}]")
    wired = integrate_psd(freqs, psd_db, lo_w, hi_w)
    wireless = sum(integrate_psd(freqs, psd_db, lo, hi) for lo, hi in wireless_regions)
    if wireless <= 0:
        raise ValueError("wireless power is zero")
    return float(10 * np.log10(wired / wireless))


def papr_db(samples: np.ndarray) -> float:
    """Peak-to-average power ratio of a waveform."""
    x = np.asarray(samples)
    if x.size == 0:
        raise ValueError("empty input")
    p = np.abs(x) ** 2
    avg = p.mean()
    if avg <= 0:
        raise ValueError("zero-power input")
    return float(10 * np.log10(p.max() / avg))


def sensitivity_at_ber(powers_dbm: np.ndarray, bers: np.ndarray,
                       target_ber: float) -> float:
    """Receiver power where the BER curve crosses target_ber.

    Interpolates linearly in log10(BER) vs power; the curve must be monotone
    non-increasing with power and must bracket the target.
    """
    p = np.asarray(powers_dbm, dtype=float)
    b = np.asarray(bers, dtype=float)
    if p.size != b.size or p.size < 2:
        raise ValueError("need at least two (power, ber) points")
    order = np.argsort(p)
    p, b = p[order], b[order]
    if np.any(np.diff(b) > 0):
        raise ValueError("BER must be monotone non-increasing with power")
    if np.any(b <= 0):
        raise ValueError("BER points must be positive for log interpolation")
    lb = np.log10(b)
    lt = np.log10(target_ber)
    if lt > lb[0] or lt < lb[-1]:
        raise ValueError(f"target BER {target_ber:g} outside measured range "
                         f"[{b[-1]:g}, {b[0]:g}]")
    # walk to the bracketing segment (lb is non-increasing)
    idx = int(np.searchsorted(-lb, -lt, side="left"))
    idx = min(max(idx, 1), p.size - 1)
    if lb[idx] == lb[idx - 1]:
        return float(p[idx - 1])
    f = (lt - lb[idx - 1]) / (lb[idx] - lb[idx - 1])
    return float(p[idx - 1] + f * (p[idx] - p[idx - 1]))


@dataclass
class MetricsReport:
    """Aggregate link metrics for one measured band or lane."""

    label: str
    evm_percent: float | None = None
    per_subcarrier_evm: np.ndarray | None = None
    errors: int | None = None
    bits: int | None = None
    ber: float | None = None
    extras: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = {"label": self.label, "evm_percent": self.evm_percent,
             "errors": self.errors, "bits": self.bits, "ber": self.ber}
        if self.per_subcarrier_evm is not None:
            d["per_subcarrier_evm"] = [float(v) for v in self.per_subcarrier_evm]
        d.update(self.extras)
        return json.dumps(d, sort_keys=True)
