"""PAM-4 transmitter and adaptive receiver for the wired baseband lane.

Transmit: Gray-mapped PAM-4, rectangular NRZ hold at 4 samples/symbol, then
rational resampling to the DAC rate (net 40/11 samples per symbol for
5.5 GBaud into 20 GSa/s). The NRZ sinc envelope's first null at the baud rate
is what leaves a spectral parking slot for the radio bands.

Receive: resample to 4 samples/symbol, symbol-rate boxcar matched filter
(its nulls at multiples of the baud rate reject the radio bands), T-spaced
decimation at the eye phase, then a 13-tap decision-directed LMS equalizer
with an initial trained section.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .dsp import resample_rational
from .mapping import PAM4_SCALE, pam4_decide, pam4_demap, pam4_map
from .signals import ComplexSignal

_HOLD = 4  # NRZ samples per symbol before the DAC-rate resampler


class EqualizerDivergence(RuntimeError):
    """DD-LMS error power failed to decrease after the warm-up period."""


@dataclass
class EqualizerResult:
    symbols: np.ndarray        # equalized soft symbols, one per transmitted symbol
    bits: np.ndarray           # hard-decision bits for the counted region
    first_counted: int         # symbol index where bits start (post warm-up)
    taps: np.ndarray
    error_power: np.ndarray    # per-symbol squared error of the LMS
    sample_phase: int
    polarity: int              # +1, or -1 if the link inverted the waveform
    eye_offsets: np.ndarray    # fractional symbol time of eye samples
    eye_amplitudes: np.ndarray


def _rational(fout: float, fin: float):
    frac = Fraction(fout / fin).limit_denominator(10000)
    return frac.numerator, frac.denominator


def pam4_transmit(bits: np.ndarray, baud: float, out_rate: float) -> ComplexSignal:
    """NRZ PAM-4 waveform at out_rate, unit average constellation power."""
    if out_rate < 2 * baud:
        raise ValueError(f"out_rate {out_rate:g} below 2x baud {baud:g}")
    sym = pam4_map(bits)
    held = np.repeat(sym, _HOLD)
    up, down = _rational(out_rate, _HOLD * baud)
    y = resample_rational(ComplexSignal(held, _HOLD * baud), up, down)
    return ComplexSignal(y.samples.real, out_rate)


@njit(cache=True)
def _lms_kernel(y, train, n_taps, mu, center_gain, levels):
    n = y.shape[0] - n_taps + 1
    w = np.zeros(n_taps)
    w[n_taps // 2] = center_gain
    out = np.empty(n)
    err = np.empty(n)
    n_train = train.shape[0]
    for k in range(n):
        acc = 0.0
        for j in range(n_taps):
            acc += w[j] * y[k + j]
        out[k] = acc
        if k < n_train:
            ref = train[k]
        else:
            # nearest PAM-4 level
            best = levels[0]
            bd = abs(acc - levels[0])
            for li in range(1, 4):
                d = abs(acc - levels[li])
                if d < bd:
                    bd = d
                    best = levels[li]
            ref = best
        e = ref - acc
        err[k] = e * e
        for j in range(n_taps):
            w[j] += mu * e * y[k + j]
    return out, err, w


def pam4_receive(sig: ComplexSignal, baud: float, training: np.ndarray,
                 mu: float = 5e-4, n_taps: int = 13, warmup: int = 5000,
                 n_eye: int = 2000) -> EqualizerResult:
    """Recover PAM-4 symbols with a T-spaced DD-LMS equalizer.

    sig must be coarsely time-aligned (first sample ~ first symbol start);
    training holds the known leading symbols. Symbols before max(warmup,
    len(training)) and the trailing filter edge are excluded from bits.
    """
    if n_taps % 2 == 0:
        raise ValueError("n_taps must be odd")
    if warmup < len(training):
        warmup = len(training)
    up, down = _rational(_HOLD * baud, sig.sample_rate)
    y4 = resample_rational(sig, up, down).samples.real
    y4 = np.convolve(y4, np.full(_HOLD, 1.0 / _HOLD), mode="same")
    # eye phase: PAM-4 mid-symbol samples are maximally multimodal, which
    # minimizes the kurtosis of the amplitude distribution
    probe = y4[: min(y4.size, 40000)]
    kurt = []
    for p in range(_HOLD):
        v = probe[p::_HOLD]
        v = v - v.mean()
        m2 = np.mean(v ** 2)
        kurt.append(np.mean(v ** 4) / (m2 ** 2 + 1e-30))
    phase = int(np.argmin(kurt))
    t_spaced = y4[phase::_HOLD]
    scale = np.sqrt(np.mean(t_spaced ** 2))
    if scale <= 0:
        raise ValueError("empty or silent input")
    t_spaced = t_spaced / scale

    # a quadrature-biased intensity link may deliver either polarity; detect
    # it on the known training span so decision-directed mode starts sane
    train = np.asarray(training, dtype=float)
    n_probe = min(train.size, t_spaced.size)
    gain = float(np.dot(t_spaced[:n_probe], train[:n_probe])
                 / np.dot(t_spaced[:n_probe], t_spaced[:n_probe]))
    polarity = -1 if gain < 0 else 1
    if polarity < 0:
        t_spaced = -t_spaced
        y4 = -y4
        gain = -gain

    half = n_taps // 2
    ypad = np.concatenate([np.zeros(half), t_spaced, np.zeros(half)])
    levels = np.array([-3.0, -1.0, 1.0, 3.0]) * PAM4_SCALE
    out, err, taps = _lms_kernel(ypad, train, n_taps, mu, gain, levels)

    n_sym = out.size
    if n_sym <= warmup + n_taps:
        raise ValueError("signal too short for the configured warm-up")
    head = err[:1000]
    settled = err[warmup - 1000:warmup]
    if settled.mean() > head.mean():
        raise EqualizerDivergence(
            f"error power rose from {head.mean():.3e} to {settled.mean():.3e}")
    first = warmup
    last = n_sym - n_taps
    bits = pam4_demap(pam4_decide(out[first:last]))

    eye_n = min(n_eye * _HOLD, y4.size - phase)
    eye_off = (np.arange(eye_n) % _HOLD) / _HOLD
    eye_off = np.where(eye_off >= 0.5, eye_off - 1.0, eye_off)
    return EqualizerResult(
        symbols=out, bits=bits, first_counted=first, taps=taps,
        error_power=err, sample_phase=phase, polarity=polarity,
        eye_offsets=eye_off, eye_amplitudes=y4[phase:phase + eye_n] / scale)


def write_eye_csv(path, result: EqualizerResult) -> None:
    """Eye-diagram samples as CSV (time_offset_ui, amplitude)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("time_offset_ui,amplitude\n")
        for t, a in zip(result.eye_offsets, result.eye_amplitudes):
            fh.write(f"{float(t)!r},{float(a)!r}\n")
