"""Sampled-signal containers and raw waveform file I/O."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_HEADER_MAGIC = "pon5g-signal v1"


@dataclass
class ComplexSignal:
    """A uniformly sampled waveform (complex baseband or real passband).

    samples may be complex128 or float64; sample_rate is in Hz.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain non-finite values")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def power(self) -> float:
        """Mean squared magnitude."""
        if not self.samples.size:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))


@dataclass
class FilterTaps:
    """FIR coefficients plus a short human-readable provenance note."""

    coefficients: np.ndarray
    description: str = ""

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients)
        if self.coefficients.ndim != 1 or self.coefficients.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D array")

    def __len__(self) -> int:
        return self.coefficients.size


def write_signal(path, sig: ComplexSignal) -> None:
    """Write a waveform as little-endian float32 with a small text header.

    Layout (documented, bit-exact): an ASCII header terminated by a single
    'data\\n' line, then raw '<f4' samples; complex signals are interleaved
    I,Q. Readers must honor the declared length.
    """
    fmt = "f32" if sig.is_real else "cf32"
    header = (
        f"{_HEADER_MAGIC}\n"
        f"sample_rate_hz={sig.sample_rate!r}\n"
        f"format={fmt}\n"
        f"length={len(sig)}\n"
        "data\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if sig.is_real:
            fh.write(sig.samples.astype("<f4").tobytes())
        else:
            inter = np.empty(2 * len(sig), dtype="<f4")
            inter[0::2] = sig.samples.real
            inter[1::2] = sig.samples.imag
            fh.write(inter.tobytes())


def read_signal(path) -> ComplexSignal:
    """Read a waveform written by write_signal."""
    with open(path, "rb") as fh:
        magic = fh.readline().decode("ascii").rstrip("\n")
        if magic != _HEADER_MAGIC:
            raise ValueError(f"not a {_HEADER_MAGIC} file: {path}")
        fields = {}
        for _ in range(3):
            key, _, val = fh.readline().decode("ascii").rstrip("\n").partition("=")
            fields[key] = val
        if fh.readline() != b"data\n":
            raise ValueError("malformed header: missing data marker")
        rate = float(fields["sample_rate_hz"])
        length = int(fields["length"])
        fmt = fields["format"]
        if fmt == "f32":
            raw = np.frombuffer(fh.read(4 * length), dtype="<f4")
            if raw.size != length:
                raise ValueError("truncated payload")
            return ComplexSignal(raw.astype(np.float64), rate)
        if fmt == "cf32":
            raw = np.frombuffer(fh.read(8 * length), dtype="<f4")
            if raw.size != 2 * length:
                raise ValueError("truncated payload")
            return ComplexSignal(raw[0::2].astype(np.float64) + 1j * raw[1::2], rate)
        raise ValueError(f"unknown sample format {fmt!r}")
