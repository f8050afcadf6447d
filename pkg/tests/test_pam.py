"""Tests for the PAM-4 wired lane: NRZ transmitter and DD-LMS receiver."""

import numpy as np
import pytest

from pon5g.dsp import welch_psd
from pon5g.mapping import PAM4_SCALE, pam4_map, random_bits
from pon5g.pam import (
    EqualizerDivergence,
    pam4_receive,
    pam4_transmit,
    write_eye_csv,
)
from pon5g.signals import ComplexSignal

BAUD = 5.5e9
DAC_RATE = 20e9


def make_waveform(n_sym: int, seed: int):
    bits = random_bits(2 * n_sym, seed)
    sig = pam4_transmit(bits, BAUD, DAC_RATE)
    training = pam4_map(bits[: 2 * 2000])
    return bits, sig, training


def counted_reference(bits: np.ndarray, result) -> np.ndarray:
    start = 2 * result.first_counted
    return bits[start : start + result.bits.size]


class TestTransmit:
    def test_constant_symbol_gives_flat_waveform(self):
        bits = np.tile([0, 0], 2000)  # every symbol at -3
        sig = pam4_transmit(bits, BAUD, DAC_RATE)
        assert sig.is_real
        assert sig.sample_rate == DAC_RATE
        core = sig.samples[200:-200]
        np.testing.assert_allclose(core, -3 * PAM4_SCALE, atol=1e-3)

    def test_sample_budget_is_40_over_11_per_symbol(self):
        n_sym = 1100
        sig = pam4_transmit(random_bits(2 * n_sym, 0), BAUD, DAC_RATE)
        assert len(sig) == n_sym * 40 // 11  # 4000: exact for this count

    def test_unit_average_power(self):
        sig = pam4_transmit(random_bits(2 * 20000, 1), BAUD, DAC_RATE)
        assert sig.power() == pytest.approx(1.0, rel=0.05)

    def test_spectral_null_at_baud_rate(self):
        # The NRZ sinc envelope nulls at the symbol rate: that notch is the
        # parking slot for the radio bands.
        sig = pam4_transmit(random_bits(2 * 40000, 2), BAUD, DAC_RATE)
        freqs, psd_db = welch_psd(sig, 4096)
        lobe = psd_db[(freqs > 2.5e9) & (freqs < 3.0e9)].mean()
        null = psd_db[(freqs > BAUD - 0.25e9) & (freqs < BAUD + 0.25e9)].mean()
        assert null < lobe - 25.0

    def test_insufficient_output_rate_raises(self):
        with pytest.raises(ValueError, match="below 2x baud"):
            pam4_transmit(random_bits(20, 3), BAUD, 1.1 * BAUD)


class TestReceiveLoopback:
    def test_clean_roundtrip_is_error_free(self):
        bits, sig, training = make_waveform(9000, 4)
        res = pam4_receive(sig, BAUD, training)
        assert res.polarity == 1
        assert res.first_counted == 5000
        assert res.bits.size > 0
        np.testing.assert_array_equal(res.bits, counted_reference(bits, res))

    def test_equalizer_converges_to_identity(self):
        _, sig, training = make_waveform(9000, 5)
        res = pam4_receive(sig, BAUD, training)
        center = res.taps.size // 2
        assert res.taps[center] == pytest.approx(1.0, abs=0.1)
        off = np.delete(res.taps, center)
        assert np.max(np.abs(off)) < 0.1
        assert 0 <= res.sample_phase < 4
        # Soft symbols cluster on the four levels: DD error power is tiny.
        tail = res.error_power[-2000:]
        assert tail.mean() < 1e-3

    def test_inverted_waveform_is_detected_and_corrected(self):
        bits, sig, training = make_waveform(9000, 6)
        flipped = ComplexSignal(-sig.samples, sig.sample_rate)
        res_pos = pam4_receive(sig, BAUD, training)
        res_neg = pam4_receive(flipped, BAUD, training)
        assert res_pos.polarity == 1
        assert res_neg.polarity == -1
        np.testing.assert_array_equal(res_neg.bits, counted_reference(bits, res_neg))
        np.testing.assert_array_equal(res_neg.bits, res_pos.bits)

    def test_baud_rate_interferer_is_rejected(self):
        # A tone exactly at the symbol rate lands on the boxcar matched
        # filter's null, so even a strong one costs no bit errors.
        bits, sig, training = make_waveform(9000, 7)
        t = np.arange(len(sig)) / sig.sample_rate
        tone = 0.3 * np.cos(2 * np.pi * BAUD * t + 0.6)
        res = pam4_receive(
            ComplexSignal(sig.samples + tone, sig.sample_rate), BAUD, training
        )
        np.testing.assert_array_equal(res.bits, counted_reference(bits, res))


class TestReceiveChannel:
    def test_isi_channel_with_noise_converges(self):
        bits, sig, training = make_waveform(12000, 8)
        rng = np.random.default_rng(9)
        taps = np.array([1.0, 0.0, 0.25, 0.0, -0.1])
        y = np.convolve(sig.samples, taps)[: len(sig)]
        y = y + 0.01 * rng.standard_normal(y.size)
        res = pam4_receive(ComplexSignal(y, sig.sample_rate), BAUD, training)
        np.testing.assert_array_equal(res.bits, counted_reference(bits, res))
        # converged error power sits at the noise floor, far below start
        assert res.error_power[-2000:].mean() < 0.3 * res.error_power[:200].mean()

    def test_unstable_step_size_raises_divergence(self):
        _, sig, training = make_waveform(9000, 10)
        rng = np.random.default_rng(11)
        noisy = sig.samples + 0.05 * rng.standard_normal(len(sig))
        with pytest.raises(EqualizerDivergence):
            pam4_receive(ComplexSignal(noisy, sig.sample_rate), BAUD, training, mu=0.2)


class TestReceiveValidation:
    def test_even_tap_count_raises(self):
        _, sig, training = make_waveform(9000, 12)
        with pytest.raises(ValueError, match="odd"):
            pam4_receive(sig, BAUD, training, n_taps=12)

    def test_too_short_signal_raises(self):
        bits, sig, training = make_waveform(3000, 13)
        with pytest.raises(ValueError, match="too short"):
            pam4_receive(sig, BAUD, training)

    def test_silent_input_raises(self):
        training = pam4_map(random_bits(4000, 14))
        silent = ComplexSignal(np.zeros(40000), DAC_RATE)
        with pytest.raises(ValueError, match="silent"):
            pam4_receive(silent, BAUD, training)


class TestEyeDiagram:
    def test_eye_samples_and_csv(self, tmp_path):
        _, sig, training = make_waveform(9000, 15)
        res = pam4_receive(sig, BAUD, training, n_eye=500)
        assert res.eye_offsets.size == res.eye_amplitudes.size == 500 * 4
        assert res.eye_offsets.min() >= -0.5
        assert res.eye_offsets.max() < 0.5
        # T-spaced samples (offset 0) concentrate on the four levels.
        at_center = res.eye_amplitudes[res.eye_offsets == 0.0]
        dist = np.min(
            np.abs(at_center[:, None] - np.array([-3, -1, 1, 3]) * PAM4_SCALE),
            axis=1,
        )
        assert np.percentile(dist, 90) < 0.12
        path = tmp_path / "eye.csv"
        write_eye_csv(path, res)
        lines = path.read_text().splitlines()
        assert lines[0] == "time_offset_ui,amplitude"
        assert len(lines) == 1 + 2000
        t0, a0 = lines[1].split(",")
        assert float(t0) == res.eye_offsets[0]
        assert float(a0) == res.eye_amplitudes[0]
