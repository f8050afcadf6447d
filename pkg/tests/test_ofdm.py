"""Tests for the CP-OFDM modem and the shared channel-estimation helpers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from pon5g.mapping import qam16_awgn_ber, qam16_demap, qam16_map, random_bits
from pon5g.ofdm import (
    ChannelEstimate,
    MulticarrierConfig,
    active_bin_indices,
    active_bins,
    equalize,
    estimate_channel_ls,
    ofdm_demodulate,
    ofdm_modulate,
)
from pon5g.signals import ComplexSignal


def random_grid(n_rows: int, cfg, seed: int) -> np.ndarray:
    return qam16_map(random_bits(4 * n_rows * cfg.n_active, seed)).reshape(
        n_rows, cfg.n_active
    )


class TestConfig:
    def test_default_numerology(self):
        cfg = MulticarrierConfig()
        assert cfg.sample_rate == pytest.approx(2e9)
        assert cfg.band_bw_hz == pytest.approx(152.34375e6)
        assert cfg.symbol_len == 1056
        assert cfg.bit_rate_qam16 == pytest.approx(609.375e6)

    def test_cp_overhead_fraction(self):
        cfg = MulticarrierConfig()
        overhead = cfg.cp_len / cfg.symbol_len
        assert overhead == pytest.approx(32 / 1056)
        assert 0.030 < overhead < 0.031

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_active=77),  # odd cannot straddle DC
            dict(n_active=1024),  # no room for DC + guards
            dict(cp_len=-1),
            dict(cp_len=1024),
            dict(subcarrier_spacing_hz=0.0),
            dict(n_fft=1),
        ],
    )
    def test_invalid_config_raises(self, kwargs):
        with pytest.raises(ValueError):
            MulticarrierConfig(**kwargs)

    def test_active_bins_straddle_dc(self):
        cfg = MulticarrierConfig()
        bins = active_bins(cfg)
        assert bins.size == 78
        assert 0 not in bins
        assert bins[0] == -39 and bins[-1] == 39
        np.testing.assert_array_equal(active_bin_indices(cfg), bins % 1024)


class TestModulate:
    def test_single_subcarrier_is_a_complex_tone(self):
        cfg = MulticarrierConfig(cp_len=0)
        grid = np.zeros((1, cfg.n_active), dtype=complex)
        grid[0, cfg.n_active // 2] = 1.0  # first bin above DC (signed +1)
        sig = ofdm_modulate(grid, cfg)
        n = np.arange(cfg.n_fft)
        expected = np.exp(2j * np.pi * n / cfg.n_fft) / cfg.n_fft
        assert np.max(np.abs(sig.samples - expected)) < 1e-15
        assert sig.sample_rate == pytest.approx(2e9)

    def test_cp_is_a_copy_of_the_tail(self):
        cfg = MulticarrierConfig()
        sig = ofdm_modulate(random_grid(3, cfg, 0), cfg)
        sym = sig.samples.reshape(3, cfg.symbol_len)
        np.testing.assert_array_equal(sym[:, : cfg.cp_len], sym[:, -cfg.cp_len :])

    def test_wrong_column_count_raises(self):
        cfg = MulticarrierConfig()
        with pytest.raises(ValueError, match="columns"):
            ofdm_modulate(np.zeros((2, 77), dtype=complex), cfg)


class TestLoopback:
    def test_identity_channel_roundtrip(self):
        cfg = MulticarrierConfig()
        grid = random_grid(30, cfg, 1)
        out = ofdm_demodulate(ofdm_modulate(grid, cfg), cfg)
        assert np.max(np.abs(out - grid)) < 1e-9

    def test_misaligned_length_raises(self):
        cfg = MulticarrierConfig()
        sig = ofdm_modulate(random_grid(2, cfg, 2), cfg)
        bad = ComplexSignal(sig.samples[:-3], sig.sample_rate)
        with pytest.raises(ValueError, match="not a multiple"):
            ofdm_demodulate(bad, cfg)

    @settings(max_examples=15, deadline=None)
    @given(
        n_fft=st.sampled_from([16, 64, 256]),
        cp=st.integers(min_value=0, max_value=8),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    def test_roundtrip_property_small_sizes(self, n_fft, cp, seed):
        cfg = MulticarrierConfig(
            n_fft=n_fft, n_active=10, cp_len=cp, subcarrier_spacing_hz=1e4
        )
        grid = random_grid(4, cfg, seed)
        out = ofdm_demodulate(ofdm_modulate(grid, cfg), cfg)
        assert np.max(np.abs(out - grid)) < 1e-10


class TestCpProtection:
    def channel_gains(self, taps, cfg):
        return np.fft.fft(taps, n=cfg.n_fft)[active_bin_indices(cfg)]

    def test_fir_within_cp_is_equalized_exactly(self):
        cfg = MulticarrierConfig()
        rng = np.random.default_rng(3)
        grid = random_grid(8, cfg, 4)
        sig = ofdm_modulate(grid, cfg)
        # Random channel exactly at the CP protection limit (33 taps).
        taps = rng.standard_normal(cfg.cp_len + 1) * 0.2
        taps[0] = 1.0
        rx = ComplexSignal(np.convolve(sig.samples, taps)[: len(sig)], sig.sample_rate)
        est = ChannelEstimate(self.channel_gains(taps, cfg))
        out = ofdm_demodulate(rx, cfg, est)
        assert np.max(np.abs(out - grid)) < 1e-9

    def test_three_tap_channel(self):
        cfg = MulticarrierConfig()
        grid = random_grid(6, cfg, 5)
        sig = ofdm_modulate(grid, cfg)
        taps = np.array([1.0, 0.35, -0.15])
        rx = ComplexSignal(np.convolve(sig.samples, taps)[: len(sig)], sig.sample_rate)
        out = ofdm_demodulate(rx, cfg, ChannelEstimate(self.channel_gains(taps, cfg)))
        assert np.max(np.abs(out - grid)) < 1e-9

    def test_channel_longer_than_cp_leaves_isi(self):
        cfg = MulticarrierConfig()
        rng = np.random.default_rng(6)
        grid = random_grid(8, cfg, 7)
        sig = ofdm_modulate(grid, cfg)
        taps = np.zeros(64)
        taps[0] = 1.0
        taps[1:] = rng.standard_normal(63) * 0.15
        rx = ComplexSignal(np.convolve(sig.samples, taps)[: len(sig)], sig.sample_rate)
        out = ofdm_demodulate(rx, cfg, ChannelEstimate(self.channel_gains(taps, cfg)))
        evm = 100 * np.sqrt(np.mean(np.abs(out - grid) ** 2) / np.mean(np.abs(grid) ** 2))
        assert evm > 1.0


class TestChannelEstimate:
    def test_identity_channel_noiseless(self):
        cfg = MulticarrierConfig()
        grid = random_grid(4, cfg, 8)
        raw = ofdm_demodulate(ofdm_modulate(grid, cfg), cfg)
        est = estimate_channel_ls(raw, grid)
        np.testing.assert_allclose(est.gains, np.ones(cfg.n_active), atol=1e-10)

    def test_known_three_tap_channel_noiseless(self):
        cfg = MulticarrierConfig()
        grid = random_grid(4, cfg, 9)
        sig = ofdm_modulate(grid, cfg)
        taps = np.array([0.9, -0.2, 0.1j])
        rx = ComplexSignal(np.convolve(sig.samples, taps)[: len(sig)], sig.sample_rate)
        est = estimate_channel_ls(ofdm_demodulate(rx, cfg), grid)
        expected = np.fft.fft(taps, n=cfg.n_fft)[active_bin_indices(cfg)]
        np.testing.assert_allclose(est.gains, expected, atol=1e-9)

    def test_estimate_variance_matches_ls_theory(self):
        # Exact LS theory: per-bin error variance = sigma_bin^2 / sum_k|d_k|^2,
        # i.e. sigma^2/(K E|d|^2) for K training symbols -- the 1/K law.
        cfg = MulticarrierConfig()
        k_train = 10
        rng = np.random.default_rng(10)
        grid = random_grid(k_train, cfg, 11)
        clean = ofdm_modulate(grid, cfg)
        snr_db = 20.0
        sigma_t = np.sqrt(clean.power() / 10 ** (snr_db / 10))
        errs_k, errs_half = [], []
        for _ in range(300):
            noise = (
                rng.standard_normal(len(clean)) + 1j * rng.standard_normal(len(clean))
            ) * (sigma_t / np.sqrt(2))
            raw = ofdm_demodulate(
                ComplexSignal(clean.samples + noise, clean.sample_rate), cfg
            )
            errs_k.append(estimate_channel_ls(raw, grid).gains - 1.0)
            errs_half.append(estimate_channel_ls(raw[:5], grid[:5]).gains - 1.0)
        emp_k = np.mean(np.abs(np.asarray(errs_k)) ** 2, axis=0)
        emp_half = np.mean(np.abs(np.asarray(errs_half)) ** 2, axis=0)
        sigma_bin_sq = cfg.n_fft * sigma_t**2  # unnormalized receive FFT
        # absolute level within the allowed factor of 1.5
        predicted = sigma_bin_sq / k_train  # E|d|^2 = 1 for unit-power 16-QAM
        assert predicted / 1.5 < emp_k.mean() < predicted * 1.5
        # per-bin exact prediction (300 trials -> ~8% statistical spread)
        exact = sigma_bin_sq / np.sum(np.abs(grid) ** 2, axis=0)
        ratios = emp_k / exact
        assert np.mean(ratios) == pytest.approx(1.0, abs=0.05)
        assert np.all((ratios > 0.6) & (ratios < 1.6))
        # halving the training set doubles the variance
        expected_ratio = np.mean(sigma_bin_sq / np.sum(np.abs(grid[:5]) ** 2, axis=0)) / np.mean(exact)
        assert emp_half.mean() / emp_k.mean() == pytest.approx(expected_ratio, rel=0.1)

    def test_zero_training_symbol_raises(self):
        grid = np.ones((2, 4), dtype=complex)
        bad = grid.copy()
        bad[1, 2] = 0.0
        with pytest.raises(ValueError, match="zero"):
            estimate_channel_ls(grid, bad)

    def test_shape_mismatch_raises(self):
        with pytest.raises(ValueError, match="identical shapes"):
            estimate_channel_ls(np.ones((2, 4)), np.ones((3, 4)))


class TestEqualize:
    def test_none_estimate_is_passthrough(self):
        grid = np.ones((2, 3), dtype=complex)
        assert equalize(grid, None) is grid

    def test_division_by_gains(self):
        est = ChannelEstimate(np.array([2.0, 0.5j]))
        out = equalize(np.array([[2.0, 1.0]], dtype=complex), est)
        np.testing.assert_allclose(out, [[1.0, -2.0j]])

    def test_tiny_gain_is_floored_not_divergent(self):
        est = ChannelEstimate(np.array([1e-12, 0.0, 1.0]))
        out = equalize(np.ones((1, 3), dtype=complex), est)
        assert np.all(np.isfinite(out))
        # both degenerate bins hit the same magnitude floor
        assert abs(out[0, 0]) == pytest.approx(1e6)
        assert abs(out[0, 1]) == pytest.approx(1e6)
        assert out[0, 2] == pytest.approx(1.0)


class TestAwgnBer:
    def test_chain_matches_analytic_curve_at_1e3(self):
        # Operate exactly at the Es/N0 where the Gray-16-QAM curve crosses
        # BER 1e-3; the measured chain BER must sit inside the +/-0.2 dB band
        # around that point (widened by the Monte-Carlo 3-sigma allowance).
        cfg = MulticarrierConfig()
        target = 1e-3
        esn0_star = brentq(lambda g: float(qam16_awgn_ber(g)) - target, 10.0, 22.0)
        # time-domain SNR that produces Es/N0 = esn0_star at the FFT output
        snr_time_db = esn0_star + 10 * np.log10(cfg.n_active / cfg.n_fft)
        rng = np.random.default_rng(12)
        errors = 0
        total = 0
        for chunk in range(3):
            bits = random_bits(4 * 1000 * cfg.n_active, 13 + chunk)
            grid = qam16_map(bits).reshape(1000, cfg.n_active)
            sig = ofdm_modulate(grid, cfg)
            sigma = np.sqrt(sig.power() / 10 ** (snr_time_db / 10))
            noise = (
                rng.standard_normal(len(sig)) + 1j * rng.standard_normal(len(sig))
            ) * (sigma / np.sqrt(2))
            rx = ofdm_demodulate(ComplexSignal(sig.samples + noise, sig.sample_rate), cfg)
            errors += int(np.sum(qam16_demap(rx) != bits))
            total += bits.size
        measured = errors / total
        band_lo = float(qam16_awgn_ber(esn0_star + 0.2))
        band_hi = float(qam16_awgn_ber(esn0_star - 0.2))
        mc_sigma = np.sqrt(target / total)
        assert band_lo - 3 * mc_sigma < measured < band_hi + 3 * mc_sigma
