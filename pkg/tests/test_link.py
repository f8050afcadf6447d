"""Tests for composite assembly and the IM/DD optical link model."""

import numpy as np
import pytest

from pon5g.dsp import welch_psd
from pon5g.link import (
    C_LIGHT,
    CompositeLayoutError,
    LinkConfig,
    NoiseCalibration,
    apply_optical_link,
    assemble_composite,
    awgn,
    band_centers,
    clip,
    dispersion_phase,
    extract_band,
)
from pon5g.mapping import qam16_map, random_bits
from pon5g.metrics import evm_percent, integrate_psd, papr_db, wwpr_db
from pon5g.ofdm import (
    MulticarrierConfig,
    equalize,
    estimate_channel_ls,
    ofdm_demodulate,
    ofdm_modulate,
)
from pon5g.pam import pam4_transmit
from pon5g.signals import ComplexSignal

MODEM = MulticarrierConfig()


def ofdm_band(n_rows: int, seed: int):
    grid = qam16_map(random_bits(4 * n_rows * MODEM.n_active, seed)).reshape(
        n_rows, MODEM.n_active
    )
    return grid, ofdm_modulate(grid, MODEM)


def pam_lane(n_samples: int, seed: int, cfg: LinkConfig) -> ComplexSignal:
    n_sym = int(n_samples * cfg.pam_baud / cfg.dac_rate) + 64
    sig = pam4_transmit(random_bits(2 * n_sym, seed), cfg.pam_baud, cfg.dac_rate)
    return ComplexSignal(sig.samples[:n_samples], cfg.dac_rate)


class TestClip:
    def test_real_hard_clip(self):
        out = clip(np.array([1.0, -10.0, 5.0]), 0.8)
        np.testing.assert_allclose(out, [1.0, -8.0, 5.0])

    def test_complex_envelope_clip_keeps_phase(self):
        x = np.array([3.0 + 4.0j, 0.1 + 0.1j, -5.0j])
        out = clip(x, 0.6)
        limit = 0.6 * 5.0
        assert np.all(np.abs(out) <= limit * (1 + 1e-12))
        np.testing.assert_allclose(np.angle(out), np.angle(x))
        assert out[1] == x[1]  # below the limit: untouched

    def test_ratio_one_is_identity(self):
        x = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(clip(x, 1.0), x)

    def test_empty_input(self):
        assert clip(np.array([]), 0.8).size == 0

    @pytest.mark.parametrize("ratio", [0.0, -0.5, 1.2])
    def test_bad_ratio_raises(self, ratio):
        with pytest.raises(ValueError, match="ratio"):
            clip(np.ones(4), ratio)


class TestBandPlan:
    def test_centers_arithmetic(self):
        cfg = LinkConfig()
        centers = band_centers(cfg, MODEM.band_bw_hz)
        np.testing.assert_allclose(
            centers, [5.33265625e9, 5.5e9, 5.66734375e9], rtol=0, atol=1e-3
        )

    def test_guard_moves_outer_bands(self):
        cfg = LinkConfig(guard_band_hz=5e6)
        centers = band_centers(cfg, MODEM.band_bw_hz)
        s = MODEM.band_bw_hz + 5e6
        np.testing.assert_allclose(centers, [5.5e9 - s, 5.5e9, 5.5e9 + s])

    def test_layout_below_dc_rejected(self):
        _, band = ofdm_band(1, 0)
        with pytest.raises(CompositeLayoutError, match="below DC"):
            assemble_composite([band], None, LinkConfig(), band_bw_hz=5e9)

    def test_layout_beyond_nyquist_rejected(self):
        _, band = ofdm_band(1, 0)
        with pytest.raises(CompositeLayoutError, match="Nyquist"):
            assemble_composite([band], None, LinkConfig(), band_bw_hz=4e9)

    def test_layout_inside_pam_lobe_rejected(self):
        _, band = ofdm_band(1, 0)
        with pytest.raises(CompositeLayoutError, match="PAM main lobe"):
            assemble_composite([band], None, LinkConfig(), band_bw_hz=1.6e9)


class TestAssemble:
    def test_wired_to_wireless_ratio_is_exact(self):
        cfg = LinkConfig()
        bands = [ofdm_band(10, s)[1] for s in (1, 2, 3)]
        pam = pam_lane(10 * len(bands[0]), 4, cfg)
        with_pam = assemble_composite(bands, pam, cfg, MODEM.band_bw_hz)
        wireless = assemble_composite(bands, None, cfg, MODEM.band_bw_hz)
        pam_part = with_pam.samples - wireless.samples
        ratio_db = 10 * np.log10(np.mean(pam_part**2) / wireless.power())
        assert ratio_db == pytest.approx(cfg.wwpr_target_db, abs=1e-9)

    def test_bands_land_on_their_if_slots(self):
        cfg = LinkConfig()
        bands = [ofdm_band(10, s)[1] for s in (5, 6, 7)]
        sig = assemble_composite(bands, None, cfg, MODEM.band_bw_hz)
        assert sig.is_real
        assert sig.sample_rate == cfg.dac_rate
        freqs, psd_db = welch_psd(sig, 8192)
        half = MODEM.band_bw_hz / 2
        for fc in band_centers(cfg, MODEM.band_bw_hz):
            inside = integrate_psd(freqs, psd_db, fc - half, fc + half)
            outside = integrate_psd(freqs, psd_db, 6.2e9, 6.2e9 + MODEM.band_bw_hz)
            assert 10 * np.log10(inside / outside) > 15.0

    def test_band_powers_are_equalized(self):
        cfg = LinkConfig()
        grid_a, band_a = ofdm_band(10, 8)
        band_b = ComplexSignal(band_a.samples * 7.3, band_a.sample_rate)  # hot input
        sig_a = assemble_composite([band_a], None, cfg, MODEM.band_bw_hz)
        sig_b = assemble_composite([band_b], None, cfg, MODEM.band_bw_hz)
        np.testing.assert_allclose(sig_a.samples, sig_b.samples, atol=1e-12)

    def test_zero_wireless_returns_pam_unchanged(self):
        cfg = LinkConfig()
        silent = ComplexSignal(np.zeros(4000, dtype=complex), 2e9)
        pam = pam_lane(40000, 9, cfg)
        out = assemble_composite([silent], pam, cfg, MODEM.band_bw_hz)
        np.testing.assert_array_equal(out.samples, pam.samples)
        assert out.samples is not pam.samples

    def test_zero_pam_returns_wireless_only(self):
        cfg = LinkConfig()
        _, band = ofdm_band(4, 10)
        pam = ComplexSignal(np.zeros(10 * len(band)), cfg.dac_rate)
        out = assemble_composite([band], pam, cfg, MODEM.band_bw_hz)
        ref = assemble_composite([band], None, cfg, MODEM.band_bw_hz)
        np.testing.assert_array_equal(out.samples, ref.samples)

    def test_composite_papr_in_measured_range(self):
        # Three clipped multicarrier bands plus the PAM lane. PAPR is a peak
        # statistic, so it creeps up with record length; 30-symbol bands land
        # in a 11-13 dB window across seeds.
        cfg = LinkConfig()
        bands = [ofdm_band(30, s)[1] for s in (11, 12, 13)]
        pam = pam_lane(10 * len(bands[0]), 14, cfg)
        sig = assemble_composite(bands, pam, cfg, MODEM.band_bw_hz)
        assert 11.0 <= papr_db(sig.samples) <= 13.0

    def test_wwpr_measured_from_spectrum(self):
        cfg = LinkConfig()
        bands = [ofdm_band(30, s)[1] for s in (15, 16, 17)]
        pam = pam_lane(10 * len(bands[0]), 18, cfg)
        sig = assemble_composite(bands, pam, cfg, MODEM.band_bw_hz)
        freqs, psd_db = welch_psd(sig, 8192)
        half = MODEM.band_bw_hz / 2
        regions = [(fc - half, fc + half) for fc in band_centers(cfg, MODEM.band_bw_hz)]
        measured = wwpr_db(freqs, psd_db, (0.0, regions[0][0]), regions)
        assert measured == pytest.approx(cfg.wwpr_target_db, abs=0.5)

    def test_mismatched_band_rates_rejected(self):
        cfg = LinkConfig()
        _, a = ofdm_band(2, 19)
        b = ComplexSignal(a.samples.copy(), 1e9)
        with pytest.raises(ValueError, match="one sample rate"):
            assemble_composite([a, b], None, cfg, MODEM.band_bw_hz)

    def test_too_many_bands_rejected(self):
        cfg = LinkConfig()
        _, a = ofdm_band(1, 20)
        with pytest.raises(ValueError, match="slots"):
            assemble_composite([a, a, a, a], None, cfg, MODEM.band_bw_hz)

    def test_empty_band_list_rejected(self):
        with pytest.raises(ValueError, match="at least one band"):
            assemble_composite([], None, LinkConfig(), MODEM.band_bw_hz)

    def test_pam_rate_and_length_checked(self):
        cfg = LinkConfig()
        _, band = ofdm_band(2, 21)
        wrong_rate = ComplexSignal(np.zeros(10 * len(band)), 10e9)
        with pytest.raises(ValueError, match="DAC rate"):
            assemble_composite([band], wrong_rate, cfg, MODEM.band_bw_hz)
        wrong_len = ComplexSignal(np.zeros(100), cfg.dac_rate)
        with pytest.raises(ValueError, match="length"):
            assemble_composite([band], wrong_len, cfg, MODEM.band_bw_hz)


class TestDispersion:
    def test_phase_at_55ghz_over_25km(self):
        cfg = LinkConfig()
        lam = 1550e-9
        expected = np.pi * lam**2 * (17e-6 * 25e3) * (5.5e9**2) / C_LIGHT
        assert dispersion_phase(cfg, 5.5e9) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(0.3237, abs=5e-4)

    def test_phase_is_quadratic_in_frequency(self):
        cfg = LinkConfig()
        assert dispersion_phase(cfg, 11e9) == pytest.approx(
            4 * dispersion_phase(cfg, 5.5e9), rel=1e-12
        )

    def test_phase_scales_with_length(self):
        a = dispersion_phase(LinkConfig(fiber_km=25.0), 5.5e9)
        b = dispersion_phase(LinkConfig(fiber_km=50.0), 5.5e9)
        assert b == pytest.approx(2 * a, rel=1e-12)


class TestNoiseCalibration:
    def test_sigma_at_reference(self):
        cal = NoiseCalibration(ref_power_dbm=-16.0, ref_sigma=0.05, slope_db_per_db=1.0)
        assert cal.sigma(-16.0) == 0.05

    def test_sigma_slope(self):
        cal = NoiseCalibration(ref_power_dbm=-16.0, ref_sigma=0.05, slope_db_per_db=1.0)
        # 20 dB more optical power -> 20 dB less electrical noise amplitude
        assert cal.sigma(4.0) == pytest.approx(0.005)
        assert cal.sigma(-36.0) == pytest.approx(0.5)
        # electrical noise grows as power drops
        assert cal.sigma(-18.0) > cal.sigma(-16.0)

    def test_double_slope(self):
        cal = NoiseCalibration(ref_power_dbm=0.0, ref_sigma=1.0, slope_db_per_db=2.0)
        assert cal.sigma(-5.0) == pytest.approx(10 ** (10.0 / 20.0))


class TestOpticalLink:
    def test_noise_free_output_is_deterministic_unit_rms(self):
        cfg = LinkConfig(rx_power_dbm=None)
        _, band = ofdm_band(6, 22)
        drive = assemble_composite([band], None, cfg, MODEM.band_bw_hz)
        out1 = apply_optical_link(drive, cfg)
        out2 = apply_optical_link(drive, cfg)
        np.testing.assert_array_equal(out1.samples, out2.samples)
        assert out1.power() == pytest.approx(1.0, rel=1e-9)
        assert abs(np.mean(out1.samples)) < 1e-12
        assert out1.is_real

    def test_quadrature_bias_inverts_the_drive(self):
        # i(t) ~ (1 - sin(2 * drive))/2: the small-signal AC response has
        # opposite sign to the drive. The PAM receiver's polarity detector
        # depends on this behavior. Probe with a tone far below the APD pole
        # so the photodiode response contributes no extra decorrelation.
        cfg = LinkConfig(fiber_km=0.0, mzm_index=0.02)
        n = 1 << 14
        x = np.sin(2 * np.pi * 82 * np.arange(n) / n)
        sig = ComplexSignal(x, cfg.dac_rate)
        out = apply_optical_link(sig, cfg)
        corr = np.corrcoef(x, out.samples)[0, 1]
        assert corr < -0.999

    def test_back_to_back_small_index_is_linear(self):
        # Single radio band, no fiber, no noise: the recovered constellation
        # is clean apart from the 80% clip and the APD tilt.  A lone band has
        # no neighbours, so the receive mask can be generous.
        cfg = LinkConfig(fiber_km=0.0, mzm_index=0.02)
        grid, band = ofdm_band(12, 24)
        drive = assemble_composite([band], None, cfg, MODEM.band_bw_hz)
        rx = apply_optical_link(drive, cfg)
        fc = band_centers(cfg, MODEM.band_bw_hz)[0]
        base = extract_band(rx, fc, 3 * MODEM.band_bw_hz, 2e9)
        raw = ofdm_demodulate(
            ComplexSignal(base.samples[: 12 * MODEM.symbol_len], 2e9), MODEM
        )
        est = estimate_channel_ls(raw[:4], grid[:4])
        rx_grid = equalize(raw[4:], est)
        assert evm_percent(rx_grid, grid[4:]) < 2.0

    def test_noise_requires_generator(self):
        cfg = LinkConfig(rx_power_dbm=-16.0)
        _, band = ofdm_band(2, 25)
        drive = assemble_composite([band], None, cfg, MODEM.band_bw_hz)
        with pytest.raises(ValueError, match="Generator"):
            apply_optical_link(drive, cfg)

    def test_noise_sigma_follows_calibration(self):
        cfg_quiet = LinkConfig(rx_power_dbm=None)
        cfg_noisy = LinkConfig(rx_power_dbm=-16.0)
        _, band = ofdm_band(10, 26)
        drive = assemble_composite([band], None, cfg_quiet, MODEM.band_bw_hz)
        clean = apply_optical_link(drive, cfg_quiet)
        noisy = apply_optical_link(drive, cfg_noisy, rng=np.random.default_rng(0))
        resid = noisy.samples - clean.samples
        assert np.std(resid) == pytest.approx(cfg_noisy.noise.sigma(-16.0), rel=0.05)

    def test_zero_drive_rejected(self):
        with pytest.raises(ValueError, match="zero-power"):
            apply_optical_link(ComplexSignal(np.zeros(64), 20e9), LinkConfig())

    def test_config_requires_noise_model_when_power_set(self):
        with pytest.raises(ValueError, match="calibration"):
            LinkConfig(rx_power_dbm=-14.0, noise=None)


class TestExtractBand:
    def test_assemble_then_extract_loopback(self):
        # No optical stage: assemble -> extract -> demod recovers a lone band.
        # Uses a long record so the 0.8-of-peak clip only shaves the extreme
        # PAPR tail (short records put the clip threshold closer to the RMS).
        cfg = LinkConfig()
        grid, band = ofdm_band(40, 27)
        drive = assemble_composite([band], None, cfg, MODEM.band_bw_hz)
        fc = band_centers(cfg, MODEM.band_bw_hz)[0]
        base = extract_band(drive, fc, 4 * MODEM.band_bw_hz, 2e9)
        raw = ofdm_demodulate(
            ComplexSignal(base.samples[: 40 * MODEM.symbol_len], 2e9), MODEM
        )
        est = estimate_channel_ls(raw[:4], grid[:4])
        rx_grid = equalize(raw[4:], est)
        assert evm_percent(rx_grid, grid[4:]) < 1.0

    def test_adjacent_band_rejection(self):
        # Extracting the middle of three occupied slots with a mask sized to
        # the allocation leaves the neighbours at least 30 dB below in-band.
        cfg = LinkConfig()
        bands = [ofdm_band(8, 40 + i)[1] for i in range(3)]
        drive = assemble_composite(bands, None, cfg, MODEM.band_bw_hz)
        fc = band_centers(cfg, MODEM.band_bw_hz)[1]
        out = extract_band(drive, fc, MODEM.band_bw_hz + cfg.guard_band_hz, 2e9)
        freqs, psd_db = welch_psd(out, 4096)
        half = MODEM.band_bw_hz / 2
        spacing = MODEM.band_bw_hz + cfg.guard_band_hz
        in_band = integrate_psd(freqs, psd_db, -half, half)
        adjacent = integrate_psd(freqs, psd_db, spacing - half, spacing + half)
        adjacent += integrate_psd(freqs, psd_db, -spacing - half, -spacing + half)
        assert 10 * np.log10(in_band / adjacent) >= 30.0

    def test_output_rate_and_length(self):
        cfg = LinkConfig()
        _, band = ofdm_band(4, 28)
        drive = assemble_composite([band], None, cfg, MODEM.band_bw_hz)
        out = extract_band(drive, 5.33265625e9, 170e6, 2e9)
        assert out.sample_rate == pytest.approx(2e9)
        assert len(out) == len(drive) // 10

    def test_non_integer_decimation_rejected(self):
        sig = ComplexSignal(np.zeros(1000), 20e9)
        with pytest.raises(ValueError, match="integer multiple"):
            extract_band(sig, 5.5e9, 100e6, 1.5e9)


class TestAwgn:
    def test_realized_snr_is_exact(self):
        rng = np.random.default_rng(29)
        x = rng.standard_normal(5000) + 1j * rng.standard_normal(5000)
        sig = ComplexSignal(x, 1e6)
        out = awgn(sig, 17.0, rng=np.random.default_rng(1))
        noise = out.samples - x
        snr = 10 * np.log10(sig.power() / np.mean(np.abs(noise) ** 2))
        assert snr == pytest.approx(17.0, abs=1e-9)

    def test_real_signal_gets_real_noise(self):
        sig = ComplexSignal(np.ones(100), 1e6)
        out = awgn(sig, 10.0, seed=2)
        assert out.is_real

    def test_seed_reproducibility(self):
        sig = ComplexSignal(np.ones(100), 1e6)
        a = awgn(sig, 10.0, seed=3)
        b = awgn(sig, 10.0, seed=3)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_degenerate_inputs_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            awgn(ComplexSignal(np.array([]), 1.0), 10.0, seed=0)
        with pytest.raises(ValueError, match="zero-power"):
            awgn(ComplexSignal(np.zeros(8), 1.0), 10.0, seed=0)
