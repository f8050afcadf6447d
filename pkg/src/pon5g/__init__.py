"""Physical-layer simulation of a converged fiber access link that carries a
wired PAM-4 lane at baseband together with three IF-stacked multicarrier radio
bands (OFDM, UF-OFDM, or GFDM) over one intensity-modulated optical channel.
"""

__version__ = "0.1.0"

from .signals import ComplexSignal, FilterTaps, read_signal, write_signal
from .dsp import (design_dolph_chebyshev, fft_forward, fft_inverse,
                  frequency_shift, gaussian_band_response, resample_rational,
                  welch_psd)
from .mapping import (pam4_awgn_ber, pam4_constellation, pam4_decide,
                      pam4_demap, pam4_map, qam16_awgn_ber,
                      qam16_constellation, qam16_demap, qam16_map,
                      random_bits)
from .ofdm import (ChannelEstimate, MulticarrierConfig, active_bins, equalize,
                   estimate_channel_ls, ofdm_demodulate, ofdm_modulate)
from .ufofdm import (UfofdmConfig, subband_filters, ufofdm_demodulate,
                     ufofdm_demodulate_aliased, ufofdm_modulate)
from .gfdm import (GfdmConfig, SingularPrototypeError, block_response_from_gains,
                   block_response_from_taps, gfdm_build_matrix,
                   gfdm_demodulate_zf, gfdm_modulate, noise_enhancement_db,
                   prototype_pulse)
from .pam import (EqualizerDivergence, EqualizerResult, pam4_receive,
                  pam4_transmit, write_eye_csv)
from .link import (LinkConfig, NoiseCalibration, apply_optical_link,
                   assemble_composite, awgn, band_centers, clip,
                   dispersion_phase, extract_band)
from .metrics import (MetricsReport, ber_count, evm_percent, integrate_psd,
                      oob_level_db, papr_db, per_subcarrier_evm,
                      sensitivity_at_ber, wilson_interval, wwpr_db)
