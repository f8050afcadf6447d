#!/usr/bin/env python3
"""Spectral containment report for the three multicarrier waveforms.

Estimates each waveform's power spectral density over one clean band at the
modem rate, prints the out-of-band level a chosen offset past the band edge
and the ordering between waveforms, then assembles the full 20 GSa/s
composite drive (three bands + wired PAM-4 lane) and reports its
wired-to-wireless power ratio.  Writes one psd.csv per waveform plus
composite.csv under --out for plotting.
"""

import argparse
from pathlib import Path

import numpy as np

from pon5g.dsp import welch_psd
from pon5g.gfdm import GfdmConfig, gfdm_modulate
from pon5g.harness import PAM_TRAINING_SYMBOLS
from pon5g.link import LinkConfig, assemble_composite, band_centers
from pon5g.mapping import qam16_map, random_bits
from pon5g.metrics import oob_level_db, wwpr_db
from pon5g.ofdm import MulticarrierConfig, ofdm_modulate
from pon5g.pam import pam4_transmit
from pon5g.signals import ComplexSignal
from pon5g.ufofdm import UfofdmConfig, ufofdm_modulate

MODEMS = {
    "ofdm": (MulticarrierConfig(cp_len=32), ofdm_modulate),
    "ufofdm": (UfofdmConfig(), ufofdm_modulate),
    "gfdm": (GfdmConfig(), gfdm_modulate),
}


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--offset-mhz", type=float, default=10.0,
                        help="offset past the band edge (default 10 MHz)")
    parser.add_argument("--guard-mhz", type=float, default=15.0)
    parser.add_argument("--rows", type=int, default=2000,
                        help="symbol rows per burst; the GFDM skirt "
                             "self-averages slowly, so keep this large")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default="results/psd")
    return parser.parse_args()


def modulated_burst(waveform: str, rows: int, seed: int):
    cfg, modulate = MODEMS[waveform]
    bits = random_bits(4 * rows * cfg.n_active, seed)
    grid = qam16_map(bits).reshape(rows, cfg.n_active)
    return cfg, modulate(grid, cfg)


def write_psd(path: Path, freqs, psd_db):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["freq_hz,psd_db"]
    lines += [f"{f!r},{p!r}" for f, p in zip(freqs, psd_db)]
    path.write_text("\n".join(lines) + "\n")


def main():
    args = parse_args()
    out = Path(args.out)
    offset = args.offset_mhz * 1e6

    levels = {}
    for waveform in MODEMS:
        cfg, sig = modulated_burst(waveform, args.rows, args.seed)
        f, p = welch_psd(sig, 4096)
        edge = cfg.band_bw_hz / 2
        levels[waveform] = oob_level_db(f, p, -edge, edge, offset)
        write_psd(out / f"{waveform}.csv", f, p)

    print(f"out-of-band level {args.offset_mhz:g} MHz past the band edge "
          f"(dB relative to in-band):")
    for waveform, level in levels.items():
        print(f"  {waveform:<8} {level:>7.1f} dB")
    ordered = levels["ufofdm"] < levels["gfdm"] < levels["ofdm"]
    print(f"containment ordering UF < GFDM < OFDM: "
          f"{'holds' if ordered else 'violated'}")
    print(f"UF-OFDM sits {levels['ofdm'] - levels['ufofdm']:.1f} dB below "
          f"plain OFDM at this offset")

    # Composite drive: three OFDM bands around 5.5 GHz plus the PAM-4 lane.
    # The power ratio converges much faster than the skirts, so a shorter
    # burst keeps the 20 GSa/s arrays small.
    link = LinkConfig(guard_band_hz=args.guard_mhz * 1e6)
    mc = MODEMS["ofdm"][0]
    comp_rows = min(args.rows, 400)
    bands = [modulated_burst("ofdm", comp_rows, args.seed + 1 + b)[1]
             for b in range(3)]
    l_dac = int(round(len(bands[0]) * link.dac_rate / mc.sample_rate))
    n_pam = int(l_dac * link.pam_baud / link.dac_rate) + 64
    pam_bits = random_bits(2 * max(n_pam, PAM_TRAINING_SYMBOLS),
                           args.seed + 9)
    pam_full = pam4_transmit(pam_bits, link.pam_baud, link.dac_rate)
    pam_sig = ComplexSignal(pam_full.samples[:l_dac], link.dac_rate)
    composite = assemble_composite(bands, pam_sig, link, mc.band_bw_hz)

    f, p = welch_psd(composite, 8192)
    write_psd(out / "composite.csv", f, p)
    edge = mc.band_bw_hz / 2
    centers = band_centers(link, mc.band_bw_hz)
    ratio = wwpr_db(f, p, (0.0, centers[0] - edge),
                    [(c - edge, c + edge) for c in centers])
    print(f"\ncomposite wired-to-wireless power ratio: {ratio:.2f} dB "
          f"(target {link.wwpr_target_db:g})")
    print(f"CSVs under {args.out}/")


if __name__ == "__main__":
    main()
