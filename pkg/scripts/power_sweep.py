#!/usr/bin/env python3
"""Received-power sweep: wireless BER waterfalls plus the wired PAM-4 lane.

Sweeps the receiver input power for each multicarrier waveform over the full
converged link, aggregates the three wireless bands into one BER curve per
waveform, and reports where each curve crosses BER 1e-3 along with the wired
lane's BER at every point.  CSVs land under --out for plotting.
"""

import argparse
from pathlib import Path

from pon5g.harness import normalize_config, read_csv_rows, run_experiment
from pon5g.metrics import sensitivity_at_ber

WAVEFORMS = ("ofdm", "ufofdm", "gfdm")
FEC_BER = 3.8e-3


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--powers", type=float, nargs="+",
                        default=[-26, -25, -24, -23, -22, -21],
                        help="received powers in dBm")
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--frames", type=int, default=150,
                        help="payload frames for OFDM/UF-OFDM (GFDM uses 1/5)")
    parser.add_argument("--out", default="results/power_sweep")
    parser.add_argument("--workers", type=int, default=1)
    return parser.parse_args()


def waterfall(rows):
    """(powers, wireless BERs, wired BERs) aggregated from results rows."""
    powers = sorted({r["rx_power_dbm"] for r in rows})
    wireless, wired = [], []
    for p in powers:
        bands = [r for r in rows
                 if r["rx_power_dbm"] == p and r["band_id"] in (1, 2, 3)]
        wireless.append(sum(r["bit_errors"] for r in bands)
                        / sum(r["bit_count"] for r in bands))
        pam = [r for r in rows
               if r["rx_power_dbm"] == p and r["waveform"] == "pam4"]
        wired.append(pam[0]["ber"] if pam else None)
    return powers, wireless, wired


def crossing(powers, bers, target=1e-3):
    for i in range(len(powers) - 1):
        if bers[i] >= target >= bers[i + 1]:
            return sensitivity_at_ber(powers[i:i + 2], bers[i:i + 2], target)
    return None


def main():
    args = parse_args()
    sens = {}
    for waveform in WAVEFORMS:
        gfdm = waveform == "gfdm"
        cfg, errors = normalize_config({
            "name": f"power-{waveform}",
            "waveform": waveform,
            "seed": args.seed,
            "rx_power_dbm": list(args.powers),
            "guard_band_hz": 15e6,
            "with_pam": True,
            "fiber_km": 25.0,
            "n_frames": max(1, args.frames // 5) if gfdm else args.frames,
            "n_training": 2 if gfdm else 10,
        })
        if errors:
            raise SystemExit("; ".join(errors))
        paths = run_experiment(cfg, workers=args.workers,
                               out_dir=Path(args.out) / waveform)
        powers, wireless, wired = waterfall(read_csv_rows(paths[0]))

        print(f"\n{waveform}:")
        print(f"  {'power':>7} {'wireless BER':>13} {'PAM-4 BER':>10}")
        for p, bw, bp in zip(powers, wireless, wired):
            pam = f"{bp:.2e}" if bp else "-"
            print(f"  {p:>5.1f}   {bw:>13.3e} {pam:>10}")
        sens[waveform] = crossing(powers, wireless)
        if sens[waveform] is not None:
            print(f"  crosses BER 1e-3 at {sens[waveform]:.2f} dBm")
        else:
            print("  BER 1e-3 not bracketed by this power range")

    if sens.get("ofdm") is not None and sens.get("gfdm") is not None:
        print(f"\nGFDM needs {sens['gfdm'] - sens['ofdm']:+.2f} dB more "
              f"received power than OFDM at BER 1e-3")
    print(f"CSVs under {args.out}/")


if __name__ == "__main__":
    main()
