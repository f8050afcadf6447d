"""Experiment orchestration: presets, deterministic pipeline, CSV results, CLI.

Pipeline per trial: generate per-band payloads, modulate the three radio
bands, assemble the composite drive (wireless IF stack plus the wired PAM-4
lane), run the optical link, extract and demodulate every band, and count
metrics. Sweep points and trials are independent; rows are written once, in
config order, so identical (config, seed) reruns produce byte-identical
files.

Seed policy: every random stream derives from
numpy.random.SeedSequence([master_seed, point_index, trial_index, stream_id])
with stream ids 0-2 = band payloads, 3 = wired payload, 4 = link noise. Any
(point, trial) pair is therefore reproducible in isolation, and adding sweep
points or trials never perturbs existing ones.

CSV schemas (headers are stable interfaces for the plotting package):
  results.csv            experiment,waveform,band_id,guard_hz,rx_power_dbm,
                         snr_db,evm_percent,ber,bit_errors,bit_count,seed,
                         version
  per_subcarrier_evm.csv experiment,waveform,band_id,guard_hz,rx_power_dbm,
                         snr_db,subcarrier,evm_percent,seed,version
  psd.csv                experiment,waveform,signal,freq_hz,psd_db,seed,
                         version
band_id 0 is the wired PAM-4 lane (waveform column reads "pam4"), 1-3 are the
wireless bands in ascending center frequency. subcarrier runs 1-78 across the
band. Floats are written with repr() so every row round-trips losslessly.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dsp import welch_psd
from .gfdm import GfdmConfig, block_response_from_gains, gfdm_demodulate_zf, gfdm_modulate
from .link import (LinkConfig, apply_optical_link, assemble_composite, awgn,
                   band_centers, extract_band)
from .mapping import (pam4_decide, pam4_map, qam16_demap, qam16_map,
                      random_bits)
from .ofdm import (MulticarrierConfig, equalize, estimate_channel_ls,
                   ofdm_demodulate, ofdm_modulate)
from .pam import pam4_receive, pam4_transmit
from .signals import ComplexSignal
from .ufofdm import UfofdmConfig, ufofdm_demodulate, ufofdm_modulate

WAVEFORMS = ("ofdm", "ufofdm", "gfdm")
N_BANDS = 3
PAM_TRAINING_SYMBOLS = 2000

_STREAM_PAM = N_BANDS
_STREAM_NOISE = N_BANDS + 1

RESULTS_COLUMNS = ("experiment", "waveform", "band_id", "guard_hz",
                   "rx_power_dbm", "snr_db", "evm_percent", "ber",
                   "bit_errors", "bit_count", "seed", "version")
SUBCARRIER_COLUMNS = ("experiment", "waveform", "band_id", "guard_hz",
                      "rx_power_dbm", "snr_db", "subcarrier", "evm_percent",
                      "seed", "version")
PSD_COLUMNS = ("experiment", "waveform", "signal", "freq_hz", "psd_db",
               "seed", "version")


class ConfigError(ValueError):
    """Invalid experiment configuration; .messages lists every problem."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))

    def __reduce__(self):
        return (ConfigError, (self.messages,))


class StageError(RuntimeError):
    """A pipeline stage failed; .stage names it."""

    def __init__(self, message: str, stage: str = ""):
        super().__init__(message)
        self.stage = stage

    def __reduce__(self):
        return (StageError, (self.args[0], self.stage))


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as err:
        raise StageError(f"stage '{name}' failed: {err}", name) from err


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    waveform: str
    seed: int
    guard_band_hz: float = 15e6
    with_pam: bool = True
    wireless_scale: float = 1.0
    rx_power_dbm: tuple = ()
    snr_db: tuple = ()
    fiber_km: float = 25.0
    n_frames: int = 500
    n_training: int = 10
    n_trials: int = 1
    output_dir: str = "results"


@dataclass(frozen=True)
class SweepPoint:
    index: int
    rx_power_dbm: float | None
    snr_db: float | None


PRESET_NAMES = ("ofdm-t1", "ufofdm-t1", "gfdm-t1")


def preset_config(name: str) -> dict:
    """Raw config dict for a named preset (full numerology, one sweep point)."""
    if name not in PRESET_NAMES:
        raise ConfigError([f"unknown preset '{name}' (have: {', '.join(PRESET_NAMES)})"])
    waveform = name.split("-")[0]
    gfdm = waveform == "gfdm"
    return {
        "name": name,
        "waveform": waveform,
        "seed": 1,
        "guard_band_hz": 15e6,
        "with_pam": True,
        "wireless_scale": 1.0,
        "rx_power_dbm": [-14.0],
        "fiber_km": 25.0,
        # frame = one multicarrier symbol, or one 5-subsymbol block for gfdm,
        # so both defaults carry 500 payload rows per trial
        "n_frames": 100 if gfdm else 500,
        "n_training": 2 if gfdm else 10,
        "n_trials": 1,
        "output_dir": "results",
    }


def waveform_config(waveform: str) -> MulticarrierConfig:
    if waveform == "ofdm":
        return MulticarrierConfig()
    if waveform == "ufofdm":
        return UfofdmConfig()
    if waveform == "gfdm":
        return GfdmConfig()
    raise ConfigError([f"unknown waveform '{waveform}'"])


def _rows_per_frame(waveform: str) -> int:
    cfg = waveform_config(waveform)
    return cfg.n_subsymbols if isinstance(cfg, GfdmConfig) else 1


_CONFIG_KEYS = {"name", "waveform", "seed", "guard_band_hz", "with_pam",
                "wireless_scale", "rx_power_dbm", "snr_db", "fiber_km",
                "n_frames", "n_training", "n_trials", "output_dir", "preset"}


def _as_number(raw, key, errors, integer=False, minimum=None):
    value = raw.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{key}: expected a number, got {value!r}")
        return None
    if integer and int(value) != value:
        errors.append(f"{key}: expected an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        errors.append(f"{key}: must be >= {minimum}, got {value!r}")
        return None
    return int(value) if integer else float(value)


def _as_sweep(raw, key, errors):
    value = raw.get(key, [])
    if value is None:
        return ()
    if not isinstance(value, (list, tuple)):
        errors.append(f"{key}: expected a list of numbers")
        return ()
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            errors.append(f"{key}: non-numeric entry {v!r}")
            return ()
        out.append(float(v))
    return tuple(out)


def normalize_config(raw: dict):
    """Validate a raw config dict. Returns (ExperimentConfig, error list).

    A present "preset" key supplies defaults that explicit keys override.
    Unknown keys, missing mandatory fields, and invariant violations are all
    reported together. On any error the config slot is None.
    """
    errors = []
    if not isinstance(raw, dict):
        return None, ["config root must be a JSON object"]
    merged = dict(raw)
    if "preset" in merged:
        try:
            base = preset_config(merged["preset"])
        except ConfigError as err:
            return None, err.messages
        base.update({k: v for k, v in merged.items() if k != "preset"})
        merged = base
    unknown = sorted(set(merged) - _CONFIG_KEYS)
    for key in unknown:
        errors.append(f"unknown key '{key}'")

    waveform = merged.get("waveform")
    if waveform not in WAVEFORMS:
        errors.append(f"waveform: must be one of {', '.join(WAVEFORMS)}, got {waveform!r}")
    if "seed" not in merged:
        errors.append("seed: mandatory for reproducibility")
        seed = None
    else:
        seed = _as_number(merged, "seed", errors, integer=True, minimum=0)

    name = merged.get("name", "experiment")
    if not isinstance(name, str) or not name:
        errors.append(f"name: expected a non-empty string, got {name!r}")
    out_dir = merged.get("output_dir", "results")
    if not isinstance(out_dir, str) or not out_dir:
        errors.append(f"output_dir: expected a non-empty string, got {out_dir!r}")

    merged.setdefault("guard_band_hz", 15e6)
    merged.setdefault("fiber_km", 25.0)
    merged.setdefault("n_frames", 100 if waveform == "gfdm" else 500)
    merged.setdefault("n_training", 2 if waveform == "gfdm" else 10)
    merged.setdefault("n_trials", 1)
    merged.setdefault("wireless_scale", 1.0)
    guard = _as_number(merged, "guard_band_hz", errors, minimum=0.0)
    fiber = _as_number(merged, "fiber_km", errors, minimum=0.0)
    n_frames = _as_number(merged, "n_frames", errors, integer=True, minimum=1)
    n_training = _as_number(merged, "n_training", errors, integer=True, minimum=1)
    n_trials = _as_number(merged, "n_trials", errors, integer=True, minimum=1)
    scale = _as_number(merged, "wireless_scale", errors)
    if scale is not None and scale not in (0.0, 1.0):
        errors.append("wireless_scale: only 0 (wireless off) or 1 are meaningful; "
                      "per-band power is normalized in the composite")
        scale = None
    with_pam = merged.get("with_pam", True)
    if not isinstance(with_pam, bool):
        errors.append(f"with_pam: expected true/false, got {with_pam!r}")
        with_pam = True
    if scale == 0.0 and not with_pam:
        errors.append("nothing to transmit: wireless_scale 0 and with_pam false")

    rx_sweep = _as_sweep(merged, "rx_power_dbm", errors)
    snr_sweep = _as_sweep(merged, "snr_db", errors)
    if rx_sweep and snr_sweep:
        errors.append("give either an rx_power_dbm sweep or an snr_db sweep, not both")
    if not rx_sweep and not snr_sweep:
        errors.append("sweep list empty: need rx_power_dbm or snr_db values")

    if errors:
        return None, errors
    cfg = ExperimentConfig(
        name=name, waveform=waveform, seed=seed, guard_band_hz=guard,
        with_pam=with_pam, wireless_scale=scale, rx_power_dbm=rx_sweep,
        snr_db=snr_sweep, fiber_km=fiber, n_frames=n_frames,
        n_training=n_training, n_trials=n_trials, output_dir=out_dir)
    return cfg, []


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError([f"cannot read config: {err}"]) from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError([f"config is not valid JSON: {err}"]) from err


def config_as_dict(cfg: ExperimentConfig) -> dict:
    out = {}
    for key in sorted(_CONFIG_KEYS - {"preset"}):
        value = getattr(cfg, key)
        out[key] = list(value) if isinstance(value, tuple) else value
    return out


def sweep_points(cfg: ExperimentConfig):
    if cfg.rx_power_dbm:
        return [SweepPoint(i, p, None) for i, p in enumerate(cfg.rx_power_dbm)]
    return [SweepPoint(i, None, s) for i, s in enumerate(cfg.snr_db)]


# ---------------------------------------------------------------------------
# pipeline


def _stream_seed(cfg: ExperimentConfig, point_index: int, trial: int, stream: int):
    return np.random.SeedSequence([cfg.seed, point_index, trial, stream])


def _link_config(cfg: ExperimentConfig, point: SweepPoint) -> LinkConfig:
    return LinkConfig(guard_band_hz=cfg.guard_band_hz, fiber_km=cfg.fiber_km,
                      rx_power_dbm=point.rx_power_dbm)


def _modulate(grid: np.ndarray, mc: MulticarrierConfig) -> ComplexSignal:
    if isinstance(mc, GfdmConfig):
        return gfdm_modulate(grid, mc)
    if isinstance(mc, UfofdmConfig):
        return ufofdm_modulate(grid, mc)
    return ofdm_modulate(grid, mc)


def _recover_payload(base: ComplexSignal, mc: MulticarrierConfig,
                     grid: np.ndarray, n_train_rows: int) -> np.ndarray:
    """Channel-estimate on the leading training rows, equalize the rest."""
    known = grid[:n_train_rows]
    if isinstance(mc, GfdmConfig):
        raw = gfdm_demodulate_zf(base, mc)
        est = estimate_channel_ls(raw[:n_train_rows], known)
        resp = block_response_from_gains(est.gains, mc)
        return gfdm_demodulate_zf(base, mc, resp)[n_train_rows:]
    if isinstance(mc, UfofdmConfig):
        raw = ufofdm_demodulate(base, mc)
    else:
        raw = ofdm_demodulate(base, mc)
    est = estimate_channel_ls(raw[:n_train_rows], known)
    return equalize(raw[n_train_rows:], est)


# Per-band symbol-clock offsets, in modem samples.  The three bands model
# independently sourced services, so their symbol boundaries must not line
# up: co-timed edges make the inter-band leakage depend on the fractional
# subcarrier alignment of the band spacing (it can dip sharply at one guard
# width and spike at another), which no free-running multi-band system
# exhibits.  Fixed co-prime-ish offsets keep runs reproducible while
# removing that coherence.
_BAND_OFFSETS = (0, 431, 877)


def _build_burst(cfg: ExperimentConfig, point: SweepPoint, trial: int, n_rows: int):
    """Modulate all lanes and assemble the composite DAC-rate drive."""
    mc = waveform_config(cfg.waveform)
    link = _link_config(cfg, point)
    n_bits = n_rows * mc.n_active * 4
    grids, bits_list, bands = [], [], []
    for b in range(N_BANDS):
        bits = random_bits(n_bits, _stream_seed(cfg, point.index, trial, b))
        grid = qam16_map(bits).reshape(n_rows, mc.n_active)
        sig = _modulate(grid, mc)
        samples = np.roll(cfg.wireless_scale * sig.samples, _BAND_OFFSETS[b])
        bands.append(ComplexSignal(samples, sig.sample_rate))
        grids.append(grid)
        bits_list.append(bits)
    up = link.dac_rate / mc.sample_rate
    l_dac = int(round(len(bands[0]) * up))
    pam_bits = None
    pam_sig = None
    if cfg.with_pam:
        n_pam = int(l_dac * link.pam_baud / link.dac_rate) + 64
        pam_bits = random_bits(2 * n_pam, _stream_seed(cfg, point.index, trial, _STREAM_PAM))
        full = pam4_transmit(pam_bits, link.pam_baud, link.dac_rate)
        pam_sig = ComplexSignal(full.samples[:l_dac], link.dac_rate)
    composite = assemble_composite(bands, pam_sig, link, mc.band_bw_hz)
    return mc, link, grids, bits_list, bands, pam_bits, composite


def _run_trial(cfg: ExperimentConfig, point: SweepPoint, trial: int) -> dict:
    rows_per_frame = _rows_per_frame(cfg.waveform)
    n_train_rows = cfg.n_training * rows_per_frame
    n_rows = n_train_rows + cfg.n_frames * rows_per_frame
    with _stage("modulate"):
        mc, link, grids, bits_list, _, pam_bits, composite = _build_burst(
            cfg, point, trial, n_rows)
    with _stage("optical-link"):
        rng = np.random.default_rng(_stream_seed(cfg, point.index, trial, _STREAM_NOISE))
        rx = apply_optical_link(composite, link, rng)
        if point.snr_db is not None:
            rx = awgn(rx, point.snr_db, rng)
    bands_out = []
    if cfg.wireless_scale != 0:
        centers = band_centers(link, mc.band_bw_hz)
        # Channel-select filter sized to the full allocation: active band
        # plus half the guard gap on either side, so the mask edge sits
        # midway between adjacent bands.  Narrower would bite into the
        # band's own spectrum; wider would pass the neighbour's main lobe
        # straight to the demodulator window.
        width = mc.band_bw_hz + link.guard_band_hz
        bits_per_row = mc.n_active * 4
        for b in range(N_BANDS):
            with _stage(f"extract-band-{b + 1}"):
                base = extract_band(rx, float(centers[b]), width, mc.sample_rate)
                base = ComplexSignal(np.roll(base.samples, -_BAND_OFFSETS[b]),
                                     base.sample_rate)
            with _stage(f"demodulate-band-{b + 1}"):
                payload = _recover_payload(base, mc, grids[b], n_train_rows)
            err = payload - grids[b][n_train_rows:]
            rx_bits = qam16_demap(payload)
            ref_bits = bits_list[b][n_train_rows * bits_per_row:]
            bands_out.append({
                "sc_err_sq": np.sum(np.abs(err) ** 2, axis=0),
                "rows": int(err.shape[0]),
                "bit_errors": int(np.count_nonzero(rx_bits != ref_bits)),
                "bit_count": int(ref_bits.size),
            })
    pam_out = None
    if cfg.with_pam:
        with _stage("pam-receive"):
            training = pam4_map(pam_bits[: 2 * PAM_TRAINING_SYMBOLS])
            res = pam4_receive(rx, link.pam_baud, training)
        n_counted = res.bits.size // 2
        sym = res.symbols[res.first_counted: res.first_counted + n_counted]
        ref_bits = pam_bits[2 * res.first_counted: 2 * res.first_counted + res.bits.size]
        pam_out = {
            "err_sq": float(np.sum((sym - pam4_decide(sym)) ** 2)),
            "n_sym": int(sym.size),
            "bit_errors": int(np.count_nonzero(res.bits != ref_bits)),
            "bit_count": int(res.bits.size),
        }
    return {"bands": bands_out, "pam": pam_out}


def _psd_tables(cfg: ExperimentConfig, point: SweepPoint):
    """(label, freqs, psd_db) tables: clean single band + composite drive."""
    rows_per_frame = _rows_per_frame(cfg.waveform)
    cap = 40 if cfg.waveform == "gfdm" else 200
    n_rows = min(cfg.n_training + cfg.n_frames, cap) * rows_per_frame
    mc, _, _, _, bands, _, composite = _build_burst(cfg, point, 0, n_rows)
    tables = []
    if cfg.wireless_scale != 0:
        f, p = welch_psd(bands[0], min(4096, len(bands[0])))
        tables.append(("band", f, p))
    f, p = welch_psd(composite, min(8192, len(composite)))
    tables.append(("composite", f, p))
    return tables


# ---------------------------------------------------------------------------
# result emission


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _parse_cell(text: str, kind):
    return None if text == "" else kind(text)


_RESULT_TYPES = {"band_id": int, "guard_hz": float, "rx_power_dbm": float,
                 "snr_db": float, "evm_percent": float, "ber": float,
                 "bit_errors": int, "bit_count": int, "seed": int,
                 "subcarrier": int, "freq_hz": float, "psd_db": float}


def read_csv_rows(path) -> list:
    """Parse a harness CSV back into typed row dicts ('' becomes None)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise ValueError(f"{path}: ragged row {line!r}")
        rows.append({key: _parse_cell(cell, _RESULT_TYPES.get(key, str))
                     for key, cell in zip(header, cells)})
    return rows


def _aggregate(cfg: ExperimentConfig, points, outcomes, psd_tables):
    mc = waveform_config(cfg.waveform)
    res_rows, sc_rows = [], []
    for point in points:
        trials = [outcomes[(point.index, t)] for t in range(cfg.n_trials)]
        common = [cfg.name]
        tail = [cfg.seed, __version__]
        if cfg.with_pam:
            errs = sum(t["pam"]["bit_errors"] for t in trials)
            bits = sum(t["pam"]["bit_count"] for t in trials)
            err_sq = sum(t["pam"]["err_sq"] for t in trials)
            n_sym = sum(t["pam"]["n_sym"] for t in trials)
            evm = 100.0 * float(np.sqrt(err_sq / n_sym))
            res_rows.append(common + ["pam4", 0, cfg.guard_band_hz,
                                      point.rx_power_dbm, point.snr_db,
                                      evm, errs / bits, errs, bits] + tail)
        if cfg.wireless_scale != 0:
            for b in range(N_BANDS):
                sc_err = np.sum([t["bands"][b]["sc_err_sq"] for t in trials], axis=0)
                rows = sum(t["bands"][b]["rows"] for t in trials)
                errs = sum(t["bands"][b]["bit_errors"] for t in trials)
                bits = sum(t["bands"][b]["bit_count"] for t in trials)
                evm = 100.0 * float(np.sqrt(np.sum(sc_err) / (rows * mc.n_active)))
                res_rows.append(common + [cfg.waveform, b + 1, cfg.guard_band_hz,
                                          point.rx_power_dbm, point.snr_db,
                                          evm, errs / bits, errs, bits] + tail)
                for k in range(mc.n_active):
                    sc_rows.append(common + [cfg.waveform, b + 1, cfg.guard_band_hz,
                                             point.rx_power_dbm, point.snr_db, k + 1,
                                             100.0 * float(np.sqrt(sc_err[k] / rows))] + tail)
    psd_rows = []
    for label, freqs, psd_db in psd_tables:
        for f, p in zip(freqs, psd_db):
            psd_rows.append([cfg.name, cfg.waveform, label, float(f), float(p),
                             cfg.seed, __version__])
    return res_rows, sc_rows, psd_rows


def run_experiment(cfg: ExperimentConfig, workers: int = 1, out_dir=None):
    """Run every (sweep point, trial), aggregate, and write the three CSVs.

    Returns the written paths. Any stage failure surfaces as StageError and
    leaves no partial output files behind.
    """
    points = sweep_points(cfg)
    tasks = [(p, t) for p in points for t in range(cfg.n_trials)]
    if workers <= 1:
        outcomes = {(p.index, t): _run_trial(cfg, p, t) for p, t in tasks}
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {(p.index, t): pool.submit(_run_trial, cfg, p, t)
                       for p, t in tasks}
            outcomes = {key: fut.result() for key, fut in futures.items()}
    with _stage("psd"):
        psd_tables = _psd_tables(cfg, points[0])
    res_rows, sc_rows, psd_rows = _aggregate(cfg, points, outcomes, psd_tables)
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = (out / "results.csv", out / "per_subcarrier_evm.csv", out / "psd.csv")
    try:
        _write_csv(paths[0], RESULTS_COLUMNS, res_rows)
        _write_csv(paths[1], SUBCARRIER_COLUMNS, sc_rows)
        _write_csv(paths[2], PSD_COLUMNS, psd_rows)
    except Exception as err:
        for p in paths:
            p.unlink(missing_ok=True)
        raise StageError(f"stage 'write' failed: {err}", "write") from err
    return list(paths)


# ---------------------------------------------------------------------------
# CLI


def _cmd_run(args) -> int:
    raw = load_config(args.config)
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg, errors = normalize_config(raw)
    if errors:
        for msg in errors:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    paths = run_experiment(cfg, workers=args.workers, out_dir=args.out)
    for p in paths:
        print(p)
    return 0


def _cmd_validate(args) -> int:
    raw = load_config(args.config)
    cfg, errors = normalize_config(raw)
    if errors:
        for msg in errors:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    print(json.dumps(config_as_dict(cfg), indent=2, sort_keys=True))
    return 0


def _cmd_presets(_args) -> int:
    for name in PRESET_NAMES:
        raw = preset_config(name)
        mc = waveform_config(raw["waveform"])
        extras = ""
        if isinstance(mc, UfofdmConfig):
            extras = (f", sub-bands={mc.n_subbands}x{mc.subband_size}"
                      f", filter_len={mc.filter_len}")
        elif isinstance(mc, GfdmConfig):
            extras = f", subsymbols={mc.n_subsymbols}, overlap={mc.overlap}"
        print(f"{name}: waveform={raw['waveform']}, n_fft={mc.n_fft}, "
              f"active={mc.n_active}, cp={mc.cp_len}, "
              f"spacing_hz={mc.subcarrier_spacing_hz:g}, "
              f"bit_rate_gbps={mc.bit_rate_qam16 / 1e9:.4g}{extras}, "
              f"guard_hz={raw['guard_band_hz']:g}, "
              f"rx_power_dbm={raw['rx_power_dbm']}, n_frames={raw['n_frames']}")
    return 0


def _cmd_psd(args) -> int:
    raw = preset_config(args.preset)
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg, errors = normalize_config(raw)
    if errors:  # pragma: no cover - presets validate by construction
        for msg in errors:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    with _stage("psd"):
        tables = _psd_tables(cfg, sweep_points(cfg)[0])
    _, _, psd_rows = _aggregate(cfg, [], {}, tables)
    out = Path(args.out if args.out is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "psd.csv"
    _write_csv(path, PSD_COLUMNS, psd_rows)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pon5g",
        description="Converged wired PAM-4 / wireless multicarrier PON "
                    "link experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="JSON config path")
    p_run.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_run.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    p_run.add_argument("--out", default=None, help="override the output directory")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config and print it normalized")
    p_val.add_argument("config", help="JSON config path")
    p_val.set_defaults(func=_cmd_validate)

    p_pre = sub.add_parser("presets", help="list built-in experiment presets")
    p_pre.set_defaults(func=_cmd_presets)

    p_psd = sub.add_parser("psd", help="write psd.csv for a waveform preset")
    p_psd.add_argument("preset", help=f"one of: {', '.join(PRESET_NAMES)}")
    p_psd.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_psd.add_argument("--out", default=None, help="override the output directory")
    p_psd.set_defaults(func=_cmd_psd)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        for msg in err.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    except StageError as err:
        print(f"run failed: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
