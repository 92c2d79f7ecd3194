#!/usr/bin/env python3
"""Sweep the oracle-mask threshold on a chirp-in-noise fixture.

The threshold trades mask size against residual noise: too tight loses chirp
energy (distortion), too loose keeps noise bins. Prints SDR and kept-bin
fraction per threshold so the knee is visible.

Usage:
    python scripts/oracle_threshold_sweep.py [--snr 0] [--sr 32000]
"""
from __future__ import annotations

import argparse

import numpy as np

from specmask.metrics import sdr
from specmask.providers import oracle_mask
from specmask.spectral import denoise
from specmask.types import AudioClip, StftParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr", type=float, default=0.0, help="input SNR in dB")
    ap.add_argument("--sr", type=int, default=32000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument(
        "--thresholds", type=float, nargs="*",
        default=[10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 80.0],
    )
    args = ap.parse_args()

    params = StftParams()
    t = np.arange(args.sr) / args.sr
    phase = 2 * np.pi * (2000.0 * t + 0.5 * 4000.0 * t * t)  # 2 -> 6 kHz sweep
    clean = AudioClip(0.5 * np.sin(phase), args.sr)
    rng = np.random.default_rng(args.seed)
    noise = rng.standard_normal(len(t))
    noise *= np.linalg.norm(clean.samples) / (10 ** (args.snr / 20.0)) / np.linalg.norm(noise)
    noisy = AudioClip(clean.samples + noise, args.sr)

    print(f"input SDR: {sdr(clean, noisy):6.2f} dB")
    print(f"{'threshold_db':>12} {'kept_bins':>10} {'out_SDR_db':>11}")
    for threshold in args.thresholds:
        mask = oracle_mask(clean, params, threshold_db=threshold)
        out = denoise(noisy, mask, params)
        frac = float(mask.labels.mean())
        print(f"{threshold:>12.1f} {frac:>10.4f} {sdr(clean, out):>11.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
