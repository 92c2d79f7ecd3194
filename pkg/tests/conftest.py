"""Shared fixtures: synthetic signals and a toy dataset tree."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from specmask.audio_io import write_wav
from specmask.dataset import SPLITS, SUBDIRS
from specmask.imaging import grid_to_mask_image, render_image, save_png
from specmask.providers import oracle_mask
from specmask.spectral import denoise, stft
from specmask.types import AudioClip, StftParams

DEFAULT = StftParams()


def tone(freq: float, sr: int = 8000, dur: float = 0.3, amp: float = 0.5) -> AudioClip:
    t = np.arange(int(sr * dur)) / sr
    return AudioClip(amp * np.sin(2.0 * np.pi * freq * t), sr)


def chirp(f0: float, f1: float, sr: int = 32000, dur: float = 1.0, amp: float = 0.5) -> AudioClip:
    t = np.arange(int(sr * dur)) / sr
    phase = 2.0 * np.pi * (f0 * t + 0.5 * (f1 - f0) / dur * t * t)
    return AudioClip(amp * np.sin(phase), sr)


def noisy_mix(clean: AudioClip, snr_db: float, seed: int = 7) -> tuple[AudioClip, AudioClip]:
    """(noisy, noise) with the noise scaled to the requested SNR."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(clean))
    target = np.linalg.norm(clean.samples) / (10.0 ** (snr_db / 20.0))
    noise *= target / np.linalg.norm(noise)
    return AudioClip(clean.samples + noise, clean.sample_rate), AudioClip(noise, clean.sample_rate)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def build_toy_dataset(root: Path, params: StftParams = DEFAULT, sr: int = 8000) -> dict:
    """3/1/1 tree of chirp clips with oracle GT masks and reference denoised audio."""
    freqs = {
        "training": [("t01", 700.0), ("t02", 1200.0), ("t03", 1900.0)],
        "validation": [("v01", 900.0)],
        "test": [("s01", 1500.0)],
    }
    clips: dict[str, AudioClip] = {}
    for split in SPLITS:
        for sub in SUBDIRS:
            (root / split / sub).mkdir(parents=True, exist_ok=True)
        for clip_id, freq in freqs[split]:
            rng = np.random.default_rng(hash(clip_id) % (2**32))
            clip = chirp(freq, freq + 800.0, sr=sr, dur=0.3)
            clip = AudioClip(
                clip.samples + 0.01 * rng.standard_normal(len(clip)), sr
            )
            clips[clip_id] = clip
            write_wav(clip, root / split / "raw_audios" / f"{clip_id}.wav")
            gt = oracle_mask(clip, params, threshold_db=30.0)
            save_png(
                grid_to_mask_image(gt).pixels, root / split / "masks" / f"{clip_id}_mask.png"
            )
            reference = denoise(clip, gt, params)
            write_wav(reference, root / split / "denoised_audios" / f"{clip_id}.wav")
            image = render_image(stft(clip, params))
            save_png(image.pixels, root / split / "images" / f"{clip_id}.png")
    return {"freqs": freqs, "clips": clips, "params": params, "sr": sr}


@pytest.fixture
def toy_dataset(tmp_path: Path) -> tuple[Path, dict]:
    root = tmp_path / "dataset"
    meta = build_toy_dataset(root)
    return root, meta
