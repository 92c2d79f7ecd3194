"""Mask providers: imported PNGs, a classical baseline segmenter, and a
ground-truth oracle for synthetic fixtures.

All three return symmetrized masks, so their output can go straight into
``apply_mask``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import ndimage

from .errors import SpecmaskError
from .imaging import load_mask_image, mask_image_to_grid
from .spectral import stft, symmetrize_mask
from .types import AudioClip, Spectrogram, StftParams, TfMask

_EPS = 1e-10
MAD_TO_SIGMA = 1.4826  # Gaussian-consistent MAD scaling


def import_mask(path: str | Path, target: tuple[int, int], n_sources: int = 1) -> TfMask:
    """Load an external mask PNG (native dims or model-resized) onto a bin grid."""
    return mask_image_to_grid(load_mask_image(path, n_sources), target)


def baseline_segment(
    spec: Spectrogram,
    k_mad: float = 3.0,
    min_region_px: int = 20,
    morph_radius: int = 2,
) -> TfMask:
    """Classical spectral gate: per-frequency-row robust threshold, then
    morphological cleanup.

    A bin is clean when its dB magnitude exceeds the row's median by
    ``k_mad`` scaled MADs. Close-then-open with a square element fills gaps in
    harmonic traces before removing speckle; components smaller than
    ``min_region_px`` are dropped. Invariant under global gain: floor and MAD
    shift together with the signal.
    """
    mag_db = 20.0 * np.log10(np.abs(spec.data) + _EPS)
    floor = np.median(mag_db, axis=1, keepdims=True)
    mad = MAD_TO_SIGMA * np.median(np.abs(mag_db - floor), axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):  # k_mad=inf with mad=0 rows -> nan threshold
        clean = mag_db > floor + k_mad * mad

    if morph_radius > 0 and clean.any():
        struct = np.ones((2 * morph_radius + 1, 2 * morph_radius + 1), dtype=bool)
        clean = ndimage.binary_closing(clean, structure=struct)
        clean = ndimage.binary_opening(clean, structure=struct)
    if min_region_px > 0 and clean.any():
        labeled, n = ndimage.label(clean)
        if n:
            sizes = np.bincount(labeled.ravel())
            small = np.flatnonzero(sizes < min_region_px)
            clean &= ~np.isin(labeled, small[small > 0])

    return symmetrize_mask(TfMask(clean.astype(np.int32), 1))


def oracle_mask(
    clean: AudioClip, params: StftParams = StftParams(), threshold_db: float = 40.0
) -> TfMask:
    """Ground-truth mask from a clean reference: keep every bin within
    ``threshold_db`` of the clean spectrogram's global peak (>= comparison,
    so threshold 0 keeps exactly the peak bins)."""
    spec = stft(clean, params)
    db = 20.0 * np.log10(np.abs(spec.data) + _EPS)
    keep = db >= db.max() - threshold_db
    return symmetrize_mask(TfMask(keep.astype(np.int32), 1))


@dataclass(frozen=True)
class ImportProvider:
    """Resolves each clip's mask PNG by id through ``path_for``."""

    path_for: Callable[[str], Path]
    n_sources: int = 1
    kind: str = "import"

    def provide(self, clip: AudioClip, spec: Spectrogram, clip_id: str) -> TfMask:
        return import_mask(self.path_for(clip_id), spec.shape, self.n_sources)


@dataclass(frozen=True)
class BaselineProvider:
    k_mad: float = 3.0
    min_region_px: int = 20
    morph_radius: int = 2
    kind: str = "baseline"

    def provide(self, clip: AudioClip, spec: Spectrogram, clip_id: str) -> TfMask:
        return baseline_segment(spec, self.k_mad, self.min_region_px, self.morph_radius)


@dataclass(frozen=True)
class OracleProvider:
    """Synthetic-test provider; requires the clean reference it thresholds."""

    clean: AudioClip
    threshold_db: float = 40.0
    kind: str = "oracle"

    def provide(self, clip: AudioClip, spec: Spectrogram, clip_id: str) -> TfMask:
        return oracle_mask(self.clean, spec.params, self.threshold_db)
