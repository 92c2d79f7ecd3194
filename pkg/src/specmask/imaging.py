"""Grayscale audio images and mask images, plus pixel <-> bin mapping.

Audio images put DC in the middle row (centered layout) so the two-sided
spectrum reads as a symmetric picture; masks drawn on such images are mapped
back to the natural (DC-at-row-0) bin grid before any spectral operation.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import SpecmaskError
from .spectral import symmetrize_mask
from .types import Layout, Spectrogram, TfMask

DB_RANGE = 80.0  # dynamic range below the per-image peak kept in the rendering
_EPS = 1e-10


@dataclass
class AudioImage:
    """8-bit magnitude rendering of a spectrogram, centered layout.

    ``db_lo``/``db_hi`` are the per-image normalization bounds actually used;
    ``db_floor`` is the rendered dynamic range below the peak.
    """

    pixels: np.ndarray  # uint8 [dft_len, n_frames]
    db_lo: float
    db_hi: float
    db_floor: float = DB_RANGE
    layout: Layout = Layout.CENTERED


@dataclass
class MaskImage:
    """8-bit label image, centered layout; pixel values are raw labels 0..n_sources."""

    pixels: np.ndarray
    n_sources: int = 1

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 2:
            raise SpecmaskError("bad_mask", f"mask image must be 2-D, got {self.pixels.shape}")
        if self.pixels.size and int(self.pixels.max()) > self.n_sources:
            raise SpecmaskError(
                "label_out_of_range",
                f"mask image holds label {int(self.pixels.max())} but n_sources = {self.n_sources}",
            )


def _to_centered(a: np.ndarray) -> np.ndarray:
    return np.roll(a, a.shape[0] // 2, axis=0)


def _to_natural(a: np.ndarray) -> np.ndarray:
    return np.roll(a, -(a.shape[0] // 2), axis=0)


def render_image(spec: Spectrogram) -> AudioImage:
    """Log-magnitude rendering: clamp dB values to [peak - 80, peak], scale to
    0..255, rotate rows so DC sits in the middle.

    A flat spectrogram (e.g. silence) renders black: with nothing above the
    floor there is no contrast to normalize.
    """
    mag = np.abs(spec.data)
    db = 20.0 * np.log10(mag + _EPS)
    hi = float(db.max())
    lo = hi - DB_RANGE
    if db.max() - db.min() < 1e-12:
        pixels = np.zeros(spec.shape, dtype=np.uint8)
    else:
        scaled = (np.clip(db, lo, hi) - lo) / (hi - lo)
        pixels = np.rint(255.0 * scaled).astype(np.uint8)
    return AudioImage(pixels=_to_centered(pixels), db_lo=lo, db_hi=hi)


def _nearest_indices(n_dst: int, n_src: int) -> np.ndarray:
    # sample at destination pixel centers
    return np.minimum((np.arange(n_dst) + 0.5) * n_src // n_dst, n_src - 1).astype(int)


def mask_image_to_grid(img: MaskImage, target: tuple[int, int]) -> TfMask:
    """Map a (possibly resized) centered mask image onto the natural bin grid.

    Nearest-neighbor resize to ``target`` dims, inverse row rotation, then
    symmetrization. Nearest-neighbor is the only sane kernel here: anything
    interpolating would invent fractional labels.
    """
    if img.pixels.size == 0:
        raise SpecmaskError("bad_mask", "empty mask image")
    n_rows, n_cols = target
    rows = _nearest_indices(n_rows, img.pixels.shape[0])
    cols = _nearest_indices(n_cols, img.pixels.shape[1])
    resized = img.pixels[np.ix_(rows, cols)]
    natural = _to_natural(resized.astype(np.int32))
    return symmetrize_mask(TfMask(natural, img.n_sources))


def grid_to_mask_image(mask: TfMask) -> MaskImage:
    """Inverse of :func:`mask_image_to_grid` at native dims: rotate to centered
    layout and emit raw label values as pixels."""
    if int(mask.labels.max(initial=0)) > 255:
        raise SpecmaskError("label_out_of_range", "labels above 255 cannot be stored in 8 bits")
    return MaskImage(_to_centered(mask.labels).astype(np.uint8), mask.n_sources)


def encode_png(pixels: np.ndarray) -> bytes:
    """Serialize an 8-bit matrix as grayscale PNG (no alpha)."""
    img = Image.fromarray(np.asarray(pixels, dtype=np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    """Parse PNG bytes into an 8-bit matrix; non-grayscale inputs are converted."""
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise SpecmaskError("corrupt_png", str(exc)) from exc
    if img.mode != "L":
        img = img.convert("L")
    return np.asarray(img, dtype=np.uint8)


def save_png(pixels: np.ndarray, path: str | Path) -> None:
    Path(path).write_bytes(encode_png(pixels))


def load_mask_image(path: str | Path, n_sources: int = 1) -> MaskImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise SpecmaskError("missing_file", str(exc)) from exc
    return MaskImage(decode_png(data), n_sources)
