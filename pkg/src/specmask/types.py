"""Core value types shared across the pipeline.

All types wrap numpy arrays and are treated as immutable by convention:
operations return new values and never modify their inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import SpecmaskError


class Channel(str, Enum):
    MONO = "mono"
    LEFT = "left"
    RIGHT = "right"


class Layout(str, Enum):
    NATURAL = "natural"    # DC at row 0
    CENTERED = "centered"  # DC at row dft_len // 2


@dataclass(frozen=True)
class StftParams:
    """Analysis parameters: 128-sample periodic Hamming window, 64-sample hop,
    frames zero-padded to a 1024-point DFT."""

    window_len: int = 128
    hop: int = 64
    dft_len: int = 1024
    window_kind: str = "hamming_periodic"

    def __post_init__(self):
        if self.window_len < 2:
            raise SpecmaskError("bad_window", f"window_len must be >= 2, got {self.window_len}")
        if self.hop < 1:
            raise SpecmaskError("bad_params", f"hop must be >= 1, got {self.hop}")
        if not (self.hop <= self.window_len <= self.dft_len):
            raise SpecmaskError(
                "bad_params",
                f"need hop <= window_len <= dft_len, got {self.hop}/{self.window_len}/{self.dft_len}",
            )
        if self.window_kind != "hamming_periodic":
            raise SpecmaskError("bad_window", f"unsupported window kind {self.window_kind!r}")

    def n_frames(self, n_samples: int) -> int:
        """Frame count for a clip of ``n_samples`` samples."""
        if n_samples < self.window_len:
            raise SpecmaskError(
                "clip_too_short",
                f"clip of {n_samples} samples is shorter than one {self.window_len}-sample window",
            )
        return (n_samples - self.window_len) // self.hop + 1


@dataclass
class AudioClip:
    """Mono sample vector with its rate. Amplitudes are nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    channel: Channel = Channel.MONO

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise SpecmaskError("bad_clip", f"samples must be 1-D, got shape {self.samples.shape}")
        if self.sample_rate <= 0:
            raise SpecmaskError("bad_clip", f"sample_rate must be positive, got {self.sample_rate}")
        if isinstance(self.channel, str):
            self.channel = Channel(self.channel)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass
class Spectrogram:
    """Complex time-frequency matrix, shape [dft_len, n_frames], natural layout
    (DC in row 0) unless stated otherwise."""

    data: np.ndarray
    params: StftParams
    original_len: int
    sample_rate: int
    layout: Layout = Layout.NATURAL

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.ndim != 2:
            raise SpecmaskError("bad_spectrogram", f"data must be 2-D, got shape {self.data.shape}")
        if self.data.shape[0] != self.params.dft_len:
            raise SpecmaskError(
                "bad_spectrogram",
                f"row count {self.data.shape[0]} != dft_len {self.params.dft_len}",
            )
        if isinstance(self.layout, str):
            self.layout = Layout(self.layout)

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def _mirror_rows(a: np.ndarray) -> np.ndarray:
    """Row k mapped to row (N - k) mod N; row 0 and row N/2 are fixed points."""
    return np.roll(a[::-1], 1, axis=0)


@dataclass
class TfMask:
    """Integer label grid aligned to a Spectrogram: 0 = noise, 1..n_sources = sources."""

    labels: np.ndarray
    n_sources: int = 1

    def __post_init__(self):
        self.labels = np.asarray(self.labels)
        if not np.issubdtype(self.labels.dtype, np.integer):
            if np.issubdtype(self.labels.dtype, np.bool_):
                self.labels = self.labels.astype(np.int32)
            else:
                raise SpecmaskError("bad_mask", f"labels must be integers, got {self.labels.dtype}")
        self.labels = self.labels.astype(np.int32, copy=False)
        if self.labels.ndim != 2:
            raise SpecmaskError("bad_mask", f"labels must be 2-D, got shape {self.labels.shape}")
        if self.n_sources < 1:
            raise SpecmaskError("bad_mask", f"n_sources must be >= 1, got {self.n_sources}")
        if self.labels.size:
            lo, hi = int(self.labels.min()), int(self.labels.max())
            if lo < 0 or hi > self.n_sources:
                raise SpecmaskError(
                    "label_out_of_range",
                    f"labels span [{lo}, {hi}] but n_sources = {self.n_sources}",
                )

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def is_symmetric(self) -> bool:
        """True when every row equals its conjugate-mirror row."""
        return bool(np.array_equal(self.labels, _mirror_rows(self.labels)))
