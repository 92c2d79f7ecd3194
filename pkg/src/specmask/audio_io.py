"""RIFF/WAVE reader and writer for PCM16 and IEEE float32, little-endian.

Stereo files are split into per-channel clips (left first) since each
soundtrack is denoised independently. Compressed formats are out of scope;
convert to WAV upstream.
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SpecmaskError
from .types import AudioClip, Channel

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3

PCM16_MAX = 32767
PCM16_SCALE = 32768.0


@dataclass(frozen=True)
class WavInfo:
    """Header-level facts about a WAV file."""

    channels: int
    sample_rate: int
    n_samples: int  # per channel
    sample_format: str  # "pcm16" | "float32"

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate


def _parse_chunks(raw: bytes) -> dict[bytes, bytes]:
    if len(raw) < 12:
        raise SpecmaskError("corrupt_wav", "file shorter than a RIFF header")
    if raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise SpecmaskError("corrupt_wav", "not a RIFF/WAVE container")
    chunks: dict[bytes, bytes] = {}
    pos = 12
    while pos + 8 <= len(raw):
        cid = raw[pos : pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise SpecmaskError("corrupt_wav", f"chunk {cid!r} truncated ({len(body)}/{size} bytes)")
        if cid not in chunks:  # first occurrence wins
            chunks[cid] = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    return chunks


def _decode(raw: bytes) -> tuple[WavInfo, np.ndarray]:
    chunks = _parse_chunks(raw)
    if b"fmt " not in chunks or b"data" not in chunks:
        raise SpecmaskError("corrupt_wav", "missing fmt or data chunk")
    fmt = chunks[b"fmt "]
    if len(fmt) < 16:
        raise SpecmaskError("corrupt_wav", "fmt chunk shorter than 16 bytes")
    audio_format, channels, sample_rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt)
    if channels not in (1, 2):
        raise SpecmaskError("unsupported_format", f"{channels} channels; only mono/stereo supported")
    if sample_rate <= 0:
        raise SpecmaskError("corrupt_wav", f"nonsensical sample rate {sample_rate}")

    data = chunks[b"data"]
    if audio_format == _FMT_PCM and bits == 16:
        sample_format = "pcm16"
        frame_bytes = 2 * channels
        usable = len(data) - len(data) % frame_bytes
        flat = np.frombuffer(data[:usable], dtype="<i2").astype(np.float64) / PCM16_SCALE
    elif audio_format == _FMT_IEEE_FLOAT and bits == 32:
        sample_format = "float32"
        frame_bytes = 4 * channels
        usable = len(data) - len(data) % frame_bytes
        flat = np.frombuffer(data[:usable], dtype="<f4").astype(np.float64)
    else:
        raise SpecmaskError(
            "unsupported_format",
            f"format tag {audio_format} with {bits} bits; only PCM16 and IEEE float32",
        )
    if usable == 0:
        raise SpecmaskError("corrupt_wav", "empty data chunk")

    frames = flat.reshape(-1, channels)
    info = WavInfo(channels, sample_rate, frames.shape[0], sample_format)
    return info, frames


def read_wav(path: str | Path) -> list[AudioClip]:
    """Read a WAV file into one clip per channel.

    PCM16 samples are scaled to [-1, 1) by division by 32768; float32 samples
    are taken verbatim. Stereo order is [left, right].
    """
    raw = Path(path).read_bytes()
    info, frames = _decode(raw)
    if info.channels == 1:
        return [AudioClip(frames[:, 0], info.sample_rate, Channel.MONO)]
    return [
        AudioClip(frames[:, 0], info.sample_rate, Channel.LEFT),
        AudioClip(frames[:, 1], info.sample_rate, Channel.RIGHT),
    ]


def wav_info(path: str | Path) -> WavInfo:
    """Header-only inspection (decodes the container but keeps no samples)."""
    info, _ = _decode(Path(path).read_bytes())
    return info


def _quantize_pcm16(x: np.ndarray) -> np.ndarray:
    # clamp to the representable range, then round half away from zero
    clamped = np.clip(x, -1.0, 1.0 - 1.0 / PCM16_SCALE)
    scaled = clamped * PCM16_SCALE
    rounded = np.where(scaled >= 0, np.floor(scaled + 0.5), np.ceil(scaled - 0.5))
    return rounded.astype("<i2")


def encode_wav(clip: AudioClip, sample_format: str = "float32") -> bytes:
    """Serialize a mono clip to WAV bytes in the given sample format."""
    if sample_format == "float32":
        payload = clip.samples.astype("<f4").tobytes()
        audio_format, bits = _FMT_IEEE_FLOAT, 32
    elif sample_format == "pcm16":
        payload = _quantize_pcm16(clip.samples).tobytes()
        audio_format, bits = _FMT_PCM, 16
    else:
        raise SpecmaskError("unsupported_format", f"unknown sample format {sample_format!r}")

    channels = 1
    block_align = channels * bits // 8
    byte_rate = clip.sample_rate * block_align
    buf = io.BytesIO()
    fact = b"" if audio_format == _FMT_PCM else struct.pack("<4sII", b"fact", 4, len(clip))
    riff_size = 4 + (8 + 16) + len(fact) + (8 + len(payload))
    buf.write(struct.pack("<4sI4s", b"RIFF", riff_size, b"WAVE"))
    buf.write(
        struct.pack(
            "<4sIHHIIHH",
            b"fmt ",
            16,
            audio_format,
            channels,
            clip.sample_rate,
            byte_rate,
            block_align,
            bits,
        )
    )
    buf.write(fact)
    buf.write(struct.pack("<4sI", b"data", len(payload)))
    buf.write(payload)
    return buf.getvalue()


def write_wav(clip: AudioClip, path: str | Path, sample_format: str = "float32") -> None:
    """Write a mono clip to ``path``; see :func:`encode_wav` for formats."""
    Path(path).write_bytes(encode_wav(clip, sample_format))
