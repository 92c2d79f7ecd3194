"""Dataset tree scanning, accepted-clip persistence, and batch denoising.

Expected layout::

    <root>/{training,validation,test}/{raw_audios,denoised_audios,images,masks}/

Clip ids are raw-audio file stems; stereo sources contribute two clips with
``_L``/``_R`` suffixes because each soundtrack yields its own image and mask.
The labeling tool's output tree is::

    <accepted_root>/{original_audio,denoised_audio,audio_images,audio_masks}/
"""
from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .audio_io import encode_wav, read_wav, wav_info
from .errors import SpecmaskError
from .imaging import encode_png, grid_to_mask_image, render_image
from .spectral import denoise, stft
from .types import AudioClip, Channel, StftParams, TfMask

SPLITS = ("training", "validation", "test")
SUBDIRS = ("raw_audios", "denoised_audios", "images", "masks")
ACCEPT_SUBDIRS = ("original_audio", "denoised_audio", "audio_images", "audio_masks")
MANIFEST_NAME = "manifest.json"


@dataclass
class ClipEntry:
    clip_id: str
    split: str
    raw_path: Path
    channel: Channel = Channel.MONO
    image_path: Path | None = None
    mask_path: Path | None = None
    denoised_path: Path | None = None


@dataclass
class DatasetManifest:
    root: Path
    splits: dict[str, list[ClipEntry]]
    inconsistencies: list[str] = field(default_factory=list)
    unknown_files: list[str] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        return {split: len(entries) for split, entries in self.splits.items()}

    def split_clips(self, split: str) -> list[ClipEntry]:
        if split not in self.splits:
            raise SpecmaskError("unknown_split", f"split {split!r} not in {sorted(self.splits)}")
        return self.splits[split]


def _clip_ids_for(path: Path) -> list[tuple[str, Channel]]:
    info = wav_info(path)
    if info.channels == 1:
        return [(path.stem, Channel.MONO)]
    return [(f"{path.stem}_L", Channel.LEFT), (f"{path.stem}_R", Channel.RIGHT)]


def scan_dataset(root: str | Path) -> DatasetManifest:
    """Walk the dataset tree and build a manifest.

    Missing split directories are fatal (the error lists them); everything
    else -- orphan masks, unreadable audio, stray files -- is reported but
    does not stop the scan. Clip ids come back lexicographically sorted.
    """
    root = Path(root)
    if not root.is_dir():
        raise SpecmaskError("missing_root", f"dataset root {root} does not exist")
    missing = [s for s in SPLITS if not (root / s).is_dir()]
    if missing:
        raise SpecmaskError("missing_splits", "missing split directories: " + ", ".join(missing))

    manifest = DatasetManifest(root=root, splits={})
    for split in SPLITS:
        split_dir = root / split
        entries: dict[str, ClipEntry] = {}
        raw_dir = split_dir / "raw_audios"
        for sub in SUBDIRS:
            if not (split_dir / sub).is_dir():
                manifest.inconsistencies.append(f"{split}: missing sub-folder {sub}")

        if raw_dir.is_dir():
            for path in sorted(raw_dir.iterdir()):
                if path.is_dir():
                    continue
                if path.suffix.lower() != ".wav":
                    manifest.unknown_files.append(str(path))
                    continue
                try:
                    for clip_id, channel in _clip_ids_for(path):
                        entries[clip_id] = ClipEntry(clip_id, split, path, channel)
                except SpecmaskError as exc:
                    manifest.inconsistencies.append(f"{split}: unreadable wav {path.name} ({exc.code})")

        for sub, attr, suffix in (
            ("images", "image_path", ".png"),
            ("masks", "mask_path", "_mask.png"),
            ("denoised_audios", "denoised_path", ".wav"),
        ):
            sub_dir = split_dir / sub
            if not sub_dir.is_dir():
                continue
            for path in sorted(sub_dir.iterdir()):
                if path.is_dir():
                    continue
                name = path.name
                if not name.endswith(suffix):
                    manifest.unknown_files.append(str(path))
                    continue
                clip_id = name[: -len(suffix)]
                if clip_id in entries:
                    setattr(entries[clip_id], attr, path)
                else:
                    manifest.inconsistencies.append(
                        f"{split}: {sub}/{name} has no matching raw audio"
                    )

        manifest.splits[split] = [entries[cid] for cid in sorted(entries)]
    return manifest


def _entry_to_json(entry: ClipEntry, root: Path) -> dict:
    rel = lambda p: None if p is None else os.path.relpath(p, root)
    return {
        "clip_id": entry.clip_id,
        "split": entry.split,
        "channel": entry.channel.value,
        "raw": rel(entry.raw_path),
        "image": rel(entry.image_path),
        "mask": rel(entry.mask_path),
        "denoised": rel(entry.denoised_path),
    }


def save_manifest(manifest: DatasetManifest, path: str | Path | None = None) -> Path:
    """Cache the manifest as JSON (defaults to ``<root>/manifest.json``)."""
    path = Path(path) if path else manifest.root / MANIFEST_NAME
    doc = {
        "root": str(manifest.root),
        "splits": {
            split: [_entry_to_json(e, manifest.root) for e in entries]
            for split, entries in manifest.splits.items()
        },
        "inconsistencies": manifest.inconsistencies,
        "unknown_files": manifest.unknown_files,
    }
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True).encode())
    return path


def load_manifest(path: str | Path) -> DatasetManifest:
    doc = json.loads(Path(path).read_text())
    root = Path(doc["root"])
    splits = {}
    for split, rows in doc["splits"].items():
        entries = []
        for row in rows:
            absolute = lambda p: None if p is None else root / p
            entries.append(
                ClipEntry(
                    clip_id=row["clip_id"],
                    split=split,
                    raw_path=absolute(row["raw"]),
                    channel=Channel(row["channel"]),
                    image_path=absolute(row["image"]),
                    mask_path=absolute(row["mask"]),
                    denoised_path=absolute(row["denoised"]),
                )
            )
        splits[split] = entries
    return DatasetManifest(root, splits, doc["inconsistencies"], doc["unknown_files"])


def load_clip(entry: ClipEntry) -> AudioClip:
    """Read the channel of the raw file this entry points at."""
    clips = read_wav(entry.raw_path)
    if entry.channel is Channel.RIGHT:
        if len(clips) < 2:
            raise SpecmaskError("corrupt_wav", f"{entry.raw_path} lost its right channel")
        return clips[1]
    return clips[0]


def _write_bytes(path: Path, data: bytes) -> None:
    # seam for failure-injection tests
    path.write_bytes(data)


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    os.close(fd)
    try:
        _write_bytes(Path(tmp), data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def accept_clip(
    clip_id: str,
    original: AudioClip,
    denoised: AudioClip,
    mask: TfMask,
    accepted_root: str | Path,
    params: StftParams = StftParams(),
) -> dict[str, Path]:
    """Persist the four accepted artifacts (original audio, denoised audio,
    audio image, mask image) into the Accepted tree.

    All-or-nothing: payloads are serialized up front, staged as temp files,
    and renamed into place last; any failure rolls back everything written by
    this call. Re-accepting a clip overwrites its previous artifacts.
    """
    accepted_root = Path(accepted_root)
    image = render_image(stft(original, params))
    payloads = {
        accepted_root / "original_audio" / f"{clip_id}.wav": encode_wav(original),
        accepted_root / "denoised_audio" / f"{clip_id}.wav": encode_wav(denoised),
        accepted_root / "audio_images" / f"{clip_id}.png": encode_png(image.pixels),
        accepted_root / "audio_masks" / f"{clip_id}_mask.png": encode_png(
            grid_to_mask_image(mask).pixels
        ),
    }

    staged: list[tuple[Path, Path]] = []
    renamed: list[Path] = []
    try:
        for final, data in payloads.items():
            final.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=final.parent, prefix=final.name + ".tmp")
            os.close(fd)
            staged.append((Path(tmp), final))
            _write_bytes(Path(tmp), data)
        for tmp, final in staged:
            os.replace(tmp, final)
            renamed.append(final)
    except BaseException:
        for tmp, _ in staged:
            if tmp.exists():
                tmp.unlink()
        for final in renamed:
            if final.exists():
                final.unlink()
        raise
    return {sub: accepted_root / sub for sub in ACCEPT_SUBDIRS}


@dataclass
class BatchSummary:
    split: str
    out_dir: Path
    processed: list[str] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def n_ok(self) -> int:
        return len(self.processed)

    @property
    def n_failed(self) -> int:
        return len(self.failures)


def _denoise_one(entry: ClipEntry, provider, params: StftParams, out_dir: Path, sample_format: str):
    clip = load_clip(entry)
    spec = stft(clip, params)
    mask = provider.provide(clip, spec, entry.clip_id)
    out = denoise(clip, mask, params)
    _atomic_write(
        out_dir / "denoised_audios" / f"{entry.clip_id}.wav", encode_wav(out, sample_format)
    )
    _atomic_write(out_dir / "images" / f"{entry.clip_id}.png", encode_png(render_image(spec).pixels))
    _atomic_write(
        out_dir / "masks" / f"{entry.clip_id}_mask.png",
        encode_png(grid_to_mask_image(mask).pixels),
    )


def batch_denoise(
    manifest: DatasetManifest,
    split: str,
    provider,
    params: StftParams,
    out_dir: str | Path,
    jobs: int = 1,
    sample_format: str = "float32",
) -> BatchSummary:
    """Denoise every clip of a split; per-clip failures are recorded and the
    batch keeps going. Results are reported in sorted clip order regardless
    of worker scheduling."""
    entries = manifest.split_clips(split)
    out_dir = Path(out_dir)
    summary = BatchSummary(split=split, out_dir=out_dir)
    results: dict[str, str | None] = {}

    def work(entry: ClipEntry) -> tuple[str, str | None]:
        try:
            _denoise_one(entry, provider, params, out_dir, sample_format)
            return entry.clip_id, None
        except SpecmaskError as exc:
            return entry.clip_id, exc.code
        except Exception as exc:  # pragma: no cover - defensive
            return entry.clip_id, f"unexpected: {exc}"

    if jobs > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for clip_id, err in pool.map(work, entries):
                results[clip_id] = err
    else:
        for entry in entries:
            clip_id, err = work(entry)
            results[clip_id] = err

    for clip_id in sorted(results):
        if results[clip_id] is None:
            summary.processed.append(clip_id)
        else:
            summary.failures.append((clip_id, results[clip_id]))
    return summary
