"""Segmentation and reconstruction metrics, plus split-level evaluation.

Mask scores (F1/IoU/Dice) are fractions in [0, 1] at the function level and
reported x100 in evaluation tables. SDR is a time-domain dB ratio between a
reference signal and an estimate.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import DatasetManifest, load_clip
from .errors import SpecmaskError
from .spectral import denoise, stft
from .types import AudioClip, StftParams, TfMask

SDR_CAP_DB = 300.0  # sentinel for a bit-exact estimate (infinite ratio)


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _require_binary(mask: TfMask, name: str) -> np.ndarray:
    lab = mask.labels
    if lab.max(initial=0) > 1:
        raise SpecmaskError("non_binary_mask", f"{name} holds labels above 1")
    return lab == 1


def confusion(pred: TfMask, gt: TfMask) -> Confusion:
    """Bin-level confusion counts for binary masks of equal shape."""
    if pred.shape != gt.shape:
        raise SpecmaskError("shape_mismatch", f"pred {pred.shape} vs gt {gt.shape}")
    p = _require_binary(pred, "pred")
    g = _require_binary(gt, "gt")
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = int(np.count_nonzero(~p & ~g))
    return Confusion(tp, fp, fn, tn)


def mask_scores(pred: TfMask, gt: TfMask) -> tuple[float, float, float]:
    """(F1, IoU, Dice) as fractions.

    Conventions for degenerate masks: both empty -> perfect agreement (all
    three are 1); exactly one empty -> no agreement (all three are 0).
    """
    c = confusion(pred, gt)
    if c.tp == 0:
        if c.fp == 0 and c.fn == 0:
            return 1.0, 1.0, 1.0
        return 0.0, 0.0, 0.0
    f1 = c.tp / (c.tp + 0.5 * (c.fp + c.fn))
    iou = c.tp / (c.tp + c.fp + c.fn)
    dice = 2.0 * c.tp / (2.0 * c.tp + c.fp + c.fn)
    return f1, iou, dice


def dice_loss(pred_soft: np.ndarray, gt: TfMask) -> float:
    """1 - 2 |pred * gt| / (|pred| + |gt|) with soft intersection and sums.

    Usable as a training criterion for an external segmentation model; the
    prediction is a [0, 1]-valued matrix, the ground truth a binary mask.
    Two empty inputs agree perfectly (loss 0).
    """
    pred_soft = np.asarray(pred_soft, dtype=np.float64)
    if pred_soft.shape != gt.shape:
        raise SpecmaskError("shape_mismatch", f"pred {pred_soft.shape} vs gt {gt.shape}")
    g = (gt.labels == 1).astype(np.float64)
    denom = pred_soft.sum() + g.sum()
    if denom == 0.0:
        return 0.0
    return float(1.0 - 2.0 * np.sum(pred_soft * g) / denom)


def sdr(reference: AudioClip, estimate: AudioClip) -> float:
    """Signal-to-distortion ratio 10 log10(||ref||^2 / ||est - ref||^2) in dB.

    A bit-exact estimate has infinite ratio and is reported as the +300 dB
    sentinel; a silent reference leaves the ratio undefined and raises.
    """
    if len(reference) != len(estimate):
        raise SpecmaskError(
            "length_mismatch", f"lengths differ: {len(reference)} vs {len(estimate)}"
        )
    ref_energy = float(np.sum(reference.samples**2))
    if ref_energy == 0.0:
        raise SpecmaskError("undefined_sdr", "reference signal is silent")
    err_energy = float(np.sum((estimate.samples - reference.samples) ** 2))
    if err_energy == 0.0:
        return SDR_CAP_DB
    return float(10.0 * np.log10(ref_energy / err_energy))


@dataclass
class ClipScore:
    clip_id: str
    f1: float  # x100
    iou: float  # x100
    dice: float  # x100
    sdr: float  # dB


@dataclass
class EvalReport:
    split: str
    rows: list[ClipScore]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def means(self) -> dict[str, float]:
        if not self.rows:
            return {"f1": 0.0, "iou": 0.0, "dice": 0.0, "sdr": 0.0}
        return {
            "f1": float(np.mean([r.f1 for r in self.rows])),
            "iou": float(np.mean([r.iou for r in self.rows])),
            "dice": float(np.mean([r.dice for r in self.rows])),
            "sdr": float(np.mean([r.sdr for r in self.rows])),
        }

    def to_json(self) -> dict:
        return {
            "split": self.split,
            "clips": [
                {"clip_id": r.clip_id, "f1": r.f1, "iou": r.iou, "dice": r.dice, "sdr": r.sdr}
                for r in self.rows
            ],
            "means": self.means(),
            "skipped": [{"clip_id": cid, "reason": reason} for cid, reason in self.skipped],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True))


def format_report(report: EvalReport) -> str:
    """Human table: one row per clip, means last; mask scores x100, SDR in dB."""
    lines = [
        f"split: {report.split}",
        f"{'clip':<28} {'F1':>7} {'IoU':>7} {'Dice':>7} {'SDR':>8}",
    ]
    for r in report.rows:
        lines.append(f"{r.clip_id:<28} {r.f1:>7.1f} {r.iou:>7.1f} {r.dice:>7.1f} {r.sdr:>8.2f}")
    m = report.means()
    lines.append(
        f"{'mean':<28} {m['f1']:>7.1f} {m['iou']:>7.1f} {m['dice']:>7.1f} {m['sdr']:>8.2f}"
    )
    if report.skipped:
        lines.append("skipped:")
        for cid, reason in report.skipped:
            lines.append(f"  {cid}: {reason}")
    return "\n".join(lines)


def _evaluate_one(entry, provider, params: StftParams) -> ClipScore:
    from .providers import import_mask  # local import keeps module load light

    clip = load_clip(entry)
    spec = stft(clip, params)
    gt_mask = import_mask(entry.mask_path, spec.shape)
    pred_mask = provider.provide(clip, spec, entry.clip_id)
    f1, iou, dice = mask_scores(pred_mask, gt_mask)

    from .audio_io import read_wav

    reference = read_wav(entry.denoised_path)[0]
    produced = denoise(clip, pred_mask, params)
    score = sdr(reference, produced)
    return ClipScore(entry.clip_id, 100.0 * f1, 100.0 * iou, 100.0 * dice, score)


def evaluate_split(
    manifest: DatasetManifest,
    split: str,
    provider,
    params: StftParams = StftParams(),
    jobs: int = 1,
) -> EvalReport:
    """Score a provider against a split's ground truth.

    Clips missing their GT mask or reference denoised audio are excluded from
    the means and listed in the skipped section, as are clips whose
    evaluation fails outright.
    """
    entries = manifest.split_clips(split)
    if not entries:
        raise SpecmaskError("empty_split", f"split {split!r} has no clips")

    report = EvalReport(split=split, rows=[])
    eligible = []
    for entry in entries:
        if entry.mask_path is None:
            report.skipped.append((entry.clip_id, "missing_gt_mask"))
        elif entry.denoised_path is None:
            report.skipped.append((entry.clip_id, "missing_reference_denoised"))
        else:
            eligible.append(entry)

    def work(entry):
        try:
            return entry.clip_id, _evaluate_one(entry, provider, params), None
        except SpecmaskError as exc:
            return entry.clip_id, None, exc.code

    if jobs > 1 and len(eligible) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(work, eligible))
    else:
        outcomes = [work(e) for e in eligible]

    for clip_id, row, err in sorted(outcomes, key=lambda o: o[0]):
        if row is not None:
            report.rows.append(row)
        else:
            report.skipped.append((clip_id, err))
    return report
