"""HTTP backend for the mask labeling tool.

Serves audio images, persists hand-drawn masks, synthesizes denoised
previews, moves clips through the accept/reject flow, and scores predicted
masks against stored ground truth. The browser UI is a separate package that
talks only to these endpoints.

Workspace layout::

    <workspace>/audio/<id>.wav        input clips (stereo ones become _L/_R)
    <workspace>/coarse/<id>_mask.png  imported model predictions, optional
    <workspace>/masks/<id>_mask.png   human-saved masks (canonical encoding)
    <workspace>/images/<id>.png       cached renderings
    <workspace>/Accepted/...          the four-folder output tree
    <workspace>/status.json           terminal states (accepted/rejected)

Everything else about a clip's status is derived from which files exist, so
a restarted service resumes exactly where the previous one stopped.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response

from .audio_io import encode_wav, read_wav, wav_info
from .dataset import _atomic_write, accept_clip
from .errors import SpecmaskError
from .imaging import (
    MaskImage,
    decode_png,
    encode_png,
    grid_to_mask_image,
    mask_image_to_grid,
    render_image,
)
from .metrics import mask_scores
from .spectral import denoise, stft
from .types import AudioClip, Channel, StftParams, TfMask, _mirror_rows

LEASE_SECONDS = 30.0
MODEL_DIMS = (512, 512)  # masks from resized segmentation models are accepted as-is

STATUSES = ("unlabeled", "coarse", "labeled", "accepted", "rejected")


def _http_error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


@dataclass
class ClipRecord:
    clip_id: str
    path: Path
    channel: Channel
    sample_rate: int
    n_samples: int

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate


class Project:
    """Clip registry over a workspace directory, plus per-clip write leases."""

    def __init__(self, root: Path, params: StftParams, n_sources: int = 1):
        self.root = Path(root)
        self.params = params
        self.n_sources = n_sources
        self.audio_dir = self.root / "audio"
        self.images_dir = self.root / "images"
        self.masks_dir = self.root / "masks"
        self.coarse_dir = self.root / "coarse"
        self.accepted_root = self.root / "Accepted"
        self.status_path = self.root / "status.json"
        self._mutex = threading.Lock()
        self._leases: dict[str, tuple[str, float]] = {}
        for d in (self.audio_dir, self.images_dir, self.masks_dir, self.coarse_dir):
            d.mkdir(parents=True, exist_ok=True)
        self._check_params_marker()

    # -- registry ---------------------------------------------------------

    def registry(self) -> dict[str, ClipRecord]:
        records: dict[str, ClipRecord] = {}
        for path in sorted(self.audio_dir.glob("*.wav")):
            try:
                info = wav_info(path)
            except SpecmaskError:
                continue
            if info.channels == 1:
                ids = [(path.stem, Channel.MONO)]
            else:
                ids = [(f"{path.stem}_L", Channel.LEFT), (f"{path.stem}_R", Channel.RIGHT)]
            for clip_id, channel in ids:
                records[clip_id] = ClipRecord(
                    clip_id, path, channel, info.sample_rate, info.n_samples
                )
        return records

    def record(self, clip_id: str) -> ClipRecord:
        rec = self.registry().get(clip_id)
        if rec is None:
            raise _http_error(404, "unknown_clip", f"no clip {clip_id!r} in workspace")
        return rec

    def load_clip(self, rec: ClipRecord) -> AudioClip:
        clips = read_wav(rec.path)
        if rec.channel is Channel.RIGHT:
            return clips[1]
        return clips[0]

    # -- status -----------------------------------------------------------

    def _terminal_states(self) -> dict[str, str]:
        if self.status_path.exists():
            return json.loads(self.status_path.read_text())
        return {}

    def _set_terminal(self, clip_id: str, state: str) -> None:
        states = self._terminal_states()
        states[clip_id] = state
        _atomic_write(self.status_path, json.dumps(states, indent=2, sort_keys=True).encode())

    def mask_path(self, clip_id: str) -> Path:
        return self.masks_dir / f"{clip_id}_mask.png"

    def coarse_path(self, clip_id: str) -> Path:
        return self.coarse_dir / f"{clip_id}_mask.png"

    def status(self, clip_id: str) -> str:
        terminal = self._terminal_states().get(clip_id)
        if terminal in ("accepted", "rejected"):
            return terminal
        if self.mask_path(clip_id).exists():
            return "labeled"
        if self.coarse_path(clip_id).exists():
            return "coarse"
        return "unlabeled"

    # -- leases -----------------------------------------------------------

    def acquire(self, clip_id: str, owner: str) -> None:
        now = time.monotonic()
        with self._mutex:
            held = self._leases.get(clip_id)
            if held is not None and held[0] != owner and held[1] > now:
                raise _http_error(409, "locked", f"clip {clip_id} is being edited by another labeler")
            self._leases[clip_id] = (owner, now + LEASE_SECONDS)

    def release(self, clip_id: str) -> None:
        with self._mutex:
            self._leases.pop(clip_id, None)

    # -- cache ------------------------------------------------------------

    def _check_params_marker(self) -> None:
        marker = self.root / "stft_params.json"
        current = json.dumps(
            {
                "window_len": self.params.window_len,
                "hop": self.params.hop,
                "dft_len": self.params.dft_len,
                "window_kind": self.params.window_kind,
            },
            sort_keys=True,
        )
        if marker.exists() and marker.read_text() != current:
            for stale in self.images_dir.glob("*.png"):
                stale.unlink()
        marker.write_text(current)

    def native_dims(self, rec: ClipRecord) -> tuple[int, int]:
        return self.params.dft_len, self.params.n_frames(rec.n_samples)

    def grid_mask(self, clip_id: str, rec: ClipRecord) -> TfMask | None:
        """Stored mask if any, falling back to the imported coarse mask."""
        for path in (self.mask_path(clip_id), self.coarse_path(clip_id)):
            if path.exists():
                img = MaskImage(decode_png(path.read_bytes()), self.n_sources)
                return mask_image_to_grid(img, self.native_dims(rec))
        return None


def create_app(
    workspace: str | Path,
    params: StftParams = StftParams(),
    n_sources: int = 1,
) -> FastAPI:
    project = Project(Path(workspace), params, n_sources)
    app = FastAPI(title="specmask label service")
    app.state.project = project

    def owner_of(request: Request) -> str:
        return request.headers.get("X-Client-Id", "anonymous")

    @app.get("/clips")
    def list_clips():
        clips = [
            {
                "id": rec.clip_id,
                "status": project.status(rec.clip_id),
                "duration_s": rec.duration,
                "sample_rate": rec.sample_rate,
            }
            for rec in project.registry().values()
        ]
        return {"clips": clips}

    @app.get("/clips/{clip_id}/image.png")
    def get_image(clip_id: str):
        rec = project.record(clip_id)
        cache = project.images_dir / f"{clip_id}.png"
        if not cache.exists():
            image = render_image(stft(project.load_clip(rec), params))
            _atomic_write(cache, encode_png(image.pixels))
        return Response(cache.read_bytes(), media_type="image/png")

    @app.get("/clips/{clip_id}/mask.png")
    def get_mask(clip_id: str):
        rec = project.record(clip_id)
        stored = project.mask_path(clip_id)
        if stored.exists():
            data = stored.read_bytes()
            # spot-check the symmetry invariant on masks we persisted ourselves
            # (row mirroring commutes with the centered rotation)
            pixels = decode_png(data)
            if not np.array_equal(pixels, _mirror_rows(pixels)):
                raise _http_error(500, "asymmetric_stored_mask", f"stored mask for {clip_id} is corrupt")
            return Response(data, media_type="image/png")
        coarse = project.coarse_path(clip_id)
        if coarse.exists():
            return Response(coarse.read_bytes(), media_type="image/png")
        dims = project.native_dims(rec)
        return Response(encode_png(np.zeros(dims, dtype=np.uint8)), media_type="image/png")

    @app.put("/clips/{clip_id}/mask.png")
    async def save_mask(clip_id: str, request: Request):
        rec = project.record(clip_id)
        status = project.status(clip_id)
        if status in ("accepted", "rejected"):
            raise _http_error(409, "wrong_status", f"clip is {status}; terminal states are read-only")
        project.acquire(clip_id, owner_of(request))
        body = await request.body()
        try:
            pixels = decode_png(body)
        except SpecmaskError as exc:
            raise _http_error(422, exc.code, str(exc))
        dims = project.native_dims(rec)
        if pixels.shape not in (dims, MODEL_DIMS):
            raise _http_error(
                422,
                "bad_dims",
                f"mask is {pixels.shape}, expected native {dims} or {MODEL_DIMS}",
            )
        try:
            img = MaskImage(pixels, n_sources)
            grid = mask_image_to_grid(img, dims)
        except SpecmaskError as exc:
            raise _http_error(422, exc.code, str(exc))
        canonical = encode_png(grid_to_mask_image(grid).pixels)
        _atomic_write(project.mask_path(clip_id), canonical)
        return {"id": clip_id, "status": project.status(clip_id)}

    @app.post("/clips/{clip_id}/denoise")
    def preview_denoise(clip_id: str):
        rec = project.record(clip_id)
        mask = project.grid_mask(clip_id, rec)
        if mask is None:
            raise _http_error(409, "no_mask", "clip has no mask to preview with")
        clip = project.load_clip(rec)
        out = denoise(clip, mask, params)
        return Response(encode_wav(out, "float32"), media_type="audio/wav")

    @app.post("/clips/{clip_id}/accept")
    def accept(clip_id: str, request: Request):
        rec = project.record(clip_id)
        if project.status(clip_id) != "labeled":
            raise _http_error(409, "wrong_status", "only labeled clips can be accepted")
        project.acquire(clip_id, owner_of(request))
        mask = project.grid_mask(clip_id, rec)
        clip = project.load_clip(rec)
        denoised = denoise(clip, mask, params)
        try:
            accept_clip(clip_id, clip, denoised, mask, project.accepted_root, params)
        except SpecmaskError as exc:
            raise _http_error(500, exc.code, str(exc))
        project._set_terminal(clip_id, "accepted")
        project.release(clip_id)
        return {"id": clip_id, "status": "accepted"}

    @app.post("/clips/{clip_id}/reject")
    def reject(clip_id: str, request: Request):
        project.record(clip_id)
        if project.status(clip_id) != "labeled":
            raise _http_error(409, "wrong_status", "only labeled clips can be rejected")
        project.acquire(clip_id, owner_of(request))
        project._set_terminal(clip_id, "rejected")
        project.release(clip_id)
        return {"id": clip_id, "status": "rejected"}

    @app.post("/clips/{clip_id}/compare")
    async def compare(clip_id: str, request: Request):
        rec = project.record(clip_id)
        gt_path = project.mask_path(clip_id)
        if not gt_path.exists():
            raise _http_error(409, "no_ground_truth", "save a mask before comparing against it")
        dims = project.native_dims(rec)
        gt = mask_image_to_grid(MaskImage(decode_png(gt_path.read_bytes()), n_sources), dims)
        body = await request.body()
        try:
            pred_img = MaskImage(decode_png(body), n_sources)
            pred = mask_image_to_grid(pred_img, dims)
            f1, iou, dice = mask_scores(pred, gt)
        except SpecmaskError as exc:
            raise _http_error(422, exc.code, str(exc))
        return {"f1": f1, "iou": iou, "dice": dice}

    return app
