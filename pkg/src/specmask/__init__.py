"""specmask: audio denoising by time-frequency mask segmentation.

Audio goes through a windowed STFT to a complex spectrogram; a label grid
marks clean-signal bins (1..K) against noise (0); masked bins are zeroed and
the clip is rebuilt by weighted overlap-add. Masks can be imported from
segmentation models, produced by a classical baseline, or painted by hand in
the bundled labeling service.
"""
from .audio_io import read_wav, wav_info, write_wav
from .errors import SpecmaskError
from .imaging import grid_to_mask_image, mask_image_to_grid, render_image
from .metrics import dice_loss, evaluate_split, mask_scores, sdr
from .providers import baseline_segment, import_mask, oracle_mask
from .spectral import (
    apply_mask,
    denoise,
    enhance,
    estimate_noise,
    istft,
    make_window,
    separate,
    stft,
    symmetrize_mask,
)
from .types import AudioClip, Channel, Layout, Spectrogram, StftParams, TfMask

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "Channel",
    "Layout",
    "Spectrogram",
    "SpecmaskError",
    "StftParams",
    "TfMask",
    "apply_mask",
    "baseline_segment",
    "denoise",
    "dice_loss",
    "enhance",
    "estimate_noise",
    "evaluate_split",
    "grid_to_mask_image",
    "import_mask",
    "istft",
    "make_window",
    "mask_image_to_grid",
    "mask_scores",
    "oracle_mask",
    "read_wav",
    "render_image",
    "sdr",
    "separate",
    "stft",
    "symmetrize_mask",
    "wav_info",
    "write_wav",
]
