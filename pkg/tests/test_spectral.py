"""Spectral core: window, STFT vs direct-summation oracle, WOLA inverse,
masking semantics, separation, enhancement, and noise estimation."""
from __future__ import annotations

import numpy as np
import pytest

from specmask.errors import SpecmaskError
from specmask.spectral import (
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
from specmask.types import AudioClip, Spectrogram, StftParams, TfMask

from conftest import tone

P = StftParams()


def dft_oracle(x: np.ndarray, dft_len: int) -> np.ndarray:
    """Direct-summation O(N^2) DFT, the independent reference for stft."""
    padded = np.zeros(dft_len, dtype=np.float64)
    padded[: x.size] = x
    n = np.arange(dft_len)
    out = np.empty(dft_len, dtype=np.complex128)
    for k in range(dft_len):
        out[k] = np.sum(padded * np.exp(-2j * np.pi * k * n / dft_len))
    return out


def stft_oracle(x: np.ndarray, params: StftParams) -> np.ndarray:
    """Frame-by-frame oracle: hand windowing + direct DFT per frame."""
    w = 0.54 - 0.46 * np.cos(2.0 * np.pi * np.arange(params.window_len) / params.window_len)
    n_frames = (x.size - params.window_len) // params.hop + 1
    cols = []
    for t in range(n_frames):
        frame = x[t * params.hop : t * params.hop + params.window_len] * w
        cols.append(dft_oracle(frame, params.dft_len))
    return np.stack(cols, axis=1)


class TestWindow:
    def test_length_and_endpoint(self):
        w = make_window(P)
        assert w.shape == (128,)
        assert w[0] == 0.54 - 0.46  # cos(0) endpoint, 0.08 up to float repr

    def test_overlap_sum_constant(self):
        # brute-force COLA check: shifted window copies over 20 frames
        w = make_window(P)
        total = np.zeros(19 * P.hop + P.window_len)
        for t in range(20):
            total[t * P.hop : t * P.hop + P.window_len] += w
        interior = total[P.window_len : -P.window_len]
        assert np.allclose(interior, 1.08, atol=1e-12)

    def test_rejects_tiny_window(self):
        with pytest.raises(SpecmaskError) as exc:
            StftParams(window_len=1, hop=1, dft_len=4)
        assert exc.value.code == "bad_window"

    def test_rejects_bad_ordering(self):
        with pytest.raises(SpecmaskError) as exc:
            StftParams(window_len=64, hop=128, dft_len=1024)
        assert exc.value.code == "bad_params"


class TestStft:
    def test_zero_clip_gives_zero_spectrogram(self):
        clip = AudioClip(np.zeros(8000), 8000)
        assert not np.any(stft(clip, P).data)

    def test_impulse_frame_matches_oracle(self):
        x = np.zeros(256)
        x[0] = 1.0
        spec = stft(AudioClip(x, 8000), P)
        w0 = make_window(P)[0]
        direct = dft_oracle(np.array([w0]), P.dft_len)
        np.testing.assert_allclose(spec.data[:, 0], direct, atol=1e-9)

    def test_frame_count_formula(self):
        clip = AudioClip(np.zeros(320_000), 32000)
        assert stft(clip, P).n_frames == 4999

    def test_matches_oracle_on_short_clips(self, rng):
        for n in (128, 300, 1024):
            x = rng.standard_normal(n)
            spec = stft(AudioClip(x, 8000), P)
            np.testing.assert_allclose(spec.data, stft_oracle(x, P), atol=1e-9)

    def test_conjugate_symmetry(self, rng):
        x = rng.standard_normal(2000)
        data = stft(AudioClip(x, 8000), P).data
        mirrored = np.conj(np.roll(data[::-1], 1, axis=0))
        np.testing.assert_allclose(data, mirrored, atol=1e-9)

    def test_too_short_clip(self):
        with pytest.raises(SpecmaskError) as exc:
            stft(AudioClip(np.zeros(100), 8000), P)
        assert exc.value.code == "clip_too_short"


class TestIstft:
    def test_roundtrip_interior(self, rng):
        x = rng.standard_normal(32000) * 0.1
        clip = AudioClip(x, 32000)
        y = istft(stft(clip, P), len(clip)).samples
        interior = slice(P.window_len, len(x) - P.window_len)
        err = np.linalg.norm(y[interior] - x[interior]) / np.linalg.norm(x[interior])
        assert err <= 1e-6

    def test_zero_spectrogram_gives_silence(self):
        spec = Spectrogram(np.zeros((P.dft_len, 10)), P, 704, 8000)
        assert not np.any(istft(spec, 704).samples)

    def test_tone_roundtrip_keeps_peak_bin(self):
        clip = tone(1000.0, sr=32000, dur=1.0)
        y = istft(stft(clip, P), len(clip))
        in_peak = np.argmax(np.abs(np.fft.rfft(clip.samples)))
        out_peak = np.argmax(np.abs(np.fft.rfft(y.samples)))
        assert in_peak == out_peak

    def test_output_length_pad_and_truncate(self, rng):
        clip = AudioClip(rng.standard_normal(1000), 8000)
        spec = stft(clip, P)
        assert len(istft(spec, 500)) == 500
        padded = istft(spec, 2000)
        assert len(padded) == 2000
        assert not np.any(padded.samples[-500:])

    def test_nonreal_reconstruction_detected(self, rng):
        # break conjugate symmetry by hand: energy in one bin only
        data = np.zeros((P.dft_len, 8), dtype=complex)
        data[3, :] = 1.0 + 0.5j
        spec = Spectrogram(data, P, 576, 8000)
        with pytest.raises(SpecmaskError) as exc:
            istft(spec, 576)
        assert exc.value.code == "nonreal_reconstruction"

    def test_numerically_empty_band_is_not_flagged(self):
        # symmetric mask keeping only FFT rounding dust (an exact sidelobe
        # null of the DC frame): must come back silent, not crash on the
        # noise-level "asymmetry" of those bins
        x = np.ones(640)  # pure DC
        spec = stft(AudioClip(x, 8000), P)
        lab = np.zeros(spec.shape, dtype=np.int32)
        lab[120, :] = 1
        masked = apply_mask(spec, symmetrize_mask(TfMask(lab)), 1)
        assert np.linalg.norm(masked.data) < 1e-12  # the kept bins are dust
        out = istft(masked, 640)
        assert np.max(np.abs(out.samples)) < 1e-12


def band_mask(shape: tuple[int, int], rows: list[tuple[int, int]], labels=None) -> TfMask:
    lab = np.zeros(shape, dtype=np.int32)
    labels = labels or [1] * len(rows)
    for (lo, hi), k in zip(rows, labels):
        lab[max(lo, 0) : hi, :] = k  # mirror band comes from symmetrize
    return symmetrize_mask(TfMask(lab, max(labels)))


class TestApplyMask:
    def test_all_ones_is_identity(self, rng):
        spec = stft(AudioClip(rng.standard_normal(2000), 8000), P)
        mask = TfMask(np.ones(spec.shape, dtype=np.int32))
        out = apply_mask(spec, mask, 1)
        assert np.array_equal(out.data, spec.data)

    def test_all_zeros_silences(self, rng):
        spec = stft(AudioClip(rng.standard_normal(2000), 8000), P)
        out = apply_mask(spec, TfMask(np.zeros(spec.shape, dtype=np.int32)), 1)
        assert not np.any(out.data)

    def test_shape_mismatch_rejected(self, rng):
        spec = stft(AudioClip(rng.standard_normal(2000), 8000), P)
        bad = TfMask(np.ones((P.dft_len, spec.n_frames + 1), dtype=np.int32))
        with pytest.raises(SpecmaskError) as exc:
            apply_mask(spec, bad, 1)
        assert exc.value.code == "shape_mismatch"

    def test_asymmetric_mask_rejected(self, rng):
        spec = stft(AudioClip(rng.standard_normal(2000), 8000), P)
        lab = np.zeros(spec.shape, dtype=np.int32)
        lab[3, :] = 1  # mirror row 1021 left empty
        with pytest.raises(SpecmaskError) as exc:
            apply_mask(spec, TfMask(lab), 1)
        assert exc.value.code == "asymmetric_mask"

    def test_keep_label_out_of_range(self, rng):
        spec = stft(AudioClip(rng.standard_normal(2000), 8000), P)
        mask = TfMask(np.ones(spec.shape, dtype=np.int32))
        with pytest.raises(SpecmaskError) as exc:
            apply_mask(spec, mask, 2)
        assert exc.value.code == "bad_label"

    def test_bandpass_suppresses_other_tone(self):
        # two tones; keep +-3 bins around the 1 kHz pair; 6 kHz leakage must
        # land at least 60 dB below the kept tone
        sr = 32000
        t = np.arange(sr) / sr
        mix = AudioClip(0.7 * np.sin(2 * np.pi * 1000 * t) + 0.4 * np.sin(2 * np.pi * 6000 * t), sr)
        spec = stft(mix, P)
        bin1 = 1000 * P.dft_len // sr
        mask = band_mask(spec.shape, [(bin1 - 3, bin1 + 4)])
        y = istft(apply_mask(spec, mask, 1), len(mix)).samples
        F = np.abs(np.fft.rfft(y))
        freqs = np.fft.rfftfreq(len(y), 1 / sr)
        e1 = np.sum(F[(freqs > 950) & (freqs < 1050)] ** 2)
        e6 = np.sum(F[(freqs > 5950) & (freqs < 6050)] ** 2)
        assert 10 * np.log10(e6 / e1) <= -60.0


class TestSymmetrize:
    def test_idempotent(self, rng):
        lab = (rng.random((16, 5)) < 0.3).astype(np.int32)
        once = symmetrize_mask(TfMask(lab))
        twice = symmetrize_mask(once)
        assert np.array_equal(once.labels, twice.labels)

    def test_upper_half_mirrors_down(self):
        lab = np.zeros((8, 3), dtype=np.int32)
        lab[1, :] = 1
        out = symmetrize_mask(TfMask(lab)).labels
        assert np.all(out[1] == 1) and np.all(out[7] == 1)
        assert not np.any(out[[0, 2, 3, 4, 5, 6]])

    def test_conflicting_labels_take_max(self):
        lab = np.zeros((8, 2), dtype=np.int32)
        lab[1, :] = 1
        lab[7, :] = 2  # mirror row of 1
        out = symmetrize_mask(TfMask(lab, n_sources=2)).labels
        assert np.all(out[1] == 2) and np.all(out[7] == 2)


class TestDenoise:
    def test_all_ones_identity(self, rng):
        clip = AudioClip(rng.standard_normal(8000) * 0.2, 8000)
        spec_shape = (P.dft_len, P.n_frames(8000))
        out = denoise(clip, TfMask(np.ones(spec_shape, dtype=np.int32)), P)
        assert len(out) == len(clip)
        interior = slice(P.window_len, len(clip) - P.window_len)
        err = np.linalg.norm(out.samples[interior] - clip.samples[interior])
        assert err / np.linalg.norm(clip.samples[interior]) <= 1e-6

    def test_all_zeros_silence(self, rng):
        clip = AudioClip(rng.standard_normal(8000), 8000)
        out = denoise(clip, TfMask(np.zeros((P.dft_len, P.n_frames(8000)), dtype=np.int32)), P)
        assert np.max(np.abs(out.samples)) <= 1e-9

    def test_accepts_half_plane_mask(self, rng):
        # denoise symmetrizes internally, so a one-sided mask is fine
        clip = AudioClip(rng.standard_normal(4000), 8000)
        lab = np.zeros((P.dft_len, P.n_frames(4000)), dtype=np.int32)
        lab[: P.dft_len // 2, :] = 1
        out = denoise(clip, TfMask(lab), P)
        assert np.any(out.samples)


class TestSeparate:
    @pytest.fixture
    def two_tone(self):
        sr = 32000
        t = np.arange(sr) / sr
        tone1 = 0.7 * np.sin(2 * np.pi * 1000 * t)
        tone2 = 0.4 * np.sin(2 * np.pi * 6000 * t)
        mix = AudioClip(tone1 + tone2, sr)
        bin1 = 1000 * P.dft_len // sr
        bin2 = 6000 * P.dft_len // sr
        shape = (P.dft_len, P.n_frames(len(mix)))
        mask = band_mask(shape, [(bin1 - 40, bin1 + 41), (bin2 - 40, bin2 + 41)], [1, 2])
        return mix, tone1, tone2, mask

    @staticmethod
    def ncc(a, b):
        return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))

    def test_disjoint_bands_recover_sources(self, two_tone):
        mix, tone1, tone2, mask = two_tone
        out1, out2 = separate(mix, mask, P)
        assert self.ncc(out1.samples, tone1) >= 0.99
        assert self.ncc(out2.samples, tone2) >= 0.99

    def test_sum_equals_union_denoise(self, two_tone):
        mix, _, _, mask = two_tone
        out1, out2 = separate(mix, mask, P)
        union = TfMask((mask.labels > 0).astype(np.int32))
        merged = denoise(mix, union, P)
        np.testing.assert_allclose(out1.samples + out2.samples, merged.samples, atol=1e-9)

    def test_empty_label_gives_silence(self, rng):
        clip = AudioClip(rng.standard_normal(4000), 8000)
        lab = np.zeros((P.dft_len, P.n_frames(4000)), dtype=np.int32)
        lab[2, :] = 1
        mask = symmetrize_mask(TfMask(lab, n_sources=2))
        out1, out2 = separate(clip, mask, P)
        assert not np.any(out2.samples)

    def test_single_source_rejected(self, rng):
        clip = AudioClip(rng.standard_normal(4000), 8000)
        mask = TfMask(np.ones((P.dft_len, P.n_frames(4000)), dtype=np.int32), 1)
        with pytest.raises(SpecmaskError) as exc:
            separate(clip, mask, P)
        assert exc.value.code == "use_denoise"


class TestEnhanceAndNoise:
    def test_enhance_times_200(self, rng):
        clip = AudioClip(rng.standard_normal(100) * 0.001, 8000)
        out = enhance(clip, 200.0)
        assert np.array_equal(out.samples, clip.samples * 200.0)

    def test_enhance_identity(self, rng):
        clip = AudioClip(rng.standard_normal(100), 8000)
        assert np.array_equal(enhance(clip, 1.0).samples, clip.samples)

    def test_enhance_composes(self, rng):
        clip = AudioClip(rng.standard_normal(100), 8000)
        twice = enhance(enhance(clip, 0.5), 0.5)
        np.testing.assert_allclose(twice.samples, enhance(clip, 0.25).samples, rtol=1e-15)

    def test_enhance_rejects_nonpositive(self, rng):
        clip = AudioClip(rng.standard_normal(10), 8000)
        for bad in (0.0, -1.0):
            with pytest.raises(SpecmaskError):
                enhance(clip, bad)

    def test_noise_zero_when_identical(self, rng):
        clip = AudioClip(rng.standard_normal(100), 8000)
        assert not np.any(estimate_noise(clip, clip).samples)

    def test_noise_plus_denoised_reconstructs(self, rng):
        original = AudioClip(rng.standard_normal(1000), 8000)
        denoised = AudioClip(original.samples * 0.7 + 0.01, 8000)
        noise = estimate_noise(original, denoised)
        back = noise.samples + denoised.samples
        # 1 ulp of the dominant operand: near original's zero crossings the
        # rounding error of (a-b)+b is set by |b|, not by the tiny |a|
        ulp = np.spacing(np.maximum(np.abs(original.samples), np.abs(denoised.samples)))
        assert np.all(np.abs(back - original.samples) <= ulp)

    def test_noise_mismatch_rejected(self, rng):
        a = AudioClip(rng.standard_normal(100), 8000)
        b = AudioClip(rng.standard_normal(99), 8000)
        with pytest.raises(SpecmaskError) as exc:
            estimate_noise(a, b)
        assert exc.value.code == "length_mismatch"
        c = AudioClip(rng.standard_normal(100), 16000)
        with pytest.raises(SpecmaskError) as exc:
            estimate_noise(a, c)
        assert exc.value.code == "rate_mismatch"
