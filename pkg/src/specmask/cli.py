"""Command-line surface for every pipeline stage.

Exit codes: 0 ok, 1 runtime error (with a machine-parseable ``error:`` line
on stderr), 2 usage. Defaults mirror the analysis parameters used throughout:
128-sample window, 64-sample hop, 1024-point DFT.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import audio_io, dataset, imaging, metrics, providers, spectral
from .errors import SpecmaskError
from .types import AudioClip, StftParams


def _add_stft_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stft-window", type=int, default=128, metavar="N",
                   help="analysis window length in samples (default 128)")
    p.add_argument("--stft-hop", type=int, default=64, metavar="N",
                   help="hop between frames in samples (default 64)")
    p.add_argument("--stft-dft-len", type=int, default=1024, metavar="N",
                   help="DFT length; frames are zero-padded to it (default 1024)")


def _add_baseline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-mad", type=float, default=3.0, help="MAD multiples above the row median (default 3)")
    p.add_argument("--min-region", type=int, default=20, help="drop clean regions smaller than this many bins (default 20)")
    p.add_argument("--morph-radius", type=int, default=2, help="square structuring element radius (default 2)")


def _params(args) -> StftParams:
    return StftParams(
        window_len=args.stft_window, hop=args.stft_hop, dft_len=args.stft_dft_len
    )


def _echo(args, params: StftParams) -> None:
    if args.verbose:
        print(
            f"stft: window={params.window_len} hop={params.hop} dft_len={params.dft_len}",
            file=sys.stderr,
        )


def _suffixed(path: Path, tag: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{path.suffix}")


def _provider_from(args, params: StftParams):
    if args.provider == "baseline":
        return providers.BaselineProvider(args.k_mad, args.min_region, args.morph_radius)
    if args.provider == "import":
        if args.mask_dir is None:
            raise SpecmaskError("usage", "--provider import needs --mask-dir")
        mask_dir = Path(args.mask_dir)
        return providers.ImportProvider(lambda cid: mask_dir / f"{cid}_mask.png")
    raise SpecmaskError("usage", f"unknown provider {args.provider!r}")


def _load_manifest(args) -> dataset.DatasetManifest:
    root = Path(args.root)
    cache = root / dataset.MANIFEST_NAME
    if cache.exists() and not args.rescan:
        return dataset.load_manifest(cache)
    manifest = dataset.scan_dataset(root)
    dataset.save_manifest(manifest)
    return manifest


def _cmd_spectrogram(args) -> int:
    params = _params(args)
    _echo(args, params)
    clips = audio_io.read_wav(args.input)
    out = Path(args.output)
    for clip in clips:
        image = imaging.render_image(spectral.stft(clip, params))
        target = out if len(clips) == 1 else _suffixed(out, clip.channel.value[0].upper())
        imaging.save_png(image.pixels, target)
        print(f"wrote {target}")
    return 0


def _cmd_denoise(args) -> int:
    params = _params(args)
    _echo(args, params)
    if args.root:
        if not args.split or not args.out_dir:
            raise SpecmaskError("usage", "batch mode needs --split and --out-dir")
        manifest = _load_manifest(args)
        provider = _provider_from(args, params)
        summary = dataset.batch_denoise(
            manifest, args.split, provider, params, args.out_dir,
            jobs=args.jobs, sample_format=args.format,
        )
        print(f"denoised {summary.n_ok} clips, {summary.n_failed} failures -> {summary.out_dir}")
        for clip_id, code in summary.failures:
            print(f"  failed {clip_id}: {code}", file=sys.stderr)
        return 0 if summary.n_failed == 0 else 1

    if not args.input or not args.output:
        raise SpecmaskError("usage", "single-file mode needs INPUT and -o OUTPUT")
    clips = audio_io.read_wav(args.input)
    out = Path(args.output)
    for clip in clips:
        spec = spectral.stft(clip, params)
        if args.mask:
            mask = providers.import_mask(args.mask, spec.shape)
        else:
            mask = providers.baseline_segment(spec, args.k_mad, args.min_region, args.morph_radius)
        result = spectral.denoise(clip, mask, params)
        target = out if len(clips) == 1 else _suffixed(out, clip.channel.value[0].upper())
        audio_io.write_wav(result, target, args.format)
        print(f"wrote {target}")
    return 0


def _cmd_separate(args) -> int:
    params = _params(args)
    _echo(args, params)
    clip = audio_io.read_wav(args.input)[0]
    spec = spectral.stft(clip, params)
    mask = providers.import_mask(args.mask, spec.shape, n_sources=args.sources)
    outs = spectral.separate(clip, mask, params)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for k, source in enumerate(outs, start=1):
        target = out_dir / f"source_{k}.wav"
        audio_io.write_wav(source, target, args.format)
        print(f"wrote {target}")
    return 0


def _cmd_enhance(args) -> int:
    clip = audio_io.read_wav(args.input)[0]
    audio_io.write_wav(spectral.enhance(clip, args.gain), args.output, args.format)
    print(f"wrote {args.output}")
    return 0


def _cmd_estimate_noise(args) -> int:
    original = audio_io.read_wav(args.original)[0]
    denoised = audio_io.read_wav(args.denoised)[0]
    audio_io.write_wav(spectral.estimate_noise(original, denoised), args.output, args.format)
    print(f"wrote {args.output}")
    return 0


def _cmd_segment(args) -> int:
    params = _params(args)
    _echo(args, params)
    clips = audio_io.read_wav(args.input)
    out = Path(args.output)
    for clip in clips:
        spec = spectral.stft(clip, params)
        mask = providers.baseline_segment(spec, args.k_mad, args.min_region, args.morph_radius)
        target = out if len(clips) == 1 else _suffixed(out, clip.channel.value[0].upper())
        imaging.save_png(imaging.grid_to_mask_image(mask).pixels, target)
        print(f"wrote {target}")
    return 0


def _cmd_eval(args) -> int:
    params = _params(args)
    _echo(args, params)
    manifest = _load_manifest(args)
    if args.provider == "import" and args.mask_dir is None:
        # default to the split's own mask folder (scores the GT against itself)
        args.mask_dir = Path(args.root) / args.split / "masks"
    provider = _provider_from(args, params)
    report = metrics.evaluate_split(manifest, args.split, provider, params, jobs=args.jobs)
    print(metrics.format_report(report))
    if args.report:
        report.save(args.report)
        print(f"wrote {args.report}")
    return 0


def _cmd_scan(args) -> int:
    manifest = dataset.scan_dataset(args.root)
    cache = dataset.save_manifest(manifest, args.manifest_out)
    for split, count in manifest.counts().items():
        print(f"{split}: {count}")
    for line in manifest.inconsistencies:
        print(f"inconsistent: {line}", file=sys.stderr)
    for line in manifest.unknown_files:
        print(f"unknown file: {line}", file=sys.stderr)
    print(f"manifest cached at {cache}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    params = _params(args)
    _echo(args, params)
    app = create_app(Path(args.workspace), params=params, n_sources=args.sources)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specmask",
        description="Audio denoising by time-frequency mask segmentation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="echo effective numeric flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrogram", help="render a WAV into its audio image(s)")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="output PNG path")
    _add_stft_flags(p)
    p.set_defaults(func=_cmd_spectrogram)

    p = sub.add_parser("denoise", help="mask-and-reconstruct one file or a whole split")
    p.add_argument("input", nargs="?", help="input WAV (single-file mode)")
    p.add_argument("-o", "--output", help="output WAV (single-file mode)")
    p.add_argument("--mask", help="mask PNG to apply (single-file mode)")
    p.add_argument("--root", help="dataset root (batch mode)")
    p.add_argument("--split", choices=dataset.SPLITS, help="dataset split (batch mode)")
    p.add_argument("--out-dir", help="output directory (batch mode)")
    p.add_argument("--provider", choices=["baseline", "import"], default="baseline")
    p.add_argument("--mask-dir", help="mask directory for --provider import")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--rescan", action="store_true", help="ignore any cached manifest")
    p.add_argument("--format", choices=["float32", "pcm16"], default="float32")
    _add_stft_flags(p)
    _add_baseline_flags(p)
    p.set_defaults(func=_cmd_denoise)

    p = sub.add_parser("separate", help="split one clip into per-label sources")
    p.add_argument("input")
    p.add_argument("--mask", required=True, help="multi-label mask PNG")
    p.add_argument("--sources", type=int, required=True, help="number of labels K")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--format", choices=["float32", "pcm16"], default="float32")
    _add_stft_flags(p)
    p.set_defaults(func=_cmd_separate)

    p = sub.add_parser("enhance", help="scale a denoised clip by a gain factor")
    p.add_argument("input")
    p.add_argument("--gain", type=float, required=True, help="positive multiplier, e.g. 200")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["float32", "pcm16"], default="float32")
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("estimate-noise", help="original minus denoised residual")
    p.add_argument("original")
    p.add_argument("denoised")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["float32", "pcm16"], default="float32")
    p.set_defaults(func=_cmd_estimate_noise)

    p = sub.add_parser("segment", help="run the baseline segmenter, write the mask PNG")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    _add_stft_flags(p)
    _add_baseline_flags(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("eval", help="score a mask provider against a split's ground truth")
    p.add_argument("--root", required=True)
    p.add_argument("--split", choices=dataset.SPLITS, required=True)
    p.add_argument("--provider", choices=["baseline", "import"], default="import")
    p.add_argument("--mask-dir", help="predicted-mask directory for --provider import")
    p.add_argument("--report", help="write the machine-readable report JSON here")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--rescan", action="store_true")
    _add_stft_flags(p)
    _add_baseline_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("scan", help="index a dataset tree into a cached manifest")
    p.add_argument("--root", required=True)
    p.add_argument("--manifest-out", help="cache path (default <root>/manifest.json)")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("serve", help="run the mask labeling HTTP service")
    p.add_argument("--workspace", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--sources", type=int, default=1, help="number of mask labels K")
    _add_stft_flags(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecmaskError as exc:
        print(f"error: code={exc.code} detail={exc}", file=sys.stderr)
        return 2 if exc.code == "usage" else 1
    except OSError as exc:
        print(f"error: code=io_error detail={exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
