"""Command-line front end.

Subcommands: subsample, superres, hankelize, metrics, decompose.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import hankel, imageio, metrics, ring
from .config import load_run_config
from .runner import run


def _cmd_subsample(args) -> int:
    arr = imageio.load_image(args.image)
    x, peak = imageio.to_unit(arr)
    kept, mask = imageio.subsample_columns(x, args.missing_ratio, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem, suffix = Path(args.image).stem, Path(args.image).suffix
    imageio.write_image(out / f"{stem}_subsampled{suffix}", imageio.from_unit(kept, peak))
    imageio.write_image(out / f"{stem}_mask{suffix}", imageio.from_unit(mask, peak))
    print(f"kept {kept.shape[1]} of {x.shape[1]} columns -> {out}")
    return 0


def _cmd_superres(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.missing_ratio is not None:
        overrides["missing_ratio"] = args.missing_ratio
    if args.ratio is not None:
        overrides["ratio"] = args.ratio
    config = load_run_config(args.config, overrides)
    report = run(config)
    sys.stdout.write(report.csv_text)
    for name, message in report.failures:
        print(f"FAILED {name}: {message}", file=sys.stderr)
    print(f"report written to {report.csv_path}", file=sys.stderr)
    return 1 if report.failures else 0


def _cmd_hankelize(args) -> int:
    arr = imageio.load_image(args.image)
    x, _ = imageio.to_unit(arr)
    pl = hankel.plan(
        x.shape[0], x.shape[1], args.patch, args.overlap, args.window[0], args.window[1]
    )
    embedded = hankel.embed(x, pl)
    back = hankel.unembed(embedded, pl)
    residual = float(np.max(np.abs(back - x)))
    print("embedded shape:", " ".join(str(s) for s in pl.embedded_shape))
    print(f"tiled size: {pl.tiled_rows} {pl.tiled_cols}")
    print(f"padding: {pl.pad_rows} {pl.pad_cols}")
    print(f"round-trip max abs error: {residual:.3e}")
    return 0


def _cmd_metrics(args) -> int:
    ref_raw = imageio.load_image(args.reference)
    test_raw = imageio.load_image(args.test)
    ref, peak = imageio.to_unit(ref_raw)
    test = np.asarray(test_raw, dtype=np.float64) / peak
    cols = ["reference", "test", "psnr", "ssim"]
    vals = [
        Path(args.reference).name,
        Path(args.test).name,
        f"{metrics.psnr(ref, test, 1.0):.6f}",
        f"{metrics.ssim(ref, test, 1.0):.6f}",
    ]
    if args.roi:
        rects = [tuple(int(v) for v in chunk.split(",")) for chunk in args.roi]
        spec = metrics.RoiSpec(foregrounds=tuple(rects[:-1]), background=rects[-1])
        cols.append("cnr")
        vals.append(f"{metrics.cnr(test, spec):.6f}")
    print(",".join(cols))
    print(",".join(vals))
    return 0


def _cmd_decompose(args) -> int:
    target = imageio.read_tensor_text(args.tensor)
    rng = np.random.default_rng(args.seed)
    start = ring.random_ring(target.shape, args.rank, rng)
    result = ring.tr_als_fit(target, start, sweeps=args.sweeps, tol=args.tol)
    norm = float(np.linalg.norm(target.ravel()))
    print(f"shape: {' '.join(str(s) for s in target.shape)}  ranks: {args.rank}")
    for i, objective in enumerate(result.objectives, start=1):
        rel = np.sqrt(objective) / norm if norm > 0 else 0.0
        print(f"sweep {i}: objective {objective:.10e}  relative {rel:.6e}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ringsr",
        description="Column-subsampled image super-resolution via patch Hankel "
        "embedding and tensor-ring completion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subsample", help="drop columns from an image, write the rest and a mask")
    p.add_argument("image")
    p.add_argument("--missing-ratio", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_subsample)

    p = sub.add_parser("superres", help="run the reconstruction pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--missing-ratio", type=float, default=None)
    p.add_argument("--ratio", type=int, default=None, help="super-resolution ratio L")
    p.set_defaults(func=_cmd_superres)

    p = sub.add_parser("hankelize", help="report embedding geometry and round-trip residual")
    p.add_argument("image")
    p.add_argument("--patch", type=int, required=True)
    p.add_argument("--overlap", type=int, default=0)
    p.add_argument("--window", type=int, nargs=2, default=(2, 2))
    p.set_defaults(func=_cmd_hankelize)

    p = sub.add_parser("metrics", help="PSNR/SSIM (and CNR with ROIs) between two images")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument(
        "--roi",
        action="append",
        default=[],
        metavar="ROW,COL,H,W",
        help="repeatable; the last one is the background region",
    )
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("decompose", help="fit a tensor ring to a text tensor file")
    p.add_argument("tensor")
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--sweeps", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_decompose)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
