"""Run configuration: an INI-style text file mapped onto the pipeline and
reporting parameters.  See the README for the full schema."""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .metrics import RoiSpec
from .superres import SuperResConfig


@dataclass
class RunConfig:
    images: list[Path]
    out_dir: Path
    superres: SuperResConfig
    references: list[Path] | None = None
    missing_ratio: float | None = None
    rois: RoiSpec | None = None
    seed: int = 0
    write_images: bool = True

    def validate(self) -> None:
        if not self.images:
            raise ValueError("no input images configured")
        if self.references is not None and len(self.references) != len(self.images):
            raise ValueError("references must pair up with images one to one")
        for p in self.images + (self.references or []):
            if not Path(p).exists():
                raise FileNotFoundError(str(p))
        self.superres.validate()


def _ints(raw: str) -> list[int]:
    return [int(tok) for tok in raw.replace(",", " ").split()]


def _floats(raw: str) -> list[float]:
    return [float(tok) for tok in raw.replace(",", " ").split()]


def _rects(raw: str) -> list[tuple[int, int, int, int]]:
    rects = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = _ints(chunk)
        if len(vals) != 4:
            raise ValueError(f"ROI must be 'row col height width', got {chunk!r}")
        rects.append(tuple(vals))
    return rects


def load_run_config(path, overrides: dict | None = None) -> RunConfig:
    """Parse a run configuration file; `overrides` may replace the seed,
    output directory, or missing ratio (the CLI flags)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read(path)
    overrides = overrides or {}

    sec = parser["input"] if parser.has_section("input") else {}
    base = path.parent

    def _paths(raw: str) -> list[Path]:
        return [Path(tok) if Path(tok).is_absolute() else base / tok for tok in raw.split()]

    images = _paths(sec.get("images", ""))
    refs_raw = sec.get("references", "").strip()
    references = _paths(refs_raw) if refs_raw else None

    out_dir = Path(overrides.get("out_dir") or parser.get("output", "dir", fallback="out"))
    if not out_dir.is_absolute():
        out_dir = base / out_dir

    run_sec = parser["run"] if parser.has_section("run") else {}
    seed = int(overrides.get("seed", run_sec.get("seed", 0)))
    ratio_raw = overrides.get("missing_ratio", run_sec.get("missing_ratio"))
    missing_ratio = None if ratio_raw in (None, "") else float(ratio_raw)

    sr = parser["superres"] if parser.has_section("superres") else {}
    noise_rows_raw = sr.get("noise_rows", "").strip()
    superres = SuperResConfig(
        patch_sizes=_ints(sr.get("patch_sizes", "7 5")),
        overlaps=_ints(sr.get("overlaps", "4 2")),
        window=tuple(_ints(sr.get("window", "2 2"))),
        ratio=int(overrides.get("ratio", sr.get("ratio", 2))),
        weights=_floats(sr.get("weights", "1.0")),
        initial_rank=int(sr.get("initial_rank", 3)),
        max_rank=int(sr.get("max_rank", 8)),
        rank_step=int(sr.get("rank_step", 1)),
        rank_noise=float(sr.get("rank_noise", 1e-2)),
        sweeps=int(sr.get("sweeps", 10)),
        tol=float(sr.get("tol", 1e-4)),
        refreshes=int(sr.get("refreshes", 4)),
        accuracy=float(sr.get("accuracy", 1e-3)),
        smoothing=sr.get("smoothing", "true").strip().lower() in ("1", "true", "yes", "on"),
        seed=seed,
        noise_rows=tuple(_ints(noise_rows_raw)) if noise_rows_raw else None,
        noise_weight_sum=float(sr.get("noise_weight_sum", 0.95)),
        noise_patch_sizes=_ints(sr.get("noise_patch_sizes", "")),
    )

    rois = None
    if parser.has_section("metrics"):
        msec = parser["metrics"]
        fg = _rects(msec.get("foreground_rois", ""))
        bg = _rects(msec.get("background_roi", ""))
        if fg and bg:
            rois = RoiSpec(foregrounds=tuple(fg), background=bg[0])
        elif fg or bg:
            raise ValueError("CNR needs both foreground_rois and background_roi")

    cfg = RunConfig(
        images=images,
        out_dir=out_dir,
        superres=superres,
        references=references,
        missing_ratio=missing_ratio,
        rois=rois,
        seed=seed,
    )
    cfg.validate()
    return cfg
