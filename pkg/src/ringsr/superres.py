"""End-to-end reconstruction of column-subsampled images.

Pipeline stages: weighted fusion of neighboring scans, per-row cubic spline
initialization of the missing columns, neighborhood smoothing of the
estimated entries, then for each configured patch size an iterative loop
that embeds the current estimate, fits a tensor ring at the current ranks,
de-embeds, smooths, re-imposes the observed columns, and grows the ranks.
The per-patch outputs are averaged into the final image.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .hankel import compact_shape, embed_compact, plan, unembed_compact
from .ring import RankSchedule, random_ring, rank_increment, tr_als_fit, tr_to_dense


class PipelineError(RuntimeError):
    """Raised when a reconstruction stage fails; carries the patch size or
    rank level that failed."""


@dataclass
class SuperResConfig:
    """Full parameter set of the reconstruction pipeline."""

    patch_sizes: list[int]
    overlaps: list[int]
    window: tuple[int, int] = (2, 2)
    ratio: int = 2
    weights: list[float] = field(default_factory=lambda: [1.0])
    initial_rank: int | list[int] = 3
    max_rank: int = 8
    rank_step: int = 1
    rank_noise: float = 1e-2
    sweeps: int = 10
    tol: float = 1e-4
    refreshes: int = 4
    accuracy: float = 1e-3
    smoothing: bool = True
    seed: int = 0
    # optional reduced-weight fusion for a noisy row band, applied only to
    # the listed patch sizes
    noise_rows: tuple[int, int] | None = None
    noise_weight_sum: float = 0.95
    noise_patch_sizes: list[int] = field(default_factory=list)

    def validate(self) -> None:
        if len(self.patch_sizes) == 0:
            raise ValueError("at least one patch size is required")
        if len(self.patch_sizes) != len(self.overlaps):
            raise ValueError("patch_sizes and overlaps must have equal length")
        if int(self.ratio) != self.ratio or self.ratio < 1:
            raise ValueError("ratio must be a positive integer")
        if sum(self.weights) > 1.0 + 1e-9:
            raise ValueError(f"scan weights sum to {sum(self.weights)}, must be <= 1")

    def schedule(self) -> RankSchedule:
        return RankSchedule(self.initial_rank, self.max_rank, self.rank_step)


@dataclass
class InitResult:
    """Spline-initialized full-width image, its observation mask, and the
    interpolation method actually used ("cubic", or "linear" when fewer than
    four columns are observed)."""

    image: np.ndarray
    mask: np.ndarray
    method: str


@dataclass
class PatchRunResult:
    """Output of one patch-size run plus its diagnostics: the rank level and
    masked relative residual per outer iteration, and the per-sweep objective
    trace of every individual ALS fit."""

    image: np.ndarray
    patch: int
    overlap: int
    rank_levels: list[int]
    masked_residuals: list[float]
    objective_traces: list[list[float]]


@dataclass
class PipelineResult:
    image: np.ndarray
    baseline: np.ndarray
    mask: np.ndarray
    fused: np.ndarray
    per_patch: list[PatchRunResult]


def fuse_bscans(scans, weights) -> np.ndarray:
    """Weighted sum of equally sized scans; the weights must sum to at most 1."""
    scans = [np.asarray(s, dtype=np.float64) for s in scans]
    weights = [float(w) for w in weights]
    if len(scans) != len(weights):
        raise ValueError(f"{len(scans)} scans but {len(weights)} weights")
    if not scans:
        raise ValueError("no scans given")
    shape = scans[0].shape
    for s in scans[1:]:
        if s.shape != shape:
            raise ValueError(f"scan shape mismatch: {s.shape} vs {shape}")
    if sum(weights) > 1.0 + 1e-9:
        raise ValueError(f"weights sum to {sum(weights)}, must be <= 1")
    out = np.zeros(shape)
    for w, s in zip(weights, scans):
        out += w * s
    return out


def _fill_columns(full: np.ndarray, observed_cols: np.ndarray) -> tuple[np.ndarray, str]:
    """Fill the non-observed columns of `full` by per-row interpolation
    through the observed columns (cubic spline, or linear when fewer than
    four columns are observed)."""
    width = full.shape[1]
    missing = np.setdiff1d(np.arange(width), observed_cols)
    out = full.copy()
    if missing.size == 0:
        return out, "cubic"
    if observed_cols.size >= 4:
        spline = CubicSpline(observed_cols, full[:, observed_cols], axis=1)
        out[:, missing] = spline(missing)
        return out, "cubic"
    if observed_cols.size < 2:
        raise ValueError("interpolation needs at least two observed columns")
    for r in range(full.shape[0]):
        out[r, missing] = np.interp(missing, observed_cols, full[r, observed_cols])
    return out, "linear"


def spline_init(xl, ratio: int) -> InitResult:
    """Widen a low-resolution scan by `ratio`, placing the observed columns
    at stride `ratio` from column 0 and interpolating the rest per row."""
    xl = np.asarray(xl, dtype=np.float64)
    ratio = int(ratio)
    if ratio < 1:
        raise ValueError("ratio must be at least 1")
    rows, cols_in = xl.shape
    width = ratio * cols_in
    observed = np.arange(cols_in) * ratio
    full = np.zeros((rows, width))
    full[:, observed] = xl
    mask = np.zeros((rows, width))
    mask[:, observed] = 1.0
    filled, method = _fill_columns(full, observed)
    return InitResult(filled, mask, method)


def spline_fill(observed_image, mask) -> InitResult:
    """Variant of :func:`spline_init` for an arbitrary column mask: the input
    is already full width, with valid data in the observed columns."""
    observed_image = np.asarray(observed_image, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if observed_image.shape != mask.shape:
        raise ValueError("image and mask shapes differ")
    observed = observed_columns(mask)
    filled, method = _fill_columns(observed_image, observed)
    return InitResult(filled, mask, method)


def observed_columns(mask) -> np.ndarray:
    """Column indices marked observed; the mask must be column-constant
    binary with at least one observed column."""
    mask = np.asarray(mask)
    col = mask[0]
    if not np.all((mask == col[None, :]) & ((mask == 0) | (mask == 1))):
        raise ValueError("mask must be a column-constant binary matrix")
    observed = np.flatnonzero(col)
    if observed.size == 0:
        raise ValueError("mask has no observed columns")
    return observed


def smooth_estimated(x, mask) -> np.ndarray:
    """Replace each estimated entry (mask 0) by the mean of its existing
    8-neighborhood, in a single pass over the pre-update values; observed
    entries (mask 1) are untouched."""
    x = np.asarray(x, dtype=np.float64)
    mask = np.asarray(mask)
    if x.shape != mask.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {mask.shape}")
    rows, cols = x.shape
    px = np.pad(x, 1)
    pc = np.pad(np.ones_like(x), 1)
    total = np.zeros_like(x)
    count = np.zeros_like(x)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            total += px[1 + dr : 1 + dr + rows, 1 + dc : 1 + dc + cols]
            count += pc[1 + dr : 1 + dr + rows, 1 + dc : 1 + dc + cols]
    return np.where(mask > 0.5, x, total / count)


def superres_single_patch(
    x0,
    mask,
    patch: int,
    overlap: int,
    window,
    schedule: RankSchedule,
    *,
    sweeps: int = 10,
    tol: float = 1e-4,
    refreshes: int = 4,
    accuracy: float = 1e-3,
    smoothing: bool = True,
    rank_noise: float = 1e-2,
    rng=None,
) -> PatchRunResult:
    """Iterative masked completion for one patch size.

    Per iteration: embed the current estimate (whose unobserved entries
    start at the spline initialization and afterwards carry the previous
    model through the update rule), fit the ring to that embedding,
    de-embed, smooth the estimated entries, and re-impose the observed
    columns.  Each rank level runs `refreshes` such iterations before the
    ranks grow; a single one barely moves the unobserved entries, which the
    fit target otherwise freezes.  Stops when the ranks would exceed the
    schedule's cap or the masked relative residual drops below `accuracy`.

    The fit works on the deduplicated embedding, which carries exactly the
    same information as the full embedded tensor at a fraction of the size.

    Smoothing constraints: the unobserved fit-target entries must come from
    the smoothed estimate during the ramp-up levels (raw model values there
    let the coarse early fits overwrite the interpolation prior), while the
    final (max-rank) level must run unsmoothed (the low-pass caps the
    recoverable detail and suppresses the benefit of patch overlap)."""
    x0 = np.asarray(x0, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if x0.shape != mask.shape:
        raise ValueError(f"image shape {x0.shape} does not match mask {mask.shape}")
    observed_columns(mask)
    if refreshes < 1:
        raise ValueError("refreshes must be at least 1")
    rng = np.random.default_rng() if rng is None else rng
    pl = plan(x0.shape[0], x0.shape[1], patch, overlap, window[0], window[1])
    caps = schedule.caps(6)
    ring = random_ring(compact_shape(pl), schedule.initial_bonds(6), rng)
    obs_norm = float(np.linalg.norm(mask * x0))
    if obs_norm == 0.0:
        raise ValueError("mask selects no data")

    x = x0.copy()
    rank_levels: list[int] = []
    residuals: list[float] = []
    traces: list[list[float]] = []
    stop = False
    while not stop and max(ring.bond_ranks) <= schedule.max_rank:
        level = max(ring.bond_ranks)
        smooth_level = smoothing and level < schedule.max_rank
        for _ in range(refreshes):
            target = embed_compact(x, pl)
            fit = tr_als_fit(target, ring, sweeps=sweeps, tol=tol)
            ring = fit.ring
            traces.append(fit.objectives)
            estimate = unembed_compact(tr_to_dense(ring), pl)
            if not np.all(np.isfinite(estimate)):
                raise PipelineError(f"non-finite values in the ALS fit at rank level {level}")
            smoothed = smooth_estimated(estimate, mask) if smooth_level else estimate
            x = mask * x0 + (1.0 - mask) * smoothed
        rank_levels.append(level)
        residual = float(np.linalg.norm(mask * (x0 - estimate))) / obs_norm
        residuals.append(residual)
        if residual <= accuracy or schedule.step == 0:
            break
        ring = rank_increment(ring, schedule.step, rank_noise, rng, bond_caps=caps)
        if max(ring.bond_ranks) == level:  # caps stop further growth
            stop = True
    return PatchRunResult(
        image=x,
        patch=patch,
        overlap=overlap,
        rank_levels=rank_levels,
        masked_residuals=residuals,
        objective_traces=traces,
    )


def _run_patches(x_init, mask, fused, config: SuperResConfig, baseline) -> PipelineResult:
    x_init = np.asarray(x_init, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    x0 = smooth_estimated(x_init, mask) if config.smoothing else x_init
    schedule = config.schedule()
    runs: list[PatchRunResult] = []
    for patch, overlap in zip(config.patch_sizes, config.overlaps):
        # keyed by the patch config, not the list position: duplicate entries
        # reproduce identical runs and scheduling order cannot matter
        seed = np.random.SeedSequence([config.seed & 0xFFFFFFFF, patch, overlap])
        xi = x0
        if config.noise_rows is not None and patch in config.noise_patch_sizes:
            lo, hi = config.noise_rows
            scale = config.noise_weight_sum / max(sum(config.weights), 1e-300)
            xi = x0.copy()
            xi[lo:hi, :] *= scale
        try:
            run = superres_single_patch(
                xi,
                mask,
                patch,
                overlap,
                config.window,
                schedule,
                sweeps=config.sweeps,
                tol=config.tol,
                refreshes=config.refreshes,
                accuracy=config.accuracy,
                smoothing=config.smoothing,
                rank_noise=config.rank_noise,
                rng=np.random.default_rng(seed),
            )
        except PipelineError as exc:
            raise PipelineError(f"patch size {patch}: {exc}") from exc
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise PipelineError(f"patch size {patch}: {exc}") from exc
        runs.append(run)
    final = np.mean([r.image for r in runs], axis=0)
    return PipelineResult(image=final, baseline=baseline, mask=mask, fused=fused, per_patch=runs)


def superres_pipeline(scans, config: SuperResConfig) -> PipelineResult:
    """Fuse the scans, spline-initialize at the configured ratio, then run
    every configured patch size and average the outputs."""
    config.validate()
    fused = fuse_bscans(scans, config.weights)
    init = spline_init(fused, config.ratio)
    return _run_patches(init.image, init.mask, fused, config, baseline=init.image)


def superres_from_mask(observed_image, mask, config: SuperResConfig) -> PipelineResult:
    """Like :func:`superres_pipeline`, for an already full-width image with
    an arbitrary column-constant observation mask (irregular subsampling)."""
    config.validate()
    init = spline_fill(observed_image, mask)
    return _run_patches(init.image, init.mask, np.asarray(observed_image, float), config,
                        baseline=init.image)
