"""Overlapped patch Hankel embedding of a matrix into a 6th-order tensor.

The forward path has two stages.  `rearrange_overlapped` tiles the (edge
padded) input into a larger matrix in which consecutive patches repeat
their shared overlap rows/columns, so the tiling has no overlap anymore.
`patch_hankelize` then lifts the tiled matrix to order six: along each
image axis a sliding window of `win` consecutive patches is stacked, and
the stacked axis keeps its internal (pixel offset, window offset) copies,
giving the embedded extent stack = patch * win * (patches - win + 1).

The inverse path mirrors this: `dehankelize` replaces every entry of the
tiled matrix by the uniform mean over all its duplicated positions, and
`blend_overlaps` cross-fades duplicated overlap strips back to the input
size with a linear weight ramp, then strips the padding.

Entry map (rows; columns are identical with the second axes): the embedded
tensor value at (p1, p2, t1, d1, t2, d2) is the tiled matrix entry at row
(window(d1) + t1) * patch + p1, where window(d1) = d1 // (patch * win1).
Every operation here is a pure, linear index map; the tests check it
against an explicit duplication-matrix construction at small scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HankelPlan:
    """Precomputed embedding geometry for one (image size, patch, overlap,
    window) combination."""

    rows: int
    cols: int
    patch: int
    overlap: int
    win_rows: int
    win_cols: int
    pad_rows: int
    pad_cols: int
    tiled_rows: int
    tiled_cols: int
    stack_rows: int
    stack_cols: int

    @property
    def step(self) -> int:
        return self.patch - self.overlap

    @property
    def patch_count_rows(self) -> int:
        return self.tiled_rows // self.patch

    @property
    def patch_count_cols(self) -> int:
        return self.tiled_cols // self.patch

    @property
    def window_count_rows(self) -> int:
        return self.patch_count_rows - self.win_rows + 1

    @property
    def window_count_cols(self) -> int:
        return self.patch_count_cols - self.win_cols + 1

    @property
    def embedded_shape(self) -> tuple[int, int, int, int, int, int]:
        return (
            self.patch,
            self.patch,
            self.win_rows,
            self.stack_rows,
            self.win_cols,
            self.stack_cols,
        )


def plan(rows, cols, patch, overlap, win_rows=1, win_cols=1) -> HankelPlan:
    """Derive all embedding extents, padding each axis by the minimal amount
    that makes (extent - patch) divisible by (patch - overlap)."""
    rows, cols, patch, overlap = int(rows), int(cols), int(patch), int(overlap)
    win_rows, win_cols = int(win_rows), int(win_cols)
    if patch < 1:
        raise ValueError("patch size must be positive")
    if patch > min(rows, cols):
        raise ValueError(f"patch {patch} exceeds image extent {min(rows, cols)}")
    if not 0 <= overlap < patch:
        raise ValueError(f"overlap must satisfy 0 <= overlap < patch, got {overlap}")
    if win_rows < 1 or win_cols < 1:
        raise ValueError("window sizes must be at least 1")
    step = patch - overlap
    pads, tiles, stacks = [], [], []
    for extent, win in ((rows, win_rows), (cols, win_cols)):
        pad = (-(extent - patch)) % step
        count = (extent + pad - patch) // step + 1
        windows = count - win + 1
        if windows < 1:
            raise ValueError(
                f"window {win} infeasible: only {count} patches along an axis of extent {extent}"
            )
        pads.append(pad)
        tiles.append(patch * count)
        stacks.append(patch * win * windows)
    return HankelPlan(
        rows=rows,
        cols=cols,
        patch=patch,
        overlap=overlap,
        win_rows=win_rows,
        win_cols=win_cols,
        pad_rows=pads[0],
        pad_cols=pads[1],
        tiled_rows=tiles[0],
        tiled_cols=tiles[1],
        stack_rows=stacks[0],
        stack_cols=stacks[1],
    )


def _tile_map(plan: HankelPlan, axis: int) -> np.ndarray:
    count = plan.patch_count_rows if axis == 0 else plan.patch_count_cols
    starts = plan.step * np.arange(count)
    return (starts[:, None] + np.arange(plan.patch)[None, :]).ravel()


def rearrange_overlapped(x, plan: HankelPlan) -> np.ndarray:
    """Duplicate overlapping patches into a tiled matrix: block (k, l) is the
    input patch whose top-left corner sits at (step*k, step*l).  The input is
    edge padded first, so the last patches are always complete."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (plan.rows, plan.cols):
        raise ValueError(f"input shape {x.shape} does not match plan {(plan.rows, plan.cols)}")
    xp = np.pad(x, ((0, plan.pad_rows), (0, plan.pad_cols)), mode="edge")
    return xp[np.ix_(_tile_map(plan, 0), _tile_map(plan, 1))]


def patch_hankelize(xj, plan: HankelPlan) -> np.ndarray:
    """Lift the tiled matrix to the 6th-order embedded tensor.  Sliding
    windows of consecutive patches are duplicated across the window axes and
    across the per-stack copies, per the entry map in the module docstring.

    Built by gathering the deduplicated values once and broadcasting them
    over the per-stack copies, which is considerably faster than a full
    fancy-index gather at the embedded size."""
    xj = np.asarray(xj, dtype=np.float64)
    if xj.shape != (plan.tiled_rows, plan.tiled_cols):
        raise ValueError(
            f"tiled shape {xj.shape} does not match plan {(plan.tiled_rows, plan.tiled_cols)}"
        )
    p = plan.patch
    t1, t2 = plan.win_rows, plan.win_cols
    w1, w2 = plan.window_count_rows, plan.window_count_cols
    rmap = _compact_maps(plan, 0)
    cmap = _compact_maps(plan, 1)
    compact = xj[rmap[:, None, :, :, None, None], cmap[None, :, None, None, :, :]]
    full = np.broadcast_to(
        compact.reshape(p, p, t1, w1, 1, 1, t2, w2, 1, 1),
        (p, p, t1, w1, t1, p, t2, w2, t2, p),
    )
    return np.ascontiguousarray(full).reshape(plan.embedded_shape)


def dehankelize(t, plan: HankelPlan) -> np.ndarray:
    """Invert the embedding onto the tiled matrix: every entry is the uniform
    mean over all its duplicated positions (per-stack copies first, then the
    anti-diagonal (window offset, window position) pairs)."""
    t = np.asarray(t, dtype=np.float64)
    if t.shape != plan.embedded_shape:
        raise ValueError(f"tensor shape {t.shape} does not match plan {plan.embedded_shape}")
    p = plan.patch
    t1, t2 = plan.win_rows, plan.win_cols
    w1, w2 = plan.window_count_rows, plan.window_count_cols
    k1, k2 = plan.patch_count_rows, plan.patch_count_cols
    # expose the duplicated (window offset, pixel offset) copies inside each
    # stacked axis and sum them out
    s = t.reshape(p, p, t1, w1, t1, p, t2, w2, t2, p).sum(axis=(4, 5, 8, 9))
    # accumulate the window/offset anti-diagonals onto the patch grid
    acc = np.zeros((k1, p, k2, p))
    for a in range(t1):
        for b in range(t2):
            acc[a : a + w1, :, b : b + w2, :] += s[:, :, a, :, b, :].transpose(2, 0, 3, 1)
    diag1 = np.zeros(k1)
    for a in range(t1):
        diag1[a : a + w1] += 1.0
    diag2 = np.zeros(k2)
    for b in range(t2):
        diag2[b : b + w2] += 1.0
    acc /= (p * t1 * diag1)[:, None, None, None]
    acc /= (p * t2 * diag2)[None, None, :, None]
    return acc.reshape(plan.tiled_rows, plan.tiled_cols)


def weight_row(overlap: int) -> np.ndarray:
    """Blend weights across an overlap strip: a linear ramp from 1 down to 0
    (the single-column strip uses an even 1/2 split)."""
    if overlap < 1:
        return np.zeros(0)
    if overlap == 1:
        return np.array([0.5])
    u = np.arange(1, overlap + 1, dtype=np.float64)
    return (overlap - u) / (overlap - 1)


def weight_matrix(n_rows: int, overlap: int) -> np.ndarray:
    """Weight ramp tiled to `n_rows` identical rows."""
    return np.tile(weight_row(overlap), (int(n_rows), 1))


def _blend_axis(y, plan: HankelPlan, axis: int) -> np.ndarray:
    """Collapse the tiled axis back to the padded original axis: direct copy
    for non-overlapped positions, weighted cross-fade over each overlap strip
    between consecutive patches (later strips win where strips collide)."""
    if axis == 1:
        return _blend_axis(y.T, plan, 0).T
    p, o, step = plan.patch, plan.overlap, plan.step
    count = y.shape[0] // p
    out = np.empty((step * (count - 1) + p, y.shape[1]))
    for k in range(count):
        out[step * k : step * k + p] = y[p * k : p * k + p]
    if o > 0:
        w = weight_row(o)[:, None]
        for k in range(1, count):
            left = y[p * k - o : p * k]
            right = y[p * k : p * k + o]
            out[step * k : step * k + o] = left * w + right * (1.0 - w)
    return out


def blend_overlaps(xj, plan: HankelPlan) -> np.ndarray:
    """Collapse the tiled matrix back to the original size, cross-fading the
    duplicated overlap strips and stripping the padding."""
    xj = np.asarray(xj, dtype=np.float64)
    if xj.shape != (plan.tiled_rows, plan.tiled_cols):
        raise ValueError(
            f"tiled shape {xj.shape} does not match plan {(plan.tiled_rows, plan.tiled_cols)}"
        )
    y = _blend_axis(xj, plan, 0)
    y = _blend_axis(y, plan, 1)
    return y[: plan.rows, : plan.cols]


def embed(x, plan: HankelPlan) -> np.ndarray:
    """Full forward path: rearrange overlapping patches, then Hankelize."""
    return patch_hankelize(rearrange_overlapped(x, plan), plan)


def unembed(t, plan: HankelPlan) -> np.ndarray:
    """Full inverse path: de-Hankelize, then blend overlaps and strip padding."""
    return blend_overlaps(dehankelize(t, plan), plan)


def compact_shape(plan: HankelPlan) -> tuple[int, int, int, int, int, int]:
    """Shape of the deduplicated embedding (see :func:`embed_compact`)."""
    return (
        plan.patch,
        plan.patch,
        plan.win_rows,
        plan.window_count_rows,
        plan.win_cols,
        plan.window_count_cols,
    )


def _compact_maps(plan: HankelPlan, axis: int) -> np.ndarray:
    patch = plan.patch
    win = plan.win_rows if axis == 0 else plan.win_cols
    count = plan.window_count_rows if axis == 0 else plan.window_count_cols
    return (np.arange(count)[None, None, :] + np.arange(win)[None, :, None]) * patch + np.arange(
        patch
    )[:, None, None]


def embed_compact(x, plan: HankelPlan) -> np.ndarray:
    """Deduplicated embedding (patch, patch, win, windows, win, windows).

    The full embedded tensor repeats each entry patch*win times along every
    stacked axis, uniformly, so fitting it is equivalent to fitting this
    tensor; the reconstruction loop works here and the full shape stays the
    inspection/debug surface."""
    xj = rearrange_overlapped(x, plan)
    rmap = _compact_maps(plan, 0)
    cmap = _compact_maps(plan, 1)
    return xj[rmap[:, None, :, :, None, None], cmap[None, :, None, None, :, :]]


def unembed_compact(v, plan: HankelPlan) -> np.ndarray:
    """Inverse of :func:`embed_compact`: average the (window offset, window
    position) anti-diagonals, then blend overlaps and strip padding."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != compact_shape(plan):
        raise ValueError(f"tensor shape {v.shape} does not match plan {compact_shape(plan)}")
    p = plan.patch
    t1, t2 = plan.win_rows, plan.win_cols
    w1, w2 = plan.window_count_rows, plan.window_count_cols
    k1, k2 = plan.patch_count_rows, plan.patch_count_cols
    acc = np.zeros((k1, p, k2, p))
    for a in range(t1):
        for b in range(t2):
            acc[a : a + w1, :, b : b + w2, :] += v[:, :, a, :, b, :].transpose(2, 0, 3, 1)
    diag1 = np.zeros(k1)
    for a in range(t1):
        diag1[a : a + w1] += 1.0
    diag2 = np.zeros(k2)
    for b in range(t2):
        diag2[b : b + w2] += 1.0
    acc /= diag1[:, None, None, None]
    acc /= diag2[None, None, :, None]
    return blend_overlaps(acc.reshape(plan.tiled_rows, plan.tiled_cols), plan)
