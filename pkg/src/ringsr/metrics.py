"""Image quality metrics: PSNR, mean local SSIM, and ROI-based CNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# canonical SSIM stabilizers (relative to the intensity peak)
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


def psnr(reference, test, peak: float = 1.0) -> float:
    """10*log10(peak^2 / MSE); returns +inf for an exact match."""
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {test.shape}")
    if peak <= 0:
        raise ValueError("peak must be positive")
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _box_mean(a: np.ndarray, w: int) -> np.ndarray:
    """Mean over every w*w window (valid positions only), via integral image."""
    s = np.cumsum(np.cumsum(a, axis=0), axis=1)
    s = np.pad(s, ((1, 0), (1, 0)))
    return (s[w:, w:] - s[:-w, w:] - s[w:, :-w] + s[:-w, :-w]) / (w * w)


def ssim(reference, test, peak: float = 1.0, window: int = 8) -> float:
    """Mean local SSIM over all `window`-square sliding positions, with the
    canonical stabilizing constants scaled by `peak`."""
    x = np.asarray(reference, dtype=np.float64)
    y = np.asarray(test, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if min(x.shape) < window:
        raise ValueError(f"image {x.shape} smaller than the {window}x{window} SSIM window")
    c1 = (_SSIM_K1 * peak) ** 2
    c2 = (_SSIM_K2 * peak) ** 2
    mx = _box_mean(x, window)
    my = _box_mean(y, window)
    var_x = _box_mean(x * x, window) - mx * mx
    var_y = _box_mean(y * y, window) - my * my
    cov = _box_mean(x * y, window) - mx * my
    num = (2.0 * mx * my + c1) * (2.0 * cov + c2)
    den = (mx * mx + my * my + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class RoiSpec:
    """Foreground rectangles and one shared background rectangle, each given
    as (row, col, height, width)."""

    foregrounds: tuple[tuple[int, int, int, int], ...]
    background: tuple[int, int, int, int]

    def __post_init__(self):
        object.__setattr__(
            self, "foregrounds", tuple(tuple(int(v) for v in f) for f in self.foregrounds)
        )
        object.__setattr__(self, "background", tuple(int(v) for v in self.background))

    def validate(self, shape) -> None:
        if not self.foregrounds:
            raise ValueError("CNR needs at least one foreground ROI")
        for rect in (*self.foregrounds, self.background):
            r, c, h, w = rect
            if h < 1 or w < 1 or r < 0 or c < 0 or r + h > shape[0] or c + w > shape[1]:
                raise ValueError(f"ROI {rect} does not fit inside image of shape {shape}")


def cnr(image, roi: RoiSpec) -> float:
    """Contrast-to-noise ratio |mu_f - mu_b| / sqrt(0.5*(var_f + var_b)),
    averaged over the foreground ROIs against the shared background.
    Standard deviations use the population (divide-by-N) convention."""
    image = np.asarray(image, dtype=np.float64)
    roi.validate(image.shape)
    br, bc, bh, bw = roi.background
    bg = image[br : br + bh, bc : bc + bw]
    mu_b, var_b = float(bg.mean()), float(bg.var())
    values = []
    for r, c, h, w in roi.foregrounds:
        fg = image[r : r + h, c : c + w]
        denom = math.sqrt(0.5 * (float(fg.var()) + var_b))
        if denom == 0.0:
            raise ValueError("zero CNR denominator: both regions are constant")
        values.append(abs(float(fg.mean()) - mu_b) / denom)
    return float(np.mean(values))
