"""Seeded synthetic test images: a smooth background plus an exactly rank-4
separable texture, with a noisy degraded copy.

Each texture term is envelope(y) * cosine(x), so the clean image is low rank
both as a matrix and through the patch Hankel embedding; the noisy copy adds
white Gaussian noise before 8-bit quantization.  Used by the acceptance
suite and the benchmark script: the noisy image is the pipeline input and
the clean one is the ground-truth reference."""

from __future__ import annotations

import numpy as np


def synthetic_pair(
    size: int = 96,
    seed: int = 0,
    texture_rank: int = 4,
    noise: float = 0.02,
) -> tuple[np.ndarray, np.ndarray]:
    """(clean, noisy) uint8 pair for one seed."""
    rng = np.random.default_rng(seed)
    y = np.linspace(0.0, 1.0, size)[:, None]
    x = np.linspace(0.0, 1.0, size)[None, :]

    clean = 0.5 + 0.15 * np.cos(
        2.0 * np.pi * (rng.uniform(0.4, 0.9) * x + rng.uniform(0.4, 0.9) * y + rng.uniform())
    )
    for _ in range(texture_rank):
        freq = rng.uniform(2.0, 6.0)
        envelope = np.cos(2.0 * np.pi * rng.uniform(1.0, 3.0) * y + rng.uniform(0.0, 2.0 * np.pi))
        clean += (
            rng.uniform(0.09, 0.13)
            * envelope
            * np.cos(2.0 * np.pi * freq * x + rng.uniform(0.0, 2.0 * np.pi))
        )
    clean = np.clip(clean, 0.02, 0.98)
    noisy = np.clip(clean + noise * rng.standard_normal((size, size)), 0.0, 1.0)

    def quantize(a):
        return np.clip(np.rint(a * 255.0), 0, 255).astype(np.uint8)

    return quantize(clean), quantize(noisy)


def synthetic_image(size: int = 96, seed: int = 0, **kwargs) -> np.ndarray:
    """The noisy member of :func:`synthetic_pair`."""
    return synthetic_pair(size, seed, **kwargs)[1]
