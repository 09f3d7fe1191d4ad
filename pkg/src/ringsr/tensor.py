"""Dense tensor primitives shared by every other module.

Tensors are plain float64 numpy arrays.  Whenever several modes are merged
into one flat axis (both unfolding flavors, subchain matricizations, the
text tensor format) the first listed mode varies fastest.  Using one rule
everywhere is what makes every fold/unfold pair an exact round trip.
"""

from __future__ import annotations

import numpy as np


def unfold_mode(t, mode):
    """Unfold so that rows run over `mode` and columns merge the remaining
    modes in cyclic order mode+1, ..., N-1, 0, ..., mode-1.

    For a matrix, mode 0 returns the matrix itself and mode 1 its transpose.
    """
    t = np.asarray(t)
    n = t.ndim
    if not 0 <= mode < n:
        raise ValueError(f"mode {mode} out of range for an order-{n} tensor")
    order = [(mode + j) % n for j in range(n)]
    return np.transpose(t, order).reshape(t.shape[mode], -1, order="F")


def fold_mode(mat, shape, mode):
    """Inverse of :func:`unfold_mode` for a tensor of the given shape."""
    shape = tuple(shape)
    n = len(shape)
    if not 0 <= mode < n:
        raise ValueError(f"mode {mode} out of range for an order-{n} tensor")
    order = [(mode + j) % n for j in range(n)]
    t = np.asarray(mat).reshape([shape[ax] for ax in order], order="F")
    return np.transpose(t, np.argsort(order))


def unfold_canonical(t, split):
    """Unfold with modes 0..split-1 merged into rows and the rest into
    columns; `split` runs from 1 to N-1.
    """
    t = np.asarray(t)
    n = t.ndim
    if not 1 <= split <= n - 1:
        raise ValueError(f"split {split} out of range for an order-{n} tensor")
    lead = int(np.prod(t.shape[:split]))
    return t.reshape(lead, -1, order="F")


def fold_canonical(mat, shape, split):
    """Inverse of :func:`unfold_canonical` for a tensor of the given shape."""
    shape = tuple(shape)
    if not 1 <= split <= len(shape) - 1:
        raise ValueError(f"split {split} out of range for an order-{len(shape)} tensor")
    return np.asarray(mat).reshape(shape, order="F")


def hadamard(a, b):
    """Elementwise product; shapes must match exactly (no broadcasting)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def frobenius_norm(t):
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(t, dtype=np.float64).ravel()))
