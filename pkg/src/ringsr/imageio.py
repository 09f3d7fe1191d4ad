"""Grayscale image files (PNG, binary PGM), column subsampling, and the
text tensor format used by the decompose subcommand."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def load_image(path) -> np.ndarray:
    """Read a grayscale image as a 2-D uint8 or uint16 array (the dtype
    carries the source bit depth); color inputs are converted by luma."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        return _read_pgm(path)
    if suffix == ".png":
        img = Image.open(path)
        if img.mode in ("RGB", "RGBA", "P", "LA"):
            img = img.convert("L")
        arr = np.asarray(img)
        if arr.ndim != 2:
            raise ValueError(f"{path}: expected a single-channel image, got shape {arr.shape}")
        if arr.dtype == np.uint8:
            return arr.copy()
        if arr.dtype in (np.uint16, np.int32):
            if arr.min() < 0 or arr.max() > 65535:
                raise ValueError(f"{path}: sample values outside the 16-bit range")
            return arr.astype(np.uint16)
        raise ValueError(f"{path}: unsupported sample format {arr.dtype}")
    raise ValueError(f"unsupported image format: {path.name} (use .png or .pgm)")


def write_image(path, arr) -> None:
    """Write a uint8 or uint16 array as PNG or binary PGM, by extension."""
    path = Path(path)
    arr = np.asarray(arr)
    if arr.ndim != 2 or arr.dtype not in (np.uint8, np.uint16):
        raise ValueError("write_image expects a 2-D uint8 or uint16 array")
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        _write_pgm(path, arr)
    elif suffix == ".png":
        Image.fromarray(arr).save(path)
    else:
        raise ValueError(f"unsupported image format: {path.name} (use .png or .pgm)")


def peak_value(arr) -> int:
    """Intensity peak implied by the array's bit depth."""
    return int(np.iinfo(np.asarray(arr).dtype).max)


def to_unit(arr) -> tuple[np.ndarray, int]:
    """Normalize an integer image to [0, 1]; returns (float image, peak)."""
    peak = peak_value(arr)
    return np.asarray(arr, dtype=np.float64) / peak, peak


def from_unit(x, peak: int) -> np.ndarray:
    """Quantize a [0, 1] float image back to the given bit depth."""
    dtype = np.uint8 if peak <= 255 else np.uint16
    return np.clip(np.rint(np.asarray(x) * peak), 0, peak).astype(dtype)


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < 4:
        if i >= len(data):
            raise ValueError(f"{path}: truncated PGM header")
        ch = data[i : i + 1]
        if ch == b"#":
            i = data.index(b"\n", i) + 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    i += 1  # single whitespace byte after maxval, then raster
    magic, width, height, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: bad maxval {maxval}")
    count = width * height
    if maxval < 256:
        arr = np.frombuffer(data, np.uint8, count, i).reshape(height, width)
        return arr.copy()
    arr = np.frombuffer(data, ">u2", count, i).reshape(height, width)
    return arr.astype(np.uint16)


def _write_pgm(path: Path, arr: np.ndarray) -> None:
    maxval = peak_value(arr)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode()
    body = arr.astype(">u2").tobytes() if maxval > 255 else arr.astype(np.uint8).tobytes()
    path.write_bytes(header + body)


def subsample_columns(x, missing_ratio: float, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Drop columns to simulate a reduced scan rate.

    For a ratio of the form 1 - 1/L (within 0.01) every L-th column is kept,
    starting at column 0; other ratios drop a uniformly random column subset
    of the requested size (which must leave at least 4 columns).  Returns
    the kept-columns matrix and the full-width binary mask."""
    x = np.asarray(x)
    if not 0.0 <= missing_ratio < 1.0:
        raise ValueError("missing_ratio must lie in [0, 1)")
    rows, cols = x.shape
    stride = stride_for_ratio(missing_ratio)
    if stride is not None:
        keep = np.arange(0, cols, stride)
        if keep.size < 2:
            raise ValueError(f"subsampling would leave only {keep.size} columns")
    else:
        n_drop = int(round(missing_ratio * cols))
        rng = np.random.default_rng(seed)
        drop = rng.choice(cols, size=n_drop, replace=False)
        keep = np.setdiff1d(np.arange(cols), drop)
        if keep.size < 4:
            raise ValueError(f"subsampling would leave only {keep.size} columns (minimum 4)")
    mask = np.zeros((rows, cols))
    mask[:, keep] = 1.0
    return x[:, keep].copy(), mask


def stride_for_ratio(missing_ratio: float) -> int | None:
    """The integer L with missing_ratio close to 1 - 1/L, or None."""
    if missing_ratio == 0.0:
        return 1
    L = int(round(1.0 / (1.0 - missing_ratio)))
    if L >= 1 and abs(missing_ratio - (1.0 - 1.0 / L)) <= 0.01:
        return L
    return None


def write_tensor_text(path, arr) -> None:
    """Text tensor format: a `shape:` header line, then whitespace-separated
    values with the first mode varying fastest."""
    arr = np.asarray(arr, dtype=np.float64)
    lines = ["shape: " + " ".join(str(s) for s in arr.shape)]
    flat = arr.reshape(-1, order="F")
    lines.extend(repr(float(v)) for v in flat)
    Path(path).write_text("\n".join(lines) + "\n")


def read_tensor_text(path) -> np.ndarray:
    path = Path(path)
    header, _, body = path.read_text().partition("\n")
    if not header.startswith("shape:"):
        raise ValueError(f"{path}: first line must be 'shape: d1 d2 ... dN'")
    shape = [int(tok) for tok in header[len("shape:") :].split()]
    if not shape or any(s < 1 for s in shape):
        raise ValueError(f"{path}: bad shape {shape}")
    values = np.array([float(v) for v in body.split()], dtype=np.float64)
    count = int(np.prod(shape))
    if values.size != count:
        raise ValueError(f"{path}: expected {count} values, found {values.size}")
    return values.reshape(shape, order="F")
