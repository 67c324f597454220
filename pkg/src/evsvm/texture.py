"""Co-occurrence texture features for grayscale tiles.

Six features per direction (0, 45, 90, 135 degrees, unit distance),
averaged over the four directions.  For a normalized symmetric GLCM
``p(i, j)`` on ``G`` levels with marginal mean ``mu`` and variance ``var``:

- homogeneity: ``sum p / (1 + |i - j|)``
- contrast:    ``sum (i - j)**2 p / (G - 1)**2``
- entropy:     ``-sum p log p`` (natural log)
- correlation: ``sum (i - mu)(j - mu) p / var`` (0 when ``var == 0``)
- directivity: ``sum_i p(i, i)``
- uniformity:  ``sum p**2``
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .errors import DataError

DIRECTIONS = (0, 45, 90, 135)
# (row, col) step for each direction; rows grow downward
OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}
DEFAULT_LEVELS = 16
DEFAULT_TILE = 32


@dataclass(frozen=True)
class FeatureVector:
    homogeneity: float
    contrast: float
    entropy: float
    correlation: float
    directivity: float
    uniformity: float

    @classmethod
    def names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))


def quantize(image, levels: int = DEFAULT_LEVELS) -> np.ndarray:
    """Linearly bin the image's value range into ``levels`` integer levels."""
    if levels < 2:
        raise ValueError(f"need at least 2 levels, got {levels}")
    img = np.asarray(image, dtype=float)
    if img.size == 0:
        raise ValueError("empty image")
    lo, hi = float(img.min()), float(img.max())
    if hi == lo:
        return np.zeros(img.shape, dtype=int)
    q = np.floor((img - lo) / (hi - lo) * levels).astype(int)
    return np.clip(q, 0, levels - 1)


def _check_tile(tile, levels):
    t = np.asarray(tile)
    if t.ndim != 2 or min(t.shape) < 2:
        raise ValueError(f"tile must be a 2-D array with side >= 2, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        if not np.all(t == np.round(t)):
            raise ValueError("tile must hold integer gray levels; quantize it first")
        t = t.astype(int)
    if t.min() < 0 or t.max() >= levels:
        raise ValueError(f"gray levels must lie in [0, {levels - 1}]")
    return t


def glcm(tile, direction: int = 0, levels: int = DEFAULT_LEVELS) -> np.ndarray:
    """Symmetric, normalized co-occurrence matrix at unit distance."""
    t = _check_tile(tile, levels)
    if direction not in OFFSETS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    dr, dc = OFFSETS[direction]
    rows, cols = t.shape
    r0, r1 = max(0, -dr), rows - max(0, dr)
    c0, c1 = max(0, -dc), cols - max(0, dc)
    a = t[r0:r1, c0:c1].ravel()
    b = t[r0 + dr:r1 + dr, c0 + dc:c1 + dc].ravel()
    if a.size == 0:
        raise ValueError("tile too small for the offset")
    counts = np.bincount(a * levels + b, minlength=levels * levels).reshape(levels, levels)
    counts = counts + counts.T
    return counts / counts.sum()


def glcm_features(p: np.ndarray) -> np.ndarray:
    G = p.shape[0]
    i, j = np.indices(p.shape)
    diff = i - j
    nz = p > 0
    marg = p.sum(axis=1)
    levels = np.arange(G)
    mu = float(marg @ levels)
    var = float(marg @ (levels - mu) ** 2)
    corr = float(np.sum((i - mu) * (j - mu) * p) / var) if var > 1e-15 else 0.0
    return np.array([
        np.sum(p / (1.0 + np.abs(diff))),
        np.sum(diff ** 2 * p) / (G - 1) ** 2,
        -np.sum(p[nz] * np.log(p[nz])),
        corr,
        np.trace(p),
        np.sum(p * p),
    ])


def haralick(tile, levels: int = DEFAULT_LEVELS) -> FeatureVector:
    """Direction-averaged features of a quantized tile."""
    per_dir = [glcm_features(glcm(tile, d, levels)) for d in DIRECTIONS]
    return FeatureVector(*(float(v) for v in np.mean(per_dir, axis=0)))


def tile_and_extract(image, tile_size: int = DEFAULT_TILE,
                     levels: int = DEFAULT_LEVELS) -> List[Tuple[Tuple[int, int], FeatureVector]]:
    """Quantize the image, cut non-overlapping tiles (row-major), extract features.

    Partial tiles at the right and bottom edges are dropped.
    """
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    if tile_size < 2:
        raise ValueError("tile size must be at least 2")
    if img.shape[0] < tile_size or img.shape[1] < tile_size:
        raise ValueError(f"image {img.shape} smaller than tile size {tile_size}")
    q = quantize(img, levels)
    out = []
    for r in range(0, img.shape[0] - tile_size + 1, tile_size):
        for c in range(0, img.shape[1] - tile_size + 1, tile_size):
            out.append(((r, c), haralick(q[r:r + tile_size, c:c + tile_size], levels)))
    return out


def _pgm_tokens(data: bytes, count: int, start: int = 0):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    pos = start
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if pos >= n:
            raise DataError("truncated PGM header")
        end = pos
        while end < n and not data[end:end + 1].isspace() and data[end:end + 1] != b"#":
            end += 1
        tokens.append(data[pos:end])
        pos = end
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) or ASCII (P2) PGM file."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(data, 4)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise DataError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise DataError(f"{path}: bad PGM dimensions or maxval")
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        body = data[pos + 1:]
        need = width * height * dtype.itemsize
        if len(body) < need:
            raise DataError(f"{path}: PGM pixel data truncated ({len(body)} < {need} bytes)")
        return np.frombuffer(body[:need], dtype=dtype).reshape(height, width).astype(int)
    if magic == b"P2":
        values = data[pos:].split()
        if len(values) < width * height:
            raise DataError(f"{path}: PGM has {len(values)} pixels, expected {width * height}")
        try:
            return np.array([int(v) for v in values[:width * height]]).reshape(height, width)
        except ValueError:
            raise DataError(f"{path}: non-integer pixel in PGM") from None
    raise DataError(f"{path}: unsupported PGM magic {magic!r}")


def write_pgm(path, image, maxval: int = 255) -> None:
    img = np.asarray(image, dtype=int)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode()
    dtype = ">u2" if maxval > 255 else "u1"
    Path(path).write_bytes(header + img.astype(dtype).tobytes())
