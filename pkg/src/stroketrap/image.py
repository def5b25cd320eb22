"""Image ingestion, binarization, morphological cleanup, and foreground
coordinate extraction.

Conventions used everywhere in the package:

* coordinates are ``(row, col)``, 0-based, row axis pointing down;
* foreground (ink) pixels carry value 1, background 0;
* a pixel ``(r, c)`` occupies the unit square ``[r, r+1) x [c, c+1)`` and its
  geometric center is ``(r + 0.5, c + 0.5)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError

# 3x3 cross (4-connected) structuring element.
CROSS_3X3 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def _validate_raster(pixels: np.ndarray, max_value: int) -> np.ndarray:
    arr = np.asarray(pixels)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError("image must be a non-empty 2-D raster")
    if arr.min() < 0 or arr.max() > max_value:
        raise InvalidInputError(f"pixel values must lie in [0, {max_value}]")
    return np.ascontiguousarray(arr.astype(np.uint8))


@dataclass(frozen=True)
class GrayImage:
    """Rectangular 8-bit grayscale raster."""

    pixels: np.ndarray  # (height, width) uint8
    source: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "pixels", _validate_raster(self.pixels, 255))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class BinaryImage:
    """Rectangular raster of {0, 1} values; 1 = foreground ink."""

    pixels: np.ndarray  # (height, width) uint8 in {0, 1}
    source: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "pixels", _validate_raster(self.pixels, 1))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def foreground_count(self) -> int:
        return int(self.pixels.sum())


@dataclass(frozen=True)
class BinarizeConfig:
    """Threshold selection: ``method`` is "otsu" or "fixed"; ``dark_ink``
    selects whether ink is the dark side of the threshold."""

    method: str = "otsu"
    threshold: int = 128
    dark_ink: bool = True

    def __post_init__(self):
        if self.method not in ("otsu", "fixed"):
            raise InvalidInputError(f"unknown threshold method {self.method!r}")
        if not 0 <= self.threshold <= 255:
            raise InvalidInputError("fixed threshold must lie in [0, 255]")


@dataclass(frozen=True)
class MorphConfig:
    """Sequence of morphological ops ("open"/"close"), applied ``repeats``
    times with a 3x3 cross element."""

    ops: tuple = ()
    repeats: int = 1

    def __post_init__(self):
        for op in self.ops:
            if op not in ("open", "close"):
                raise InvalidInputError(f"unknown morphological op {op!r}")
        if self.repeats < 0:
            raise InvalidInputError("repeats must be >= 0")


def otsu_threshold(pixels: np.ndarray) -> int:
    """Otsu's threshold: maximizes between-class variance of the split
    ``<= t`` vs ``> t``. Ties resolve to the smallest t."""
    hist = np.bincount(pixels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    w0 = np.cumsum(hist)
    mu = np.cumsum(hist * np.arange(256))
    mu_total = mu[-1]
    w1 = total - w0
    with np.errstate(divide="ignore", invalid="ignore"):
        mean0 = mu / w0
        mean1 = (mu_total - mu) / w1
        between = w0 * w1 * (mean0 - mean1) ** 2
    between[~np.isfinite(between)] = -1.0
    return int(np.argmax(between[:-1]))


def binarize(img: GrayImage, cfg: BinarizeConfig = BinarizeConfig()) -> BinaryImage:
    """Threshold a grayscale image into ink (1) and background (0).

    A constant image under Otsu has no contrast and yields no ink.
    """
    px = img.pixels
    if cfg.method == "otsu":
        if px.min() == px.max():
            return BinaryImage(np.zeros_like(px), source=img.source)
        t = otsu_threshold(px)
    else:
        t = cfg.threshold
    if cfg.dark_ink:
        fg = px <= t
    else:
        fg = px > t
    return BinaryImage(fg.astype(np.uint8), source=img.source)


def morph_clean(img: BinaryImage, cfg: MorphConfig = MorphConfig()) -> BinaryImage:
    """Apply the configured opening/closing sequence.

    Computed on a zero-padded copy so closing does not erode at the image
    border; the result is cropped back to the original frame.
    """
    if not cfg.ops or cfg.repeats == 0:
        return BinaryImage(img.pixels.copy(), source=img.source)
    pad = 2 * len(cfg.ops) * cfg.repeats
    work = np.pad(img.pixels.astype(bool), pad)
    for _ in range(cfg.repeats):
        for op in cfg.ops:
            if op == "open":
                work = ndimage.binary_erosion(work, CROSS_3X3)
                work = ndimage.binary_dilation(work, CROSS_3X3)
            else:  # close
                work = ndimage.binary_dilation(work, CROSS_3X3)
                work = ndimage.binary_erosion(work, CROSS_3X3)
    cropped = work[pad:-pad, pad:-pad]
    return BinaryImage(cropped.astype(np.uint8), source=img.source)


def foreground_coords(img: BinaryImage) -> np.ndarray:
    """All (row, col) coordinates of foreground pixels, row-major order.

    Returns an (N, 2) int64 array; N may be zero.
    """
    return np.argwhere(img.pixels).astype(np.int64)


# ---------------------------------------------------------------------------
# File I/O: PGM (P2/P5) natively, PNG via Pillow.

def _pgm_tokens(data: bytes):
    i = 0
    n = len(data)
    while i < n:
        ch = data[i : i + 1]
        if ch.isspace():
            i += 1
        elif ch == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < n and not data[j : j + 1].isspace():
                j += 1
            yield data[i:j], j
            i = j


def read_pgm(path: str) -> GrayImage:
    """Read a P2 (ASCII) or P5 (raw) PGM file with maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        if magic not in (b"P2", b"P5"):
            raise InvalidInputError(f"{path}: not a PGM file (magic {magic!r})")
        width, _ = next(tokens)
        height, _ = next(tokens)
        maxval, end = next(tokens)
        width, height, maxval = int(width), int(height), int(maxval)
    except (StopIteration, ValueError) as exc:
        raise InvalidInputError(f"{path}: malformed PGM header") from exc
    if width < 1 or height < 1 or not 0 < maxval <= 255:
        raise InvalidInputError(f"{path}: unsupported PGM geometry/maxval")
    if magic == b"P5":
        start = end + 1  # single whitespace byte after maxval
        raw = data[start : start + width * height]
        if len(raw) != width * height:
            raise InvalidInputError(f"{path}: truncated PGM pixel data")
        px = np.frombuffer(raw, dtype=np.uint8)
    else:
        values = []
        for tok, _ in tokens:
            values.append(int(tok))
        if len(values) != width * height:
            raise InvalidInputError(f"{path}: wrong P2 pixel count")
        px = np.array(values, dtype=np.int64)
        if px.min() < 0 or px.max() > maxval:
            raise InvalidInputError(f"{path}: P2 sample out of range")
    return GrayImage(px.reshape(height, width).astype(np.uint8), source=str(path))


def write_pgm(img: GrayImage | BinaryImage, path: str) -> None:
    """Write a raw (P5) PGM, maxval 255. Binary images render ink as black
    (0) on white (255)."""
    px = to_gray(img).pixels
    header = f"P5\n{px.shape[1]} {px.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(px.tobytes())


def to_gray(img: GrayImage | BinaryImage) -> GrayImage:
    """Grayscale view of an image; binary ink maps to 0 on a 255 background."""
    if isinstance(img, GrayImage):
        return img
    return GrayImage(np.where(img.pixels > 0, 0, 255).astype(np.uint8),
                     source=img.source)


def read_image(path: str) -> GrayImage:
    """Read a PGM or PNG grayscale file."""
    p = str(path)
    with open(p, "rb") as fh:
        magic = fh.read(2)
    if magic in (b"P2", b"P5"):
        return read_pgm(p)
    from PIL import Image

    with Image.open(p) as im:
        arr = np.asarray(im.convert("L"), dtype=np.uint8)
    return GrayImage(arr, source=p)


def write_image(img: GrayImage | BinaryImage, path: str) -> None:
    """Write PGM (default) or PNG, chosen by file extension."""
    p = str(path)
    if p.lower().endswith(".png"):
        from PIL import Image

        Image.fromarray(to_gray(img).pixels, mode="L").save(p)
    else:
        write_pgm(img, p)
