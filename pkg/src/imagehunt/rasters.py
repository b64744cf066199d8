"""Decode/encode helpers. Rasters are HxWx4 uint8 RGBA numpy arrays."""

from __future__ import annotations

import io

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import UndecodableImageError, ZeroAreaImageError


def decode_rgba(data: bytes) -> np.ndarray:
    """Decode PNG/JPEG (or anything Pillow reads) to an RGBA raster."""
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            rgba = im.convert("RGBA")
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise UndecodableImageError(f"cannot decode image: {exc}") from exc
    arr = np.asarray(rgba, dtype=np.uint8)
    if arr.size == 0:
        raise ZeroAreaImageError("decoded image has no pixels")
    return arr


def to_rgba(pixels: np.ndarray) -> np.ndarray:
    """Coerce an HxWx3 or HxWx4 uint8 array to RGBA (alpha 255 if absent)."""
    arr = np.asarray(pixels, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise ValueError(f"expected an HxWx3 or HxWx4 array, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ZeroAreaImageError("raster has no pixels")
    if arr.shape[2] == 3:
        alpha = np.full(arr.shape[:2] + (1,), 255, dtype=np.uint8)
        arr = np.concatenate([arr, alpha], axis=2)
    return arr


def encode_png(pixels: np.ndarray) -> bytes:
    """Encode an RGBA raster as PNG carrying only structural chunks."""
    arr = to_rgba(pixels)
    im = Image.frombytes("RGBA", (arr.shape[1], arr.shape[0]), arr.tobytes())
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    return buf.getvalue()


def load_rgba(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_rgba(fh.read())


def save_png(pixels: np.ndarray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(pixels))
