"""Deterministic image descriptors for the local similarity index.

A descriptor is a 512-bin color histogram (8x8x8 uniform RGB quantization,
fractions summing to 1) plus a 64-bit average hash computed from an 8x8
grayscale downsample: bit i is 1 iff cell i strictly exceeds the mean of
all 64 cells.

Histograms are stored as exact integer bin counts; the L1 distance between
two histograms is computed on a common integer denominator, so rankings are
bit-reproducible regardless of summation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroAreaImageError

HISTOGRAM_BINS = 512
HASH_EDGE = 8
HASH_BITS = HASH_EDGE * HASH_EDGE

# ITU-R 601 luma weights, applied in float before downsampling.
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False)
class ImageDescriptor:
    bin_counts: np.ndarray = field(repr=False)  # 512 int64 counts
    pixel_total: int = 0
    ahash: int = 0

    @property
    def histogram(self) -> np.ndarray:
        """Bin fractions summing to 1 for any non-empty image."""
        return self.bin_counts / self.pixel_total

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageDescriptor):
            return NotImplemented
        return (
            self.ahash == other.ahash
            and self.pixel_total == other.pixel_total
            and np.array_equal(self.bin_counts, other.bin_counts)
        )


def _as_rgb(pixels: np.ndarray) -> np.ndarray:
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise ValueError(f"expected an HxWx3 or HxWx4 array, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ZeroAreaImageError("image has no pixels")
    return arr[:, :, :3].astype(np.uint8, copy=False)


def _block_means(gray: np.ndarray, edge: int = HASH_EDGE) -> np.ndarray:
    """Mean of each cell in an edge x edge partition of the image.

    Cell boundaries are i*size // edge; degenerate cells of tiny images
    are widened to cover at least one pixel.
    """
    h, w = gray.shape
    ys = (np.arange(edge + 1) * h) // edge
    xs = (np.arange(edge + 1) * w) // edge
    out = np.empty((edge, edge), dtype=np.float64)
    for i in range(edge):
        y0 = min(int(ys[i]), h - 1)
        y1 = min(max(int(ys[i + 1]), y0 + 1), h)
        for j in range(edge):
            x0 = min(int(xs[j]), w - 1)
            x1 = min(max(int(xs[j + 1]), x0 + 1), w)
            out[i, j] = gray[y0:y1, x0:x1].mean()
    return out


def compute_descriptor(pixels: np.ndarray) -> ImageDescriptor:
    """Descriptor of a decoded raster (alpha, if present, is ignored)."""
    rgb = _as_rgb(pixels)

    quantized = rgb >> 5  # 8 levels per channel
    bin_index = (
        quantized[:, :, 0].astype(np.int64) * 64
        + quantized[:, :, 1].astype(np.int64) * 8
        + quantized[:, :, 2].astype(np.int64)
    )
    counts = np.bincount(bin_index.ravel(), minlength=HISTOGRAM_BINS).astype(np.int64)
    counts.flags.writeable = False

    gray = rgb.astype(np.float64) @ _LUMA
    cells = _block_means(gray).ravel()
    bits = cells > cells.mean()
    ahash = 0
    for bit in bits:
        ahash = (ahash << 1) | int(bit)

    return ImageDescriptor(
        bin_counts=counts, pixel_total=int(counts.sum()), ahash=ahash
    )


def histogram_l1(a: ImageDescriptor, b: ImageDescriptor) -> float:
    """Exact L1 distance between the two fraction vectors, in [0, 2].

    sum |a_i/na - b_i/nb| = sum |a_i*nb - b_i*na| / (na*nb); the numerator
    is an exact integer, so the result is a single exact float division.
    """
    numerator = int(np.abs(a.bin_counts * b.pixel_total - b.bin_counts * a.pixel_total).sum())
    return numerator / (a.pixel_total * b.pixel_total)


def hash_distance(a: ImageDescriptor, b: ImageDescriptor) -> int:
    """Hamming distance between the two average hashes, in [0, 64]."""
    return bin(a.ahash ^ b.ahash).count("1")


def combined_distance(
    a: ImageDescriptor,
    b: ImageDescriptor,
    histogram_weight: float = 0.5,
    hash_weight: float = 0.5,
) -> float:
    """Weighted sum of both distance terms, each normalized to [0, 1]."""
    return (
        histogram_weight * histogram_l1(a, b) / 2.0
        + hash_weight * hash_distance(a, b) / HASH_BITS
    )
