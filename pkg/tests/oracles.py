"""Independent reference implementations used as test oracles.

Everything here is deliberately written without the package's own code
paths: raw struct walking, pure-Python loops, stdlib statistics.
"""

from __future__ import annotations

import statistics
import struct

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# Chunks any valid PNG may need for structure; everything else is metadata.
STRUCTURAL_CHUNKS = {"IHDR", "PLTE", "IDAT", "IEND", "tRNS"}


def png_chunk_types(data: bytes) -> list[str]:
    """Walk raw PNG chunks with struct; no image library involved."""
    if data[:8] != PNG_SIGNATURE:
        raise ValueError("not a PNG byte string")
    chunks = []
    pos = 8
    while pos + 8 <= len(data):
        (length,) = struct.unpack(">I", data[pos:pos + 4])
        chunk_type = data[pos + 4:pos + 8].decode("latin-1")
        chunks.append(chunk_type)
        pos += 12 + length
        if chunk_type == "IEND":
            break
    return chunks


def png_metadata_chunks(data: bytes) -> list[str]:
    return [c for c in png_chunk_types(data) if c not in STRUCTURAL_CHUNKS]


_UNRESERVED = set(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~"
)


def percent_encode(text: str) -> str:
    """RFC 3986 percent-encoding of every non-unreserved byte."""
    out = []
    for byte in text.encode("utf-8"):
        ch = chr(byte)
        out.append(ch if ch in _UNRESERVED else f"%{byte:02X}")
    return "".join(out)


def slow_hamming(a: int, b: int) -> int:
    x = a ^ b
    count = 0
    while x:
        count += x & 1
        x >>= 1
    return count


def slow_combined_distance(desc_a, desc_b, histogram_weight=0.5, hash_weight=0.5) -> float:
    total_a, total_b = desc_a.pixel_total, desc_b.pixel_total
    numerator = sum(
        abs(int(ca) * total_b - int(cb) * total_a)
        for ca, cb in zip(desc_a.bin_counts, desc_b.bin_counts)
    )
    hist = numerator / (total_a * total_b)
    ham = slow_hamming(desc_a.ahash, desc_b.ahash)
    return histogram_weight * hist / 2.0 + hash_weight * ham / 64.0


def brute_force_ranking(entries, query_descriptor) -> list[tuple[str, float]]:
    """Exhaustive scan of every entry; ties broken by asset id."""
    scored = [
        (entry.asset_id, slow_combined_distance(entry.descriptor, query_descriptor))
        for entry in entries
    ]
    return sorted(scored, key=lambda pair: (pair[1], pair[0]))


def point_in_polygon(points, x: float, y: float) -> bool:
    """Classic even-odd ray cast, one edge at a time."""
    inside = False
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        if (y1 <= y) != (y2 <= y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def channel_mean_std(pixels) -> tuple[list[float], list[float]]:
    """Per-RGB-channel mean and population stddev via stdlib statistics."""
    means, stds = [], []
    for ch in range(3):
        values = [float(v) for v in pixels[:, :, ch].ravel()]
        means.append(statistics.fmean(values))
        stds.append(statistics.pstdev(values))
    return means, stds
