"""Provenance-tracked asset store.

Every ingested image is decoded, rebuilt from its raw pixels (dropping EXIF,
textual chunks, color profiles and any other metadata), re-encoded as PNG and
stored under a system-timestamp name. Downloads additionally keep a
provenance record for crediting.

On-disk layout: ``<root>/<asset_id>.png`` plus ``<asset_id>.prov``.
"""

from __future__ import annotations

import io
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import NoProvenanceError, UndecodableImageError, UnknownAssetError
from .fetching import fetch_bytes
from .licensing import LicenseFilter
from .rasters import decode_rgba, encode_png

DEFAULT_PUBLIC_BASE = "http://127.0.0.1:8000"


def _parse_time(text: str) -> datetime:
    stamp = datetime.fromisoformat(text.replace("Z", "+00:00"))
    return stamp.astimezone(timezone.utc)


@dataclass(frozen=True)
class ProvenanceRecord:
    """Where a downloaded asset came from and when it was fetched."""

    source_url: str
    access_time: datetime
    license_filter_used: LicenseFilter = LicenseFilter.NOT_FILTERED

    def __post_init__(self):
        if not self.source_url:
            raise ValueError("provenance needs a non-empty source url")
        stamp = self.access_time
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        stamp = stamp.astimezone(timezone.utc).replace(microsecond=0)
        object.__setattr__(self, "access_time", stamp)
        if self.access_time > datetime.now(timezone.utc).replace(microsecond=0):
            raise ValueError("provenance access time lies in the future")

    @property
    def access_time_text(self) -> str:
        return self.access_time.strftime("%Y-%m-%dT%H:%M:%SZ")

    def to_sidecar(self) -> str:
        return (
            f"source_url={self.source_url}\n"
            f"access_time={self.access_time_text}\n"
            f"license_filter={self.license_filter_used.label}\n"
        )

    @classmethod
    def from_sidecar(cls, text: str) -> "ProvenanceRecord":
        fields = {}
        for line in text.splitlines():
            key, _, value = line.partition("=")
            fields[key] = value
        return cls(
            source_url=fields["source_url"],
            access_time=_parse_time(fields["access_time"]),
            license_filter_used=LicenseFilter.from_label(fields["license_filter"]),
        )


@dataclass(frozen=True)
class ImageAsset:
    asset_id: str
    pixels: np.ndarray
    stored_bytes: bytes
    provenance: ProvenanceRecord | None = None

    @property
    def file_name(self) -> str:
        return f"{self.asset_id}.png"


def strip_metadata(encoded_image: bytes) -> bytes:
    """Re-encode an image as a PNG carrying only structural chunks.

    The raster is rebuilt from the decoded pixel buffer, so nothing from the
    container (EXIF, XMP, ICC profiles, textual chunks) can survive. Decoded
    pixel values are preserved exactly; the operation is idempotent.
    """
    try:
        with Image.open(io.BytesIO(encoded_image)) as im:
            im.load()
            rgba = im.convert("RGBA")
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise UndecodableImageError(f"cannot decode image: {exc}") from exc
    clean = Image.frombytes("RGBA", rgba.size, rgba.tobytes())
    buf = io.BytesIO()
    clean.save(buf, format="PNG")
    return buf.getvalue()


class AssetStore:
    """Filesystem-backed store with atomic timestamp naming.

    Ingest may run concurrently: name allocation is serialized and collisions
    within one millisecond get a monotonic counter suffix. Stored bytes are
    immutable, so reads need no locking.
    """

    def __init__(self, root, public_base_url: str = DEFAULT_PUBLIC_BASE):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.public_base_url = public_base_url.rstrip("/")
        self._lock = threading.Lock()
        self._last_millis = 0
        self._last_counter = 0

    def _allocate_name(self) -> str:
        with self._lock:
            millis = time.time_ns() // 1_000_000
            if millis <= self._last_millis:
                millis = self._last_millis
                counter = self._last_counter + 1
            else:
                counter = 0
            name = str(millis) if counter == 0 else f"{millis}-{counter}"
            while (self.root / f"{name}.png").exists():
                counter += 1
                name = f"{millis}-{counter}"
            self._last_millis = millis
            self._last_counter = counter
            return name

    # -- ingest & retrieval ------------------------------------------------

    def ingest(self, encoded_image: bytes, provenance: ProvenanceRecord | None = None) -> ImageAsset:
        """Strip, rename by timestamp, store; returns the stored asset."""
        stored = strip_metadata(encoded_image)
        pixels = decode_rgba(stored)
        asset_id = self._allocate_name()
        (self.root / f"{asset_id}.png").write_bytes(stored)
        if provenance is not None:
            (self.root / f"{asset_id}.prov").write_text(
                provenance.to_sidecar(), encoding="utf-8"
            )
        return ImageAsset(asset_id=asset_id, pixels=pixels, stored_bytes=stored,
                          provenance=provenance)

    def get(self, asset_id: str) -> ImageAsset:
        stored = self.read_bytes(asset_id)
        prov_path = self.root / f"{asset_id}.prov"
        provenance = None
        if prov_path.exists():
            provenance = ProvenanceRecord.from_sidecar(prov_path.read_text(encoding="utf-8"))
        return ImageAsset(asset_id=asset_id, pixels=decode_rgba(stored),
                          stored_bytes=stored, provenance=provenance)

    def read_bytes(self, asset_id: str) -> bytes:
        path = self.root / f"{asset_id}.png"
        if not path.is_file():
            raise UnknownAssetError(f"no stored asset named {asset_id!r}")
        return path.read_bytes()

    def exists(self, asset_id: str) -> bool:
        return (self.root / f"{asset_id}.png").is_file()

    def list_asset_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.png"))

    # -- publishing & provenance -------------------------------------------

    def publish(self, asset: ImageAsset | str) -> str:
        """Public URL serving exactly the stored bytes; idempotent."""
        asset_id = asset if isinstance(asset, str) else asset.asset_id
        if not self.exists(asset_id):
            raise UnknownAssetError(f"no stored asset named {asset_id!r}")
        return f"{self.public_base_url}/public/{asset_id}.png"

    def download_remote(
        self,
        link: str,
        license_filter: LicenseFilter = LicenseFilter.NOT_FILTERED,
        fetcher=fetch_bytes,
    ) -> ImageAsset:
        """Fetch a link and ingest it with a provenance record attached."""
        data = fetcher(link)
        provenance = ProvenanceRecord(
            source_url=link,
            access_time=datetime.now(timezone.utc),
            license_filter_used=license_filter,
        )
        return self.ingest(data, provenance)

    def format_credit(self, asset: ImageAsset | str) -> str:
        if isinstance(asset, str):
            asset = self.get(asset)
        return format_credit(asset)


def format_credit(asset: ImageAsset) -> str:
    """One crediting line: source address, access time, filter used."""
    record = asset.provenance
    if record is None:
        raise NoProvenanceError(f"asset {asset.asset_id} has no provenance record")
    return (
        f"{record.source_url} | accessed {record.access_time_text}"
        f" | filter={record.license_filter_used.label}"
    )
