"""Deterministic local similarity index: a drop-in backend for hunts.

The remote engine's ranking is opaque; this backend gives the search-edit
loop a fully reproducible stand-in. Assets are ranked by a fixed combined
histogram+hash distance, ties broken lexicographically by asset id. Keyword
hunts match keyword tokens against asset identifiers.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..descriptors import (
    ImageDescriptor,
    combined_distance,
    compute_descriptor,
)
from ..errors import BackendUnreachableError, UndecodableImageError
from ..fetching import fetch_bytes, file_link
from ..licensing import LicenseFilter, permits
from ..rasters import decode_rgba
from .query import HuntQuery

logger = logging.getLogger(__name__)

BACKEND_NAME = "local"

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".gif", ".bmp", ".webp"}


@dataclass(frozen=True)
class IndexEntry:
    asset_id: str
    link: str
    descriptor: ImageDescriptor
    license_label: LicenseFilter | None


@dataclass(frozen=True)
class Scored:
    entry: IndexEntry
    distance: float | None  # None for keyword-only hunts


class CorpusIndex:
    """Immutable descriptor index over a corpus; safe to share across hunts."""

    def __init__(self, entries: list[IndexEntry], histogram_weight=0.5, hash_weight=0.5):
        self.entries = sorted(entries, key=lambda e: e.asset_id)
        self.histogram_weight = histogram_weight
        self.hash_weight = hash_weight
        self._by_link = {e.link: e for e in self.entries}
        self._by_id = {e.asset_id: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def lookup_link(self, link: str) -> IndexEntry | None:
        return self._by_link.get(link)

    def lookup_id(self, asset_id: str) -> IndexEntry | None:
        return self._by_id.get(asset_id)

    def distance(self, a: ImageDescriptor, b: ImageDescriptor) -> float:
        return combined_distance(a, b, self.histogram_weight, self.hash_weight)

    def _candidates(self, query: HuntQuery) -> list[tuple[int, IndexEntry]]:
        picked = []
        for i, entry in enumerate(self.entries):
            if not permits(entry.license_label, query.license_filter):
                continue
            if query.keywords and keyword_matches(entry.asset_id, query.keywords) == 0:
                continue
            picked.append((i, entry))
        return picked

    def search(self, query: HuntQuery, descriptor: ImageDescriptor | None) -> list[Scored]:
        """Rank candidate entries for a query.

        With a descriptor: ascending combined distance. Keywords only:
        descending match count. Ties always break by asset id.
        """
        candidates = self._candidates(query)
        if descriptor is not None:
            scored = [Scored(entry, self.distance(entry.descriptor, descriptor))
                      for _, entry in candidates]
            scored.sort(key=lambda s: (s.distance, s.entry.asset_id))
        else:
            ranked = sorted(
                (entry for _, entry in candidates),
                key=lambda e: (-keyword_matches(e.asset_id, query.keywords), e.asset_id),
            )
            scored = [Scored(entry, None) for entry in ranked]
        return scored[: query.max_results]

    def to_json(self) -> str:
        """Canonical serialization; identical corpora serialize identically."""
        payload = {
            "histogram_weight": self.histogram_weight,
            "hash_weight": self.hash_weight,
            "entries": [
                {
                    "asset_id": e.asset_id,
                    "link": e.link,
                    "bin_counts": [int(v) for v in e.descriptor.bin_counts],
                    "pixel_total": e.descriptor.pixel_total,
                    "ahash": e.descriptor.ahash,
                    "license": e.license_label.label if e.license_label else None,
                }
                for e in self.entries
            ],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "CorpusIndex":
        payload = json.loads(text)
        entries = []
        for item in payload["entries"]:
            counts = np.array(item["bin_counts"], dtype=np.int64)
            counts.flags.writeable = False
            entries.append(
                IndexEntry(
                    asset_id=item["asset_id"],
                    link=item["link"],
                    descriptor=ImageDescriptor(
                        bin_counts=counts,
                        pixel_total=item["pixel_total"],
                        ahash=item["ahash"],
                    ),
                    license_label=(
                        LicenseFilter.from_label(item["license"]) if item["license"] else None
                    ),
                )
            )
        return cls(entries, payload["histogram_weight"], payload["hash_weight"])


def keyword_matches(asset_id: str, keywords: tuple[str, ...]) -> int:
    """Number of keyword tokens appearing in the asset identifier."""
    haystack = asset_id.lower()
    return sum(1 for word in keywords if word.lower() in haystack)


@dataclass
class IndexBuildResult:
    index: CorpusIndex
    skipped: int


def load_license_sidecar(path) -> dict[str, LicenseFilter]:
    """Parse the `<asset-id> <license-label>` sidecar file."""
    labels: dict[str, LicenseFilter] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        asset_id, _, label = line.rpartition(" ")
        labels[asset_id] = LicenseFilter.from_label(label)
    return labels


def index_corpus(
    corpus_dir,
    metadata_path=None,
    link_base: str | None = None,
    histogram_weight: float = 0.5,
    hash_weight: float = 0.5,
) -> IndexBuildResult:
    """Index every decodable image in a directory.

    Asset ids are file names; links are ``link_base/<name>`` when a base is
    given and file:// links otherwise. Undecodable files are skipped and
    counted. The `<asset-id> <license-label>` sidecar supplies labels.
    """
    root = Path(corpus_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    labels = load_license_sidecar(metadata_path) if metadata_path else {}

    entries: list[IndexEntry] = []
    skipped = 0
    for path in sorted(root.iterdir()):
        if not path.is_file() or path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        try:
            descriptor = compute_descriptor(decode_rgba(path.read_bytes()))
        except UndecodableImageError:
            logger.warning("skipping undecodable corpus file: %s", path.name)
            skipped += 1
            continue
        link = f"{link_base.rstrip('/')}/{path.name}" if link_base else file_link(path)
        entries.append(
            IndexEntry(
                asset_id=path.name,
                link=link,
                descriptor=descriptor,
                license_label=labels.get(path.name),
            )
        )
    return IndexBuildResult(
        index=CorpusIndex(entries, histogram_weight, hash_weight), skipped=skipped
    )


class LocalBackend:
    """Hunt backend over a CorpusIndex.

    Query images are resolved to pixels through ``resolve_link`` (defaults
    to the shared fetcher, which handles file:// and http(s) links); a query
    link that is itself an indexed asset reuses the stored descriptor.
    """

    name = BACKEND_NAME

    def __init__(self, index: CorpusIndex, resolve_link=fetch_bytes):
        self.index = index
        self.resolve_link = resolve_link

    def _query_descriptor(self, query: HuntQuery) -> ImageDescriptor | None:
        if not query.image_link:
            return None
        known = self.index.lookup_link(query.image_link)
        if known is not None:
            return known.descriptor
        try:
            data = self.resolve_link(query.image_link)
        except Exception as exc:
            raise BackendUnreachableError(f"cannot resolve query image: {exc}") from exc
        return compute_descriptor(decode_rgba(data))

    def hunt(self, query: HuntQuery) -> list[Scored]:
        return self.index.search(query, self._query_descriptor(query))
