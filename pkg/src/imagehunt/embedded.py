"""In-process wiring of all modules: the embedded runtime.

The HTTP server and the CLI's no-server mode run the same code through this
facade, so hunt/download/style behavior is identical in both. With the local
backend and file:// corpus links, the full search-edit loop runs without any
network stack.
"""

from __future__ import annotations

import numpy as np

from .compositor import Session
from .config import AppConfig
from .fetching import fetch_bytes
from .gateway import (
    CorpusIndex,
    EngineConfig,
    FixtureBackend,
    HuntQuery,
    HuntResult,
    LiveBackend,
    LocalBackend,
    hunt,
    index_corpus,
)
from .licensing import LicenseFilter
from .sessions import SessionManager
from .store import AssetStore, ImageAsset, format_credit
from .style import StyleRegistry, StyleService, bundled_registry


class Embedded:
    """All platform services wired from one configuration."""

    def __init__(self, config: AppConfig | None = None):
        self.config = config or AppConfig()
        self.store = AssetStore(self.config.store_root,
                                public_base_url=self.config.public_base_url)
        self.sessions = SessionManager(persist_root=self.config.session_root)

        registry = (
            StyleRegistry.from_directory(self.config.style_registry_path)
            if self.config.style_registry_path
            else bundled_registry()
        )
        self.styles = StyleService(registry, external_endpoint=self.config.style_backend_url)

        self.index = None
        self.index_skipped = 0
        if self.config.backend == "local":
            if self.config.corpus_path:
                built = index_corpus(self.config.corpus_path, self.config.corpus_metadata)
                self.index, self.index_skipped = built.index, built.skipped
            else:
                self.index = CorpusIndex([])
            self.backend = LocalBackend(self.index, resolve_link=self._resolve_link)
        elif self.config.backend == "remote-fixture":
            self.backend = FixtureBackend(
                self.config.fixture_path, EngineConfig(),
                component_selector=self.config.component_selector,
            )
        else:
            self.backend = LiveBackend(
                EngineConfig(), component_selector=self.config.component_selector,
                allow_live=self.config.allow_live,
            )

    def _resolve_link(self, link: str) -> bytes:
        """Serve our own published links from the store, everything else fetched."""
        prefix = f"{self.store.public_base_url}/public/"
        if link.startswith(prefix) and link.endswith(".png"):
            asset_id = link[len(prefix):-len(".png")]
            return self.store.read_bytes(asset_id)
        return fetch_bytes(link)

    # -- hunts -----------------------------------------------------------------

    def hunt_query(self, query: HuntQuery) -> list[HuntResult]:
        return hunt(query, self.backend)

    def hunt_image_bytes(
        self,
        encoded_image: bytes,
        keywords: tuple[str, ...] = (),
        license_filter: LicenseFilter = LicenseFilter.NOT_FILTERED,
        max_results: int | None = None,
    ) -> list[HuntResult]:
        """Ingest a query image, publish it, and hunt with its public link."""
        asset = self.store.ingest(encoded_image)
        link = self.store.publish(asset)
        return self.hunt_query(HuntQuery(
            image_link=link,
            keywords=keywords,
            license_filter=license_filter,
            max_results=max_results or self.config.max_results,
        ))

    def hunt_keywords(
        self,
        keywords: tuple[str, ...],
        license_filter: LicenseFilter = LicenseFilter.NOT_FILTERED,
        max_results: int | None = None,
    ) -> list[HuntResult]:
        return self.hunt_query(HuntQuery(
            keywords=keywords,
            license_filter=license_filter,
            max_results=max_results or self.config.max_results,
        ))

    # -- downloads & style -------------------------------------------------------

    def download(self, link: str,
                 license_filter: LicenseFilter = LicenseFilter.NOT_FILTERED) -> tuple[ImageAsset, str]:
        asset = self.store.download_remote(link, license_filter,
                                           fetcher=self._resolve_link)
        return asset, format_credit(asset)

    def style_selected(self, content: np.ndarray, style: np.ndarray,
                       strength: float = 1.0) -> np.ndarray:
        return self.styles.selected(content, style, strength)

    def style_existing(self, content: np.ndarray, style_id: str,
                       strength: float = 1.0) -> np.ndarray:
        return self.styles.existing(content, style_id, strength)

    # -- sessions ----------------------------------------------------------------

    def new_session(self, width: int, height: int, session_id: str | None = None) -> Session:
        return self.sessions.create(width, height, session_id)

    def export_session(self, session_id: str) -> tuple[str, str]:
        """Flatten, store and publish a session; returns (asset_id, url)."""
        asset = self.store.ingest(self.sessions.flatten(session_id))
        return asset.asset_id, self.store.publish(asset)
