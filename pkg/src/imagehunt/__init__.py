"""imagehunt: search-edit loop platform.

Server layer for image/keyword hunts over pluggable backends, a
provenance-tracked asset store with metadata stripping, classical style
adaptation with an external-backend wire protocol, and a cut-transform-paste
compositor, all scriptable from one CLI.
"""

from .compositor import Patch, Placement, Session, cut_region, export_query_image
from .config import AppConfig, load_config
from .embedded import Embedded
from .errors import ImageHuntError
from .gateway import (
    CorpusIndex,
    EngineConfig,
    FixtureBackend,
    HuntQuery,
    HuntResult,
    LiveBackend,
    LocalBackend,
    build_engine_request,
    hunt,
    index_corpus,
    parse_result_page,
)
from .licensing import LicenseFilter
from .store import AssetStore, ImageAsset, ProvenanceRecord, format_credit, strip_metadata
from .style import (
    StyleRegistry,
    StyleService,
    apply_existing_style,
    bundled_registry,
    transfer_selected_style,
)

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "AssetStore",
    "CorpusIndex",
    "Embedded",
    "EngineConfig",
    "FixtureBackend",
    "HuntQuery",
    "HuntResult",
    "ImageAsset",
    "ImageHuntError",
    "LicenseFilter",
    "LiveBackend",
    "LocalBackend",
    "Patch",
    "Placement",
    "ProvenanceRecord",
    "Session",
    "StyleRegistry",
    "StyleService",
    "apply_existing_style",
    "build_engine_request",
    "bundled_registry",
    "cut_region",
    "export_query_image",
    "format_credit",
    "hunt",
    "index_corpus",
    "load_config",
    "parse_result_page",
    "strip_metadata",
    "transfer_selected_style",
]
