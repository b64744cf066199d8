"""Search gateway: turns an image and/or keywords into ranked candidate links."""

from __future__ import annotations

from .engine import EngineConfig, EngineRequest, build_engine_request
from .local import (
    CorpusIndex,
    IndexBuildResult,
    IndexEntry,
    LocalBackend,
    index_corpus,
)
from .parser import DEFAULT_COMPONENT_SELECTOR, parse_result_page
from .query import DEFAULT_MAX_RESULTS, HuntQuery, HuntResult
from .remote import FixtureBackend, LiveBackend, save_fixture

__all__ = [
    "CorpusIndex",
    "DEFAULT_COMPONENT_SELECTOR",
    "DEFAULT_MAX_RESULTS",
    "EngineConfig",
    "EngineRequest",
    "FixtureBackend",
    "HuntQuery",
    "HuntResult",
    "IndexBuildResult",
    "IndexEntry",
    "LiveBackend",
    "LocalBackend",
    "build_engine_request",
    "hunt",
    "index_corpus",
    "parse_result_page",
    "save_fixture",
]


def hunt(query: HuntQuery, backend) -> list[HuntResult]:
    """Run a hunt on a backend and return rank-ordered results.

    Results pass straight through in the backend's own order, truncated to
    ``max_results``; no relevance filtering is applied on top.
    """
    raw = backend.hunt(query)
    results = []
    for rank, item in enumerate(raw[: query.max_results]):
        if isinstance(item, str):
            results.append(HuntResult(link=item, rank=rank, source_backend=backend.name))
        else:
            results.append(
                HuntResult(
                    link=item.entry.link,
                    rank=rank,
                    source_backend=backend.name,
                    distance=item.distance,
                )
            )
    return results
