"""Hunt request/result types."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EmptyQueryError
from ..licensing import LicenseFilter

DEFAULT_MAX_RESULTS = 20


@dataclass(frozen=True)
class HuntQuery:
    """One search request: an image link, keywords, or both."""

    image_link: str | None = None
    keywords: tuple[str, ...] = ()
    license_filter: LicenseFilter = LicenseFilter.NOT_FILTERED
    max_results: int = DEFAULT_MAX_RESULTS

    def __post_init__(self):
        object.__setattr__(self, "keywords", tuple(self.keywords))
        if not self.image_link and not self.keywords:
            raise EmptyQueryError("a hunt needs an image link, keywords, or both")
        if self.max_results < 1:
            raise ValueError("max_results must be at least 1")


@dataclass(frozen=True)
class HuntResult:
    """One retrieved candidate link."""

    link: str
    rank: int
    source_backend: str
    distance: float | None = None
