"""GET request construction for the remote search engine.

The engine rejects POST, so the query image travels as a link inside the
query string of a GET request. Engine-side parameter names and the encoding
of the license labels drift over time, so all of them live in configuration
rather than code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import quote

from ..errors import MissingImageLinkError
from ..licensing import LicenseFilter
from .query import HuntQuery

DEFAULT_USER_AGENT = (
    "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) "
    "Chrome/120.0 Safari/537.36"
)


def _default_license_values() -> dict[LicenseFilter, str]:
    # Historical usage-rights codes; override per deployment when they drift.
    return {
        LicenseFilter.REUSE_WITH_MODIFICATION: "sur:fmc",
        LicenseFilter.REUSE: "sur:fc",
        LicenseFilter.NONCOMMERCIAL_REUSE_WITH_MODIFICATION: "sur:fm",
        LicenseFilter.NONCOMMERCIAL_REUSE: "sur:f",
        LicenseFilter.NOT_FILTERED: "",
    }


@dataclass
class EngineConfig:
    image_search_url: str = "https://www.google.com/searchbyimage"
    keyword_search_url: str = "https://www.google.com/search"
    image_link_param: str = "image_url"
    keywords_param: str = "q"
    keyword_joiner: str = " "
    keyword_extra_params: tuple[tuple[str, str], ...] = (("tbm", "isch"),)
    license_param: str = "tbs"
    license_values: dict[LicenseFilter, str] = field(default_factory=_default_license_values)
    user_agent: str = DEFAULT_USER_AGENT
    timeout: float = 15.0


@dataclass(frozen=True)
class EngineRequest:
    """Descriptor of one engine request; the method is always GET."""

    method: str
    url: str
    headers: tuple[tuple[str, str], ...] = ()


def _encode_params(params: list[tuple[str, str]]) -> str:
    return "&".join(f"{name}={quote(value, safe='')}" for name, value in params)


def build_engine_request(
    query: HuntQuery,
    config: EngineConfig | None = None,
    mode: str = "auto",
) -> EngineRequest:
    """Build the GET request for a hunt.

    ``mode`` is "image", "keywords", or "auto" (image whenever the query
    carries an image link). A combined image+keyword hunt is encoded as a
    single image request carrying both parameters.
    """
    config = config or EngineConfig()
    if mode == "auto":
        mode = "image" if query.image_link else "keywords"
    if mode not in ("image", "keywords"):
        raise ValueError(f"unknown request mode: {mode!r}")

    params: list[tuple[str, str]] = []
    if mode == "image":
        if not query.image_link:
            raise MissingImageLinkError("image-mode engine request needs an image link")
        base = config.image_search_url
        params.append((config.image_link_param, query.image_link))
        if query.keywords:
            params.append((config.keywords_param, config.keyword_joiner.join(query.keywords)))
    else:
        base = config.keyword_search_url
        params.extend(config.keyword_extra_params)
        params.append((config.keywords_param, config.keyword_joiner.join(query.keywords)))

    license_value = config.license_values.get(query.license_filter, "")
    if license_value:
        params.append((config.license_param, license_value))

    separator = "&" if "?" in base else "?"
    url = base + separator + _encode_params(params)
    return EngineRequest(method="GET", url=url, headers=(("User-Agent", config.user_agent),))
