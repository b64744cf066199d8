"""Fetching of http(s) and file links.

file:// support keeps the embedded, network-free mode working: local corpus
links can be downloaded through the exact same path as remote ones.
"""

from __future__ import annotations

from pathlib import Path
from urllib.parse import urlparse
from urllib.request import url2pathname

import requests

from .errors import FetchFailureError

DEFAULT_TIMEOUT = 15.0


def fetch_bytes(link: str, timeout: float = DEFAULT_TIMEOUT) -> bytes:
    """Fetch the body behind a link, raising FetchFailureError on any failure."""
    parsed = urlparse(link)
    if parsed.scheme == "file":
        path = Path(url2pathname(parsed.path))
        try:
            return path.read_bytes()
        except OSError as exc:
            raise FetchFailureError(f"cannot read {link}: {exc}") from exc
    if parsed.scheme in ("http", "https"):
        try:
            response = requests.get(link, timeout=timeout)
        except requests.RequestException as exc:
            raise FetchFailureError(f"cannot fetch {link}: {exc}") from exc
        if response.status_code != 200:
            raise FetchFailureError(f"fetch of {link} returned status {response.status_code}")
        return response.content
    raise FetchFailureError(f"unsupported link scheme: {link}")


def file_link(path) -> str:
    """Absolute file:// link for a local path."""
    return Path(path).resolve().as_uri()
