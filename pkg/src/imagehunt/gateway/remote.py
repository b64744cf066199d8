"""Remote-engine backends: recorded-fixture replay and (opt-in) live access.

A fixture is three sibling files sharing a stem inside one directory:

    <name>.request.json   {"method": "GET", "url": "..."}
    <name>.page.html      the engine's HTML response
    <name>.links.txt      expected links, one URL per line, UTF-8, LF

Replay matches the built engine request against the recorded descriptors,
so fixture tests exercise request construction and page parsing together.
Live access is disabled unless explicitly enabled; tests never use it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import requests

from ..errors import BackendUnreachableError
from .engine import EngineConfig, EngineRequest, build_engine_request
from .parser import DEFAULT_COMPONENT_SELECTOR, parse_result_page
from .query import HuntQuery


@dataclass(frozen=True)
class Fixture:
    name: str
    request: EngineRequest
    page: bytes
    expected_links: tuple[str, ...]


def load_fixture(directory, name: str) -> Fixture:
    root = Path(directory)
    descriptor = json.loads((root / f"{name}.request.json").read_text(encoding="utf-8"))
    page = (root / f"{name}.page.html").read_bytes()
    links_file = root / f"{name}.links.txt"
    expected = tuple(
        line for line in links_file.read_text(encoding="utf-8").split("\n") if line
    )
    return Fixture(
        name=name,
        request=EngineRequest(method=descriptor["method"], url=descriptor["url"]),
        page=page,
        expected_links=expected,
    )


def load_fixture_set(directory) -> list[Fixture]:
    root = Path(directory)
    names = sorted(p.name[: -len(".request.json")] for p in root.glob("*.request.json"))
    return [load_fixture(root, name) for name in names]


def save_fixture(directory, name: str, request: EngineRequest, page: bytes,
                 expected_links: list[str]) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    descriptor = {"method": request.method, "url": request.url}
    (root / f"{name}.request.json").write_text(
        json.dumps(descriptor, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (root / f"{name}.page.html").write_bytes(page)
    (root / f"{name}.links.txt").write_text(
        "".join(link + "\n" for link in expected_links), encoding="utf-8"
    )


class FixtureBackend:
    """Replays recorded engine responses for matching requests."""

    name = "remote-fixture"

    def __init__(self, fixture_dir, engine_config: EngineConfig | None = None,
                 component_selector: str = DEFAULT_COMPONENT_SELECTOR):
        self.engine_config = engine_config or EngineConfig()
        self.component_selector = component_selector
        self._by_url = {}
        for fixture in load_fixture_set(fixture_dir):
            self._by_url[(fixture.request.method, fixture.request.url)] = fixture

    def hunt(self, query: HuntQuery) -> list[str]:
        request = build_engine_request(query, self.engine_config)
        fixture = self._by_url.get((request.method, request.url))
        if fixture is None:
            raise BackendUnreachableError(f"no recorded fixture for {request.url}")
        links = parse_result_page(
            fixture.page, self.component_selector, base_url=request.url
        )
        return links[: query.max_results]


class LiveBackend:
    """Talks to the real engine over plain HTTP GET.

    Access stays off by default: scraping is environment-dependent and must
    never run in CI. Enable deliberately via ``allow_live=True``.
    """

    name = "remote-live"

    def __init__(self, engine_config: EngineConfig | None = None,
                 component_selector: str = DEFAULT_COMPONENT_SELECTOR,
                 allow_live: bool = False):
        self.engine_config = engine_config or EngineConfig()
        self.component_selector = component_selector
        self.allow_live = allow_live

    def hunt(self, query: HuntQuery) -> list[str]:
        if not self.allow_live:
            raise BackendUnreachableError(
                "live engine access is disabled; enable allow_live to use it"
            )
        request = build_engine_request(query, self.engine_config)
        try:
            response = requests.get(
                request.url,
                headers=dict(request.headers),
                timeout=self.engine_config.timeout,
            )
        except requests.RequestException as exc:
            raise BackendUnreachableError(f"engine request failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendUnreachableError(
                f"engine answered with status {response.status_code}"
            )
        links = parse_result_page(
            response.content, self.component_selector, base_url=str(response.url)
        )
        return links[: query.max_results]
