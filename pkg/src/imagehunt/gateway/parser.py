"""Tolerant extraction of result links from engine HTML pages.

The engine marks each result with an identifiable component; which marker to
use is pinned per fixture set through ``component_selector``. Supported
selector forms:

    div.hunt-result   tag with a class token
    div#res-          tag whose id starts with a prefix
    .hunt-result      any tag with the class token
    #res-             any tag whose id starts with the prefix

Within a component, the link is the first ``<a href>`` or, failing that, the
first ``<img src>``. Pages never raise: anything unparseable yields [].
"""

from __future__ import annotations

from dataclasses import dataclass
from html.parser import HTMLParser
from urllib.parse import urljoin

DEFAULT_COMPONENT_SELECTOR = "div.hunt-result"

# Elements that never take a closing tag; they must not affect nesting depth.
_VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


@dataclass(frozen=True)
class ComponentSelector:
    tag: str | None
    class_token: str | None
    id_prefix: str | None

    @classmethod
    def parse(cls, selector: str) -> "ComponentSelector":
        selector = selector.strip()
        tag: str | None = None
        class_token = id_prefix = None
        if "." in selector:
            tag, _, class_token = selector.partition(".")
        elif "#" in selector:
            tag, _, id_prefix = selector.partition("#")
        else:
            tag = selector
        tag = tag.lower() or None
        if not tag and not class_token and not id_prefix:
            raise ValueError(f"empty component selector: {selector!r}")
        return cls(tag=tag, class_token=class_token or None, id_prefix=id_prefix or None)

    def matches(self, tag: str, attrs: dict[str, str | None]) -> bool:
        if self.tag and tag != self.tag:
            return False
        if self.class_token is not None:
            classes = (attrs.get("class") or "").split()
            return self.class_token in classes
        if self.id_prefix is not None:
            return (attrs.get("id") or "").startswith(self.id_prefix)
        return True


class _ResultPageParser(HTMLParser):
    def __init__(self, selector: ComponentSelector):
        super().__init__(convert_charrefs=True)
        self.selector = selector
        self.links: list[str] = []
        self._depth = 0          # nesting depth inside the active component
        self._anchor: str | None = None
        self._image: str | None = None

    def _close_component(self):
        link = self._anchor or self._image
        if link:
            self.links.append(link)
        self._depth = 0
        self._anchor = None
        self._image = None

    def handle_starttag(self, tag, attrs):
        attr_map = dict(attrs)
        if self._depth > 0:
            if tag == "a" and self._anchor is None and attr_map.get("href"):
                self._anchor = attr_map["href"]
            elif tag == "img" and self._image is None and attr_map.get("src"):
                self._image = attr_map["src"]
            if tag not in _VOID_ELEMENTS:
                self._depth += 1
        elif self.selector.matches(tag, attr_map) and tag not in _VOID_ELEMENTS:
            self._depth = 1

    def handle_startendtag(self, tag, attrs):
        attr_map = dict(attrs)
        if self._depth > 0:
            if tag == "a" and self._anchor is None and attr_map.get("href"):
                self._anchor = attr_map["href"]
            elif tag == "img" and self._image is None and attr_map.get("src"):
                self._image = attr_map["src"]

    def handle_endtag(self, tag):
        if self._depth > 0 and tag not in _VOID_ELEMENTS:
            self._depth -= 1
            if self._depth == 0:
                self._close_component()

    def close(self):
        super().close()
        if self._depth > 0:  # unclosed component at EOF
            self._close_component()


def parse_result_page(
    html_document: bytes | str,
    component_selector: str = DEFAULT_COMPONENT_SELECTOR,
    base_url: str | None = None,
) -> list[str]:
    """Extract result links in document order, first occurrence per link."""
    if isinstance(html_document, bytes):
        text = html_document.decode("utf-8", errors="replace")
    else:
        text = html_document

    selector = ComponentSelector.parse(component_selector)
    parser = _ResultPageParser(selector)
    try:
        parser.feed(text)
        parser.close()
    except Exception:
        pass  # salvage whatever was collected before the parse broke

    seen: set[str] = set()
    links: list[str] = []
    for link in parser.links:
        if base_url:
            link = urljoin(base_url, link)
        if link not in seen:
            seen.add(link)
            links.append(link)
    return links
