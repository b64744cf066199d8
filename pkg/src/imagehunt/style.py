"""Style adaptation: built-in moment transfer plus the external POST protocol.

The built-in backend is a classical per-channel RGB moment transfer; it keeps
the whole platform deterministic and desk-testable. Neural backends attach
through the JSON-over-POST wire protocol instead:

    request  {"mode": "selected"|"existing", "content_png_b64": ...,
              "style_png_b64"?: ..., "style_id"?: ..., "strength": number}
    response {"status": "ok", "result_png_b64": ...}
             {"status": "error", "message": ...}
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .errors import ExternalBackendError, UnknownStyleError, ZeroAreaImageError
from .rasters import decode_rgba, encode_png, to_rgba

# Channels flatter than this (8-bit units) are treated as constant: the
# scale term would blow up, so such pixels map straight to the style mean.
DEGENERATE_STDDEV = 1.0


def channel_moments(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel RGB mean and population standard deviation."""
    rgb = to_rgba(pixels)[:, :, :3].astype(np.float64)
    flat = rgb.reshape(-1, 3)
    return flat.mean(axis=0), flat.std(axis=0)


def transfer_selected_style(content: np.ndarray, style: np.ndarray,
                            strength: float = 1.0) -> np.ndarray:
    """Map the content's per-channel moments onto the style's.

    out = (in - content_mean) * (style_std / content_std) + style_mean per
    RGB channel, blended with the original by ``strength``, rounded half-up
    and clamped. Alpha passes through unchanged. Output size equals the
    content's.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError("strength must lie in [0, 1]")
    content = to_rgba(content)
    if content.size == 0:
        raise ZeroAreaImageError("content raster has no pixels")
    mean_c, std_c = channel_moments(content)
    mean_s, std_s = channel_moments(style)

    rgb = content[:, :, :3].astype(np.float64)
    styled = np.empty_like(rgb)
    for ch in range(3):
        if std_c[ch] < DEGENERATE_STDDEV:
            styled[:, :, ch] = mean_s[ch]
        else:
            styled[:, :, ch] = (rgb[:, :, ch] - mean_c[ch]) * (std_s[ch] / std_c[ch]) + mean_s[ch]

    blended = strength * styled + (1.0 - strength) * rgb
    out_rgb = np.clip(np.floor(blended + 0.5), 0, 255).astype(np.uint8)
    out = content.copy()
    out[:, :, :3] = out_rgb
    return out


@dataclass(frozen=True)
class StyleRegistryEntry:
    style_id: str
    style_image: np.ndarray
    description: str = ""


class StyleRegistry:
    """Immutable registry of pre-coded styles, loaded once at startup."""

    def __init__(self, entries: list[StyleRegistryEntry]):
        self._entries = {e.style_id: e for e in entries}
        if len(self._entries) != len(entries):
            raise ValueError("duplicate style_id in registry")

    def __contains__(self, style_id: str) -> bool:
        return style_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, style_id: str) -> StyleRegistryEntry:
        try:
            return self._entries[style_id]
        except KeyError:
            raise UnknownStyleError(f"unknown style_id: {style_id!r}") from None

    def ids(self) -> list[str]:
        return sorted(self._entries)

    @classmethod
    def from_directory(cls, directory) -> "StyleRegistry":
        """Load `<style_id>.png` files; `styles.txt` lines add descriptions."""
        root = Path(directory)
        descriptions = {}
        listing = root / "styles.txt"
        if listing.exists():
            for line in listing.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    style_id, _, text = line.partition(" ")
                    descriptions[style_id] = text.strip()
        entries = [
            StyleRegistryEntry(
                style_id=path.stem,
                style_image=decode_rgba(path.read_bytes()),
                description=descriptions.get(path.stem, ""),
            )
            for path in sorted(root.glob("*.png"))
        ]
        return cls(entries)


def bundled_registry() -> StyleRegistry:
    return StyleRegistry.from_directory(Path(__file__).parent / "data" / "styles")


def apply_existing_style(content: np.ndarray, style_id: str,
                         registry: StyleRegistry) -> np.ndarray:
    """Full-strength transfer from a registry style image."""
    entry = registry.get(style_id)
    return transfer_selected_style(content, entry.style_image, 1.0)


# -- external backend protocol ----------------------------------------------


def build_backend_payload(mode: str, content_png: bytes, style_png: bytes | None = None,
                          style_id: str | None = None, strength: float = 1.0) -> bytes:
    """Canonical JSON request body; byte-stable for identical inputs."""
    if mode not in ("selected", "existing"):
        raise ValueError(f"unknown style mode: {mode!r}")
    body: dict = {
        "mode": mode,
        "content_png_b64": base64.b64encode(content_png).decode("ascii"),
        "strength": strength,
    }
    if mode == "selected":
        if style_png is None:
            raise ValueError("selected mode needs a style image")
        body["style_png_b64"] = base64.b64encode(style_png).decode("ascii")
    else:
        if not style_id:
            raise ValueError("existing mode needs a style_id")
        body["style_id"] = style_id
    return json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8")


def call_external_backend(endpoint: str, payload: bytes, timeout: float = 30.0) -> np.ndarray:
    """POST one style request and decode the PNG result from the response."""
    try:
        response = requests.post(
            endpoint, data=payload,
            headers={"Content-Type": "application/json"}, timeout=timeout,
        )
    except requests.RequestException as exc:
        raise ExternalBackendError(f"style backend unreachable: {exc}") from exc
    if response.status_code != 200:
        raise ExternalBackendError(f"style backend answered status {response.status_code}")
    try:
        body = response.json()
    except ValueError as exc:
        raise ExternalBackendError("style backend returned a non-JSON body") from exc
    if not isinstance(body, dict) or body.get("status") not in ("ok", "error"):
        raise ExternalBackendError("style backend response is malformed")
    if body["status"] == "error":
        raise ExternalBackendError(f"style backend error: {body.get('message', '')}")
    try:
        result_png = base64.b64decode(body["result_png_b64"], validate=True)
    except (KeyError, TypeError, binascii.Error) as exc:
        raise ExternalBackendError("style backend result image is malformed") from exc
    return decode_rgba(result_png)


class StyleService:
    """Routes style requests to the built-in backend or an external endpoint."""

    def __init__(self, registry: StyleRegistry | None = None,
                 external_endpoint: str | None = None):
        self.registry = registry or bundled_registry()
        self.external_endpoint = external_endpoint

    def selected(self, content: np.ndarray, style: np.ndarray,
                 strength: float = 1.0) -> np.ndarray:
        if self.external_endpoint:
            payload = build_backend_payload(
                "selected", encode_png(content), style_png=encode_png(style),
                strength=strength,
            )
            return call_external_backend(self.external_endpoint, payload)
        return transfer_selected_style(content, style, strength)

    def existing(self, content: np.ndarray, style_id: str,
                 strength: float = 1.0) -> np.ndarray:
        if self.external_endpoint:
            payload = build_backend_payload(
                "existing", encode_png(content), style_id=style_id, strength=strength,
            )
            return call_external_backend(self.external_endpoint, payload)
        entry = self.registry.get(style_id)
        return transfer_selected_style(content, entry.style_image, strength)
