"""Cut-transform-paste vocabulary over an ordered layer stack.

Mirrors, 90-degree rotations and integer translations are exact pixel
permutations, so involution and cycle identities hold bit-exactly; arbitrary
rotations and scales resample bilinearly. Flattening composites bottom-to-top
with straight (non-premultiplied) alpha source-over and rounds half-up once
at the end, which makes repeated flattening a projection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import RegionError, UnknownLayerError
from .rasters import encode_png, to_rgba


@dataclass(frozen=True)
class Placement:
    """Affine placement of a patch: scale, mirror, rotate, then translate."""

    dx: int = 0
    dy: int = 0
    rotate: float = 0.0  # degrees counter-clockwise
    scale_x: float = 1.0
    scale_y: float = 1.0
    mirror_h: bool = False
    mirror_v: bool = False

    def __post_init__(self):
        if self.scale_x <= 0 or self.scale_y <= 0:
            raise ValueError("scale factors must be positive")

    def to_args(self) -> dict:
        return {
            "dx": self.dx, "dy": self.dy, "rotate": self.rotate,
            "scale_x": self.scale_x, "scale_y": self.scale_y,
            "mirror_h": self.mirror_h, "mirror_v": self.mirror_v,
        }

    @classmethod
    def from_args(cls, args: dict) -> "Placement":
        return cls(**{k: args[k] for k in cls().to_args() if k in args})


@dataclass(frozen=True)
class Patch:
    """An RGBA cutout; alpha marks the cut region."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = to_rgba(self.pixels)
        if not (arr[:, :, 3] > 0).any():
            raise ValueError("patch must contain at least one visible pixel")
        object.__setattr__(self, "pixels", arr)


@dataclass
class Layer:
    layer_id: str
    pixels: np.ndarray  # untouched patch pixels; placement applies at flatten
    placement: Placement = field(default_factory=Placement)
    opacity: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.opacity <= 1.0:
            raise ValueError("opacity must lie in [0, 1]")


# -- exact pixel permutations -------------------------------------------------


def mirror_pixels(pixels: np.ndarray, horizontal: bool = True) -> np.ndarray:
    axis = 1 if horizontal else 0
    return np.flip(pixels, axis=axis).copy()


def rotate_quarter(pixels: np.ndarray, quarter_turns: int) -> np.ndarray:
    """Rotate by multiples of 90 degrees counter-clockwise; exact."""
    return np.rot90(pixels, k=quarter_turns % 4, axes=(0, 1)).copy()


def transform_patch(pixels: np.ndarray, placement: Placement) -> np.ndarray:
    """Scale, mirror, then rotate a patch (translation happens at blit time)."""
    arr = to_rgba(pixels)

    if placement.scale_x != 1.0 or placement.scale_y != 1.0:
        h, w = arr.shape[:2]
        new_w = max(1, round(w * placement.scale_x))
        new_h = max(1, round(h * placement.scale_y))
        im = Image.frombytes("RGBA", (w, h), arr.tobytes())
        arr = np.asarray(im.resize((new_w, new_h), Image.BILINEAR), dtype=np.uint8)

    if placement.mirror_h:
        arr = mirror_pixels(arr, horizontal=True)
    if placement.mirror_v:
        arr = mirror_pixels(arr, horizontal=False)

    angle = placement.rotate % 360.0
    if angle:
        if angle % 90.0 == 0.0:
            arr = rotate_quarter(arr, int(angle // 90))
        else:
            h, w = arr.shape[:2]
            im = Image.frombytes("RGBA", (w, h), arr.tobytes())
            rotated = im.rotate(angle, expand=True, resample=Image.BILINEAR,
                                fillcolor=(0, 0, 0, 0))
            arr = np.asarray(rotated, dtype=np.uint8)
    return arr


# -- regions ------------------------------------------------------------------


def _polygon_mask(points: np.ndarray, x0: int, y0: int, w: int, h: int) -> np.ndarray:
    """Even-odd pixel-center test via the crossing-number rule."""
    xs = x0 + np.arange(w) + 0.5
    ys = y0 + np.arange(h) + 0.5
    grid_x, grid_y = np.meshgrid(xs, ys)
    inside = np.zeros((h, w), dtype=bool)
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        if y1 == y2:
            continue
        crosses = (y1 <= grid_y) != (y2 <= grid_y)
        x_at = x1 + (grid_y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (grid_x < x_at)
    return inside


def _is_rect(region) -> bool:
    return (
        len(region) == 4
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in region)
    )


def cut_region(asset: np.ndarray, region) -> Patch:
    """Cut a rectangle `(x, y, w, h)` or polygon `[(x, y), ...]` from a raster.

    The patch is sized to the region's bounding box clipped to the asset;
    pixels inside the region keep their source RGB with alpha 255, the rest
    are fully transparent.
    """
    source = to_rgba(asset)
    height, width = source.shape[:2]

    if _is_rect(region):
        x, y, w, h = (int(round(v)) for v in region)
        if w <= 0 or h <= 0:
            raise RegionError("rectangle region has zero area")
        x0, y0 = max(x, 0), max(y, 0)
        x1, y1 = min(x + w, width), min(y + h, height)
        if x0 >= x1 or y0 >= y1:
            raise RegionError("rectangle region lies outside the image")
        mask = np.ones((y1 - y0, x1 - x0), dtype=bool)
    else:
        points = np.asarray(region, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 3:
            raise RegionError("polygon region needs at least three (x, y) points")
        x0 = max(int(np.floor(points[:, 0].min())), 0)
        y0 = max(int(np.floor(points[:, 1].min())), 0)
        x1 = min(int(np.ceil(points[:, 0].max())), width)
        y1 = min(int(np.ceil(points[:, 1].max())), height)
        if x0 >= x1 or y0 >= y1:
            raise RegionError("polygon region lies outside the image")
        mask = _polygon_mask(points, x0, y0, x1 - x0, y1 - y0)
        if not mask.any():
            raise RegionError("polygon region covers no pixel centers")

    patch = np.zeros((y1 - y0, x1 - x0, 4), dtype=np.uint8)
    patch[mask, :3] = source[y0:y1, x0:x1, :3][mask]
    patch[mask, 3] = 255
    return Patch(pixels=patch)


# -- sessions -----------------------------------------------------------------


@dataclass
class Session:
    """The active document: an ordered bottom-to-top layer stack."""

    session_id: str
    width: int
    height: int
    layers: list[Layer] = field(default_factory=list)
    _counter: itertools.count = field(default_factory=lambda: itertools.count(1), repr=False)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("canvas size must be positive in both dimensions")

    def _new_layer_id(self) -> str:
        return f"layer-{next(self._counter)}"

    def _find(self, layer_id: str) -> int:
        for i, layer in enumerate(self.layers):
            if layer.layer_id == layer_id:
                return i
        raise UnknownLayerError(f"session {self.session_id} has no layer {layer_id!r}")

    def paste(self, patch: Patch, placement: Placement | None = None,
              opacity: float = 1.0) -> str:
        """Insert the patch as the new topmost layer; returns its id."""
        layer = Layer(
            layer_id=self._new_layer_id(),
            pixels=patch.pixels,
            placement=placement or Placement(),
            opacity=opacity,
        )
        self.layers.append(layer)
        return layer.layer_id

    def set_opacity(self, layer_id: str, alpha: float) -> None:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("opacity must lie in [0, 1]")
        self.layers[self._find(layer_id)].opacity = alpha

    def remove_layer(self, layer_id: str) -> None:
        del self.layers[self._find(layer_id)]

    def reorder_layer(self, layer_id: str, new_index: int) -> None:
        i = self._find(layer_id)
        layer = self.layers.pop(i)
        new_index = max(0, min(new_index, len(self.layers)))
        self.layers.insert(new_index, layer)

    def set_background(self, raster: np.ndarray) -> str:
        """Replace the bottom layer with a canvas-sized opaque raster."""
        arr = to_rgba(raster)
        if arr.shape[:2] != (self.height, self.width):
            im = Image.frombytes("RGBA", (arr.shape[1], arr.shape[0]), arr.tobytes())
            arr = np.asarray(im.resize((self.width, self.height), Image.BILINEAR),
                             dtype=np.uint8)
        arr = arr.copy()
        arr[:, :, 3] = 255
        layer = Layer(layer_id=self._new_layer_id(), pixels=arr)
        if self.layers:
            self.layers[0] = layer
        else:
            self.layers.append(layer)
        return layer.layer_id

    def replace_all(self, raster: np.ndarray) -> str:
        """Collapse the stack to a single full-canvas layer (restyle result)."""
        self.layers.clear()
        return self.set_background(raster)

    def flatten_raster(self) -> np.ndarray:
        """Composite the stack to one RGBA raster.

        Straight-alpha source-over, accumulated in float and rounded half-up
        once: premult = Ct*at + premult*(1-at), a = at + a*(1-at), with
        at = layer opacity * pixel alpha / 255.
        """
        premult = np.zeros((self.height, self.width, 3), dtype=np.float64)
        alpha = np.zeros((self.height, self.width), dtype=np.float64)

        for layer in self.layers:
            if layer.opacity == 0.0:
                continue
            rendered = transform_patch(layer.pixels, layer.placement)
            rh, rw = rendered.shape[:2]
            dx, dy = int(layer.placement.dx), int(layer.placement.dy)
            x0, y0 = max(dx, 0), max(dy, 0)
            x1, y1 = min(dx + rw, self.width), min(dy + rh, self.height)
            if x0 >= x1 or y0 >= y1:
                continue  # pasted entirely off-canvas
            part = rendered[y0 - dy : y1 - dy, x0 - dx : x1 - dx].astype(np.float64)
            at = layer.opacity * part[:, :, 3] / 255.0
            premult[y0:y1, x0:x1] = (
                part[:, :, :3] * at[:, :, None]
                + premult[y0:y1, x0:x1] * (1.0 - at[:, :, None])
            )
            alpha[y0:y1, x0:x1] = at + alpha[y0:y1, x0:x1] * (1.0 - at)

        rgb = np.zeros_like(premult)
        np.divide(premult, alpha[:, :, None], out=rgb, where=alpha[:, :, None] > 0)
        out = np.zeros((self.height, self.width, 4), dtype=np.uint8)
        out[:, :, :3] = np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)
        out[:, :, 3] = np.clip(np.floor(alpha * 255.0 + 0.5), 0, 255).astype(np.uint8)
        return out

    def flatten(self) -> bytes:
        """Flatten to an RGBA PNG byte string."""
        return encode_png(self.flatten_raster())


def export_query_image(session: Session, store) -> str:
    """Flatten, ingest into the store and publish; returns the public URL."""
    asset = store.ingest(session.flatten())
    return store.publish(asset)
