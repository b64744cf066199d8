import io

import numpy as np
import pytest
from PIL import Image

from imagehunt.licensing import LicenseFilter

CORPUS_THEMES = [
    "milk", "bottle", "desert", "butterfly", "hat",
    "orange", "sea", "mountain", "dolphin", "flower",
]

CORPUS_LABELS = [
    "reuse-with-modification",
    "reuse",
    "noncommercial-reuse-with-modification",
    "noncommercial-reuse",
    None,  # unlabeled
]


def encode_image(arr: np.ndarray, image_format: str = "PNG", **save_args) -> bytes:
    mode = "RGBA" if arr.shape[2] == 4 else "RGB"
    im = Image.fromarray(arr.astype(np.uint8), mode)
    buf = io.BytesIO()
    im.save(buf, format=image_format, **save_args)
    return buf.getvalue()


def noise_rgb(rng: np.random.Generator, width: int = 32, height: int = 32) -> np.ndarray:
    return rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)


def uniform_rgba(color, width: int = 16, height: int = 16) -> np.ndarray:
    arr = np.zeros((height, width, 4), dtype=np.uint8)
    arr[:, :] = color if len(color) == 4 else tuple(color) + (255,)
    return arr


def corpus_image(seed: int, width: int = 48, height: int = 48) -> np.ndarray:
    """Distinct deterministic test image: tinted gradient plus noise blocks."""
    rng = np.random.default_rng(1000 + seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    tint = rng.integers(40, 220, size=3).astype(np.float64)
    base = np.stack([
        tint[0] * (0.4 + 0.6 * xx / (width - 1)),
        tint[1] * (0.4 + 0.6 * yy / (height - 1)),
        tint[2] * (0.4 + 0.6 * (xx + yy) / (width + height - 2)),
    ], axis=2)
    noise = rng.normal(0, 25, base.shape)
    x0, y0 = rng.integers(0, width // 2), rng.integers(0, height // 2)
    base[y0:y0 + height // 3, x0:x0 + width // 3] = rng.integers(0, 256, size=3)
    return np.clip(base + noise, 0, 255).astype(np.uint8)


def build_corpus(root, count: int = 50):
    """Write `count` corpus PNGs plus the license sidecar; returns sidecar path."""
    root.mkdir(parents=True, exist_ok=True)
    sidecar_lines = []
    for i in range(count):
        theme = CORPUS_THEMES[i % len(CORPUS_THEMES)]
        second = CORPUS_THEMES[(i + 1) % len(CORPUS_THEMES)]
        name = f"{theme}-{second}-{i:03d}.png" if i % 3 == 0 else f"{theme}-{i:03d}.png"
        (root / name).write_bytes(encode_image(corpus_image(i)))
        label = CORPUS_LABELS[i % len(CORPUS_LABELS)]
        if label is not None:
            sidecar_lines.append(f"{name} {label}")
    sidecar = root / "licenses.txt"
    sidecar.write_text("".join(line + "\n" for line in sidecar_lines), encoding="utf-8")
    return sidecar


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    sidecar = build_corpus(root, count=50)
    return root, sidecar


@pytest.fixture()
def store_root(tmp_path):
    return tmp_path / "store"


def exif_jpeg_bytes(arr: np.ndarray) -> bytes:
    """JPEG with orientation, camera and GPS EXIF entries."""
    exif = Image.Exif()
    exif[0x0112] = 6
    exif[0x010F] = "CamCo"
    exif[0x0110] = "Model-9"
    exif[0x0132] = "2020:01:02 03:04:05"
    gps = exif.get_ifd(0x8825)
    gps[1] = "N"
    gps[2] = (52.0, 30.0, 0.0)
    im = Image.fromarray(arr.astype(np.uint8), "RGB")
    buf = io.BytesIO()
    im.save(buf, format="JPEG", exif=exif)
    return buf.getvalue()


def texty_png_bytes(arr: np.ndarray) -> bytes:
    """PNG with textual chunks and an ICC profile."""
    from PIL.PngImagePlugin import PngInfo

    info = PngInfo()
    info.add_text("Comment", "shot on a potato")
    info.add_text("Author", "somebody")
    info.add_itxt("Title", "wörk in prögress")
    mode = "RGBA" if arr.shape[2] == 4 else "RGB"
    im = Image.fromarray(arr.astype(np.uint8), mode)
    buf = io.BytesIO()
    im.save(buf, format="PNG", pnginfo=info, icc_profile=b"\x00" * 64)
    return buf.getvalue()


def assert_license_label(value: str) -> LicenseFilter:
    return LicenseFilter.from_label(value)
