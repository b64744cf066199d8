"""HTTP layer: POST operation endpoints plus GET serving of published assets.

Status 200 means success and nothing else; every failure returns a non-200
status with body ``{"error": "<message>"}``. Clients that follow the
non-200-shows-nothing rule therefore never render partial results. Images
travel base64-encoded inside JSON bodies.
"""

from __future__ import annotations

import base64
import binascii
import socket

from fastapi import FastAPI, Request
from fastapi.exceptions import HTTPException, RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field
from starlette.exceptions import HTTPException as StarletteHTTPException

from .compositor import Patch, Placement
from .config import AppConfig
from .editscript import parse_region
from .embedded import Embedded
from .errors import (
    BackendUnreachableError,
    EmptyQueryError,
    ExternalBackendError,
    FetchFailureError,
    ImageHuntError,
    MissingImageLinkError,
    NoProvenanceError,
    RegionError,
    ServeError,
    UndecodableImageError,
    UnknownAssetError,
    UnknownLayerError,
    UnknownSessionError,
    UnknownStyleError,
    ZeroAreaImageError,
)
from .licensing import LicenseFilter
from .rasters import decode_rgba, encode_png

_STATUS_BY_ERROR = [
    (UnknownStyleError, 404),
    (UnknownAssetError, 404),
    (UnknownSessionError, 404),
    (UnknownLayerError, 404),
    (FetchFailureError, 502),
    (BackendUnreachableError, 502),
    (ExternalBackendError, 502),
    (EmptyQueryError, 400),
    (MissingImageLinkError, 400),
    (UndecodableImageError, 400),
    (ZeroAreaImageError, 400),
    (RegionError, 400),
    (NoProvenanceError, 400),
]


def _error_status(exc: ImageHuntError) -> int:
    for kind, status in _STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return status
    return 500


class ImageHuntBody(BaseModel):
    image_png_b64: str
    keywords: list[str] = Field(default_factory=list)
    license_filter: str = LicenseFilter.NOT_FILTERED.label
    max_results: int | None = None


class KeywordHuntBody(BaseModel):
    keywords: list[str]
    license_filter: str = LicenseFilter.NOT_FILTERED.label
    max_results: int | None = None


class DownloadBody(BaseModel):
    link: str
    license_filter: str = LicenseFilter.NOT_FILTERED.label


class StyleSelectedBody(BaseModel):
    content_png_b64: str
    style_png_b64: str
    strength: float = 1.0


class StyleExistingBody(BaseModel):
    content_png_b64: str
    style_id: str
    strength: float = 1.0


def _bad_request(message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=message)


def _parse_license(label: str) -> LicenseFilter:
    try:
        return LicenseFilter.from_label(label)
    except ValueError as exc:
        raise _bad_request(str(exc))


def _decode_b64_image(field: str, value: str, max_bytes: int) -> bytes:
    if len(value) * 3 // 4 > max_bytes:
        raise HTTPException(status_code=413, detail=f"{field} exceeds {max_bytes} bytes")
    try:
        data = base64.b64decode(value, validate=True)
    except binascii.Error:
        raise _bad_request(f"{field} is not valid base64")
    if len(data) > max_bytes:
        raise HTTPException(status_code=413, detail=f"{field} exceeds {max_bytes} bytes")
    return data


def _require(body: dict, field: str):
    if field not in body:
        raise _bad_request(f"missing field: {field}")
    return body[field]


def create_app(runtime: Embedded) -> FastAPI:
    app = FastAPI(title="imagehunt", docs_url=None, redoc_url=None, openapi_url=None)
    # the browser panel is served from its own origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST", "OPTIONS"],
        allow_headers=["Content-Type"],
    )
    max_bytes = runtime.config.max_upload_bytes

    @app.exception_handler(ImageHuntError)
    async def on_domain_error(request: Request, exc: ImageHuntError):
        return JSONResponse(status_code=_error_status(exc), content={"error": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:1])})

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(request: Request, exc: StarletteHTTPException):
        return JSONResponse(status_code=exc.status_code,
                            content={"error": str(exc.detail) or "request failed"})

    @app.exception_handler(ValueError)
    async def on_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    # -- hunts -------------------------------------------------------------

    @app.post("/hunt/image")
    def hunt_image(body: ImageHuntBody):
        data = _decode_b64_image("image_png_b64", body.image_png_b64, max_bytes)
        results = runtime.hunt_image_bytes(
            data,
            keywords=tuple(body.keywords),
            license_filter=_parse_license(body.license_filter),
            max_results=body.max_results,
        )
        return {"links": [r.link for r in results]}

    @app.post("/hunt/keywords")
    def hunt_keywords(body: KeywordHuntBody):
        results = runtime.hunt_keywords(
            tuple(body.keywords),
            license_filter=_parse_license(body.license_filter),
            max_results=body.max_results,
        )
        return {"links": [r.link for r in results]}

    # -- downloads ----------------------------------------------------------

    @app.post("/download")
    def download(body: DownloadBody):
        asset, credit_line = runtime.download(body.link, _parse_license(body.license_filter))
        return {"asset_id": asset.asset_id, "credit_line": credit_line}

    # -- style ---------------------------------------------------------------

    def _style_strength(strength: float) -> float:
        if not 0.0 <= strength <= 1.0:
            raise _bad_request("strength must lie in [0, 1]")
        return strength

    @app.post("/style/selected")
    def style_selected(body: StyleSelectedBody):
        content = decode_rgba(_decode_b64_image("content_png_b64", body.content_png_b64, max_bytes))
        style = decode_rgba(_decode_b64_image("style_png_b64", body.style_png_b64, max_bytes))
        result = runtime.style_selected(content, style, _style_strength(body.strength))
        return {"status": "ok",
                "result_png_b64": base64.b64encode(encode_png(result)).decode("ascii")}

    @app.post("/style/existing")
    def style_existing(body: StyleExistingBody):
        content = decode_rgba(_decode_b64_image("content_png_b64", body.content_png_b64, max_bytes))
        result = runtime.style_existing(content, body.style_id, _style_strength(body.strength))
        return {"status": "ok",
                "result_png_b64": base64.b64encode(encode_png(result)).decode("ascii")}

    # -- sessions -------------------------------------------------------------

    def _session_source_pixels(session_id: str, body: dict, field_prefix: str = "source"):
        asset_key = f"{field_prefix}_asset_id"
        b64_key = f"{field_prefix}_png_b64"
        if asset_key in body:
            return runtime.store.get(body[asset_key]).pixels
        if b64_key in body:
            return decode_rgba(_decode_b64_image(b64_key, body[b64_key], max_bytes))
        raise _bad_request(f"need {asset_key} or {b64_key}")

    @app.post("/session/{session_id}/{op}")
    def session_op(session_id: str, op: str, body: dict):
        sessions = runtime.sessions
        if op == "create":
            if "source_asset_id" in body:
                # new document from a stored asset, sized to it
                pixels = runtime.store.get(body["source_asset_id"]).pixels
                session = sessions.create(pixels.shape[1], pixels.shape[0],
                                          session_id=session_id)
                sessions.set_background(session_id, pixels)
            else:
                session = sessions.create(int(_require(body, "width")),
                                          int(_require(body, "height")),
                                          session_id=session_id)
            return {"session_id": session.session_id,
                    "width": session.width, "height": session.height}
        if op == "cut":
            pixels = _session_source_pixels(session_id, body)
            patch_id = sessions.cut(session_id, pixels, parse_region(_require(body, "region")))
            return {"patch_id": patch_id}
        if op == "paste":
            if "patch_id" in body:
                patch = sessions.get_patch(session_id, body["patch_id"])
                patch_id = body["patch_id"]
            elif "patch_png_b64" in body:
                patch = Patch(decode_rgba(
                    _decode_b64_image("patch_png_b64", body["patch_png_b64"], max_bytes)))
                patch_id = None
            else:
                raise _bad_request("need patch_id or patch_png_b64")
            placement = Placement.from_args(body.get("placement", {}))
            layer_id = sessions.paste(session_id, patch, placement,
                                      float(body.get("opacity", 1.0)), patch_id=patch_id)
            return {"layer_id": layer_id}
        if op == "set_opacity":
            sessions.set_opacity(session_id, _require(body, "layer_id"),
                                 float(_require(body, "opacity")))
            return {"ok": True}
        if op == "remove_layer":
            sessions.remove_layer(session_id, _require(body, "layer_id"))
            return {"ok": True}
        if op == "reorder_layer":
            sessions.reorder_layer(session_id, _require(body, "layer_id"),
                                   int(_require(body, "index")))
            return {"ok": True}
        if op == "set_background":
            layer_id = sessions.set_background(
                session_id, _session_source_pixels(session_id, body))
            return {"layer_id": layer_id}
        if op == "replace":
            layer_id = sessions.replace_all(
                session_id, _session_source_pixels(session_id, body))
            return {"layer_id": layer_id}
        if op == "flatten":
            session = sessions.get(session_id)
            return {"png_b64": base64.b64encode(session.flatten()).decode("ascii"),
                    "width": session.width, "height": session.height}
        if op == "export":
            sessions.get(session_id)
            asset_id, url = runtime.export_session(session_id)
            return {"asset_id": asset_id, "url": url}
        raise HTTPException(status_code=404, detail=f"unknown session operation: {op!r}")

    # -- public asset serving ----------------------------------------------------

    @app.get("/public/{name}")
    def public_asset(name: str):
        if not name.endswith(".png") or "/" in name or ".." in name:
            raise HTTPException(status_code=404, detail=f"no public asset named {name!r}")
        data = runtime.store.read_bytes(name[: -len(".png")])
        return Response(content=data, media_type="image/png")

    return app


def build_server(config: AppConfig, host: str = "0.0.0.0"):
    """Wire all modules and bind the port; returns (server, socket, runtime).

    The socket is bound before anything starts serving, so an occupied port
    fails fast with no partially started server and no routes exposed.
    """
    import uvicorn

    runtime = Embedded(config)
    app = create_app(runtime)
    try:
        sock = socket.create_server((host, config.port))
    except OSError as exc:
        raise ServeError(f"cannot bind port {config.port}: {exc}") from exc
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    return server, sock, runtime


def serve(config: AppConfig) -> None:
    """Run the HTTP server until interrupted."""
    server, sock, _ = build_server(config)
    try:
        server.run(sockets=[sock])
    finally:
        sock.close()
