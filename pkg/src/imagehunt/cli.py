"""Scriptable front door: hunt, download, composite, style, serve, replay.

Runs embedded (all modules in-process, no network) unless --server points at
a running instance. Exit codes: 0 success, 1 operational failure, 2 usage.
"""

from __future__ import annotations

import argparse
import base64
import json
import os
import sys
from pathlib import Path

import requests

from .config import AppConfig, load_config
from .editscript import format_op, parse_op, run_script
from .embedded import Embedded
from .errors import ImageHuntError
from .fetching import fetch_bytes
from .gateway import CorpusIndex, LocalBackend, index_corpus
from .licensing import LicenseFilter
from .rasters import load_rgba, save_png
from .store import format_credit

EMBEDDED = "embedded"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ih",
        description="image/keyword hunts, provenance-tracked downloads, "
                    "collage edits and style adaptation",
    )
    parser.add_argument("--config", default=os.environ.get("IH_CONFIG"),
                        help="TOML configuration file")
    parser.add_argument("--server", default=os.environ.get("IH_SERVER", EMBEDDED),
                        help="server base URL, or 'embedded' (default)")
    parser.add_argument("--json", action="store_true",
                        default=os.environ.get("IH_FORMAT") == "json",
                        help="structured JSON output instead of text")
    parser.add_argument("--output-dir", default=os.environ.get("IH_OUTPUT_DIR", "."),
                        help="directory for written files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP server")
    p.add_argument("--port", type=int)

    p = sub.add_parser("index", help="index a corpus directory")
    p.add_argument("--corpus", required=True)
    p.add_argument("--metadata", help="license sidecar: one '<asset-id> <label>' per line")
    p.add_argument("--link-base", help="result link base URL (default: file:// links)")
    p.add_argument("--out", help="write the serialized index here")

    p = sub.add_parser("hunt", help="search by image and/or keywords")
    p.add_argument("--image", help="query image file")
    p.add_argument("--image-link", help="query image link (already public)")
    p.add_argument("--keywords", nargs="+", default=[])
    p.add_argument("--license", default=LicenseFilter.NOT_FILTERED.label,
                   choices=[f.label for f in LicenseFilter])
    p.add_argument("--max", type=int, default=None)
    p.add_argument("--corpus", help="embedded mode: corpus directory")
    p.add_argument("--metadata", help="embedded mode: license sidecar")
    p.add_argument("--index", help="embedded mode: pre-built index file")

    p = sub.add_parser("download", help="fetch a link into the store with provenance")
    p.add_argument("--link", required=True)
    p.add_argument("--license", default=LicenseFilter.NOT_FILTERED.label,
                   choices=[f.label for f in LicenseFilter])

    p = sub.add_parser("style", help="restyle a content image")
    p.add_argument("--content", required=True)
    p.add_argument("--style", help="style image file")
    p.add_argument("--style-id", help="pre-coded style name")
    p.add_argument("--strength", type=float, default=1.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("session", help="manage an edit-script session file")
    verbs = p.add_subparsers(dest="verb", required=True)
    v = verbs.add_parser("new")
    v.add_argument("--file", required=True)
    v.add_argument("--width", type=int, required=True)
    v.add_argument("--height", type=int, required=True)
    v = verbs.add_parser("append")
    v.add_argument("--file", required=True)
    v.add_argument("op")
    v.add_argument("args", nargs="?", default="{}")
    v = verbs.add_parser("flatten")
    v.add_argument("--file", required=True)
    v.add_argument("--out", required=True)
    v = verbs.add_parser("export")
    v.add_argument("--file", required=True)

    p = sub.add_parser("replay", help="replay an edit script, writing its exports")
    p.add_argument("script")
    p.add_argument("--out-dir")

    return parser


def _load_app_config(args) -> AppConfig:
    config = load_config(args.config) if args.config else load_config()
    if getattr(args, "port", None):
        config.port = args.port
        config.public_base_url = f"http://127.0.0.1:{config.port}"
    return config


def _make_runtime(args, corpus=None, metadata=None, index_file=None) -> Embedded:
    config = _load_app_config(args)
    if corpus:
        config.corpus_path = corpus
        config.corpus_metadata = metadata
    runtime = Embedded(config)
    if index_file:
        index = CorpusIndex.from_json(Path(index_file).read_text(encoding="utf-8"))
        runtime.index = index
        runtime.backend = LocalBackend(index, resolve_link=runtime._resolve_link)
    return runtime


def _post(server: str, route: str, body: dict) -> dict:
    response = requests.post(server.rstrip("/") + route, json=body, timeout=60)
    payload = response.json()
    if response.status_code != 200:
        raise ImageHuntError(payload.get("error", f"server returned {response.status_code}"))
    return payload


def _emit_links(args, links: list[str]) -> None:
    if args.json:
        print(json.dumps({"links": links}))
    else:
        for link in links:
            print(link)


def _cmd_hunt(args) -> int:
    license_filter = LicenseFilter.from_label(args.license)
    if not args.image and not args.image_link and not args.keywords:
        raise UsageError("hunt needs --image, --image-link or --keywords")

    if args.server != EMBEDDED:
        if args.image or args.image_link:
            data = (Path(args.image).read_bytes() if args.image
                    else fetch_bytes(args.image_link))
            body = {"image_png_b64": base64.b64encode(data).decode("ascii"),
                    "keywords": args.keywords, "license_filter": license_filter.label}
            if args.max:
                body["max_results"] = args.max
            payload = _post(args.server, "/hunt/image", body)
        else:
            body = {"keywords": args.keywords, "license_filter": license_filter.label}
            if args.max:
                body["max_results"] = args.max
            payload = _post(args.server, "/hunt/keywords", body)
        _emit_links(args, payload["links"])
        return 0

    runtime = _make_runtime(args, corpus=args.corpus, metadata=args.metadata,
                            index_file=args.index)
    if args.image:
        results = runtime.hunt_image_bytes(
            Path(args.image).read_bytes(), keywords=tuple(args.keywords),
            license_filter=license_filter, max_results=args.max)
    elif args.image_link:
        from .gateway import HuntQuery

        results = runtime.hunt_query(HuntQuery(
            image_link=args.image_link, keywords=tuple(args.keywords),
            license_filter=license_filter,
            max_results=args.max or runtime.config.max_results))
    else:
        results = runtime.hunt_keywords(tuple(args.keywords),
                                        license_filter=license_filter,
                                        max_results=args.max)
    _emit_links(args, [r.link for r in results])
    return 0


def _cmd_download(args) -> int:
    license_filter = LicenseFilter.from_label(args.license)
    if args.server != EMBEDDED:
        payload = _post(args.server, "/download",
                        {"link": args.link, "license_filter": license_filter.label})
        asset_id, credit = payload["asset_id"], payload["credit_line"]
    else:
        asset, credit = _make_runtime(args).download(args.link, license_filter)
        asset_id = asset.asset_id
    if args.json:
        print(json.dumps({"asset_id": asset_id, "credit_line": credit}))
    else:
        print(asset_id)
        print(credit)
    return 0


def _cmd_style(args) -> int:
    if bool(args.style) == bool(args.style_id):
        raise UsageError("style needs exactly one of --style or --style-id")
    out_path = Path(args.output_dir) / args.out if not Path(args.out).is_absolute() \
        else Path(args.out)

    if args.server != EMBEDDED:
        content_b64 = base64.b64encode(Path(args.content).read_bytes()).decode("ascii")
        if args.style:
            payload = _post(args.server, "/style/selected", {
                "content_png_b64": content_b64,
                "style_png_b64": base64.b64encode(Path(args.style).read_bytes()).decode("ascii"),
                "strength": args.strength})
        else:
            payload = _post(args.server, "/style/existing", {
                "content_png_b64": content_b64, "style_id": args.style_id,
                "strength": args.strength})
        out_path.write_bytes(base64.b64decode(payload["result_png_b64"]))
    else:
        runtime = _make_runtime(args)
        content = load_rgba(args.content)
        if args.style:
            result = runtime.style_selected(content, load_rgba(args.style), args.strength)
        else:
            result = runtime.style_existing(content, args.style_id, args.strength)
        save_png(result, out_path)
    if args.json:
        print(json.dumps({"out": str(out_path)}))
    else:
        print(out_path)
    return 0


def _cmd_index(args) -> int:
    built = index_corpus(args.corpus, args.metadata, link_base=args.link_base)
    if args.out:
        Path(args.out).write_text(built.index.to_json(), encoding="utf-8")
    message = {"indexed": len(built.index), "skipped": built.skipped,
               "out": args.out}
    if args.json:
        print(json.dumps(message))
    else:
        print(f"indexed {len(built.index)} assets (skipped {built.skipped})")
    return 0


def _cmd_session(args) -> int:
    path = Path(args.file)
    if args.verb == "new":
        path.write_text(
            format_op("session", {"width": args.width, "height": args.height}) + "\n",
            encoding="utf-8")
        print(path)
        return 0
    if args.verb == "append":
        parse_op(f"{args.op} {args.args}")  # validate before writing
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(f"{args.op} {args.args}\n")
        return 0
    if args.verb == "flatten":
        result = run_script(path)
        out_path = Path(args.output_dir) / args.out if not Path(args.out).is_absolute() \
            else Path(args.out)
        out_path.write_bytes(result.session.flatten())
        print(out_path)
        return 0
    if args.verb == "export":
        runtime = _make_runtime(args)
        result = run_script(path)
        asset = runtime.store.ingest(result.session.flatten())
        url = runtime.store.publish(asset)
        if args.json:
            print(json.dumps({"asset_id": asset.asset_id, "url": url}))
        else:
            print(url)
        return 0
    raise UsageError(f"unknown session verb: {args.verb}")


def _cmd_replay(args) -> int:
    out_dir = args.out_dir or args.output_dir
    result = run_script(args.script, out_dir=out_dir)
    for name in result.exports:
        print(Path(out_dir) / name)
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(_load_app_config(args))
    return 0


class UsageError(Exception):
    pass


_COMMANDS = {
    "serve": _cmd_serve,
    "index": _cmd_index,
    "hunt": _cmd_hunt,
    "download": _cmd_download,
    "style": _cmd_style,
    "session": _cmd_session,
    "replay": _cmd_replay,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ih: error: {exc}", file=sys.stderr)
        return 2
    except ImageHuntError as exc:
        print(f"ih: {exc}", file=sys.stderr)
        return 1
    except (OSError, requests.RequestException, json.JSONDecodeError, KeyError) as exc:
        print(f"ih: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
