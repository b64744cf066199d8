"""Edit scripts: a replayable operation log for sessions.

One operation per UTF-8 line, ``<op-name> <json-args>``:

    session    {"width": 640, "height": 480}
    cut        {"source": "photo.png", "region": {"rect": [x, y, w, h]}, "patch": "p1"}
    patch      {"patch": "p2", "source": "patch-2.png"}
    paste      {"patch": "p1", "placement": {"dx": 5, "mirror_h": true}, "opacity": 0.9}
    opacity    {"layer": "layer-1", "value": 0.5}
    remove     {"layer": "layer-1"}
    reorder    {"layer": "layer-1", "index": 2}
    background {"source": "desert.png"}
    replace    {"source": "styled.png"}
    style      {"style_id": "noir", "strength": 1.0}   (or {"style_source": path})
    export     {"out": "final.png"}

Regions in ``cut`` are {"rect": [x, y, w, h]} or {"polygon": [[x, y], ...]}.
Relative paths resolve against the script's directory. Layer ids are
assigned deterministically (layer-1, layer-2, ...), so a script can refer
to layers it created earlier. Replays are deterministic: the same script
and referenced assets produce byte-identical exports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .compositor import Patch, Placement, Session, cut_region
from .rasters import load_rgba
from .style import StyleRegistry, bundled_registry, transfer_selected_style


def format_op(name: str, args: dict) -> str:
    return f"{name} {json.dumps(args, sort_keys=True, separators=(',', ':'))}"


def parse_op(line: str) -> tuple[str, dict]:
    name, _, rest = line.partition(" ")
    if not name:
        raise ValueError(f"blank operation line: {line!r}")
    args = json.loads(rest) if rest.strip() else {}
    return name, args


def parse_region(args: dict):
    if "rect" in args:
        return tuple(args["rect"])
    if "polygon" in args:
        return [tuple(p) for p in args["polygon"]]
    raise ValueError("region needs a 'rect' or 'polygon' key")


def region_args(region) -> dict:
    if isinstance(region, tuple) and len(region) == 4 and not isinstance(region[0], tuple):
        return {"rect": list(region)}
    return {"polygon": [list(p) for p in region]}


@dataclass
class ReplayResult:
    session: Session
    exports: dict[str, bytes] = field(default_factory=dict)


def run_script(
    script_path,
    out_dir=None,
    registry: StyleRegistry | None = None,
) -> ReplayResult:
    """Replay an edit script; exports are written to out_dir when given."""
    path = Path(script_path)
    base = path.parent
    lines = [
        line for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]

    session: Session | None = None
    patches: dict[str, Patch] = {}
    exports: dict[str, bytes] = {}

    def need_session() -> Session:
        if session is None:
            raise ValueError("script must open with a 'session' operation")
        return session

    for line in lines:
        name, args = parse_op(line)
        if name == "session":
            if session is not None:
                raise ValueError("script contains more than one 'session' operation")
            session = Session(
                session_id=args.get("session_id", path.stem),
                width=args["width"],
                height=args["height"],
            )
        elif name == "cut":
            source = load_rgba(base / args["source"])
            patches[args["patch"]] = cut_region(source, parse_region(args["region"]))
        elif name == "patch":
            patches[args["patch"]] = Patch(load_rgba(base / args["source"]))
        elif name == "paste":
            need_session().paste(
                patches[args["patch"]],
                Placement.from_args(args.get("placement", {})),
                args.get("opacity", 1.0),
            )
        elif name == "opacity":
            need_session().set_opacity(args["layer"], args["value"])
        elif name == "remove":
            need_session().remove_layer(args["layer"])
        elif name == "reorder":
            need_session().reorder_layer(args["layer"], args["index"])
        elif name == "background":
            need_session().set_background(load_rgba(base / args["source"]))
        elif name == "replace":
            need_session().replace_all(load_rgba(base / args["source"]))
        elif name == "style":
            current = need_session()
            if "style_id" in args:
                style_image = (registry or bundled_registry()).get(args["style_id"]).style_image
            else:
                style_image = load_rgba(base / args["style_source"])
            restyled = transfer_selected_style(
                current.flatten_raster(), style_image, args.get("strength", 1.0)
            )
            current.replace_all(restyled)
        elif name == "export":
            data = need_session().flatten()
            exports[args["out"]] = data
            if out_dir is not None:
                target = Path(out_dir) / args["out"]
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_bytes(data)
        else:
            raise ValueError(f"unknown edit-script operation: {name!r}")

    return ReplayResult(session=need_session(), exports=exports)
