"""Session registry: per-session write serialization and script persistence.

Distinct sessions are fully independent; operations on one session are
serialized by its lock. With a persistence root configured, every mutation
is appended to ``<root>/<session_id>/script.txt`` and pasted patches are
saved next to it, so any session can be replayed from disk.
"""

from __future__ import annotations

import itertools
import threading
from pathlib import Path

import numpy as np

from .compositor import Patch, Placement, Session, cut_region
from .editscript import format_op, region_args
from .errors import UnknownLayerError, UnknownSessionError
from .rasters import save_png


class _Recorder:
    def __init__(self, directory: Path):
        self.directory = directory
        self.directory.mkdir(parents=True, exist_ok=True)
        self.script = directory / "script.txt"

    def append(self, name: str, args: dict) -> None:
        with open(self.script, "a", encoding="utf-8") as fh:
            fh.write(format_op(name, args) + "\n")

    def save_pixels(self, name: str, pixels: np.ndarray) -> str:
        save_png(pixels, self.directory / name)
        return name


class SessionManager:
    def __init__(self, persist_root=None):
        self._sessions: dict[str, Session] = {}
        self._patches: dict[str, dict[str, Patch]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._recorders: dict[str, _Recorder] = {}
        self._registry_lock = threading.Lock()
        self._counter = itertools.count(1)
        self.persist_root = Path(persist_root) if persist_root else None

    # -- registry ------------------------------------------------------------

    def create(self, width: int, height: int, session_id: str | None = None) -> Session:
        with self._registry_lock:
            if session_id is None:
                session_id = f"session-{next(self._counter)}"
            if session_id in self._sessions:
                raise ValueError(f"session {session_id!r} already exists")
            session = Session(session_id=session_id, width=width, height=height)
            self._sessions[session_id] = session
            self._patches[session_id] = {}
            self._locks[session_id] = threading.Lock()
            if self.persist_root is not None:
                recorder = _Recorder(self.persist_root / session_id)
                recorder.append("session", {"width": width, "height": height})
                self._recorders[session_id] = recorder
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"no session named {session_id!r}") from None

    def ids(self) -> list[str]:
        return sorted(self._sessions)

    def _record(self, session_id: str, name: str, args: dict) -> None:
        recorder = self._recorders.get(session_id)
        if recorder is not None:
            recorder.append(name, args)

    def _record_patch(self, session_id: str, patch_id: str, patch: Patch) -> None:
        recorder = self._recorders.get(session_id)
        if recorder is not None:
            file_name = recorder.save_pixels(f"{patch_id}.png", patch.pixels)
            recorder.append("patch", {"patch": patch_id, "source": file_name})

    # -- operations (locked per session) ---------------------------------------

    def register_patch(self, session_id: str, patch: Patch) -> str:
        with self._locks[self.get(session_id).session_id]:
            patches = self._patches[session_id]
            patch_id = f"patch-{len(patches) + 1}"
            patches[patch_id] = patch
            self._record_patch(session_id, patch_id, patch)
            return patch_id

    def cut(self, session_id: str, source: np.ndarray, region) -> str:
        self.get(session_id)
        patch = cut_region(source, region)
        with self._locks[session_id]:
            patches = self._patches[session_id]
            patch_id = f"patch-{len(patches) + 1}"
            patches[patch_id] = patch
            self._record_patch(session_id, patch_id, patch)
            return patch_id

    def get_patch(self, session_id: str, patch_id: str) -> Patch:
        patches = self._patches[self.get(session_id).session_id]
        try:
            return patches[patch_id]
        except KeyError:
            raise UnknownLayerError(f"session {session_id} has no patch {patch_id!r}") from None

    def paste(self, session_id: str, patch: Patch, placement: Placement | None = None,
              opacity: float = 1.0, patch_id: str | None = None) -> str:
        session = self.get(session_id)
        with self._locks[session_id]:
            layer_id = session.paste(patch, placement, opacity)
            if patch_id is None:
                # ad-hoc patch: persist it so the script stays replayable
                patches = self._patches[session_id]
                patch_id = f"patch-{len(patches) + 1}"
                patches[patch_id] = patch
                self._record_patch(session_id, patch_id, patch)
            self._record(session_id, "paste", {
                "patch": patch_id,
                "placement": (placement or Placement()).to_args(),
                "opacity": opacity,
            })
            return layer_id

    def set_opacity(self, session_id: str, layer_id: str, value: float) -> None:
        session = self.get(session_id)
        with self._locks[session_id]:
            session.set_opacity(layer_id, value)
            self._record(session_id, "opacity", {"layer": layer_id, "value": value})

    def remove_layer(self, session_id: str, layer_id: str) -> None:
        session = self.get(session_id)
        with self._locks[session_id]:
            session.remove_layer(layer_id)
            self._record(session_id, "remove", {"layer": layer_id})

    def reorder_layer(self, session_id: str, layer_id: str, new_index: int) -> None:
        session = self.get(session_id)
        with self._locks[session_id]:
            session.reorder_layer(layer_id, new_index)
            self._record(session_id, "reorder", {"layer": layer_id, "index": new_index})

    def set_background(self, session_id: str, raster: np.ndarray) -> str:
        session = self.get(session_id)
        with self._locks[session_id]:
            layer_id = session.set_background(raster)
            recorder = self._recorders.get(session_id)
            if recorder is not None:
                file_name = recorder.save_pixels(f"{layer_id}-background.png", raster)
                recorder.append("background", {"source": file_name})
            return layer_id

    def replace_all(self, session_id: str, raster: np.ndarray) -> str:
        session = self.get(session_id)
        with self._locks[session_id]:
            layer_id = session.replace_all(raster)
            recorder = self._recorders.get(session_id)
            if recorder is not None:
                file_name = recorder.save_pixels(f"{layer_id}-replace.png", raster)
                recorder.append("replace", {"source": file_name})
            return layer_id

    def flatten(self, session_id: str) -> bytes:
        return self.get(session_id).flatten()

    def flatten_raster(self, session_id: str) -> np.ndarray:
        return self.get(session_id).flatten_raster()
