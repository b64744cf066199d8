"""Platform configuration: TOML file plus IH_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .gateway.parser import DEFAULT_COMPONENT_SELECTOR
from .gateway.query import DEFAULT_MAX_RESULTS

BACKENDS = ("local", "remote-fixture", "remote-live")

ENV_PREFIX = "IH_"


@dataclass
class AppConfig:
    port: int = 8000
    store_root: str = "./store"
    backend: str = "local"
    corpus_path: str | None = None
    corpus_metadata: str | None = None
    fixture_path: str | None = None
    style_registry_path: str | None = None  # bundled registry when unset
    style_backend_url: str | None = None    # external POST backend when set
    max_upload_bytes: int = 16 * 1024 * 1024
    max_results: int = DEFAULT_MAX_RESULTS
    public_base_url: str | None = None      # derived from port when unset
    component_selector: str = DEFAULT_COMPONENT_SELECTOR
    session_root: str | None = None         # edit-script persistence when set
    allow_live: bool = False

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.port < 1 or self.port > 65535:
            raise ConfigError(f"port out of range: {self.port}")
        if self.max_upload_bytes < 1 or self.max_results < 1:
            raise ConfigError("max_upload_bytes and max_results must be positive")
        if self.backend == "remote-fixture" and not self.fixture_path:
            raise ConfigError("remote-fixture backend needs fixture_path")
        if self.public_base_url is None:
            self.public_base_url = f"http://127.0.0.1:{self.port}"


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, kind, raw: str):
    if kind is int or kind == "int":
        return int(raw)
    if kind is bool or kind == "bool":
        lowered = raw.strip().lower()
        if lowered in _BOOL_TRUE:
            return True
        if lowered in _BOOL_FALSE:
            return False
        raise ConfigError(f"cannot parse boolean override {name}={raw!r}")
    return raw


def load_config(path=None, env: dict | None = None) -> AppConfig:
    """Load configuration: defaults, then the TOML file, then IH_* overrides."""
    values: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                document = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config file is not valid TOML: {exc}")
        values.update(document)

    env = os.environ if env is None else env
    field_types = {f.name: f.type for f in fields(AppConfig)}
    for field_name in field_types:
        raw = env.get(ENV_PREFIX + field_name.upper())
        if raw is not None:
            kind = int if field_name in ("port", "max_upload_bytes", "max_results") else (
                bool if field_name == "allow_live" else str
            )
            values[field_name] = _coerce(field_name, kind, raw)

    unknown = set(values) - set(field_types)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return AppConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc))


def resolve_path(base: Path | None, value: str | None) -> str | None:
    """Resolve a config-relative path against the config file's directory."""
    if value is None or base is None:
        return value
    candidate = Path(value)
    return str(candidate if candidate.is_absolute() else base / candidate)
