"""Service configuration: JSON file plus FRAMESIFT_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError

EMBEDDER_MOCK = "mock"
EMBEDDER_HTTP = "http"

DEFAULT_PALETTE_SIZE = 12
DEFAULT_TOP_T = 100
DEFAULT_NEIGHBOR_RADIUS = 4


@dataclass(frozen=True)
class EmbedderConfig:
    """How to turn query text into a vector for one (or every) space."""

    kind: str = EMBEDDER_MOCK
    url: str | None = None
    timeout_ms: int = 5000

    def __post_init__(self) -> None:
        if self.kind not in (EMBEDDER_MOCK, EMBEDDER_HTTP):
            raise FormatError(f"unknown embedder kind {self.kind!r}")
        if self.kind == EMBEDDER_HTTP and not self.url:
            raise FormatError("http embedder requires a url")
        if self.timeout_ms <= 0:
            raise FormatError("embedder timeout_ms must be positive")


@dataclass(frozen=True)
class TextTransformConfig:
    """Optional external text rewriter applied to queries before embedding."""

    url: str
    timeout_ms: int = 5000


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    palette_size: int = DEFAULT_PALETTE_SIZE
    default_t: int = DEFAULT_TOP_T
    neighbor_radius: int = DEFAULT_NEIGHBOR_RADIUS
    mock_seed: int = 0
    media_root: str | None = None
    frontend_dist: str | None = None
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    space_embedders: dict[str, EmbedderConfig] = field(default_factory=dict)
    text_transform: TextTransformConfig | None = None

    def embedder_for(self, space_id: str) -> EmbedderConfig:
        return self.space_embedders.get(space_id, self.embedder)


_KNOWN_KEYS = {
    "host",
    "port",
    "palette_size",
    "default_t",
    "neighbor_radius",
    "mock_seed",
    "media_root",
    "frontend_dist",
    "embedder",
    "space_embedders",
    "text_transform",
}

_ENV_OVERRIDES = {
    "FRAMESIFT_HOST": ("host", str),
    "FRAMESIFT_PORT": ("port", int),
    "FRAMESIFT_PALETTE_SIZE": ("palette_size", int),
    "FRAMESIFT_DEFAULT_T": ("default_t", int),
    "FRAMESIFT_MOCK_SEED": ("mock_seed", int),
    "FRAMESIFT_MEDIA_ROOT": ("media_root", str),
    "FRAMESIFT_FRONTEND_DIST": ("frontend_dist", str),
}


def _embedder_from(obj: object, where: str) -> EmbedderConfig:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: embedder config must be an object")
    try:
        return EmbedderConfig(**obj)
    except TypeError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> ServiceConfig:
    """Build a ServiceConfig from an optional JSON file, then apply env overrides."""
    cfg = ServiceConfig()
    if path is not None:
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise FormatError(f"{path}: config root must be an object")
        unknown = set(raw) - _KNOWN_KEYS
        if unknown:
            raise FormatError(f"{path}: unknown config keys {sorted(unknown)}")
        for key in ("host", "media_root", "frontend_dist"):
            if key in raw and raw[key] is not None and not isinstance(raw[key], str):
                raise FormatError(f"{path}: {key} must be a string")
        for key in ("port", "palette_size", "default_t", "neighbor_radius", "mock_seed"):
            if key in raw and not isinstance(raw[key], int):
                raise FormatError(f"{path}: {key} must be an integer")
        for key in _KNOWN_KEYS - {"embedder", "space_embedders", "text_transform"}:
            if key in raw:
                setattr(cfg, key, raw[key])
        if "embedder" in raw:
            cfg.embedder = _embedder_from(raw["embedder"], str(path))
        if "space_embedders" in raw:
            if not isinstance(raw["space_embedders"], dict):
                raise FormatError(f"{path}: space_embedders must be an object")
            cfg.space_embedders = {
                sid: _embedder_from(e, f"{path}: space {sid!r}")
                for sid, e in raw["space_embedders"].items()
            }
        if "text_transform" in raw and raw["text_transform"] is not None:
            tt = raw["text_transform"]
            if not isinstance(tt, dict) or "url" not in tt:
                raise FormatError(f"{path}: text_transform needs a url")
            cfg.text_transform = TextTransformConfig(**tt)
    env = os.environ if env is None else env
    for var, (attr, cast) in _ENV_OVERRIDES.items():
        if var in env:
            try:
                setattr(cfg, attr, cast(env[var]))
            except ValueError as exc:
                raise FormatError(f"{var}={env[var]!r}: {exc}") from exc
    if cfg.palette_size < 1:
        raise FormatError("palette_size must be >= 1")
    if cfg.default_t < 1:
        raise FormatError("default_t must be >= 1")
    if cfg.neighbor_radius < 0:
        raise FormatError("neighbor_radius must be >= 0")
    return cfg
