"""Tests for JSON + environment service configuration."""

from __future__ import annotations

import json

import pytest

from framesift.config import (
    DEFAULT_NEIGHBOR_RADIUS,
    DEFAULT_PALETTE_SIZE,
    DEFAULT_TOP_T,
    EmbedderConfig,
    ServiceConfig,
    load_config,
)
from framesift.errors import FormatError


def write(tmp_path, obj):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


class TestDefaults:
    def test_no_file_no_env(self):
        cfg = load_config(None, env={})
        assert cfg.host == "127.0.0.1"
        assert cfg.port == 8000
        assert cfg.palette_size == DEFAULT_PALETTE_SIZE == 12
        assert cfg.default_t == DEFAULT_TOP_T == 100
        assert cfg.neighbor_radius == DEFAULT_NEIGHBOR_RADIUS == 4
        assert cfg.mock_seed == 0
        assert cfg.embedder.kind == "mock"
        assert cfg.space_embedders == {}
        assert cfg.text_transform is None

    def test_embedder_for_falls_back_to_global(self):
        cfg = ServiceConfig(
            space_embedders={"textual": EmbedderConfig(kind="http", url="http://e")}
        )
        assert cfg.embedder_for("textual").kind == "http"
        assert cfg.embedder_for("visual").kind == "mock"


class TestFile:
    def test_full_file(self, tmp_path):
        path = write(
            tmp_path,
            {
                "host": "0.0.0.0",
                "port": 9001,
                "palette_size": 6,
                "default_t": 25,
                "neighbor_radius": 2,
                "mock_seed": 42,
                "media_root": "/data/media",
                "embedder": {"kind": "http", "url": "http://emb:9000", "timeout_ms": 800},
                "space_embedders": {"textual": {"kind": "mock"}},
                "text_transform": {"url": "http://rewrite:9000", "timeout_ms": 700},
            },
        )
        cfg = load_config(path, env={})
        assert cfg.host == "0.0.0.0"
        assert cfg.port == 9001
        assert cfg.palette_size == 6
        assert cfg.default_t == 25
        assert cfg.neighbor_radius == 2
        assert cfg.mock_seed == 42
        assert cfg.media_root == "/data/media"
        assert cfg.embedder.url == "http://emb:9000"
        assert cfg.space_embedders["textual"].kind == "mock"
        assert cfg.text_transform.url == "http://rewrite:9000"
        assert cfg.text_transform.timeout_ms == 700

    def test_unknown_key_rejected(self, tmp_path):
        path = write(tmp_path, {"prot": 8000})
        with pytest.raises(FormatError, match="unknown config keys \\['prot'\\]"):
            load_config(path, env={})

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(FormatError, match="invalid JSON"):
            load_config(path, env={})

    def test_non_object_root_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(FormatError, match="root must be an object"):
            load_config(path, env={})

    def test_type_errors_named(self, tmp_path):
        with pytest.raises(FormatError, match="port must be an integer"):
            load_config(write(tmp_path, {"port": "8000"}), env={})
        with pytest.raises(FormatError, match="host must be a string"):
            load_config(write(tmp_path, {"host": 7}), env={})

    def test_bad_embedder_kind_rejected(self, tmp_path):
        path = write(tmp_path, {"embedder": {"kind": "grpc"}})
        with pytest.raises(FormatError, match="unknown embedder kind 'grpc'"):
            load_config(path, env={})

    def test_http_embedder_requires_url(self, tmp_path):
        path = write(tmp_path, {"embedder": {"kind": "http"}})
        with pytest.raises(FormatError, match="requires a url"):
            load_config(path, env={})

    def test_unknown_embedder_field_rejected(self, tmp_path):
        path = write(tmp_path, {"embedder": {"kind": "mock", "retries": 3}})
        with pytest.raises(FormatError, match="retries"):
            load_config(path, env={})

    def test_text_transform_needs_url(self, tmp_path):
        path = write(tmp_path, {"text_transform": {"timeout_ms": 5}})
        with pytest.raises(FormatError, match="text_transform needs a url"):
            load_config(path, env={})


class TestEnvOverrides:
    def test_env_beats_file(self, tmp_path):
        path = write(tmp_path, {"port": 9001, "host": "0.0.0.0"})
        cfg = load_config(path, env={"FRAMESIFT_PORT": "9002"})
        assert cfg.port == 9002
        assert cfg.host == "0.0.0.0"

    def test_each_override(self):
        env = {
            "FRAMESIFT_HOST": "example.host",
            "FRAMESIFT_PORT": "81",
            "FRAMESIFT_PALETTE_SIZE": "5",
            "FRAMESIFT_DEFAULT_T": "7",
            "FRAMESIFT_MOCK_SEED": "3",
            "FRAMESIFT_MEDIA_ROOT": "/m",
            "FRAMESIFT_FRONTEND_DIST": "/f",
        }
        cfg = load_config(None, env=env)
        assert (cfg.host, cfg.port, cfg.palette_size) == ("example.host", 81, 5)
        assert (cfg.default_t, cfg.mock_seed) == (7, 3)
        assert (cfg.media_root, cfg.frontend_dist) == ("/m", "/f")

    def test_non_integer_env_rejected(self):
        with pytest.raises(FormatError, match="FRAMESIFT_PORT='x'"):
            load_config(None, env={"FRAMESIFT_PORT": "x"})


class TestRangeChecks:
    def test_palette_size_positive(self, tmp_path):
        with pytest.raises(FormatError, match="palette_size"):
            load_config(write(tmp_path, {"palette_size": 0}), env={})

    def test_default_t_positive(self, tmp_path):
        with pytest.raises(FormatError, match="default_t"):
            load_config(write(tmp_path, {"default_t": 0}), env={})

    def test_neighbor_radius_non_negative(self, tmp_path):
        with pytest.raises(FormatError, match="neighbor_radius"):
            load_config(write(tmp_path, {"neighbor_radius": -1}), env={})

    def test_embedder_timeout_positive(self):
        with pytest.raises(FormatError, match="timeout_ms must be positive"):
            EmbedderConfig(kind="mock", timeout_ms=0)
