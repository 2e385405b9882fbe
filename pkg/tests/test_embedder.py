"""Tests for the mock and HTTP query embedders."""

from __future__ import annotations

import numpy as np
import pytest

from framesift.config import EmbedderConfig, ServiceConfig, TextTransformConfig
from framesift.embedder import (
    EmbedderPool,
    HttpEmbedder,
    HttpTextTransform,
    MockEmbedder,
)
from framesift.errors import EmbedderError


class TestMockEmbedder:
    def test_deterministic(self):
        a = MockEmbedder(seed=0).embed("visual", "a dog", 16)
        b = MockEmbedder(seed=0).embed("visual", "a dog", 16)
        assert np.array_equal(a, b)

    def test_unit_norm(self):
        v = MockEmbedder(seed=1).embed("visual", "anything", 64)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-5)
        assert v.dtype == np.float32
        assert v.shape == (64,)

    def test_distinct_inputs_give_distinct_vectors(self):
        m = MockEmbedder(seed=0)
        base = m.embed("visual", "a dog", 16)
        assert not np.array_equal(base, m.embed("visual", "a cat", 16))
        assert not np.array_equal(base, m.embed("textual", "a dog", 16))
        assert not np.array_equal(base, MockEmbedder(seed=9).embed("visual", "a dog", 16))

    def test_dim_controls_output_length(self):
        m = MockEmbedder(seed=0)
        assert m.embed("s", "x", 8).shape == (8,)
        assert m.embed("s", "x", 256).shape == (256,)


class FakeResponse:
    def __init__(self, payload, status=200):
        self._payload = payload
        self.status_code = status

    def raise_for_status(self):
        import httpx

        if self.status_code >= 400:
            raise httpx.HTTPStatusError("boom", request=None, response=None)

    def json(self):
        if isinstance(self._payload, Exception):
            raise self._payload
        return self._payload


class TestHttpEmbedder:
    def post_returning(self, monkeypatch, payload, status=200):
        import httpx

        calls = {}

        def fake_post(url, json=None, timeout=None):
            calls["url"], calls["json"], calls["timeout"] = url, json, timeout
            return FakeResponse(payload, status)

        monkeypatch.setattr(httpx, "post", fake_post)
        return calls

    def test_posts_text_and_space(self, monkeypatch):
        calls = self.post_returning(monkeypatch, {"vector": [3.0, 4.0]})
        out = HttpEmbedder("http://emb.test/v1", timeout_ms=1500).embed("visual", "a dog", 2)
        assert calls["url"] == "http://emb.test/v1"
        assert calls["json"] == {"text": "a dog", "space_id": "visual"}
        assert calls["timeout"] == pytest.approx(1.5)
        assert np.allclose(out, [0.6, 0.8])  # normalized

    def test_http_error_becomes_embedder_error(self, monkeypatch):
        self.post_returning(monkeypatch, {"vector": [1.0]}, status=500)
        with pytest.raises(EmbedderError, match="embedder at http://emb.test"):
            HttpEmbedder("http://emb.test").embed("s", "x", 1)

    def test_connection_error_becomes_embedder_error(self, monkeypatch):
        import httpx

        def fake_post(url, json=None, timeout=None):
            raise httpx.ConnectError("refused")

        monkeypatch.setattr(httpx, "post", fake_post)
        with pytest.raises(EmbedderError, match="refused"):
            HttpEmbedder("http://emb.test").embed("s", "x", 1)

    def test_missing_vector_key_rejected(self, monkeypatch):
        self.post_returning(monkeypatch, {"embedding": [1.0]})
        with pytest.raises(EmbedderError, match="missing 'vector'"):
            HttpEmbedder("http://emb.test").embed("s", "x", 1)

    def test_wrong_dim_rejected(self, monkeypatch):
        self.post_returning(monkeypatch, {"vector": [1.0, 2.0, 3.0]})
        with pytest.raises(EmbedderError, match="expected a 2-d vector, got 3-d"):
            HttpEmbedder("http://emb.test").embed("s", "x", 2)

    def test_non_numeric_vector_rejected(self, monkeypatch):
        self.post_returning(monkeypatch, {"vector": ["a", "b"]})
        with pytest.raises(EmbedderError, match="non-numeric vector"):
            HttpEmbedder("http://emb.test").embed("s", "x", 2)

    def test_non_finite_vector_rejected(self, monkeypatch):
        self.post_returning(monkeypatch, {"vector": [float("nan"), 1.0]})
        with pytest.raises(EmbedderError, match="non-finite"):
            HttpEmbedder("http://emb.test").embed("s", "x", 2)


class TestHttpTextTransform:
    def test_round_trip(self, monkeypatch):
        import httpx

        def fake_post(url, json=None, timeout=None):
            assert json == {"text": "hi"}
            return FakeResponse({"text": "HI EXPANDED"})

        monkeypatch.setattr(httpx, "post", fake_post)
        t = HttpTextTransform(TextTransformConfig(url="http://t.test"))
        assert t.transform("hi") == "HI EXPANDED"

    def test_missing_text_rejected(self, monkeypatch):
        import httpx

        monkeypatch.setattr(httpx, "post", lambda *a, **k: FakeResponse({"out": "x"}))
        t = HttpTextTransform(TextTransformConfig(url="http://t.test"))
        with pytest.raises(EmbedderError, match="missing 'text'"):
            t.transform("hi")


class TestEmbedderPool:
    def test_mock_by_default(self):
        pool = EmbedderPool(ServiceConfig(mock_seed=5))
        direct = MockEmbedder(seed=5).embed("visual", "q", 8)
        assert np.array_equal(pool.embed("visual", "q", 8), direct)

    def test_per_space_override(self, monkeypatch):
        import httpx

        monkeypatch.setattr(
            httpx, "post", lambda *a, **k: FakeResponse({"vector": [1.0, 0.0]})
        )
        cfg = ServiceConfig(
            space_embedders={"textual": EmbedderConfig(kind="http", url="http://e.test")}
        )
        pool = EmbedderPool(cfg)
        http_vec = pool.embed("textual", "q", 2)
        mock_vec = pool.embed("visual", "q", 2)
        assert np.allclose(http_vec, [1.0, 0.0])
        assert not np.array_equal(http_vec, mock_vec)

    def test_http_instances_cached_per_url(self, monkeypatch):
        import httpx

        monkeypatch.setattr(httpx, "post", lambda *a, **k: FakeResponse({"vector": [1.0]}))
        cfg = ServiceConfig(
            embedder=EmbedderConfig(kind="http", url="http://e.test"),
        )
        pool = EmbedderPool(cfg)
        pool.embed("a", "q", 1)
        pool.embed("b", "q", 1)
        assert len(pool._http) == 1
