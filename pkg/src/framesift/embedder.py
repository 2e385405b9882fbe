"""Query-text embedding backends.

The engine asks an embedder for one vector per model space.  The mock backend
is fully deterministic (hash of seed, space, and text) so search results are
reproducible without any model server; the HTTP backend posts to a real one.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import httpx
import numpy as np

from .config import EmbedderConfig, ServiceConfig, TextTransformConfig
from .errors import EmbedderError
from .store import normalize_rows


def _unit(vec: np.ndarray, dim: int, origin: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float32).reshape(-1)
    if vec.shape[0] != dim:
        raise EmbedderError(f"{origin}: expected a {dim}-d vector, got {vec.shape[0]}-d")
    if not np.all(np.isfinite(vec)):
        raise EmbedderError(f"{origin}: vector contains non-finite values")
    unit, _ = normalize_rows(vec[None, :])
    return unit[0]


class MockEmbedder:
    """Deterministic stand-in: sha256(seed|space|text) seeds a Gaussian draw."""

    def __init__(self, seed: int = 0) -> None:
        self.seed = seed

    def embed(self, space_id: str, text: str, dim: int) -> np.ndarray:
        digest = hashlib.sha256(f"{self.seed}|{space_id}|{text}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return _unit(rng.standard_normal(dim), dim, f"mock embedder for {space_id!r}")


class HttpEmbedder:
    """POSTs {"text", "space_id"} to an embedding server, expects {"vector": [...]}."""

    def __init__(self, url: str, timeout_ms: int = 5000) -> None:
        self.url = url
        self.timeout = timeout_ms / 1000.0

    def embed(self, space_id: str, text: str, dim: int) -> np.ndarray:
        try:
            resp = httpx.post(
                self.url, json={"text": text, "space_id": space_id}, timeout=self.timeout
            )
            resp.raise_for_status()
            payload = resp.json()
        except httpx.HTTPError as exc:
            raise EmbedderError(f"embedder at {self.url}: {exc}") from exc
        except ValueError as exc:
            raise EmbedderError(f"embedder at {self.url}: invalid JSON response") from exc
        if not isinstance(payload, dict) or "vector" not in payload:
            raise EmbedderError(f"embedder at {self.url}: response missing 'vector'")
        try:
            vec = np.asarray(payload["vector"], dtype=np.float32)
        except (TypeError, ValueError) as exc:
            raise EmbedderError(f"embedder at {self.url}: non-numeric vector") from exc
        return _unit(vec, dim, f"embedder at {self.url}")


class HttpTextTransform:
    """POSTs {"text"} to a rewriting server, expects {"text": "..."}."""

    def __init__(self, cfg: TextTransformConfig) -> None:
        self.url = cfg.url
        self.timeout = cfg.timeout_ms / 1000.0

    def transform(self, text: str) -> str:
        try:
            resp = httpx.post(self.url, json={"text": text}, timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
        except httpx.HTTPError as exc:
            raise EmbedderError(f"text transform at {self.url}: {exc}") from exc
        except ValueError as exc:
            raise EmbedderError(f"text transform at {self.url}: invalid JSON response") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            raise EmbedderError(f"text transform at {self.url}: response missing 'text'")
        return payload["text"]


@dataclass
class EmbedderPool:
    """Resolves the configured embedder for each space, caching instances."""

    config: ServiceConfig

    def __post_init__(self) -> None:
        self._mock = MockEmbedder(seed=self.config.mock_seed)
        self._http: dict[str, HttpEmbedder] = {}

    def embed(self, space_id: str, text: str, dim: int) -> np.ndarray:
        cfg: EmbedderConfig = self.config.embedder_for(space_id)
        if cfg.kind == "mock":
            return self._mock.embed(space_id, text, dim)
        if cfg.url not in self._http:
            self._http[cfg.url] = HttpEmbedder(cfg.url, cfg.timeout_ms)
        return self._http[cfg.url].embed(space_id, text, dim)
