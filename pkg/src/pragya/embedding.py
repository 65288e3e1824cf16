"""Text embedding: remote model-server client and offline hashing embedder.

Both kinds produce L2-normalized vectors, so the inner product downstream
is exactly cosine similarity.

The hashing embedder is a deterministic feature-hashed bag of words:
lowercase, split on non-alphanumeric codepoints, hash each token with
FNV-1a 64, accumulate +/-1 into bucket ``hash mod dim`` (sign from bit 63),
then normalize. It exists so tests and the evaluation harness run with no
external services; it is lexical, not semantic.

The remote kind speaks the local model server's wire format:
POST {endpoint_url}/api/embeddings with {"model": ..., "prompt": ...},
response {"embedding": [...]}.
"""

from __future__ import annotations

import os
import re
import threading
import time
from dataclasses import dataclass

import httpx
import numpy as np

from .errors import PragyaError, RemoteMalformed, RemoteUnavailable

ENV_EMBED_URL = "PRAGYA_EMBED_URL"
ENV_EMBED_MODEL = "PRAGYA_EMBED_MODEL"

NORM_TOLERANCE = 1e-6
MAX_INFLIGHT_REQUESTS = 4

# Runs of Unicode alphanumerics (\w minus underscore); everything else splits.
_TOKEN_RE = re.compile(r"[^\W_]+")

FNV64_OFFSET_BASIS = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_U64_MASK = (1 << 64) - 1


class EmbeddingError(PragyaError):
    code = "embedding_error"


class EmptyText(EmbeddingError):
    code = "empty_text"


class ZeroVector(EmbeddingError):
    code = "zero_vector"


def fnv1a_64(data: bytes) -> int:
    """FNV-1a 64-bit hash of ``data``."""
    h = FNV64_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _U64_MASK
    return h


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric codepoints; drops empties."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A unit-norm vector of float64 values."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("embedding must be a non-empty 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding contains non-finite values")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"embedding is not unit-normalized (norm={norm!r})")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    @classmethod
    def normalized(cls, raw) -> "EmbeddingVector":
        """Build from arbitrary finite values, L2-normalizing them."""
        arr = np.asarray(raw, dtype=np.float64)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ZeroVector("cannot normalize an all-zero vector")
        return cls(arr / norm)


@dataclass(frozen=True)
class EmbedderConfig:
    kind: str  # "remote" | "hashing"
    endpoint_url: str | None = None
    model_name: str | None = None
    dim: int = 256
    timeout: float = 30.0
    max_retries: int = 2

    def __post_init__(self):
        if self.kind not in ("remote", "hashing"):
            raise ValueError(f"unknown embedder kind {self.kind!r}")
        if self.kind == "remote":
            if not self.endpoint_url or not self.model_name:
                raise ValueError("remote embedder requires endpoint_url and model_name")
        elif self.dim < 8:
            raise ValueError("hashing embedder requires dim >= 8")

    @classmethod
    def hashing(cls, dim: int = 256) -> "EmbedderConfig":
        return cls(kind="hashing", dim=dim)

    @classmethod
    def remote(
        cls,
        endpoint_url: str | None = None,
        model_name: str | None = None,
        timeout: float = 30.0,
        max_retries: int = 2,
    ) -> "EmbedderConfig":
        """Remote config; endpoint and model fall back to environment vars."""
        return cls(
            kind="remote",
            endpoint_url=endpoint_url or os.environ.get(ENV_EMBED_URL),
            model_name=model_name or os.environ.get(ENV_EMBED_MODEL),
            timeout=timeout,
            max_retries=max_retries,
        )


def _hash_embed(dim: int, text: str) -> EmbeddingVector:
    tokens = tokenize(text)
    vec = np.zeros(dim, dtype=np.float64)
    for token in tokens:
        h = fnv1a_64(token.encode("utf-8"))
        sign = 1.0 if (h >> 63) == 0 else -1.0
        vec[h % dim] += sign
    return EmbeddingVector.normalized(vec)


class Embedder:
    """Embedding handle over one config.

    Safe for concurrent use; the remote kind bounds in-flight HTTP requests
    and enforces a constant response dimension for the handle's lifetime.
    """

    def __init__(self, config: EmbedderConfig):
        self.config = config
        self._dim_seen: int | None = None
        self._lock = threading.Lock()
        self._inflight = threading.BoundedSemaphore(MAX_INFLIGHT_REQUESTS)
        self._client: httpx.Client | None = None
        if config.kind == "remote":
            self._client = httpx.Client(timeout=config.timeout)

    @property
    def dim(self) -> int | None:
        """Vector dimension, if known (remote: after the first call)."""
        if self.config.kind == "hashing":
            return self.config.dim
        return self._dim_seen

    def close(self) -> None:
        if self._client is not None:
            self._client.close()

    def __enter__(self) -> "Embedder":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def embed(self, text: str) -> EmbeddingVector:
        if not text or not text.strip():
            raise EmptyText("cannot embed empty text")
        if self.config.kind == "hashing":
            return _hash_embed(self.config.dim, text)
        return self._embed_remote(text)

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        out: list[EmbeddingVector] = []
        for i, text in enumerate(texts):
            try:
                out.append(self.embed(text))
            except PragyaError as exc:
                err = type(exc)(f"batch item {i}: {exc}")
                err.index = i
                raise err from exc
        return out

    def _embed_remote(self, text: str) -> EmbeddingVector:
        cfg = self.config
        url = cfg.endpoint_url.rstrip("/") + "/api/embeddings"
        payload = {"model": cfg.model_name, "prompt": text}
        attempts = cfg.max_retries + 1
        for attempt in range(attempts):
            try:
                with self._inflight:
                    response = self._client.post(url, json=payload)
                break
            except (httpx.ConnectError, httpx.TimeoutException) as exc:
                if attempt + 1 >= attempts:
                    raise RemoteUnavailable(
                        f"embedding server unreachable after {attempts} attempts: {exc}"
                    ) from exc
                time.sleep(0.5 * 2**attempt)

        if 400 <= response.status_code < 500:
            raise RemoteMalformed(f"embedding server returned HTTP {response.status_code}")
        if response.status_code != 200:
            raise RemoteUnavailable(f"embedding server returned HTTP {response.status_code}")
        try:
            body = response.json()
            values = body["embedding"]
        except (ValueError, KeyError, TypeError) as exc:
            raise RemoteMalformed(f"embedding response is not valid JSON with 'embedding': {exc}") from exc
        if not isinstance(values, list) or not values:
            raise RemoteMalformed("embedding response field 'embedding' is not a non-empty list")
        try:
            vector = EmbeddingVector.normalized(values)
        except (ZeroVector, ValueError, TypeError) as exc:
            raise RemoteMalformed(f"embedding response values unusable: {exc}") from exc

        with self._lock:
            if self._dim_seen is None:
                self._dim_seen = vector.dim
            elif vector.dim != self._dim_seen:
                raise RemoteMalformed(
                    f"embedding dimension changed mid-session: "
                    f"{self._dim_seen} -> {vector.dim}"
                )
        return vector


def embed(config: EmbedderConfig, text: str) -> EmbeddingVector:
    """One-shot embed; prefer a long-lived Embedder for repeated calls."""
    with Embedder(config) as embedder:
        return embedder.embed(text)


def embed_batch(config: EmbedderConfig, texts: list[str]) -> list[EmbeddingVector]:
    with Embedder(config) as embedder:
        return embedder.embed_batch(texts)
