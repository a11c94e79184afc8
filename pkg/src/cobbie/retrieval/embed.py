"""Text embedders: a deterministic hashed bag of words and an HTTP endpoint client."""
from __future__ import annotations

import hashlib
import os
from typing import Protocol, Sequence

import httpx
import numpy as np

from .text import tokenize


class Embedder(Protocol):
    name: str
    dim: int

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


class HashingEmbedder:
    """Signed feature hashing of tokens into ``dim`` buckets, L2-normalized."""

    def __init__(self, dim: int = 256):
        self.dim = dim
        self.name = f"hashing-{dim}"

    def _vector(self, text: str) -> np.ndarray:
        v = np.zeros(self.dim)
        for tok in tokenize(text):
            h = int.from_bytes(hashlib.blake2b(tok.encode(), digest_size=8).digest(), "little")
            v[h % self.dim] += 1.0 if (h >> 63) & 1 else -1.0
        n = np.linalg.norm(v)
        return v / n if n else v

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        return np.stack([self._vector(t) for t in texts])


class HttpEmbedder:
    """OpenAI-compatible ``/embeddings`` client."""

    def __init__(self, base_url: str, model_name: str, dim: int, api_key: str | None = None,
                 transport: httpx.BaseTransport | None = None):
        self.base_url = base_url.rstrip("/")
        self.model_name = model_name
        self.dim = dim
        self.name = f"http-{model_name}"
        self.api_key = api_key if api_key is not None else os.environ.get("COBBIE_API_KEY")
        self._client = httpx.Client(timeout=60.0, transport=transport)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        r = self._client.post(f"{self.base_url}/embeddings", json={"model": self.model_name, "input": list(texts)},
                              headers=headers)
        r.raise_for_status()
        out = np.array([d["embedding"] for d in sorted(r.json()["data"], key=lambda d: d["index"])], dtype=float)
        if out.shape != (len(texts), self.dim):
            raise ValueError(f"embedding endpoint returned shape {out.shape}, expected {(len(texts), self.dim)}")
        return out
