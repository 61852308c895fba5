# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Text encoders turning a prompt document into a fixed-length, L2-normalized vector.

`HashEncoder` is built in and deterministic. `RemoteEncoder` asks an embedding service over HTTP
(requires `httpx`, installed with the `remote` extra).
"""

import hashlib
import logging
import re

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from types import TracebackType
from typing import Any, Optional, Self, Sequence

import numpy as np

logger = logging.getLogger(__name__)

TEXT_DIM = 128

HASH_CACHE_SIZE = 4096

_TOKEN = re.compile(r"[a-z]+|\d+(?:\.\d+)?")


class EncoderError(RuntimeError):
    """Raised when a text encoder cannot produce an embedding."""


def l2_normalize(vector: np.ndarray) -> np.ndarray:
    """Scale a vector to unit length; the zero vector is returned unchanged."""
    norm = float(np.linalg.norm(vector))
    return vector / norm if norm > 0 else vector


def tokenize(text: str) -> list[str]:
    """Split a text on whitespace and punctuation, keeping decimal numbers whole."""
    return _TOKEN.findall(text.lower())


class TextEncoder(ABC):
    """Interface of the text encoders.

    Encoders are context managers; leaving the block releases what they hold.
    """

    def __enter__(self) -> Self:
        return self

    def __exit__(self, exc_type: Optional[type[BaseException]], exc: Optional[BaseException],
                 tb: Optional[TracebackType]) -> None:
        self.close()

    def close(self) -> None:
        """Release the resources of the encoder."""

    @property
    def dim(self) -> int:
        return TEXT_DIM

    @property
    def name(self) -> str:
        return type(self).__name__

    @abstractmethod
    def encode(self, text: str) -> np.ndarray:
        """Encode a document.

        Raises:
            EncoderError: If the encoder fails.
        """
        ...

    def encode_fragments(self, fragments: Sequence[str]) -> np.ndarray:
        """Encode the document made of fragments joined with `", "`."""
        return self.encode(", ".join(fragments))


class HashEncoder(TextEncoder):
    """Signed feature hashing of word and number tokens.

    Each token is hashed with BLAKE2b; the hash selects one of the buckets and a sign. Token
    counts of the most recent fragments are kept in a thread-safe LRU cache, so re-encoding a
    prompt where few fragments changed only tokenizes the new ones. One encoder can serve several
    concurrent runs.
    """

    def __init__(self, dim: int = TEXT_DIM, cache_size: int = HASH_CACHE_SIZE) -> None:
        if dim < 1:
            raise ValueError("The embedding size must be positive")
        if cache_size < 0:
            raise ValueError("The cache size must not be negative")
        self._dim = dim
        self._cache_size = cache_size
        self._counts = lru_cache(maxsize=cache_size)(self._count_tokens)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def cache_size(self) -> int:
        """Maximum number of cached fragments."""
        return self._cache_size

    def _bucket(self, token: str) -> tuple[int, float]:
        h = int.from_bytes(hashlib.blake2b(token.encode('utf-8'), digest_size=8).digest(), 'little')
        return h % self._dim, (1.0 if (h >> 63) & 1 == 0 else -1.0)

    def _count_tokens(self, text: str) -> np.ndarray:
        counts = np.zeros(self._dim)
        for token in tokenize(text):
            bucket, sign = self._bucket(token)
            counts[bucket] += sign
        counts.setflags(write=False)
        return counts

    def raw_counts(self, text: str) -> np.ndarray:
        """The unnormalized signed bucket counts of a text, read-only."""
        return self._counts(text)

    def close(self) -> None:
        self._counts.cache_clear()

    def encode(self, text: str) -> np.ndarray:
        return l2_normalize(np.array(self.raw_counts(text)))

    def encode_fragments(self, fragments: Sequence[str]) -> np.ndarray:
        total = np.zeros(self._dim)
        for fragment in fragments:
            total = total + self.raw_counts(fragment)
        return l2_normalize(total)


@dataclass(frozen=True)
class RemoteEncoderConfig:
    """Settings of the embedding-service client.

    Attributes:
        url: The endpoint receiving `POST {"text": ...}` and answering `{"embedding": [...]}`.
        timeout: Request timeout, in seconds. Defaults to 10.
        seed: Seed of the fixed projection applied when the service returns another size.
    """
    url: str
    timeout: float = 10.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.url:
            raise ValueError("The encoder URL must not be empty")
        if not self.timeout > 0:
            raise ValueError("The encoder timeout must be positive")


class RemoteEncoder(TextEncoder):
    """Client of an HTTP embedding service.

    Embeddings of another size than 128 are mapped through a fixed seeded random projection, then
    normalized. The underlying `httpx.Client` can be shared between threads.
    """

    def __init__(self, config: RemoteEncoderConfig, transport: Optional[Any] = None) -> None:
        try:
            import httpx
        except ImportError:
            raise ImportError("httpx is not installed. Please re-install carbonshop with the remote feature.")
        self.config = config
        self._httpx = httpx
        self._client = httpx.Client(timeout=config.timeout, transport=transport)
        self._projections: dict[int, np.ndarray] = {}

    def close(self) -> None:
        self._client.close()

    @property
    def closed(self) -> bool:
        return self._client.is_closed

    def _projection(self, size: int) -> np.ndarray:
        if size not in self._projections:
            rng = np.random.default_rng([self.config.seed, size])
            self._projections[size] = rng.normal(0.0, 1.0 / np.sqrt(size), size=(TEXT_DIM, size))
        return self._projections[size]

    def encode(self, text: str) -> np.ndarray:
        try:
            response = self._client.post(self.config.url, json={"text": text})
            response.raise_for_status()
            payload = response.json()
        except (self._httpx.HTTPError, ValueError) as e:
            raise EncoderError(f"Embedding service at {self.config.url} failed: {e}") from e
        embedding = payload.get("embedding") if isinstance(payload, dict) else None
        if not isinstance(embedding, list) or not embedding:
            raise EncoderError(f"Embedding service at {self.config.url} returned no embedding")
        try:
            vector = np.array([float(v) for v in embedding], dtype=np.float64)
        except (TypeError, ValueError):
            raise EncoderError("Embedding contains non-numeric values") from None
        if not np.all(np.isfinite(vector)):
            raise EncoderError("Embedding contains non-finite values")
        if vector.shape[0] != TEXT_DIM:
            logger.debug(f"Projecting remote embedding of size {vector.shape[0]} to {TEXT_DIM}")
            vector = self._projection(vector.shape[0]) @ vector
        return l2_normalize(vector)


def encode_text(prompt: str | Any, encoder: TextEncoder) -> np.ndarray:
    """Encode a prompt document or a prompt record (anything with `fragments`).

    An empty prompt encodes to the zero vector without consulting the encoder.
    """
    if isinstance(prompt, str):
        return encoder.encode(prompt) if prompt else np.zeros(encoder.dim)
    fragments = tuple(prompt.fragments)
    return encoder.encode_fragments(fragments) if fragments else np.zeros(encoder.dim)
