"""Text-similarity providers returning scores in [0, 1].

Three interchangeable kinds: a deterministic lexical fallback, a table of
precomputed sentence vectors, and a client for a remote embedding service.
Both the agreement score and the heuristic dialog memory take any of them.
"""

from __future__ import annotations

import json
import re
import threading
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Protocol, Sequence, Union

import httpx
import numpy as np

from .errors import CGError, EmbeddingServiceError

#: How to map raw cosine values onto [0, 1].
COSINE_MODES = ("clamp", "rescale")

_TOKEN_RE = re.compile(r"\w+")


def as_vector(values: Sequence[float]) -> np.ndarray:
    """Validate and convert an embedding vector: non-empty, all finite."""
    vec = np.asarray(values, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise CGError("embedding vector must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(vec)):
        raise CGError("embedding vector contains non-finite values")
    return vec


def cosine01(u: Sequence[float], v: Sequence[float], mode: str = "clamp") -> float:
    """Cosine similarity mapped onto [0, 1].

    ``clamp`` truncates negative cosines to 0 so unrelated pairs score ~0;
    ``rescale`` maps [-1, 1] affinely onto [0, 1] instead.
    """
    if mode not in COSINE_MODES:
        raise CGError(f"unknown cosine mode: {mode!r}")
    a = as_vector(u)
    b = as_vector(v)
    if a.shape != b.shape:
        raise CGError(f"dimension mismatch: {a.size} vs {b.size}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise CGError("zero vector has no direction")
    cos = float(np.dot(a, b) / (norm_a * norm_b))
    cos = max(-1.0, min(1.0, cos))
    if mode == "rescale":
        return (1.0 + cos) / 2.0
    return max(0.0, cos)


def tokenize(text: str) -> frozenset:
    """Lower-cased, punctuation-stripped token set."""
    return frozenset(_TOKEN_RE.findall(text.lower()))


def lexical_similarity(a: str, b: str) -> float:
    """Jaccard coefficient over token sets; two empty sets count as identical."""
    ta, tb = tokenize(a), tokenize(b)
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


class SimilarityProvider(Protocol):
    """Anything that scores two event strings in [0, 1]."""

    kind: str

    def similarity(self, a: str, b: str) -> float: ...


class LexicalSimilarity:
    """Deterministic token-overlap provider; the no-dependency fallback."""

    kind = "lexical"

    def similarity(self, a: str, b: str) -> float:
        return lexical_similarity(a, b)


class PrecomputedVectors:
    """Cosine over vectors read from a JSON Lines file keyed by exact text.

    Unknown text is an error rather than a silent zero: a silent miss would
    bias every downstream score without leaving a trace.
    """

    kind = "precomputed"

    def __init__(self, vectors: Dict[str, np.ndarray], mode: str = "clamp"):
        self.vectors = {text: as_vector(vec) for text, vec in vectors.items()}
        self.mode = mode

    @classmethod
    def from_jsonl(cls, path: Union[str, Path], mode: str = "clamp") -> "PrecomputedVectors":
        vectors: Dict[str, np.ndarray] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                vectors[row["text"]] = as_vector(row["vector"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CGError(f"bad vectors line {lineno}: {exc}") from exc
        return cls(vectors, mode=mode)

    def _vector(self, text: str) -> np.ndarray:
        try:
            return self.vectors[text]
        except KeyError:
            raise CGError(f"no precomputed vector for text: {text!r}") from None

    def similarity(self, a: str, b: str) -> float:
        return cosine01(self._vector(a), self._vector(b), mode=self.mode)


class RemoteEmbeddings:
    """Client for the embedding service: POST {base}/v1/embed.

    Request body is ``{"texts": [...]}``, response ``{"vectors": [[...]]}``.
    Vectors are cached by exact text; the cache never changes scores, only
    traffic. An optional fallback provider absorbs transport failures.
    """

    kind = "remote"

    def __init__(
        self,
        base_url: str,
        mode: str = "clamp",
        timeout: float = 30.0,
        fallback: Optional[SimilarityProvider] = None,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.mode = mode
        self.fallback = fallback
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._cache: Dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def close(self) -> None:
        self._client.close()

    def _fetch(self, texts: List[str]) -> List[np.ndarray]:
        try:
            response = self._client.post(f"{self.base_url}/v1/embed", json={"texts": texts})
            response.raise_for_status()
            payload = response.json()
        except (httpx.HTTPError, json.JSONDecodeError) as exc:
            raise EmbeddingServiceError(f"embedding request failed: {exc}") from exc
        vectors = payload.get("vectors") if isinstance(payload, dict) else None
        if not isinstance(vectors, list):
            raise EmbeddingServiceError("malformed response: missing 'vectors' list")
        if len(vectors) != len(texts):
            raise EmbeddingServiceError(
                f"count mismatch: sent {len(texts)} texts, got {len(vectors)} vectors"
            )
        try:
            out = [as_vector(v) for v in vectors]
        except CGError as exc:
            raise EmbeddingServiceError(f"malformed vector in response: {exc}") from exc
        dims = {v.size for v in out}
        if len(dims) > 1:
            raise EmbeddingServiceError(f"dimension inconsistency across batch: {sorted(dims)}")
        return out

    def embed(self, texts: Iterable[str]) -> List[np.ndarray]:
        """Embed a batch, order-preserving; results are cached by text."""
        texts = list(texts)
        if not texts:
            return []
        with self._lock:
            missing = [t for t in dict.fromkeys(texts) if t not in self._cache]
        if missing:
            fetched = self._fetch(missing)
            with self._lock:
                self._cache.update(zip(missing, fetched))
        with self._lock:
            return [self._cache[t] for t in texts]

    def similarity(self, a: str, b: str) -> float:
        try:
            va, vb = self.embed([a, b])
        except EmbeddingServiceError:
            if self.fallback is None:
                raise
            return self.fallback.similarity(a, b)
        return cosine01(va, vb, mode=self.mode)


def remote_embed(base_url: str, texts: Iterable[str], **kwargs) -> List[np.ndarray]:
    """One-shot batch embedding against a service endpoint."""
    client = RemoteEmbeddings(base_url, **kwargs)
    try:
        return client.embed(texts)
    finally:
        client.close()
