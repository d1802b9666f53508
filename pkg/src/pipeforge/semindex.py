"""Embedding provider abstraction plus an exact cosine-similarity index.

The default provider is deterministic feature hashing: lowercased word
unigrams and bigrams hashed into 384 signed bins, then L2-normalized. It is
offline and order-insensitive over the token multiset, and any learned model
can be swapped in behind the same provider interface without touching the
index. Search is an exact full scan: catalog scale makes that cheap, and it
keeps ranking testable against a brute-force oracle.
"""

from __future__ import annotations

import hashlib
import json
import re
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, EmptyText, ZeroVector

DEFAULT_DIM = 384

_INDEX_MAGIC = b"SIDX"
_INDEX_VERSION = 1
_KEY_WIDTH = 64

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class Embedding:
    vector: tuple
    norm: float

    @property
    def dim(self) -> int:
        return len(self.vector)


def tokenize(text: str) -> List[str]:
    """Lowercased word unigrams plus adjacent bigrams joined with '_'."""
    words = _TOKEN_RE.findall(text.lower())
    bigrams = [f"{a}_{b}" for a, b in zip(words, words[1:])]
    return words + bigrams


class HashingEmbedder:
    """Signed feature hashing over a token multiset; order-insensitive.

    Components are kept as raw signed counts (exactly representable in
    float64) with the L2 norm carried alongside; normalization happens inside
    the cosine computation. Integer dot products are order-independent, which
    makes rankings bit-identical between the index scan and a per-pair oracle.
    """

    provider_id = "feature-hashing/1"

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim

    def embed_tokens(self, tokens: Iterable[str]) -> Embedding:
        vec = np.zeros(self.dim, dtype=np.float64)
        for tok in tokens:
            digest = hashlib.blake2b(tok.encode("utf-8"), digest_size=8).digest()
            value = int.from_bytes(digest, "little")
            sign = 1.0 if (value >> 63) & 1 == 0 else -1.0
            vec[value % self.dim] += sign
        norm = float(np.linalg.norm(vec))
        return Embedding(vector=tuple(float(x) for x in vec), norm=norm)

    def embed(self, text: str) -> Embedding:
        if not text or not text.strip():
            raise EmptyText("cannot embed empty text")
        return self.embed_tokens(tokenize(text))


def similarity(a: Embedding, b: Embedding) -> float:
    """Cosine similarity: a.b / (|a||b|)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.dim} vs {b.dim}")
    if a.norm == 0 or b.norm == 0:
        raise ZeroVector("cosine undefined for zero vector")
    dot = float(np.dot(np.asarray(a.vector), np.asarray(b.vector)))
    return dot / (a.norm * b.norm)


class VectorIndex:
    """Keyed store of embeddings with exact top-k cosine search.

    Writes are serialized; queries run on a consistent snapshot taken under
    the lock, so an in-flight upsert is never half-visible.
    """

    def __init__(self, embedder: Optional[HashingEmbedder] = None):
        self.embedder = embedder or HashingEmbedder()
        self._lock = threading.RLock()
        self._entries: dict = {}  # key -> (Embedding, payload)
        self._matrix: Optional[np.ndarray] = None
        self._norms: Optional[np.ndarray] = None
        self._keys: List[str] = []

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def __contains__(self, key: str) -> bool:
        with self._lock:
            return key in self._entries

    def upsert(self, key: str, text: str) -> Embedding:
        emb = self.embedder.embed(text)
        with self._lock:
            self._entries[key] = (emb, text)
            self._matrix = None
        return emb

    def remove(self, key: str) -> None:
        with self._lock:
            self._entries.pop(key, None)
            self._matrix = None

    def get(self, key: str):
        with self._lock:
            entry = self._entries.get(key)
        return entry

    def embedding(self, key: str) -> Optional[Embedding]:
        entry = self.get(key)
        return entry[0] if entry else None

    def _snapshot(self):
        with self._lock:
            if self._matrix is None:
                self._keys = sorted(self._entries)
                if self._keys:
                    self._matrix = np.array(
                        [self._entries[k][0].vector for k in self._keys], dtype=np.float64)
                    self._norms = np.array(
                        [self._entries[k][0].norm for k in self._keys], dtype=np.float64)
                else:
                    self._matrix = np.zeros((0, self.embedder.dim))
                    self._norms = np.zeros(0)
            return self._keys, self._matrix, self._norms

    def query(self, q: Embedding, k: int) -> List[Tuple[str, float]]:
        """Top-k by descending cosine; ties broken lexicographically by key."""
        if k < 1:
            raise ValueError("k must be >= 1")
        keys, matrix, norms = self._snapshot()
        if not keys:
            return []
        if q.norm == 0:
            raise ZeroVector("cosine undefined for zero vector")
        dots = matrix @ np.asarray(q.vector)
        # Same expression shape as similarity(): dot / (norm_a * norm_b), so
        # results are bit-identical to the per-pair path.
        sims = dots / (norms * q.norm)
        order = sorted(range(len(keys)), key=lambda i: (-sims[i], keys[i]))
        top = order[: min(k, len(keys))]
        return [(keys[i], float(sims[i])) for i in top]

    def query_text(self, text: str, k: int) -> List[Tuple[str, float]]:
        return self.query(self.embedder.embed(text), k)

    # -- persistence ---------------------------------------------------------

    def save(self, path) -> None:
        """Binary layout: magic, version, dim, count, fixed-width records of
        (64-byte key, float64 norm, dim float64s), then a JSON payload table.
        """
        path = Path(path)
        with self._lock:
            items = sorted(self._entries.items())
            dim = self.embedder.dim
        with open(path, "wb") as f:
            f.write(_INDEX_MAGIC)
            f.write(struct.pack("<III", _INDEX_VERSION, dim, len(items)))
            for key, (emb, _payload) in items:
                raw = key.encode("utf-8")
                if len(raw) > _KEY_WIDTH:
                    raise ValueError(f"key too long for index record: {key!r}")
                f.write(raw.ljust(_KEY_WIDTH, b"\x00"))
                f.write(struct.pack("<d", emb.norm))
                f.write(struct.pack(f"<{dim}d", *emb.vector))
            payloads = {key: payload for key, (_e, payload) in items}
            f.write(json.dumps(payloads, sort_keys=True, ensure_ascii=False).encode("utf-8"))

    @classmethod
    def load(cls, path, embedder: Optional[HashingEmbedder] = None) -> "VectorIndex":
        path = Path(path)
        data = path.read_bytes()
        if data[:4] != _INDEX_MAGIC:
            raise ValueError(f"{path}: not an index file")
        version, dim, count = struct.unpack("<III", data[4:16])
        if version != _INDEX_VERSION:
            raise ValueError(f"{path}: unsupported index version {version}")
        index = cls(embedder or HashingEmbedder(dim=dim))
        offset = 16
        record = _KEY_WIDTH + 8 + dim * 8
        entries = {}
        for _ in range(count):
            chunk = data[offset:offset + record]
            key = chunk[:_KEY_WIDTH].rstrip(b"\x00").decode("utf-8")
            norm = struct.unpack("<d", chunk[_KEY_WIDTH:_KEY_WIDTH + 8])[0]
            vector = struct.unpack(f"<{dim}d", chunk[_KEY_WIDTH + 8:])
            entries[key] = (Embedding(vector=vector, norm=norm), "")
            offset += record
        payloads = json.loads(data[offset:].decode("utf-8")) if offset < len(data) else {}
        for key, payload in payloads.items():
            if key in entries:
                entries[key] = (entries[key][0], payload)
        index._entries = entries
        return index
