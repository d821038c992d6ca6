"""Sentence encoders behind a tiny common interface.

Two families are supported. ``hash:<dim>`` is a deterministic offline
encoder: each text is hashed and the hash seeds a fixed-dimension
gaussian draw, so equal texts always map to equal vectors and no model
files are needed. Any other identifier is treated as a
sentence-transformers model name and loaded lazily, so the heavy
dependency is only imported when such a model is actually requested.
"""

from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import numpy as np

from embed_export.errors import ModelLoadError

_HASH_PREFIX = "hash:"
_MAX_HASH_DIM = 8192


class Encoder(Protocol):
    """What export_embeddings needs from a model."""

    name: str
    dim: int

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        """Return one row per text, shape (len(texts), dim). Rows need not
        be normalized; the export layer normalizes before writing."""
        ...


class HashEncoder:
    """Deterministic text-to-vector map with no model weights.

    The digest of the text seeds a PRNG that draws the vector, so the
    mapping is stable across runs and machines. Useful for pipeline
    plumbing and tests; the vectors carry no semantics.
    """

    def __init__(self, dim: int):
        if dim < 1 or dim > _MAX_HASH_DIM:
            raise ModelLoadError(f"hash encoder dim must be in 1..{_MAX_HASH_DIM}, got {dim}")
        self.name = f"hash:{dim}"
        self.dim = dim

    def _one(self, text: str) -> np.ndarray:
        digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
        seed = int.from_bytes(digest, "little")
        rng = np.random.default_rng(seed)
        return rng.standard_normal(self.dim)

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.stack([self._one(t) for t in texts])


class SentenceTransformerEncoder:
    """Wraps a sentence-transformers model. Constructed via load_encoder."""

    def __init__(self, name: str, model):
        self.name = name
        self._model = model
        dim = model.get_sentence_embedding_dimension()
        if not dim:
            raise ModelLoadError(f"encoder {name!r} does not report an embedding dimension")
        self.dim = int(dim)

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        return self._model.encode(
            list(texts),
            convert_to_numpy=True,
            normalize_embeddings=False,
            show_progress_bar=False,
        )


def load_encoder(identifier: str) -> Encoder:
    """Resolve a model identifier string to a ready encoder.

    Raises ModelLoadError if the identifier is malformed or the model
    cannot be constructed.
    """
    if not identifier or not identifier.strip():
        raise ModelLoadError("empty encoder identifier")
    identifier = identifier.strip()
    if identifier.startswith(_HASH_PREFIX):
        raw = identifier[len(_HASH_PREFIX):]
        try:
            dim = int(raw)
        except ValueError:
            raise ModelLoadError(f"bad hash encoder dim {raw!r} in {identifier!r}") from None
        return HashEncoder(dim)
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise ModelLoadError(
            f"encoder {identifier!r} needs the sentence-transformers package: {exc}"
        ) from exc
    try:
        model = SentenceTransformer(identifier)
    except Exception as exc:
        raise ModelLoadError(f"cannot load encoder {identifier!r}: {exc}") from exc
    return SentenceTransformerEncoder(identifier, model)
