"""Shared data model for margin-based bitext mining.

Sentences, documents, embeddings, scored pairs, and the mining
configuration. Everything defined here is immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    DegenerateVector,
    IdMismatch,
    MissingDocument,
    NonFinite,
)

# Rows whose norm is already this close to 1.0 are stored untouched, so
# re-validating an EmbeddingSet is bit-identical (normalized rows land
# well inside the band: float32 rounding perturbs a unit norm by ~1e-7).
_NORM_SKIP_BAND = 1e-5

_DEGENERATE_NORM = 1e-9


class Side(str, Enum):
    """Which half of a mining job a sentence belongs to."""

    SOURCE = "source"
    TARGET = "target"


class Channel(str, Enum):
    """Provenance of a mined pair: which embedding channel produced it."""

    ORIGINAL = "original"
    EN_TO_XX = "en_to_xx"
    XX_TO_EN = "xx_to_en"
    COMBINED = "combined"


class Join(str, Enum):
    """How forward and backward matches are merged into one pair set."""

    INTERSECT = "intersect"
    UNION = "union"
    MAX_SCORE = "max-score"


class Scope(str, Enum):
    """Search space: within linked documents, or each side as one pool."""

    DOCUMENT = "document"
    GLOBAL = "global"


@dataclass(frozen=True, order=True, slots=True)
class SentenceId:
    """Identity of one sentence: its side plus an opaque string key.

    Keys are caller-chosen and unique within a side. Tabs and line
    breaks are rejected because keys travel through TSV files. Ordering
    is (side, key), so ids sort by key within a side.
    """

    side: Side
    key: str

    def __post_init__(self) -> None:
        if not self.key:
            raise ValueError("sentence key must be non-empty")
        if "\t" in self.key or "\n" in self.key or "\r" in self.key:
            raise ValueError(f"sentence key contains tab/newline: {self.key!r}")


@dataclass(frozen=True, slots=True)
class Sentence:
    """One sentence of a corpus side, with its document and language."""

    id: SentenceId
    text: str
    doc_id: str = ""
    lang: str = ""


@dataclass(frozen=True, slots=True)
class CandidatePair:
    """A scored (source, target) sentence pair and its provenance channel.

    Pairs are always stored in canonical orientation: src on the Source
    side and tgt on the Target side, whichever mining direction found
    them.
    """

    src: SentenceId
    tgt: SentenceId
    score: float
    channel: Channel = Channel.ORIGINAL

    def __post_init__(self) -> None:
        if self.src.side is not Side.SOURCE:
            raise ValueError(f"pair src {self.src.key!r} must be Source-side")
        if self.tgt.side is not Side.TARGET:
            raise ValueError(f"pair tgt {self.tgt.key!r} must be Target-side")
        if not math.isfinite(self.score):
            raise ValueError(f"pair ({self.src.key!r}, {self.tgt.key!r}) has non-finite score")

    @property
    def key(self) -> tuple[str, str]:
        return (self.src.key, self.tgt.key)


class PairSet:
    """Deduplicated collection of CandidatePairs keyed by (src, tgt).

    Adding a pair whose key is already present keeps the higher score,
    and the channel flips to Combined when the two channels differ.
    Set algebra compares keys only, never scores.
    """

    __slots__ = ("provenance", "_pairs")

    def __init__(self, pairs: Iterable[CandidatePair] = (), provenance: str = ""):
        self.provenance = provenance
        self._pairs: dict[tuple[str, str], CandidatePair] = {}
        for pair in pairs:
            self.add(pair)

    def add(self, pair: CandidatePair) -> None:
        key = pair.key
        old = self._pairs.get(key)
        if old is None:
            self._pairs[key] = pair
            return
        channel = old.channel if old.channel is pair.channel else Channel.COMBINED
        best = old if old.score >= pair.score else pair
        if best.channel is not channel:
            best = dataclasses.replace(best, channel=channel)
        self._pairs[key] = best

    def __len__(self) -> int:
        return len(self._pairs)

    def __iter__(self) -> Iterator[CandidatePair]:
        return iter(self._pairs.values())

    def __contains__(self, key: object) -> bool:
        if isinstance(key, CandidatePair):
            key = key.key
        return key in self._pairs

    def get(self, key: tuple[str, str]) -> CandidatePair | None:
        return self._pairs.get(key)

    def keys(self) -> set[tuple[str, str]]:
        return set(self._pairs)

    def sorted_pairs(self) -> list[CandidatePair]:
        """Pairs in canonical (src key, tgt key) output order."""
        return sorted(self._pairs.values(), key=lambda p: p.key)

    def scores(self) -> list[float]:
        return [p.score for p in self._pairs.values()]

    def relabel(self, channel: Channel) -> "PairSet":
        out = PairSet(provenance=self.provenance)
        for pair in self._pairs.values():
            out.add(dataclasses.replace(pair, channel=channel))
        return out


def pair_set_algebra(a: PairSet, b: PairSet, op: Join) -> PairSet:
    """Key-level intersection or union of two pair sets.

    On a key collision the surviving score is the larger of the two and
    the channel becomes Combined when the channels differ.
    """
    if op is Join.INTERSECT:
        keys = a.keys() & b.keys()
    elif op is Join.UNION:
        keys = a.keys() | b.keys()
    else:
        raise ConfigError(f"pair_set_algebra supports intersect/union, got {op!r}")
    out = PairSet(provenance=f"{a.provenance}{op.value}{b.provenance}" if a.provenance or b.provenance else "")
    for key in keys:
        pa = a.get(key)
        pb = b.get(key)
        if pa is not None:
            out.add(pa)
        if pb is not None:
            out.add(pb)
    return out


@dataclass(frozen=True, slots=True)
class MiningConfig:
    """Knobs of the mining procedure.

    strict_topk_mean selects the literal neighbor-mean formula: when a
    pool holds fewer than k neighbors the cosine sum is still divided
    by k. The default divides by the actual neighbor count, which
    avoids inflated margins inside very small documents.
    """

    k: int = 4
    join: Join = Join.INTERSECT
    threshold: float | None = None
    scope: Scope = Scope.DOCUMENT
    strict_topk_mean: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise ConfigError(f"k must be a positive integer, got {self.k!r}")
        if self.threshold is not None and not math.isfinite(self.threshold):
            raise ConfigError(f"threshold must be finite when set, got {self.threshold!r}")
        if not isinstance(self.join, Join):
            raise ConfigError(f"join must be a Join member, got {self.join!r}")
        if not isinstance(self.scope, Scope):
            raise ConfigError(f"scope must be a Scope member, got {self.scope!r}")


class EmbeddingSet:
    """Unit-normalized sentence vectors for one corpus side.

    Row i belongs to ids[i]. The vector matrix is float32, row-major,
    and frozen in place at construction. Build instances through
    validate_embedding_set, which performs the numeric checks and
    renormalization; the constructor only enforces structure.
    """

    __slots__ = ("ids", "vectors", "_row_of")

    def __init__(self, ids: Iterable[SentenceId], vectors: np.ndarray):
        ids = tuple(ids)
        if vectors.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D matrix, got {vectors.ndim}-D")
        if vectors.shape[0] != len(ids):
            raise DimensionMismatch(
                f"{vectors.shape[0]} embedding rows for {len(ids)} ids"
            )
        if vectors.dtype != np.float32:
            raise DimensionMismatch(f"vectors must be float32, got {vectors.dtype}")
        if len(set(ids)) != len(ids):
            raise IdMismatch("duplicate sentence ids in embedding set")
        sides = {sid.side for sid in ids}
        if len(sides) > 1:
            raise IdMismatch("embedding set mixes Source and Target ids")
        vectors = np.ascontiguousarray(vectors)
        vectors.setflags(write=False)
        self.ids = ids
        self.vectors = vectors
        self._row_of: dict[SentenceId, int] | None = None

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def row_of(self, sid: SentenceId) -> int:
        if self._row_of is None:
            self._row_of = {s: i for i, s in enumerate(self.ids)}
        return self._row_of[sid]

    def take(self, rows: Iterable[int]) -> "EmbeddingSet":
        """New set holding the given rows, in the given order."""
        rows = list(rows)
        return EmbeddingSet(
            (self.ids[i] for i in rows),
            np.ascontiguousarray(self.vectors[rows]),
        )


def validate_embedding_set(vectors: np.ndarray, ids: Iterable[SentenceId]) -> EmbeddingSet:
    """Check and normalize raw vectors into an EmbeddingSet.

    Every row ends up with unit Euclidean norm; rows already within
    1e-5 of unit norm are kept bit-identical, which makes the operation
    idempotent.
    """
    ids = tuple(ids)
    vectors = np.asarray(vectors)
    if vectors.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got {vectors.ndim}-D")
    if vectors.shape[0] != len(ids):
        raise DimensionMismatch(f"{vectors.shape[0]} rows for {len(ids)} ids")
    if vectors.shape[1] < 1:
        raise DimensionMismatch("embedding dim must be >= 1")
    vectors = vectors.astype(np.float32, copy=True)
    if not np.isfinite(vectors).all():
        raise NonFinite("embedding matrix contains NaN or infinity")
    # Norms in float64; float32 storage cannot represent them exactly.
    norms = np.sqrt(np.einsum("ij,ij->i", vectors, vectors, dtype=np.float64))
    if (norms < _DEGENERATE_NORM).any():
        bad = int(np.argmax(norms < _DEGENERATE_NORM))
        raise DegenerateVector(f"row {bad} has near-zero norm {norms[bad]:.3e}")
    off = np.abs(norms - 1.0) > _NORM_SKIP_BAND
    if off.any():
        fixed = vectors[off].astype(np.float64) / norms[off, None]
        vectors[off] = fixed.astype(np.float32)
    return EmbeddingSet(ids, vectors)


@dataclass(frozen=True, slots=True)
class DocLink:
    """One cross-lingual document link: a source doc paired with a target doc."""

    link_id: str
    src_doc: str
    tgt_doc: str

    def __post_init__(self) -> None:
        for name, value in (
            ("link_id", self.link_id),
            ("src_doc", self.src_doc),
            ("tgt_doc", self.tgt_doc),
        ):
            if not value:
                raise ValueError(f"document link field {name} must be non-empty")
            if "\t" in value or "\n" in value or "\r" in value:
                raise ValueError(f"document link field {name} contains tab/newline")


class DocumentPairing:
    """Ordered document links with unique link ids.

    Many-to-one is allowed: the same document may appear in several
    links; only link ids must be unique.
    """

    __slots__ = ("links",)

    def __init__(self, links: Iterable[DocLink] = ()):
        links = tuple(links)
        seen: set[str] = set()
        for link in links:
            if link.link_id in seen:
                raise IdMismatch(f"duplicate document link id {link.link_id!r}")
            seen.add(link.link_id)
        self.links = links

    def __len__(self) -> int:
        return len(self.links)

    def __iter__(self) -> Iterator[DocLink]:
        return iter(self.links)

    def __bool__(self) -> bool:
        return bool(self.links)


class CorpusSide:
    """All sentences of one side, in file order."""

    __slots__ = ("side", "sentences", "_rows_by_doc")

    def __init__(self, side: Side, sentences: Iterable[Sentence]):
        self.side = side
        self.sentences = tuple(sentences)
        seen: set[str] = set()
        for s in self.sentences:
            if s.id.side is not side:
                raise IdMismatch(
                    f"sentence {s.id.key!r} is on side {s.id.side.value}, expected {side.value}"
                )
            if s.id.key in seen:
                raise IdMismatch(f"duplicate sentence id {s.id.key!r} on side {side.value}")
            seen.add(s.id.key)
        self._rows_by_doc: dict[str, list[int]] | None = None

    def __len__(self) -> int:
        return len(self.sentences)

    def ids(self) -> tuple[SentenceId, ...]:
        return tuple(s.id for s in self.sentences)

    def rows_by_doc(self) -> Mapping[str, list[int]]:
        """Row indices (file order) grouped by document id."""
        if self._rows_by_doc is None:
            by_doc: dict[str, list[int]] = {}
            for i, s in enumerate(self.sentences):
                by_doc.setdefault(s.doc_id, []).append(i)
            self._rows_by_doc = by_doc
        return self._rows_by_doc

    def texts(self) -> dict[SentenceId, str]:
        return {s.id: s.text for s in self.sentences}


def _empty_pairing() -> DocumentPairing:
    return DocumentPairing()


@dataclass(frozen=True)
class MiningJob:
    """A validated, ready-to-mine pair of corpus sides.

    Embedding rows are line-aligned with each side's sentences. The
    pairing may be empty, in which case only global-scope mining is
    possible. When a pairing is present, every sentence's document must
    be covered by at least one link; a link may name a document that
    has no sentences left (such documents are skipped at mining time).
    """

    src: CorpusSide
    tgt: CorpusSide
    src_emb: EmbeddingSet
    tgt_emb: EmbeddingSet
    pairing: DocumentPairing = field(default_factory=_empty_pairing)

    def __post_init__(self) -> None:
        if self.src.side is not Side.SOURCE or self.tgt.side is not Side.TARGET:
            raise IdMismatch("job sides must be (Source, Target)")
        if self.src_emb.ids != self.src.ids():
            raise IdMismatch("source embeddings do not line up with source metadata ids")
        if self.tgt_emb.ids != self.tgt.ids():
            raise IdMismatch("target embeddings do not line up with target metadata ids")
        if self.src_emb.dim != self.tgt_emb.dim:
            raise DimensionMismatch(
                f"source dim {self.src_emb.dim} != target dim {self.tgt_emb.dim}"
            )
        if self.pairing:
            src_docs = {link.src_doc for link in self.pairing}
            tgt_docs = {link.tgt_doc for link in self.pairing}
            for side, known in ((self.src, src_docs), (self.tgt, tgt_docs)):
                for s in side.sentences:
                    if s.doc_id not in known:
                        raise MissingDocument(
                            f"sentence {s.id.key!r} references document {s.doc_id!r}, "
                            "which no document link covers"
                        )

    def texts(self) -> dict[SentenceId, str]:
        """Sentence texts of both sides in one map (ids are side-distinct)."""
        merged = self.src.texts()
        merged.update(self.tgt.texts())
        return merged
