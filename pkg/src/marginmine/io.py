"""Readers and writers for the engine's file formats.

Formats:
  sentence metadata  JSON-lines, one object per sentence:
                     {"id": str, "doc": str, "lang": str, "text": str}
  embeddings         binary "EMB1": magic (4 bytes) + u32 version=1 +
                     u32 dim + u64 count, then count*dim little-endian
                     float32 values, row-major; row i pairs with line i
                     of the metadata file
  document links     TSV: link_id TAB src_doc TAB tgt_doc
  mined pairs        TSV: src_id TAB tgt_id TAB score TAB channel,
                     sorted by (src_id, tgt_id)
  gold alignments    TSV: src_id TAB tgt_id
  translations       plain text, line-aligned with a metadata file
  stopwords          plain text, one token per line
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import (
    CandidatePair,
    Channel,
    CorpusSide,
    DocLink,
    DocumentPairing,
    EmbeddingSet,
    MiningJob,
    PairSet,
    Sentence,
    SentenceId,
    Side,
    validate_embedding_set,
)
from .errors import FormatError, IdMismatch, InputError
from .evaluation import GoldAlignment

_EMB_MAGIC = b"EMB1"
_EMB_VERSION = 1
_EMB_HEADER = struct.Struct("<4sIIQ")  # magic, version, dim, count


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from e
    except UnicodeDecodeError as e:
        raise FormatError(f"not valid UTF-8: {e}", path=str(path)) from e


def _read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from e


def _lines(text: str) -> list[str]:
    # splitlines() would also split on exotic separators; the formats
    # are LF-terminated, so split explicitly and drop a trailing blank.
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def read_metadata(
    path: str | Path, side: Side, *, allow_empty_text: bool = False
) -> CorpusSide:
    """Load one side's sentence metadata from a JSON-lines file."""
    sentences = []
    for lineno, line in enumerate(_lines(_read_text(path)), start=1):
        if not line.strip():
            raise FormatError("blank line in metadata", path=str(path), line=lineno)
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON: {e.msg}", path=str(path), line=lineno) from e
        if not isinstance(obj, dict):
            raise FormatError("metadata line is not a JSON object", path=str(path), line=lineno)
        missing = [k for k in ("id", "doc", "lang", "text") if k not in obj]
        if missing:
            raise FormatError(f"missing keys: {', '.join(missing)}", path=str(path), line=lineno)
        for k in ("id", "doc", "lang", "text"):
            if not isinstance(obj[k], str):
                raise FormatError(f"key {k!r} must be a string", path=str(path), line=lineno)
        if not obj["text"] and not allow_empty_text:
            raise FormatError("empty sentence text", path=str(path), line=lineno)
        try:
            sid = SentenceId(side=side, key=obj["id"])
        except ValueError as e:
            raise FormatError(str(e), path=str(path), line=lineno) from e
        sentences.append(Sentence(id=sid, text=obj["text"], doc_id=obj["doc"], lang=obj["lang"]))
    return CorpusSide(side, sentences)


def write_metadata(side: CorpusSide | Iterable[Sentence], path: str | Path) -> None:
    sentences = side.sentences if isinstance(side, CorpusSide) else tuple(side)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in sentences:
            obj = {"id": s.id.key, "doc": s.doc_id, "lang": s.lang, "text": s.text}
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_embedding_matrix(path: str | Path) -> np.ndarray:
    """Read a raw EMB1 file into a float32 matrix (no normalization)."""
    data = _read_bytes(path)
    if len(data) < _EMB_HEADER.size:
        raise FormatError("file shorter than the header", path=str(path))
    magic, version, dim, count = _EMB_HEADER.unpack_from(data)
    if magic != _EMB_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {_EMB_MAGIC!r}", path=str(path))
    if version != _EMB_VERSION:
        raise FormatError(f"unsupported format version {version}", path=str(path))
    if dim < 1:
        raise FormatError(f"dim must be >= 1, got {dim}", path=str(path))
    expected = _EMB_HEADER.size + count * dim * 4
    if len(data) != expected:
        raise FormatError(
            f"expected {expected} bytes for {count} x {dim} float32, found {len(data)}",
            path=str(path),
        )
    flat = np.frombuffer(data, dtype="<f4", offset=_EMB_HEADER.size)
    return flat.reshape(count, dim).astype(np.float32, copy=True)


def write_embeddings(vectors: np.ndarray, path: str | Path) -> None:
    """Write a float32 matrix as an EMB1 file."""
    vectors = np.ascontiguousarray(vectors, dtype=np.float32)
    if vectors.ndim != 2:
        raise FormatError(f"expected a 2-D matrix, got {vectors.ndim}-D")
    count, dim = vectors.shape
    with open(path, "wb") as fh:
        fh.write(_EMB_HEADER.pack(_EMB_MAGIC, _EMB_VERSION, dim, count))
        fh.write(vectors.astype("<f4", copy=False).tobytes(order="C"))


def read_embeddings(path: str | Path, ids: Iterable[SentenceId]) -> EmbeddingSet:
    """Read, validate, and normalize an EMB1 file for the given ids."""
    ids = tuple(ids)
    matrix = read_embedding_matrix(path)
    if matrix.shape[0] != len(ids):
        raise IdMismatch(
            f"{path}: {matrix.shape[0]} embedding rows for {len(ids)} sentences"
        )
    return validate_embedding_set(matrix, ids)


def read_doc_links(path: str | Path) -> DocumentPairing:
    links = []
    for lineno, line in enumerate(_lines(_read_text(path)), start=1):
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError(f"expected 3 columns, found {len(cols)}", path=str(path), line=lineno)
        try:
            links.append(DocLink(link_id=cols[0], src_doc=cols[1], tgt_doc=cols[2]))
        except ValueError as e:
            raise FormatError(str(e), path=str(path), line=lineno) from e
    return DocumentPairing(links)


def write_doc_links(pairing: DocumentPairing, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for link in pairing:
            fh.write(f"{link.link_id}\t{link.src_doc}\t{link.tgt_doc}\n")


def format_score(score: float) -> str:
    """Nine significant digits, trailing zeros trimmed."""
    return format(score, ".9g")


def write_pairs(pairs: PairSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs.sorted_pairs():
            fh.write(f"{p.src.key}\t{p.tgt.key}\t{format_score(p.score)}\t{p.channel.value}\n")


def read_pairs(path: str | Path) -> PairSet:
    out = PairSet(provenance=str(path))
    for lineno, line in enumerate(_lines(_read_text(path)), start=1):
        cols = line.split("\t")
        if len(cols) != 4:
            raise FormatError(f"expected 4 columns, found {len(cols)}", path=str(path), line=lineno)
        try:
            score = float(cols[2])
        except ValueError as e:
            raise FormatError(f"bad score {cols[2]!r}", path=str(path), line=lineno) from e
        try:
            channel = Channel(cols[3])
        except ValueError as e:
            raise FormatError(f"unknown channel {cols[3]!r}", path=str(path), line=lineno) from e
        try:
            pair = CandidatePair(
                src=SentenceId(Side.SOURCE, cols[0]),
                tgt=SentenceId(Side.TARGET, cols[1]),
                score=score,
                channel=channel,
            )
        except ValueError as e:
            raise FormatError(str(e), path=str(path), line=lineno) from e
        if pair.key in out:
            raise FormatError(
                f"duplicate pair ({cols[0]}, {cols[1]})", path=str(path), line=lineno
            )
        out.add(pair)
    return out


def read_gold(path: str | Path) -> GoldAlignment:
    """Read gold alignment pairs from a two-column TSV."""
    gold = set()
    for lineno, line in enumerate(_lines(_read_text(path)), start=1):
        cols = line.split("\t")
        if len(cols) != 2:
            raise FormatError(f"expected 2 columns, found {len(cols)}", path=str(path), line=lineno)
        try:
            gold.add((SentenceId(Side.SOURCE, cols[0]), SentenceId(Side.TARGET, cols[1])))
        except ValueError as e:
            raise FormatError(str(e), path=str(path), line=lineno) from e
    return GoldAlignment(gold)


def read_stopwords(path: str | Path) -> frozenset[str]:
    words = set()
    for line in _lines(_read_text(path)):
        word = line.strip().lower()
        if word:
            words.add(word)
    return frozenset(words)


def read_translations(path: str | Path, ids: Iterable[SentenceId]) -> dict[SentenceId, str]:
    """Read a line-aligned translation file for the given side's ids.

    Line i is the translation of sentence i; empty lines pass through
    as empty translations.
    """
    ids = tuple(ids)
    lines = _lines(_read_text(path))
    if len(lines) != len(ids):
        raise FormatError(
            f"expected {len(ids)} lines to match the metadata, found {len(lines)}",
            path=str(path),
        )
    return dict(zip(ids, lines))


def load_job(
    src_meta: str | Path,
    tgt_meta: str | Path,
    src_emb: str | Path,
    tgt_emb: str | Path,
    doc_links: str | Path | None = None,
) -> MiningJob:
    """Load and cross-validate a full mining job from files.

    Embedding rows must line up one-to-one with metadata lines. With a
    links file, every sentence's document must be covered by some link;
    without one, the job carries an empty pairing and supports only
    global-scope mining.
    """
    src = read_metadata(src_meta, Side.SOURCE)
    tgt = read_metadata(tgt_meta, Side.TARGET)
    src_set = read_embeddings(src_emb, src.ids())
    tgt_set = read_embeddings(tgt_emb, tgt.ids())
    pairing = read_doc_links(doc_links) if doc_links is not None else DocumentPairing()
    return MiningJob(src=src, tgt=tgt, src_emb=src_set, tgt_emb=tgt_set, pairing=pairing)
