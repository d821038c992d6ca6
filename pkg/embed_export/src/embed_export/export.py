"""Read metadata files, run models, write embedding and translation files.

File formats (shared with the mining engine, byte for byte):

* metadata: JSONL, one object per line with exactly the string fields
  ``id``, ``doc``, ``lang``, ``text``.
* embeddings: 20-byte header ``magic "EMB1" | u32 version=1 | u32 dim |
  u64 count``, then count rows of dim little-endian float32 values.
  Row i belongs to metadata data line i.
* translations: UTF-8 text, LF line endings, line i is the translation
  of metadata data line i.

All writes go to a temp file in the target directory and are renamed
into place, so a crash never leaves a half-written output behind.
"""

from __future__ import annotations

import json
import logging
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from embed_export.encoders import Encoder, load_encoder
from embed_export.errors import (
    ConfigError,
    EncodingError,
    FormatError,
    InputError,
)
from embed_export.translators import Translator, check_direction, load_translator

logger = logging.getLogger("embed_export")

_MAGIC = b"EMB1"
_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")
_FIELDS = ("id", "doc", "lang", "text")


@dataclass(frozen=True)
class MetaRow:
    """One parsed metadata line."""

    id: str
    doc: str
    lang: str
    text: str


@dataclass(frozen=True)
class ExportSpec:
    """Everything an export run needs.

    batch_size bounds how many lines go to the model per call; it never
    changes the output, only memory use. The translator fields are only
    consulted by export_translations.
    """

    metadata_path: Path
    encoder: str | None = None
    out_embeddings: Path | None = None
    batch_size: int = 32
    translator: str | None = None
    direction: str | None = None
    out_translations: Path | None = None
    out_translated_embeddings: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "metadata_path", Path(self.metadata_path))
        for name in ("out_embeddings", "out_translations", "out_translated_embeddings"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, Path(value))
        if isinstance(self.batch_size, bool) or not isinstance(self.batch_size, int):
            raise ConfigError(f"batch_size must be an int, got {self.batch_size!r}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.encoder is not None and (
            not isinstance(self.encoder, str) or not self.encoder.strip()
        ):
            raise ConfigError("encoder identifier must be a non-empty string")


@dataclass(frozen=True)
class EmbeddingExport:
    path: Path
    count: int
    dim: int


@dataclass(frozen=True)
class TranslationExport:
    text_path: Path
    line_count: int
    #: 1-based metadata line numbers where the model failed and the
    #: original text was emitted instead
    failed_lines: tuple[int, ...] = field(default_factory=tuple)
    embeddings: EmbeddingExport | None = None


def read_metadata(path: Path | str) -> list[MetaRow]:
    """Parse a metadata JSONL file.

    Blank lines are skipped; everything else must be an object with the
    four expected string fields. Errors carry the 1-based line number.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read metadata file {path}: {exc}") from exc
    rows: list[MetaRow] = []
    seen: set[str] = set()
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise FormatError(f"{path}:{lineno}: expected an object, got {type(obj).__name__}")
        extra = set(obj) - set(_FIELDS)
        missing = [f for f in _FIELDS if f not in obj]
        if missing or extra:
            raise FormatError(
                f"{path}:{lineno}: metadata object must have exactly the fields "
                f"{list(_FIELDS)} (missing {missing}, unexpected {sorted(extra)})"
            )
        for name in _FIELDS:
            if not isinstance(obj[name], str):
                raise FormatError(f"{path}:{lineno}: field {name!r} must be a string")
        if not obj["id"] or any(c in obj["id"] for c in "\t\n\r"):
            raise FormatError(f"{path}:{lineno}: id must be non-empty without tabs or newlines")
        if obj["id"] in seen:
            raise FormatError(f"{path}:{lineno}: duplicate id {obj['id']!r}")
        seen.add(obj["id"])
        # newlines inside the text would break the row-to-line alignment
        # of every downstream file
        if "\n" in obj["text"] or "\r" in obj["text"]:
            raise FormatError(f"{path}:{lineno}: text must not contain newlines")
        rows.append(MetaRow(obj["id"], obj["doc"], obj["lang"], obj["text"]))
    return rows


def _atomic_path(path: Path) -> Path:
    return path.parent / f".{path.name}.tmp-{os.getpid()}"


def _encode_to_file(
    encoder: Encoder, texts: Sequence[str], path: Path, batch_size: int
) -> EmbeddingExport:
    """Encode texts in batches, L2-normalize, stream to an embedding file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    dim = encoder.dim
    tmp = _atomic_path(path)
    written = 0
    try:
        with open(tmp, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, _VERSION, dim, len(texts)))
            for start in range(0, len(texts), batch_size):
                batch = list(texts[start : start + batch_size])
                block = _encode_batch(encoder, batch, start)
                block = _normalize_rows(block, start)
                fh.write(np.ascontiguousarray(block, dtype="<f4").tobytes())
                written += len(batch)
        expected = _HEADER.size + written * dim * 4
        actual = tmp.stat().st_size
        if written != len(texts) or actual != expected:
            raise RuntimeError(
                f"embedding write self-check failed: {written} rows, {actual} bytes, "
                f"expected {expected}"
            )
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return EmbeddingExport(path=path, count=written, dim=dim)


def _encode_batch(encoder: Encoder, batch: list[str], start: int) -> np.ndarray:
    """Run the model on one batch. On failure, retry line by line so the
    error names the offending metadata line."""
    try:
        block = np.asarray(encoder.encode(batch), dtype=np.float64)
    except Exception:
        rows = []
        for offset, text in enumerate(batch):
            lineno = start + offset + 1
            try:
                row = np.asarray(encoder.encode([text]), dtype=np.float64)
            except Exception as exc:
                raise EncodingError(f"line {lineno}: encoder failed: {exc}") from exc
            rows.append(row.reshape(-1))
        block = np.stack(rows)
    if block.ndim != 2 or block.shape != (len(batch), encoder.dim):
        raise EncodingError(
            f"lines {start + 1}..{start + len(batch)}: encoder returned shape "
            f"{block.shape}, expected ({len(batch)}, {encoder.dim})"
        )
    return block


def _normalize_rows(block: np.ndarray, start: int) -> np.ndarray:
    bad = ~np.isfinite(block).all(axis=1)
    if bad.any():
        lineno = start + int(np.flatnonzero(bad)[0]) + 1
        raise EncodingError(f"line {lineno}: encoder produced a non-finite value")
    norms = np.linalg.norm(block, axis=1)
    tiny = norms < 1e-12
    if tiny.any():
        lineno = start + int(np.flatnonzero(tiny)[0]) + 1
        raise EncodingError(f"line {lineno}: encoder produced a zero vector")
    return block / norms[:, None]


def export_embeddings(spec: ExportSpec, *, encoder: Encoder | None = None) -> EmbeddingExport:
    """Embed every metadata line and write the embedding file.

    Row order matches metadata line order exactly, vectors are
    L2-normalized, and equal texts produce equal vectors whenever the
    encoder itself is deterministic. Pass encoder to reuse an already
    loaded model; otherwise spec.encoder is resolved.
    """
    if spec.out_embeddings is None:
        raise ConfigError("spec.out_embeddings is required for export_embeddings")
    if encoder is None:
        if spec.encoder is None:
            raise ConfigError("spec.encoder is required for export_embeddings")
        encoder = load_encoder(spec.encoder)
    rows = read_metadata(spec.metadata_path)
    texts = [row.text for row in rows]
    result = _encode_to_file(encoder, texts, spec.out_embeddings, spec.batch_size)
    logger.info("embedded %d lines (dim %d) -> %s", result.count, result.dim, result.path)
    return result


def _translate_batch(
    translator: Translator, batch: list[str], linenos: list[int], failed: list[int]
) -> list[str]:
    """Translate one batch, falling back per line so a single bad input
    costs one original-text line instead of the whole file."""
    try:
        out = translator.translate(batch)
        if len(out) != len(batch):
            raise EncodingError(
                f"translator returned {len(out)} lines for a batch of {len(batch)}"
            )
        return out
    except Exception:
        result = []
        for text, lineno in zip(batch, linenos):
            try:
                single = translator.translate([text])
                if len(single) != 1:
                    raise EncodingError("translator returned a wrong line count")
                result.append(single[0])
            except Exception as exc:
                logger.warning("line %d: translation failed (%s); keeping original", lineno, exc)
                failed.append(lineno)
                result.append(text)
        return result


def export_translations(
    spec: ExportSpec,
    *,
    translator: Translator | None = None,
    encoder: Encoder | None = None,
) -> TranslationExport:
    """Translate every metadata line and write a line-aligned text file.

    Empty texts pass through untouched without hitting the model. A
    per-line model failure keeps the original text for that line and is
    logged; the line count always matches the input. When
    spec.out_translated_embeddings is set the translated lines are also
    embedded with spec.encoder.
    """
    if spec.translator is None and translator is None:
        raise ConfigError("spec.translator is required for export_translations")
    if spec.out_translations is None:
        raise ConfigError("spec.out_translations is required for export_translations")
    if translator is None:
        translator = load_translator(spec.translator)
    check_direction(translator, spec.direction)
    if spec.out_translated_embeddings is not None and encoder is None:
        if spec.encoder is None:
            raise ConfigError("spec.encoder is required to embed translated lines")
        encoder = load_encoder(spec.encoder)
    rows = read_metadata(spec.metadata_path)

    translated: list[str] = [""] * len(rows)
    failed: list[int] = []
    pending: list[int] = [i for i, row in enumerate(rows) if row.text]
    for start in range(0, len(pending), spec.batch_size):
        indices = pending[start : start + spec.batch_size]
        batch = [rows[i].text for i in indices]
        out = _translate_batch(translator, batch, [i + 1 for i in indices], failed)
        for i, line in zip(indices, out):
            # a model emitting newlines would desync every later line
            translated[i] = line.replace("\r", " ").replace("\n", " ")

    out_path = spec.out_translations
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tmp = _atomic_path(out_path)
    try:
        payload = "".join(line + "\n" for line in translated)
        tmp.write_text(payload, encoding="utf-8", newline="\n")
        os.replace(tmp, out_path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    logger.info(
        "translated %d lines (%d fell back to source text) -> %s",
        len(rows), len(failed), out_path,
    )

    emb = None
    if spec.out_translated_embeddings is not None:
        emb = _encode_to_file(
            encoder, translated, spec.out_translated_embeddings, spec.batch_size
        )
        logger.info(
            "embedded %d translated lines (dim %d) -> %s", emb.count, emb.dim, emb.path
        )
    return TranslationExport(
        text_path=out_path,
        line_count=len(rows),
        failed_lines=tuple(failed),
        embeddings=emb,
    )
