"""Text cleanup and document-length filtering.

Cleanup removes URLs, characters outside a conservative script-agnostic
keep-set, literal noise tokens, and redundant whitespace. Length
filtering drops document pairs that are too short to mine usefully,
either by absolute word-count minimums or by lopping off the shortest
fraction of all pairs.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .core import CorpusSide, DocLink, DocumentPairing
from .errors import ConfigError, EmptyCorpus

log = logging.getLogger("marginmine.preprocess")

# scheme://anything or www.anything, up to the next whitespace
_URL_RE = re.compile(r"(?:\b[a-zA-Z][a-zA-Z0-9+.\-]*://|\bwww\.)\S*")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class CleanupConfig:
    """Which cleanup stages run, plus corpus-specific noise substrings."""

    strip_urls: bool = True
    strip_nonstandard_chars: bool = True
    collapse_whitespace: bool = True
    noise_tokens: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for tok in self.noise_tokens:
            if not tok:
                raise ConfigError("noise tokens must be non-empty strings")


@lru_cache(maxsize=None)
def _keep_char(c: str) -> bool:
    # Keep letters, digits, combining marks (integral to Indic and many
    # other scripts), punctuation, symbols, and whitespace; whitespace
    # survives here so the collapse stage can normalize it. Everything
    # else (controls, format chars, unassigned) is dropped.
    if c.isspace():
        return True
    return unicodedata.category(c)[0] in ("L", "N", "M", "P", "S")


def _clean_pass(text: str, cfg: CleanupConfig) -> str:
    for tok in cfg.noise_tokens:
        while tok in text:
            text = text.replace(tok, "")
    if cfg.strip_urls:
        text = _URL_RE.sub(" ", text)
    if cfg.strip_nonstandard_chars:
        text = "".join(c for c in text if _keep_char(c))
    if cfg.collapse_whitespace:
        text = _WS_RE.sub(" ", text).strip()
    return text


def clean_sentence(text: str, cfg: CleanupConfig) -> str:
    """Clean one sentence; may return an empty string.

    The pass repeats until a fixpoint: deleting a noise token can
    splice together a URL (or another noise token) that the earlier
    stages of the same pass already scanned past.
    """
    while True:
        cleaned = _clean_pass(text, cfg)
        if cleaned == text:
            return cleaned
        text = cleaned


class LengthFilterMode(str, Enum):
    ABSOLUTE_WORDS = "absolute-words"
    BOTTOM_PERCENTILE = "bottom-percentile"


@dataclass(frozen=True)
class DocLengthFilter:
    """Rule for dropping short document pairs.

    AbsoluteWords drops a pair when either side has fewer words than
    its minimum. BottomPercentile sorts pairs by length and drops the
    shortest fraction.
    """

    mode: LengthFilterMode
    src_min: float = 0.0
    tgt_min: float = 0.0
    percentile: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.mode, LengthFilterMode):
            raise ConfigError(f"mode must be a LengthFilterMode, got {self.mode!r}")
        if self.mode is LengthFilterMode.BOTTOM_PERCENTILE:
            if self.percentile is None:
                raise ConfigError("BottomPercentile mode needs a percentile")
            if not 0.0 <= self.percentile < 1.0:
                raise ConfigError(f"percentile must be in [0, 1), got {self.percentile!r}")
        elif self.percentile is not None:
            raise ConfigError("percentile is only valid in BottomPercentile mode")


@dataclass(frozen=True, slots=True)
class DocPairStats:
    """Sentence and word counts for one linked document pair."""

    link: DocLink
    src_sentences: int
    src_words: int
    tgt_sentences: int
    tgt_words: int


def document_stats(
    src: CorpusSide, tgt: CorpusSide, pairing: DocumentPairing
) -> list[DocPairStats]:
    """Count sentences and whitespace-separated words per linked pair."""

    def side_counts(side: CorpusSide) -> dict[str, tuple[int, int]]:
        counts: dict[str, tuple[int, int]] = {}
        for s in side.sentences:
            n_sent, n_words = counts.get(s.doc_id, (0, 0))
            counts[s.doc_id] = (n_sent + 1, n_words + len(s.text.split()))
        return counts

    src_counts = side_counts(src)
    tgt_counts = side_counts(tgt)
    stats = []
    for link in pairing:
        ss, sw = src_counts.get(link.src_doc, (0, 0))
        ts, tw = tgt_counts.get(link.tgt_doc, (0, 0))
        stats.append(DocPairStats(link, ss, sw, ts, tw))
    return stats


@dataclass(frozen=True)
class RealizedCutoffs:
    """Minimum counts among the kept pairs, per side."""

    src_sentences: int
    src_words: int
    tgt_sentences: int
    tgt_words: int


@dataclass(frozen=True)
class FilterResult:
    kept: tuple[DocPairStats, ...]
    dropped: tuple[DocPairStats, ...]
    realized: RealizedCutoffs


def _length_key(p: DocPairStats) -> tuple:
    # Shorter-side sentence count first, then total words, then ids:
    # a total order, so percentile cuts are reproducible.
    return (
        min(p.src_sentences, p.tgt_sentences),
        p.src_words + p.tgt_words,
        p.link.src_doc,
        p.link.tgt_doc,
        p.link.link_id,
    )


def filter_documents(stats: list[DocPairStats], f: DocLengthFilter) -> FilterResult:
    """Split document pairs into kept and dropped under a length rule.

    BottomPercentile drops exactly floor(percentile * N) pairs, the
    shortest first. Raises EmptyCorpus when nothing survives.
    """
    if f.mode is LengthFilterMode.ABSOLUTE_WORDS:
        kept = [p for p in stats if p.src_words >= f.src_min and p.tgt_words >= f.tgt_min]
        dropped = [p for p in stats if not (p.src_words >= f.src_min and p.tgt_words >= f.tgt_min)]
    else:
        n_drop = int(f.percentile * len(stats))
        ordered = sorted(stats, key=_length_key)
        drop_set = {id(p) for p in ordered[:n_drop]}
        kept = [p for p in stats if id(p) not in drop_set]
        dropped = [p for p in stats if id(p) in drop_set]
    if stats and not kept:
        raise EmptyCorpus("length filter removed every document pair")
    realized = RealizedCutoffs(
        src_sentences=min((p.src_sentences for p in kept), default=0),
        src_words=min((p.src_words for p in kept), default=0),
        tgt_sentences=min((p.tgt_sentences for p in kept), default=0),
        tgt_words=min((p.tgt_words for p in kept), default=0),
    )
    return FilterResult(kept=tuple(kept), dropped=tuple(dropped), realized=realized)
