"""Rule-based post-mining pair filters.

Cheap text-level sanity metrics applied after mining: token-length
ratio, bag-of-words overlap against a translation (optionally ignoring
stopwords), and smoothed sentence-level BLEU against a translation. A
pair survives only if every configured metric lands inside its
[min, max] window. All filters are off unless explicitly configured.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .core import PairSet, SentenceId
from .errors import (
    BothEmptyAfterFiltering,
    ConfigError,
    EmptyInput,
    EmptyText,
    IdMismatch,
    MissingTranslation,
)

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


class FilterKind(str, Enum):
    LENGTH_RATIO = "length_ratio"
    LEXICAL_OVERLAP = "lexical_overlap"
    NON_STOPWORD_OVERLAP = "non_stopword_overlap"
    BLEU_VS_TRANSLATION = "bleu_vs_translation"


@dataclass(frozen=True)
class FilterSpec:
    """One metric window: keep pairs whose metric is in [min, max]."""

    kind: FilterKind
    min: float
    max: float | None = None
    stopwords: frozenset[str] | None = None
    bleu_n: int = 4

    def __post_init__(self) -> None:
        if not isinstance(self.kind, FilterKind):
            raise ConfigError(f"kind must be a FilterKind, got {self.kind!r}")
        if self.max is not None and self.min > self.max:
            raise ConfigError(f"min {self.min} exceeds max {self.max}")
        if not 1 <= self.bleu_n <= 4:
            raise ConfigError(f"bleu_n must be in [1, 4], got {self.bleu_n}")
        if self.kind is FilterKind.NON_STOPWORD_OVERLAP and self.stopwords is None:
            raise ConfigError("non_stopword_overlap needs a stopword list")


def tokenize(text: str) -> list[str]:
    """Split on whitespace and detach punctuation; no language rules."""
    return _TOKEN_RE.findall(text)


def length_ratio(src_text: str, tgt_text: str) -> float:
    """Shorter length over longer length, in whitespace tokens."""
    a = len(src_text.split())
    b = len(tgt_text.split())
    if a == 0 or b == 0:
        raise EmptyText("length ratio needs non-empty texts on both sides")
    return min(a, b) / max(a, b)


def bow_overlap(
    a_tokens: Sequence[str],
    b_tokens: Sequence[str],
    stopwords: frozenset[str] | None = None,
) -> float:
    """Jaccard overlap of lowercased token sets, optionally sans stopwords."""
    a = {t.lower() for t in a_tokens}
    b = {t.lower() for t in b_tokens}
    if stopwords:
        a -= stopwords
        b -= stopwords
    if not a and not b:
        raise BothEmptyAfterFiltering("both token sets are empty after filtering")
    union = a | b
    return len(a & b) / len(union)


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(
    candidate_tokens: Sequence[str],
    reference_tokens: Sequence[str],
    n: int = 4,
) -> float:
    """Sentence-level BLEU-n with add-one smoothed precisions.

    Each order's precision is (clipped matches + 1) / (n-grams + 1);
    orders the candidate is too short to produce contribute precision 1.
    Brevity penalty exp(1 - r/c) applies when the candidate is shorter
    than the reference.
    """
    if not 1 <= n <= 4:
        raise ConfigError(f"n must be in [1, 4], got {n}")
    if not candidate_tokens or not reference_tokens:
        raise EmptyInput("BLEU needs non-empty candidate and reference")
    log_sum = 0.0
    for order in range(1, n + 1):
        cand = _ngram_counts(candidate_tokens, order)
        total = sum(cand.values())
        if total == 0:
            continue  # vacuous order: precision 1 contributes log 0
        ref = _ngram_counts(reference_tokens, order)
        matched = sum(min(count, ref[gram]) for gram, count in cand.items())
        log_sum += math.log((matched + 1) / (total + 1))
    c = len(candidate_tokens)
    r = len(reference_tokens)
    bp = math.exp(1.0 - r / c) if c < r else 1.0
    return bp * math.exp(log_sum / n)


@dataclass(frozen=True)
class FilterOutcome:
    """Surviving pairs plus how many each spec rejected.

    drop_counts[i] counts pairs rejected by specs[i]; a pair failing
    several specs is counted by each of them.
    """

    pairs: PairSet
    drop_counts: tuple[int, ...]


def _resolve_translated(
    pair_src: SentenceId,
    pair_tgt: SentenceId,
    texts: Mapping[SentenceId, str],
    translations: Mapping[SentenceId, str] | None,
) -> tuple[str, str]:
    """(translated text, same-language original) for a pair.

    Prefers the target side's translation compared against the source
    text; falls back to the source side's translation against the
    target text.
    """
    if translations:
        trans = translations.get(pair_tgt)
        if trans:
            return trans, texts[pair_src]
        trans = translations.get(pair_src)
        if trans:
            return trans, texts[pair_tgt]
    raise MissingTranslation(
        f"pair ({pair_src.key}, {pair_tgt.key}) has no translation for either side"
    )


def _metric(
    spec: FilterSpec,
    pair_src: SentenceId,
    pair_tgt: SentenceId,
    texts: Mapping[SentenceId, str],
    translations: Mapping[SentenceId, str] | None,
) -> float:
    if spec.kind is FilterKind.LENGTH_RATIO:
        return length_ratio(texts[pair_src], texts[pair_tgt])
    translated, original = _resolve_translated(pair_src, pair_tgt, texts, translations)
    if spec.kind is FilterKind.BLEU_VS_TRANSLATION:
        return sentence_bleu(tokenize(translated), tokenize(original), spec.bleu_n)
    stop = spec.stopwords if spec.kind is FilterKind.NON_STOPWORD_OVERLAP else None
    return bow_overlap(tokenize(translated), tokenize(original), stop)


def apply_filters(
    pairs: PairSet,
    specs: Sequence[FilterSpec],
    texts: Mapping[SentenceId, str],
    translations: Mapping[SentenceId, str] | None = None,
) -> FilterOutcome:
    """Keep pairs whose every metric falls inside its spec's window.

    Every spec is evaluated for every pair (no short-circuiting), so
    drop counts are independent of spec order.
    """
    kept = PairSet(provenance=pairs.provenance)
    drops = [0] * len(specs)
    for pair in pairs:
        for sid in (pair.src, pair.tgt):
            if sid not in texts:
                raise IdMismatch(f"no text for sentence {sid.key!r}")
        ok = True
        for i, spec in enumerate(specs):
            value = _metric(spec, pair.src, pair.tgt, texts, translations)
            hi = spec.max if spec.max is not None else math.inf
            if not (spec.min <= value <= hi):
                drops[i] += 1
                ok = False
        if ok:
            kept.add(pair)
    return FilterOutcome(pairs=kept, drop_counts=tuple(drops))
