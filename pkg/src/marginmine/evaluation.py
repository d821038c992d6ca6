"""Gold-standard evaluation and score-distribution reporting.

Precision/recall/F1 of a mined pair set against a gold alignment,
uniform-bin histograms over margin scores, and cross-method comparison
tables with per-method deltas against a named baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import PairSet, SentenceId, Side
from .errors import (
    ConfigError,
    EmptyGold,
    EmptyPairSet,
    IdMismatch,
    MissingBaseline,
)


class GoldAlignment:
    """Reference sentence pairs a mined set is judged against."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple[SentenceId, SentenceId]]):
        pairs = frozenset(pairs)
        for src, tgt in pairs:
            if src.side is not Side.SOURCE or tgt.side is not Side.TARGET:
                raise IdMismatch(
                    f"gold pair ({src.key!r}, {tgt.key!r}) is not (Source, Target) oriented"
                )
        self.pairs = pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def keys(self) -> set[tuple[str, str]]:
        return {(src.key, tgt.key) for src, tgt in self.pairs}


@dataclass(frozen=True, slots=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    n_pred: int
    n_gold: int
    n_correct: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "n_pred": self.n_pred,
            "n_gold": self.n_gold,
            "n_correct": self.n_correct,
        }


def evaluate(pred: PairSet, gold: GoldAlignment) -> EvalReport:
    """Exact set-intersection precision/recall/F1 against gold."""
    n_gold = len(gold)
    if n_gold == 0:
        raise EmptyGold("evaluation needs a non-empty gold alignment")
    gold_keys = gold.keys()
    n_pred = len(pred)
    n_correct = sum(1 for key in pred.keys() if key in gold_keys)
    precision = n_correct / n_pred if n_pred else 0.0
    recall = n_correct / n_gold
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        n_pred=n_pred,
        n_gold=n_gold,
        n_correct=n_correct,
    )


@dataclass(frozen=True)
class MarginHistogram:
    """Uniform-bin counts over pair scores; counts always sum to total."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    total: int

    @property
    def bins(self) -> int:
        return len(self.counts)


def histogram(
    pairs: PairSet,
    bins: int = 20,
    range: tuple[float, float] | None = None,
) -> MarginHistogram:
    """Histogram of the pair scores over [lo, hi] split into equal bins.

    The range defaults to the observed min/max. A score equal to hi
    lands in the last bin; with an explicit range, out-of-range scores
    are clipped into the edge bins so the counts conserve the total.
    """
    if not isinstance(bins, int) or isinstance(bins, bool) or bins < 1:
        raise ConfigError(f"bins must be a positive integer, got {bins!r}")
    scores = pairs.scores()
    if not scores:
        raise EmptyPairSet("histogram needs at least one scored pair")
    if range is None:
        lo, hi = min(scores), max(scores)
    else:
        lo, hi = float(range[0]), float(range[1])
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ConfigError(f"invalid histogram range ({lo}, {hi})")
    if hi == lo:
        hi = lo + 1.0
    width = hi - lo
    counts = [0] * bins
    for s in scores:
        idx = int((s - lo) / width * bins)
        if idx < 0:
            idx = 0
        elif idx >= bins:
            idx = bins - 1
        counts[idx] += 1
    # NB: the builtin `range` is shadowed by the parameter here.
    edges = tuple(lo + width * i / bins for i, _ in enumerate(counts)) + (hi,)
    return MarginHistogram(bin_edges=edges, counts=tuple(counts), total=len(scores))


def histogram_csv(hist: MarginHistogram) -> str:
    """CSV rows `bin_lo,bin_hi,count`, one per bin."""
    lines = []
    for i, count in enumerate(hist.counts):
        lines.append(f"{hist.bin_edges[i]:.9g},{hist.bin_edges[i + 1]:.9g},{count}")
    return "\n".join(lines) + "\n"


def histogram_svg(hist: MarginHistogram, *, width: int = 640, height: int = 240) -> str:
    """Minimal standalone SVG bar chart of a histogram."""
    peak = max(hist.counts) or 1
    pad = 30
    plot_w = width - 2 * pad
    plot_h = height - 2 * pad
    bar_w = plot_w / hist.bins
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, count in enumerate(hist.counts):
        h = plot_h * count / peak
        x = pad + i * bar_w
        y = pad + plot_h - h
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{max(bar_w - 1, 1):.2f}" '
            f'height="{h:.2f}" fill="#4878a8"/>'
        )
    lo = hist.bin_edges[0]
    hi = hist.bin_edges[-1]
    parts.append(
        f'<text x="{pad}" y="{height - 8}" font-size="11" font-family="sans-serif">{lo:.4g}</text>'
    )
    parts.append(
        f'<text x="{width - pad}" y="{height - 8}" font-size="11" font-family="sans-serif" '
        f'text-anchor="end">{hi:.4g}</text>'
    )
    parts.append(
        f'<text x="{pad}" y="{pad - 8}" font-size="11" font-family="sans-serif">'
        f"n={hist.total}, peak={peak}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _as_grid(
    reports: Mapping[str, "EvalReport | Mapping[str, EvalReport]"],
) -> dict[str, dict[str, EvalReport]]:
    """Normalize method -> report inputs into method -> {lang: report}."""
    grid: dict[str, dict[str, EvalReport]] = {}
    for method, value in reports.items():
        if isinstance(value, EvalReport):
            grid[method] = {"": value}
        else:
            grid[method] = dict(value)
    lang_sets = {frozenset(v) for v in grid.values()}
    if len(lang_sets) > 1:
        raise IdMismatch("methods cover different language sets")
    return grid


def summarize_methods(
    reports: Mapping[str, "EvalReport | Mapping[str, EvalReport]"],
    baseline: str,
    levels: Mapping[str, int] | None = None,
) -> list[dict]:
    """Per-method comparison rows against a baseline method.

    Each method's value is either one EvalReport or a mapping from
    language label to EvalReport; all methods must cover the same
    languages. Rows carry the mean F1, the mean F1 delta vs the
    baseline, and in how many languages the method ties or leads all
    others. With a language -> level mapping, per-level means are added
    under "levels".
    """
    if baseline not in reports:
        raise MissingBaseline(f"baseline {baseline!r} is not among the methods")
    grid = _as_grid(reports)
    langs = sorted(next(iter(grid.values())).keys())
    if not langs:
        raise EmptyGold("summarize_methods needs at least one report per method")
    base = grid[baseline]
    best_per_lang = {
        lang: max(grid[m][lang].f1 for m in grid) for lang in langs
    }
    rows = []
    for method in sorted(grid):
        f1s = [grid[method][lang].f1 for lang in langs]
        deltas = [grid[method][lang].f1 - base[lang].f1 for lang in langs]
        row = {
            "method": method,
            "n_langs": len(langs),
            "mean_f1": sum(f1s) / len(langs),
            "mean_delta": sum(deltas) / len(langs),
            "best_count": sum(
                1 for lang in langs if grid[method][lang].f1 == best_per_lang[lang]
            ),
        }
        if levels is not None:
            missing = [lang for lang in langs if lang not in levels]
            if missing:
                raise IdMismatch(f"languages without a level: {', '.join(missing)}")
            by_level: dict[int, dict] = {}
            for level in sorted(set(levels[lang] for lang in langs)):
                members = [lang for lang in langs if levels[lang] == level]
                by_level[level] = {
                    "n_langs": len(members),
                    "mean_f1": sum(grid[method][l].f1 for l in members) / len(members),
                    "mean_delta": sum(
                        grid[method][l].f1 - base[l].f1 for l in members
                    ) / len(members),
                }
            row["levels"] = by_level
        rows.append(row)
    return rows
