"""Scoring mined pairs against gold and comparing mining methods.

Run:  python3 demos/06_evaluation_reports.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from marginmine import (
    CandidatePair,
    EvalReport,
    GoldAlignment,
    PairSet,
    Side,
    evaluate,
    histogram,
    histogram_csv,
    histogram_svg,
    summarize_methods,
)
from marginmine.core import SentenceId


def s(key):
    return SentenceId(Side.SOURCE, key)


def t(key):
    return SentenceId(Side.TARGET, key)


# --- precision / recall / F1 ----------------------------------------------

# 100 gold pairs; the miner found 90 of them plus 8 spurious ones.
gold = GoldAlignment((s(f"s{i}"), t(f"t{i}")) for i in range(100))
pred = PairSet()
for i in range(90):
    pred.add(CandidatePair(s(f"s{i}"), t(f"t{i}"), 1.0 + i / 100))
for i in range(8):
    pred.add(CandidatePair(s(f"s{90 + i}"), t(f"t{i + 1:03d}x"), 1.05))

report = evaluate(pred, gold)
print("evaluation report:")
print(json.dumps(report.to_dict(), indent=2))

# --- method comparison table ------------------------------------------------


def rep(f1):
    return EvalReport(precision=f1, recall=f1, f1=f1, n_pred=0, n_gold=0, n_correct=0)


# per-language F1 for three mining variants; "de"/"fr" are easy,
# "kk" is the low-resource case where voting pays off
langs = {"de": 0, "fr": 0, "kk": 1}
methods = {
    "cosine-argmax": {"de": rep(0.71), "fr": rep(0.69), "kk": rep(0.31)},
    "margin": {"de": rep(0.83), "fr": rep(0.80), "kk": rep(0.47)},
    "margin+vote": {"de": rep(0.84), "fr": rep(0.79), "kk": rep(0.55)},
}

print("\nmethod comparison vs cosine-argmax baseline:")
for row in summarize_methods(methods, baseline="cosine-argmax", levels=langs):
    lvl = row["levels"]
    print(
        f"  {row['method']:<14} mean F1 {row['mean_f1']:.3f}"
        f"  delta {row['mean_delta']:+.3f}"
        f"  best in {row['best_count']}/{row['n_langs']}"
        f"  (easy {lvl[0]['mean_delta']:+.3f}, hard {lvl[1]['mean_delta']:+.3f})"
    )

# --- score distribution -----------------------------------------------------

rng = np.random.default_rng(5)
scored = PairSet()
for i, score in enumerate(np.concatenate([
    rng.normal(1.25, 0.08, 300),   # true pairs
    rng.normal(1.02, 0.05, 120),   # marginal junk
])):
    scored.add(CandidatePair(s(f"p{i}"), t(f"q{i}"), float(score)))

hist = histogram(scored, bins=12)
print("\nscore histogram (12 bins):")
for i, count in enumerate(hist.counts):
    bar = "#" * (count // 4)
    print(f"  {hist.bin_edges[i]:.2f}-{hist.bin_edges[i + 1]:.2f} {count:>4} {bar}")

out_dir = Path(tempfile.mkdtemp(prefix="marginmine_demo_"))
(out_dir / "hist.csv").write_text(histogram_csv(hist), encoding="utf-8")
(out_dir / "hist.svg").write_text(histogram_svg(hist), encoding="utf-8")
print(f"\nwrote {out_dir}/hist.csv and hist.svg")
