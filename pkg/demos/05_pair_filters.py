"""Rule-based filtering of mined pairs.

Margin scores rank geometric evidence; they cannot see that a matched
pair has wildly different lengths or shares no vocabulary with its own
translation. Cheap text-level metrics catch those:

  length_ratio   shorter token count over longer
  bow_overlap    Jaccard overlap of token sets (one side translated)
  sentence_bleu  smoothed BLEU of the translated side vs the other

apply_filters evaluates a window [min, max] per metric and drops a
pair when any metric falls outside.

Run:  python3 demos/05_pair_filters.py
"""

from marginmine import (
    CandidatePair,
    FilterKind,
    FilterSpec,
    PairSet,
    Side,
    apply_filters,
    bow_overlap,
    length_ratio,
    sentence_bleu,
)
from marginmine.core import SentenceId
from marginmine.filters import tokenize

# --- the metrics by hand ---------------------------------------------------

a = "the expedition reached the summit at dawn"
b = "the expedition reached the summit at dawn on tuesday"
print(f"length_ratio: {length_ratio(a, b):.3f}   ({len(a.split())} vs {len(b.split())} words)")

ta, tb = tokenize(a), tokenize(b)
print(f"bow_overlap:  {bow_overlap(ta, tb):.3f}")
print(f"bleu (n=2):   {sentence_bleu(ta, tb, 2):.3f}")
print(f"bleu, no shared words: {sentence_bleu(tokenize('x y z'), tokenize('p q r'), 2):.3f}")

# --- filtering a mined pair set --------------------------------------------


def s(key):
    return SentenceId(Side.SOURCE, key)


def t(key):
    return SentenceId(Side.TARGET, key)


texts = {
    s("s0"): "the glacier retreated by forty meters last year",
    s("s1"): "yes",
    s("s2"): "the committee approved the budget on friday",
    t("t0"): "der gletscher zog sich letztes jahr um vierzig meter zurueck",
    t("t1"): "die konferenz wurde wegen schnee abgesagt und verschoben",
    t("t2"): "der ausschuss hat den haushalt am freitag gebilligt",
}

# Line-aligned machine translations of the target side back into the
# source language. t1's translation shows it is NOT a match for s1.
translations = {
    t("t0"): "the glacier retreated by forty meters last year",
    t("t1"): "the conference was cancelled due to snow and postponed",
    t("t2"): "the committee approved the budget on friday",
}

mined = PairSet()
mined.add(CandidatePair(s("s0"), t("t0"), 1.31))
mined.add(CandidatePair(s("s1"), t("t1"), 1.22))  # length-mismatched false positive
mined.add(CandidatePair(s("s2"), t("t2"), 1.27))

specs = [
    FilterSpec(FilterKind.LENGTH_RATIO, min=0.4),
    FilterSpec(FilterKind.LEXICAL_OVERLAP, min=0.3),
    FilterSpec(FilterKind.BLEU_VS_TRANSLATION, min=0.2, bleu_n=2),
]

outcome = apply_filters(mined, specs, texts, translations)

print(f"\n{len(mined)} mined pairs -> {len(outcome.pairs)} kept")
for spec, dropped in zip(specs, outcome.drop_counts):
    print(f"  {spec.kind.value:<20} dropped {dropped}")
for p in outcome.pairs.sorted_pairs():
    print(f"  kept {p.src.key} -> {p.tgt.key}")
