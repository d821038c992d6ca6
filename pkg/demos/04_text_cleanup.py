"""Sentence cleanup and document-length screening before mining.

Scraped comparable corpora carry markup crumbs, URLs, and stub
articles. Embedding garbage costs compute and pollutes the candidate
pools, so cleanup runs first:

  clean_sentence    per-sentence text normalization
  document_stats    sentence/word counts per linked document pair
  filter_documents  drop stub pairs by absolute floor or percentile

Run:  python3 demos/04_text_cleanup.py
"""

from marginmine import (
    CleanupConfig,
    DocLengthFilter,
    LengthFilterMode,
    Side,
    clean_sentence,
    document_stats,
    filter_documents,
)
from marginmine.core import CorpusSide, DocLink, DocumentPairing, Sentence, SentenceId

# --- per-sentence cleanup ------------------------------------------------

cfg = CleanupConfig(noise_tokens=("href", "thumb|"))

samples = [
    "See the map at http://example.org/alps?hd=1 for details.",
    "thumb|250px|The north face in winter",
    "A sentence ​ with a zero-width\x07 space and a bell.",
    "whitespace   andtabs\t\tcollapse   to single spaces",
    "Ordinary text passes through unchanged.",
]

print("cleanup examples:")
for text in samples:
    print(f"  in : {text!r}")
    print(f"  out: {clean_sentence(text, cfg)!r}")
print()

# Flags opt out of individual stages when a corpus needs them kept.
keep_urls = CleanupConfig(strip_urls=False)
print("with strip_urls=False:")
print(" ", clean_sentence("kept: http://example.org", keep_urls))
print()

# --- document-length screening -------------------------------------------


def make_side(side, prefix, doc_sizes):
    sentences = []
    for doc, (n, words_per) in doc_sizes.items():
        for i in range(n):
            sid = SentenceId(side, f"{prefix}-{doc}-{i}")
            sentences.append(Sentence(sid, "w " * words_per, doc_id=doc))
    return CorpusSide(side, sentences)


# four article pairs: two substantial, one stubby, one tiny
src = make_side(Side.SOURCE, "s", {"a": (12, 9), "b": (10, 8), "c": (3, 4), "d": (1, 2)})
tgt = make_side(Side.TARGET, "t", {"a": (11, 7), "b": (9, 9), "c": (2, 3), "d": (1, 1)})
pairing = DocumentPairing([DocLink(f"L{i}", d, d) for i, d in enumerate("abcd")])

stats = document_stats(src, tgt, pairing)
print("per-pair counts (sentences/words per side):")
for p in stats:
    print(
        f"  {p.link.src_doc}: src {p.src_sentences}/{p.src_words}"
        f"  tgt {p.tgt_sentences}/{p.tgt_words}"
    )

floor = DocLengthFilter(LengthFilterMode.ABSOLUTE_WORDS, src_min=30, tgt_min=20)
result = filter_documents(stats, floor)
print(f"\nabsolute floor (src>=30w, tgt>=20w): kept {[p.link.src_doc for p in result.kept]}")

quartile = DocLengthFilter(LengthFilterMode.BOTTOM_PERCENTILE, percentile=0.25)
result = filter_documents(stats, quartile)
print(f"bottom quartile dropped: {[p.link.src_doc for p in result.dropped]}")
r = result.realized
print(
    "realized cutoffs among kept pairs: "
    f"src >= {r.src_sentences} sents / {r.src_words} words, "
    f"tgt >= {r.tgt_sentences} sents / {r.tgt_words} words"
)
