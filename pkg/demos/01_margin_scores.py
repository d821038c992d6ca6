"""Why margin scoring beats raw cosine when a hub vector is around.

A hub is a vector that sits close to everything. Raw cosine retrieval
keeps picking it; the margin score divides each candidate's cosine by
the average cosine of its own neighborhood, so a candidate that is
close to *everyone* gets discounted and the genuine counterpart wins.

Run:  python3 demos/01_margin_scores.py
"""

import numpy as np

from marginmine import (
    MiningConfig,
    MiningJob,
    Side,
    knn,
    margin_score,
    mine,
    validate_embedding_set,
)
from marginmine.core import (
    CorpusSide,
    DocLink,
    DocumentPairing,
    Sentence,
    SentenceId,
)

rng = np.random.default_rng(3)
dim = 16
n = 6

# Queries clustered around a common center. Their true counterparts are
# slightly noisier copies, and the target side also contains the center
# itself: a classic hub, marginally closer to every query than the
# query's real match is.
def unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


center = unit(rng.standard_normal(dim))
# query cluster sits ~0.96 cosine from the center; true counterparts
# sit ~0.95 from their query, so the hub edges them out on raw cosine
queries = unit(center + 0.28 * unit(rng.standard_normal((n, dim))))
targets = unit(queries + 0.34 * unit(rng.standard_normal((n, dim))))

pool = np.vstack([targets, center[None, :]]).astype(np.float32)
queries = queries.astype(np.float32)

src_ids = [SentenceId(Side.SOURCE, f"q{i}") for i in range(n)]
tgt_ids = [SentenceId(Side.TARGET, f"t{i}") for i in range(n)] + [
    SentenceId(Side.TARGET, "hub")
]

x = validate_embedding_set(queries, src_ids)
y = validate_embedding_set(pool, tgt_ids)

# Raw cosine votes first.
fwd = knn(x, y, k=4)
bwd = knn(y, x, k=4)
bwd_by_id = {nl.query_id: nl for nl in bwd}

print("query   raw-cosine best      margin best")
flips = 0
for i, nl in enumerate(fwd):
    raw_best = nl.neighbors[0][0]
    scored = []
    for cand_id, _cos in nl.neighbors:
        row = tgt_ids.index(cand_id)
        s = margin_score(queries[i], pool[row], nl, bwd_by_id[cand_id], k=4)
        scored.append((s, cand_id))
    margin_best = max(scored)[1]
    flip = "  <- rescued" if raw_best.key == "hub" and margin_best.key != "hub" else ""
    flips += bool(flip)
    print(f"{src_ids[i].key:<7} {raw_best.key:<20} {margin_best.key}{flip}")

print(f"\n{flips} of {n} queries were pulled off the hub by the margin.")

# The full miner does the same thing in both directions and intersects.
job = MiningJob(
    src=CorpusSide(Side.SOURCE, [Sentence(i_, f"query {i_.key}", doc_id="a") for i_ in src_ids]),
    tgt=CorpusSide(Side.TARGET, [Sentence(i_, f"cand {i_.key}", doc_id="b") for i_ in tgt_ids]),
    src_emb=x,
    tgt_emb=y,
    pairing=DocumentPairing([DocLink("L0", "a", "b")]),
)
pairs = mine(job, MiningConfig(k=4))
print("\nmined pairs (mutual margin argmax):")
for p in pairs.sorted_pairs():
    print(f"  {p.src.key} -> {p.tgt.key}   score {p.score:.4f}")
