"""Three mining channels, one vote.

When machine translations of either side are available, each corpus
can be embedded three ways: as-is, with the source side translated,
and with the target side translated. Mining each view separately and
voting on the results trades recall for precision:

  strict    a pair must show up in all three channels
  pairwise  two of three channels is enough

Run:  python3 demos/03_channel_voting.py
"""

import numpy as np

from marginmine import (
    Channel,
    ChannelInputs,
    CombineMode,
    MiningConfig,
    MiningJob,
    Side,
    combine,
    mine_channel,
    validate_embedding_set,
)
from marginmine.core import (
    CorpusSide,
    DocLink,
    DocumentPairing,
    Sentence,
    SentenceId,
)

rng = np.random.default_rng(19)
dim, n = 24, 30


def unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


# One document pair, 30 sentences per side. True counterpart of s<i>
# is t<i>. The original channel is noisy; each translated view is an
# independently noisy re-embedding, so the three channels make
# partially independent mistakes and the vote can cancel them.
base = unit(rng.standard_normal((n, dim)))


def view(noise=0.22):
    return unit(base + noise * rng.standard_normal((n, dim))).astype(np.float32)


src_ids = [SentenceId(Side.SOURCE, f"s{i:02d}") for i in range(n)]
tgt_ids = [SentenceId(Side.TARGET, f"t{i:02d}") for i in range(n)]

job = MiningJob(
    src=CorpusSide(Side.SOURCE, [Sentence(i, f"src {i.key}", doc_id="A") for i in src_ids]),
    tgt=CorpusSide(Side.TARGET, [Sentence(i, f"tgt {i.key}", doc_id="B") for i in tgt_ids]),
    src_emb=validate_embedding_set(view(), src_ids),
    tgt_emb=validate_embedding_set(view(), tgt_ids),
    pairing=DocumentPairing([DocLink("L0", "A", "B")]),
)

inputs = ChannelInputs.from_embeddings(
    job,
    src_translated=validate_embedding_set(view(), src_ids),
    tgt_translated=validate_embedding_set(view(), tgt_ids),
)

cfg = MiningConfig(k=4)
gold = {(f"s{i:02d}", f"t{i:02d}") for i in range(n)}


def precision(pairs):
    if not pairs:
        return float("nan")
    hits = sum(1 for key in pairs.keys() if key in gold)
    return hits / len(pairs)


by_channel = {}
for channel in (Channel.ORIGINAL, Channel.EN_TO_XX, Channel.XX_TO_EN):
    by_channel[channel] = mine_channel(inputs, channel, cfg)
    p = by_channel[channel]
    print(f"channel {channel.value:<9} {len(p):>3} pairs  precision {precision(p):.2f}")

strict = combine(*by_channel.values(), CombineMode.STRICT_INT)
pairwise = combine(*by_channel.values(), CombineMode.PAIRWISE_INT)

print()
for name, voted in (("strict", strict), ("pairwise", pairwise)):
    print(f"vote {name:<9} {len(voted):>3} pairs  precision {precision(voted):.2f}")

assert strict.keys() <= pairwise.keys()
missed = gold - pairwise.keys()
print(f"\npairwise vote recovered {len(gold) - len(missed)} of {len(gold)} planted pairs")
