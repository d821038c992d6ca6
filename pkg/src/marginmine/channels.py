"""Translation-channel mining and vote-based combination.

Besides mining the original embeddings, the same corpus can be mined
through translated views: the source side machine-translated into the
target language (and re-embedded), or the target side translated into
the source language. Each view keeps the original sentence ids, so the
three resulting pair sets share one key space and can be combined by
strict (all three) or pairwise (at least two) voting. Voting looks at
keys only; scores never gate membership.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum

from .core import Channel, EmbeddingSet, MiningConfig, MiningJob, PairSet
from .errors import ConfigError, IdMismatch, MissingChannel
from .mining import mine


class CombineMode(str, Enum):
    STRICT_INT = "strict"
    PAIRWISE_INT = "pairwise"


@dataclass(frozen=True)
class ChannelInputs:
    """The up-to-three embedding views of one corpus.

    en_to_xx replaces the source embeddings with embeddings of the
    translated source text; xx_to_en replaces the target embeddings
    with embeddings of the translated target text. Translations are
    line-aligned, so each view's ids equal the original side's ids.
    """

    original: MiningJob
    en_to_xx: MiningJob | None = None
    xx_to_en: MiningJob | None = None

    def __post_init__(self) -> None:
        for name, job in (("en_to_xx", self.en_to_xx), ("xx_to_en", self.xx_to_en)):
            if job is None:
                continue
            if job.src_emb.ids != self.original.src_emb.ids:
                raise IdMismatch(f"{name} channel source ids differ from the original ids")
            if job.tgt_emb.ids != self.original.tgt_emb.ids:
                raise IdMismatch(f"{name} channel target ids differ from the original ids")

    @classmethod
    def from_embeddings(
        cls,
        original: MiningJob,
        src_translated: EmbeddingSet | None = None,
        tgt_translated: EmbeddingSet | None = None,
    ) -> "ChannelInputs":
        """Build channel jobs by swapping translated embeddings into the job."""
        en_to_xx = None
        xx_to_en = None
        if src_translated is not None:
            en_to_xx = dataclasses.replace(original, src_emb=src_translated)
        if tgt_translated is not None:
            xx_to_en = dataclasses.replace(original, tgt_emb=tgt_translated)
        return cls(original=original, en_to_xx=en_to_xx, xx_to_en=xx_to_en)


def mine_channel(
    inputs: ChannelInputs,
    which: Channel,
    cfg: MiningConfig,
    *,
    threads: int = 1,
) -> PairSet:
    """Run the miner on one channel's embedding view.

    Output pairs are canonically (Source, Target) oriented regardless
    of channel; bidirectional mining treats the two sides symmetrically,
    so orientation does not change the result. The channel label on
    each pair records which view produced it.
    """
    if which is Channel.ORIGINAL:
        job = inputs.original
    elif which is Channel.EN_TO_XX:
        job = inputs.en_to_xx
    elif which is Channel.XX_TO_EN:
        job = inputs.xx_to_en
    else:
        raise ConfigError(f"cannot mine the {which.value!r} channel directly")
    if job is None:
        raise MissingChannel(f"channel {which.value!r} has no embeddings")
    mined = mine(job, cfg, threads=threads)
    out = mined.relabel(which)
    out.provenance = f"channel:{which.value}"
    return out


def combine(
    p_orig: PairSet,
    p_en_xx: PairSet,
    p_xx_en: PairSet,
    mode: CombineMode,
) -> PairSet:
    """Vote the three channel pair sets down to one.

    Strict keeps keys present in all three sets; pairwise keeps keys
    present in at least two. The surviving score per key is the maximum
    across the sets that contain it, and the channel becomes Combined.
    Membership depends only on keys, never on scores.
    """
    if not isinstance(mode, CombineMode):
        raise ConfigError(f"unknown combine mode {mode!r}")
    sets = (p_orig, p_en_xx, p_xx_en)
    needed = 3 if mode is CombineMode.STRICT_INT else 2
    counts: dict[tuple[str, str], int] = {}
    for ps in sets:
        for key in ps.keys():
            counts[key] = counts.get(key, 0) + 1
    out = PairSet(provenance=f"combine:{mode.value}")
    for key, n in counts.items():
        if n < needed:
            continue
        best = None
        for ps in sets:
            pair = ps.get(key)
            if pair is not None and (best is None or pair.score > best.score):
                best = pair
        out.add(dataclasses.replace(best, channel=Channel.COMBINED))
    return out
