"""Margin scoring and bidirectional pair mining.

The miner scores a candidate pair by its cosine divided by the average
cosine of each side's k nearest neighbors, which discounts "hub"
vectors that are close to everything. Every query is matched to its
best-scoring raw-cosine neighbor in both directions, and the two match
sets are joined by intersection, union, or greedy conflict resolution.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    CandidatePair,
    Channel,
    EmbeddingSet,
    Join,
    MiningConfig,
    MiningJob,
    PairSet,
    Scope,
    SentenceId,
)
from .errors import ConfigError, DimensionMismatch, EmptyPool, NoDocumentLinks
from .knn import NeighborList, _id_sorted_order, _topk_against_sorted, mean_topk_cos

log = logging.getLogger("marginmine.mining")

# Guard against non-positive margin denominators (possible with
# adversarial antipodal vectors); keeps the score total.
_DENOM_FLOOR = 1e-6

# Threshold values exposed as presets in the CLI help: progressively
# stricter cutoffs trading recall for precision.
THRESHOLD_PRESETS = (1.06, 1.20, 1.35)


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True, slots=True)
class DirectionalMatch:
    """One query matched to its best-scoring candidate in one direction."""

    query: SentenceId
    best: SentenceId
    score: float
    direction: Direction


def margin_score(
    x: np.ndarray,
    y: np.ndarray,
    nn_x: NeighborList,
    nn_y: NeighborList,
    k: int,
    *,
    strict: bool = False,
) -> float:
    """Ratio margin score of a candidate pair of unit vectors.

    cos(x, y) divided by the average of the two sides' top-k neighbor
    cosine means, floored at 1e-6 so the score is always defined.
    """
    cos = float(np.dot(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)))
    denom = 0.5 * (mean_topk_cos(nn_x, k, strict=strict) + mean_topk_cos(nn_y, k, strict=strict))
    return cos / max(denom, _DENOM_FLOOR)


def _argmax_matches(
    cos_q: np.ndarray,
    top_q: np.ndarray,
    mean_q: np.ndarray,
    mean_p: np.ndarray,
    threshold: float | None,
) -> list[tuple[int, int, float]]:
    """Best margin-scored candidate per query row.

    cos_q/top_q hold each query's raw-cosine top-k candidates against
    an id-ascending pool; ties in margin break toward the smaller pool
    position, i.e. the smaller id. Returns (query_row, pool_row, score)
    triples for queries whose best score clears the threshold.
    """
    den = 0.5 * (mean_q[:, None] + mean_p[top_q])
    marg = cos_q / np.maximum(den, _DENOM_FLOOR)
    best = marg.max(axis=1)
    sentinel = np.int64(np.iinfo(np.int64).max)
    cand = np.where(marg == best[:, None], top_q, sentinel).min(axis=1)
    if threshold is None:
        rows = range(len(best))
    else:
        rows = np.nonzero(best > threshold)[0]
    return [(int(i), int(cand[i]), float(best[i])) for i in rows]


def _bidirectional_matches(
    x64: np.ndarray,
    y64: np.ndarray,
    k: int,
    strict: bool,
    threshold: float | None,
) -> tuple[list[tuple[int, int, float]], list[tuple[int, int, float]]]:
    """Forward and backward matches between two id-ascending pools.

    Returns (fwd, bwd); fwd triples are (x_row, y_row, score), bwd
    triples are (y_row, x_row, score).
    """
    top_f, cos_f = _topk_against_sorted(x64, y64, k)
    top_b, cos_b = _topk_against_sorted(y64, x64, k)
    mean_x = cos_f.sum(axis=1) / (k if strict else top_f.shape[1])
    mean_y = cos_b.sum(axis=1) / (k if strict else top_b.shape[1])
    fwd = _argmax_matches(cos_f, top_f, mean_x, mean_y, threshold)
    bwd = _argmax_matches(cos_b, top_b, mean_y, mean_x, threshold)
    return fwd, bwd


def mine_direction(
    src: EmbeddingSet,
    tgt: EmbeddingSet,
    cfg: MiningConfig,
    direction: Direction,
) -> list[DirectionalMatch]:
    """Match every query sentence to its best candidate, one direction.

    Forward queries the source side against the target pool, backward
    the reverse. Output is ordered by ascending query id.
    """
    if src.dim != tgt.dim:
        raise DimensionMismatch(f"source dim {src.dim} != target dim {tgt.dim}")
    if src.count == 0 or tgt.count == 0:
        raise EmptyPool("mining needs non-empty source and target sides")
    x_order = _id_sorted_order(src.ids)
    y_order = _id_sorted_order(tgt.ids)
    x64 = src.vectors[x_order].astype(np.float64)
    y64 = tgt.vectors[y_order].astype(np.float64)
    fwd, bwd = _bidirectional_matches(x64, y64, cfg.k, cfg.strict_topk_mean, cfg.threshold)
    x_ids = [src.ids[i] for i in x_order]
    y_ids = [tgt.ids[i] for i in y_order]
    if direction is Direction.FORWARD:
        return [
            DirectionalMatch(x_ids[qi], y_ids[pi], score, Direction.FORWARD)
            for qi, pi, score in fwd
        ]
    return [
        DirectionalMatch(y_ids[qi], x_ids[pi], score, Direction.BACKWARD)
        for qi, pi, score in bwd
    ]


def _link_tasks(job: MiningJob) -> list[tuple[str, list[int], list[int]]]:
    """Per-link row index lists, each sorted by ascending sentence id.

    Links whose documents have no sentences left on one side are
    skipped with a warning: the margin denominator is undefined over an
    empty pool.
    """
    src_ids = job.src_emb.ids
    tgt_ids = job.tgt_emb.ids
    src_by_doc = job.src.rows_by_doc()
    tgt_by_doc = job.tgt.rows_by_doc()
    sorted_src: dict[str, list[int]] = {}
    sorted_tgt: dict[str, list[int]] = {}
    tasks = []
    for link in job.pairing:
        x_rows = src_by_doc.get(link.src_doc)
        y_rows = tgt_by_doc.get(link.tgt_doc)
        if not x_rows or not y_rows:
            log.warning(
                "link %s: document pair (%s, %s) has an empty side; skipped",
                link.link_id,
                link.src_doc,
                link.tgt_doc,
            )
            continue
        if link.src_doc not in sorted_src:
            sorted_src[link.src_doc] = sorted(x_rows, key=lambda i: src_ids[i])
        if link.tgt_doc not in sorted_tgt:
            sorted_tgt[link.tgt_doc] = sorted(y_rows, key=lambda i: tgt_ids[i])
        tasks.append((link.link_id, sorted_src[link.src_doc], sorted_tgt[link.tgt_doc]))
    return tasks


def mine(job: MiningJob, cfg: MiningConfig, *, threads: int = 1) -> PairSet:
    """Bidirectional margin mining over a whole job.

    Document scope searches within each linked document pair; global
    scope treats each side as one pool. Forward and backward matches
    accumulate across all documents and are joined once at the end.
    Results are independent of the thread count.
    """
    if not isinstance(cfg, MiningConfig):
        raise ConfigError(f"cfg must be a MiningConfig, got {type(cfg).__name__}")
    threads = max(1, int(threads))
    fwd_entries: list[tuple[SentenceId, SentenceId, float]] = []
    bwd_entries: list[tuple[SentenceId, SentenceId, float]] = []

    if cfg.scope is Scope.DOCUMENT:
        if not job.pairing:
            raise NoDocumentLinks("document-scoped mining needs at least one document link")
        tasks = _link_tasks(job)
        src_vec = job.src_emb.vectors
        tgt_vec = job.tgt_emb.vectors
        src_ids = job.src_emb.ids
        tgt_ids = job.tgt_emb.ids

        def run(task: tuple[str, list[int], list[int]]):
            _, x_rows, y_rows = task
            x64 = src_vec[x_rows].astype(np.float64)
            y64 = tgt_vec[y_rows].astype(np.float64)
            fwd, bwd = _bidirectional_matches(
                x64, y64, cfg.k, cfg.strict_topk_mean, cfg.threshold
            )
            f = [(src_ids[x_rows[qi]], tgt_ids[y_rows[pi]], s) for qi, pi, s in fwd]
            b = [(src_ids[x_rows[pi]], tgt_ids[y_rows[qi]], s) for qi, pi, s in bwd]
            return f, b

        if threads == 1 or len(tasks) <= 1:
            results = map(run, tasks)
        else:
            # Executor.map yields in submission order, so the merged
            # entry lists do not depend on scheduling.
            pool = ThreadPoolExecutor(max_workers=threads)
            try:
                results = pool.map(run, tasks)
                results = list(results)
            finally:
                pool.shutdown(wait=True)
        for f, b in results:
            fwd_entries.extend(f)
            bwd_entries.extend(b)
    else:
        if job.src_emb.count == 0 or job.tgt_emb.count == 0:
            raise EmptyPool("mining needs non-empty source and target sides")
        x_order = _id_sorted_order(job.src_emb.ids)
        y_order = _id_sorted_order(job.tgt_emb.ids)
        x64 = job.src_emb.vectors[x_order].astype(np.float64)
        y64 = job.tgt_emb.vectors[y_order].astype(np.float64)
        fwd, bwd = _bidirectional_matches(x64, y64, cfg.k, cfg.strict_topk_mean, cfg.threshold)
        x_ids = [job.src_emb.ids[i] for i in x_order]
        y_ids = [job.tgt_emb.ids[i] for i in y_order]
        fwd_entries = [(x_ids[qi], y_ids[pi], s) for qi, pi, s in fwd]
        bwd_entries = [(x_ids[pi], y_ids[qi], s) for qi, pi, s in bwd]

    return _join(fwd_entries, bwd_entries, cfg.join)


def _join(
    fwd_entries: list[tuple[SentenceId, SentenceId, float]],
    bwd_entries: list[tuple[SentenceId, SentenceId, float]],
    join: Join,
) -> PairSet:
    """Merge directional matches into the final canonical pair set."""
    fwd: dict[tuple[SentenceId, SentenceId], float] = {(s, t): sc for s, t, sc in fwd_entries}
    bwd: dict[tuple[SentenceId, SentenceId], float] = {(s, t): sc for s, t, sc in bwd_entries}
    out = PairSet(provenance=f"mine:{join.value}")
    if join is Join.INTERSECT:
        for key in fwd.keys() & bwd.keys():
            s, t = key
            out.add(CandidatePair(s, t, max(fwd[key], bwd[key]), Channel.ORIGINAL))
    elif join is Join.UNION:
        for key in fwd.keys() | bwd.keys():
            s, t = key
            score = max(fwd.get(key, float("-inf")), bwd.get(key, float("-inf")))
            out.add(CandidatePair(s, t, score, Channel.ORIGINAL))
    else:
        merged: dict[tuple[SentenceId, SentenceId], float] = {}
        for key, score in list(fwd.items()) + list(bwd.items()):
            prev = merged.get(key)
            if prev is None or score > prev:
                merged[key] = score
        # Greedy sweep in descending score order: keep a pair only when
        # neither sentence is already matched. Ties in score break by
        # ascending (src, tgt) key, so the sweep is deterministic.
        ordered = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))
        used_src: set[SentenceId] = set()
        used_tgt: set[SentenceId] = set()
        for (s, t), score in ordered:
            if s in used_src or t in used_tgt:
                continue
            used_src.add(s)
            used_tgt.add(t)
            out.add(CandidatePair(s, t, score, Channel.ORIGINAL))
    return out
