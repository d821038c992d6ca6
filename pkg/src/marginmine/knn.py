"""Exact top-k cosine similarity search over embedding sets.

Similarity blocks are computed as float64 matrix products; ordering is
a stable sort, so ties in cosine break deterministically toward the
smaller sentence id. No approximation anywhere: results match a
brute-force full sort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EmbeddingSet, SentenceId
from .errors import ConfigError, DimensionMismatch, EmptyNeighborList, EmptyPool

# Upper bound on the number of float64 similarity entries held per
# block (32 MB). Queries are processed in row blocks of this budget.
_BLOCK_ELEMS = 4_194_304


@dataclass(frozen=True, slots=True)
class NeighborList:
    """Top neighbors of one query, ordered by (cosine desc, id asc)."""

    query_id: SentenceId
    neighbors: tuple[tuple[SentenceId, float], ...]


def _id_sorted_order(ids: tuple[SentenceId, ...]) -> list[int]:
    """Row indices that put the ids in ascending order."""
    return sorted(range(len(ids)), key=lambda i: ids[i])


def _topk_against_sorted(
    queries64: np.ndarray, pool64: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Top-k positions and cosines against an id-ascending pool.

    Pool rows must already be in ascending-id order: the stable sort
    then breaks cosine ties toward the smaller id for free. Returns
    (positions, cosines), each of shape (n_queries, min(k, n_pool)).
    """
    n_pool = pool64.shape[0]
    kk = min(k, n_pool)
    n_q = queries64.shape[0]
    top = np.empty((n_q, kk), dtype=np.int64)
    cos = np.empty((n_q, kk), dtype=np.float64)
    rows_per_block = max(1, _BLOCK_ELEMS // max(1, n_pool))
    for start in range(0, n_q, rows_per_block):
        stop = min(n_q, start + rows_per_block)
        sims = queries64[start:stop] @ pool64.T
        order = np.argsort(-sims, axis=1, kind="stable")[:, :kk]
        top[start:stop] = order
        cos[start:stop] = np.take_along_axis(sims, order, axis=1)
    return top, cos


def knn(queries: EmbeddingSet, pool: EmbeddingSet, k: int) -> list[NeighborList]:
    """Exact top-k cosine neighbors in the pool for every query.

    Each query gets min(k, pool.count) neighbors ordered by descending
    cosine, ties broken by ascending id.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ConfigError(f"k must be a positive integer, got {k!r}")
    if queries.dim != pool.dim:
        raise DimensionMismatch(f"query dim {queries.dim} != pool dim {pool.dim}")
    if pool.count == 0:
        raise EmptyPool("cannot search an empty pool")
    order = _id_sorted_order(pool.ids)
    pool64 = pool.vectors[order].astype(np.float64)
    sorted_ids = [pool.ids[i] for i in order]
    q64 = queries.vectors.astype(np.float64)
    top, cos = _topk_against_sorted(q64, pool64, k)
    out = []
    for qi, qid in enumerate(queries.ids):
        neigh = tuple(
            (sorted_ids[top[qi, j]], float(cos[qi, j])) for j in range(top.shape[1])
        )
        out.append(NeighborList(query_id=qid, neighbors=neigh))
    return out


def mean_topk_cos(nl: NeighborList, k: int, *, strict: bool = False) -> float:
    """Mean cosine of the first min(k, len) neighbors.

    With strict=True the sum is divided by k regardless of how many
    neighbors exist, matching the literal margin formula; by default
    the divisor is the actual count used.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ConfigError(f"k must be a positive integer, got {k!r}")
    if not nl.neighbors:
        raise EmptyNeighborList(f"query {nl.query_id.key!r} has no neighbors")
    m = min(k, len(nl.neighbors))
    total = math.fsum(cos for _, cos in nl.neighbors[:m])
    return total / (k if strict else m)
