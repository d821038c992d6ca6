"""Brute-force reference implementations and synthetic corpus builders.

Everything here is deliberately straight-line: per-query sorted() over
full similarity rows, explicit dict joins, Counter-based n-grams. The
engine is correct when it agrees with these on keys exactly and on
scores within tolerance. The only shared arithmetic is the cosine
matrix multiply, kept identical on purpose so selection ties reproduce
bit-for-bit; all ranking, margin, argmax, and join logic is
independent.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from marginmine import (
    CorpusSide,
    DocLink,
    DocumentPairing,
    Join,
    MiningJob,
    Scope,
    Sentence,
    SentenceId,
    Side,
    validate_embedding_set,
)

DENOM_FLOOR = 1e-6


def unit_rows(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=1, keepdims=True)


# ------------------------------------------------------------- oracle: knn


def oracle_topk_rows(q64: np.ndarray, p64: np.ndarray, k: int):
    """Per-query top-k (pool_row, cosine) lists, ties toward smaller row."""
    sims = q64 @ p64.T
    kk = min(k, p64.shape[0])
    out = []
    for row in sims:
        order = sorted(range(len(row)), key=lambda j: (-row[j], j))[:kk]
        out.append([(j, float(row[j])) for j in order])
    return out


def oracle_knn_single(q64: np.ndarray, p64: np.ndarray, k: int):
    """Same ranking but with per-query matrix-vector products."""
    sims = [float(np.dot(p64[j], q64)) for j in range(p64.shape[0])]
    order = sorted(range(len(sims)), key=lambda j: (-sims[j], j))
    return [(j, sims[j]) for j in order[: min(k, len(sims))]]


# ---------------------------------------------------------- oracle: miner


def _oracle_matches(top_q, mean_q, mean_p, threshold):
    out = []
    for i, cands in enumerate(top_q):
        scored = []
        for j, cos in cands:
            den = 0.5 * (mean_q[i] + mean_p[j])
            scored.append((cos / max(den, DENOM_FLOOR), j))
        best = max(m for m, _ in scored)
        pos = min(j for m, j in scored if m == best)
        if threshold is None or best > threshold:
            out.append((i, pos, best))
    return out


def oracle_bidirectional(x64, y64, k, strict, threshold):
    """Forward/backward (query_row, pool_row, score) triples."""
    top_f = oracle_topk_rows(x64, y64, k)
    top_b = oracle_topk_rows(y64, x64, k)
    div_f = k if strict else min(k, y64.shape[0])
    div_b = k if strict else min(k, x64.shape[0])
    mean_x = [sum(c for _, c in cands) / div_f for cands in top_f]
    mean_y = [sum(c for _, c in cands) / div_b for cands in top_b]
    fwd = _oracle_matches(top_f, mean_x, mean_y, threshold)
    bwd = _oracle_matches(top_b, mean_y, mean_x, threshold)
    return fwd, bwd


def oracle_mine(job: MiningJob, cfg) -> dict[tuple[str, str], float]:
    """Full mining pass; returns {(src_key, tgt_key): score}."""
    src_ids = job.src_emb.ids
    tgt_ids = job.tgt_emb.ids

    if cfg.scope is Scope.DOCUMENT:
        src_rows: dict[str, list[int]] = {}
        tgt_rows: dict[str, list[int]] = {}
        for i, s in enumerate(job.src.sentences):
            src_rows.setdefault(s.doc_id, []).append(i)
        for i, s in enumerate(job.tgt.sentences):
            tgt_rows.setdefault(s.doc_id, []).append(i)
        tasks = []
        for link in job.pairing:
            x = sorted(src_rows.get(link.src_doc, []), key=lambda i: src_ids[i])
            y = sorted(tgt_rows.get(link.tgt_doc, []), key=lambda i: tgt_ids[i])
            if x and y:
                tasks.append((x, y))
    else:
        tasks = [
            (
                sorted(range(len(src_ids)), key=lambda i: src_ids[i]),
                sorted(range(len(tgt_ids)), key=lambda i: tgt_ids[i]),
            )
        ]

    fwd: dict[tuple[str, str], float] = {}
    bwd: dict[tuple[str, str], float] = {}
    for x_rows, y_rows in tasks:
        x64 = job.src_emb.vectors[x_rows].astype(np.float64)
        y64 = job.tgt_emb.vectors[y_rows].astype(np.float64)
        f, b = oracle_bidirectional(x64, y64, cfg.k, cfg.strict_topk_mean, cfg.threshold)
        for qi, pi, s in f:
            fwd[(src_ids[x_rows[qi]].key, tgt_ids[y_rows[pi]].key)] = s
        for qi, pi, s in b:
            bwd[(src_ids[x_rows[pi]].key, tgt_ids[y_rows[qi]].key)] = s

    if cfg.join is Join.INTERSECT:
        return {k: max(fwd[k], bwd[k]) for k in fwd if k in bwd}
    if cfg.join is Join.UNION:
        out = dict(fwd)
        for k, s in bwd.items():
            out[k] = max(out.get(k, float("-inf")), s)
        return out
    merged = dict(fwd)
    for k, s in bwd.items():
        if k not in merged or s > merged[k]:
            merged[k] = s
    kept: dict[tuple[str, str], float] = {}
    used_s: set[str] = set()
    used_t: set[str] = set()
    for (sk, tk), score in sorted(merged.items(), key=lambda kv: (-kv[1], kv[0])):
        if sk in used_s or tk in used_t:
            continue
        used_s.add(sk)
        used_t.add(tk)
        kept[(sk, tk)] = score
    return kept


# -------------------------------------------------- oracle: small metrics


def oracle_bleu(cand: list[str], ref: list[str], n: int) -> float:
    log_sum = 0.0
    for order in range(1, n + 1):
        cg = Counter(tuple(cand[i : i + order]) for i in range(len(cand) - order + 1))
        rg = Counter(tuple(ref[i : i + order]) for i in range(len(ref) - order + 1))
        total = sum(cg.values())
        if total == 0:
            continue
        matched = sum(min(c, rg[g]) for g, c in cg.items())
        log_sum += math.log((matched + 1) / (total + 1))
    c, r = len(cand), len(ref)
    bp = math.exp(1.0 - r / c) if c < r else 1.0
    return bp * math.exp(log_sum / n)


def oracle_vote(keys_a: set, keys_b: set, keys_c: set, min_count: int) -> set:
    universe = keys_a | keys_b | keys_c
    return {
        k
        for k in universe
        if (k in keys_a) + (k in keys_b) + (k in keys_c) >= min_count
    }


def oracle_prf(pred_keys: set, gold_keys: set) -> tuple[float, float, float]:
    correct = len(pred_keys & gold_keys)
    p = correct / len(pred_keys) if pred_keys else 0.0
    r = correct / len(gold_keys)
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


def oracle_hist(scores, bins: int, lo: float, hi: float) -> list[int]:
    counts = [0] * bins
    step = (hi - lo) / bins
    for s in scores:
        b = 0
        while b < bins - 1 and s >= lo + step * (b + 1):
            b += 1
        counts[b] += 1
    return counts


# --------------------------------------------------------------- builders


def sid(key: str) -> SentenceId:
    return SentenceId(Side.SOURCE, key)


def tid(key: str) -> SentenceId:
    return SentenceId(Side.TARGET, key)


def build_job(
    x: np.ndarray,
    y: np.ndarray,
    src_docs: list[str],
    tgt_docs: list[str],
    links: list[tuple[str, str]] | None = None,
    *,
    src_keys: list[str] | None = None,
    tgt_keys: list[str] | None = None,
) -> MiningJob:
    """Assemble a MiningJob from raw float32 arrays and doc labels."""
    src_keys = src_keys or [f"s{i:05d}" for i in range(len(src_docs))]
    tgt_keys = tgt_keys or [f"t{i:05d}" for i in range(len(tgt_docs))]
    src_ids = [sid(k) for k in src_keys]
    tgt_ids = [tid(k) for k in tgt_keys]
    src = CorpusSide(
        Side.SOURCE,
        [Sentence(i, f"src text {i.key}", doc_id=d) for i, d in zip(src_ids, src_docs)],
    )
    tgt = CorpusSide(
        Side.TARGET,
        [Sentence(i, f"tgt text {i.key}", doc_id=d) for i, d in zip(tgt_ids, tgt_docs)],
    )
    if links is None:
        links = sorted({(a, b) for a, b in zip(src_docs, tgt_docs)})
    pairing = DocumentPairing(
        [DocLink(f"L{n:04d}", a, b) for n, (a, b) in enumerate(links)]
    )
    return MiningJob(
        src=src,
        tgt=tgt,
        src_emb=validate_embedding_set(np.asarray(x, dtype=np.float32), src_ids),
        tgt_emb=validate_embedding_set(np.asarray(y, dtype=np.float32), tgt_ids),
        pairing=pairing,
    )


def make_planted_job(
    seed: int,
    n_docs: int,
    per_side: int,
    dim: int,
    sigma: float,
    *,
    permute: bool = True,
) -> tuple[MiningJob, set[tuple[str, str]]]:
    """Planted-alignment corpus: target vectors are noisy source copies.

    Gold pair i is (s<i>, t<i>); target storage order is shuffled within
    each document so id-sorting actually matters.
    """
    rng = np.random.default_rng(seed)
    n = n_docs * per_side
    x_raw = rng.standard_normal((n, dim))
    y_raw = x_raw + sigma * rng.standard_normal((n, dim))
    x = unit_rows(x_raw).astype(np.float32)
    y = unit_rows(y_raw).astype(np.float32)

    order = np.arange(n)
    if permute:
        for d in range(n_docs):
            seg = order[d * per_side : (d + 1) * per_side]
            rng.shuffle(seg)

    src_docs = [f"d{i // per_side:03d}" for i in range(n)]
    tgt_docs = [f"e{j // per_side:03d}" for j in order]
    links = [(f"d{d:03d}", f"e{d:03d}") for d in range(n_docs)]
    job = build_job(
        x,
        y[order],
        src_docs,
        tgt_docs,
        links,
        src_keys=[f"s{i:05d}" for i in range(n)],
        tgt_keys=[f"t{j:05d}" for j in order],
    )
    gold = {(f"s{i:05d}", f"t{i:05d}") for i in range(n)}
    return job, gold


def make_random_job(seed: int, *, dim: int = 32, max_doc: int = 60) -> MiningJob:
    """Randomly shaped multi-document job for oracle comparison.

    Mixes planted and unrelated vectors, tiny documents smaller than k,
    occasional duplicate vectors (exact cosine ties), and an
    empty-on-one-side document pair that mining must skip.
    """
    rng = np.random.default_rng(seed)
    n_docs = int(rng.integers(1, 5))
    src_docs: list[str] = []
    tgt_docs: list[str] = []
    links = []
    x_parts = []
    y_parts = []
    for d in range(n_docs):
        n_s = int(rng.integers(1, max_doc + 1))
        n_t = int(rng.integers(1, max_doc + 1))
        if rng.random() < 0.5:
            m = min(n_s, n_t)
            base = rng.standard_normal((m, dim))
            xs = np.concatenate([base, rng.standard_normal((n_s - m, dim))])
            ys = np.concatenate(
                [base + 0.2 * rng.standard_normal((m, dim)),
                 rng.standard_normal((n_t - m, dim))]
            )
        else:
            xs = rng.standard_normal((n_s, dim))
            ys = rng.standard_normal((n_t, dim))
        if n_s > 1 and rng.random() < 0.3:
            xs[int(rng.integers(n_s))] = xs[int(rng.integers(n_s))]
        if n_t > 1 and rng.random() < 0.3:
            ys[int(rng.integers(n_t))] = ys[int(rng.integers(n_t))]
        x_parts.append(xs)
        y_parts.append(ys)
        src_docs += [f"a{d:03d}"] * n_s
        tgt_docs += [f"b{d:03d}"] * n_t
        links.append((f"a{d:03d}", f"b{d:03d}"))
    if rng.random() < 0.3:
        # a link whose target document holds no sentences
        src_docs += ["a_lone"]
        x_parts.append(rng.standard_normal((1, dim)))
        links.append(("a_lone", "b_missing"))
        links.append(("a_lone", f"b{n_docs - 1:03d}"))
    x = unit_rows(np.concatenate(x_parts)).astype(np.float32)
    y = unit_rows(np.concatenate(y_parts)).astype(np.float32)
    return build_job(x, y, src_docs, tgt_docs, links)
