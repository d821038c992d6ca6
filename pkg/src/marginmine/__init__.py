"""Margin-based bitext mining over precomputed sentence embeddings.

The package mines parallel sentence pairs from comparable corpora:
cosine similarity is rescored against the average similarity of each
vector's nearest neighbors, matches are taken in both directions and
merged, and optional translation channels vote on the result. Rule
filters and an evaluation harness round out the pipeline.
"""

from .channels import ChannelInputs, CombineMode, combine, mine_channel
from .core import (
    CandidatePair,
    Channel,
    CorpusSide,
    DocLink,
    DocumentPairing,
    EmbeddingSet,
    Join,
    MiningConfig,
    MiningJob,
    PairSet,
    Scope,
    Sentence,
    SentenceId,
    Side,
    pair_set_algebra,
    validate_embedding_set,
)
from .errors import ConfigError, InputError, MiningError
from .evaluation import (
    EvalReport,
    GoldAlignment,
    MarginHistogram,
    evaluate,
    histogram,
    histogram_csv,
    histogram_svg,
    summarize_methods,
)
from .filters import FilterKind, FilterSpec, apply_filters, bow_overlap, length_ratio, sentence_bleu
from .io import (
    load_job,
    read_doc_links,
    read_embeddings,
    read_gold,
    read_metadata,
    read_pairs,
    read_stopwords,
    read_translations,
    write_doc_links,
    write_embeddings,
    write_metadata,
    write_pairs,
)
from .knn import NeighborList, knn, mean_topk_cos
from .mining import THRESHOLD_PRESETS, margin_score, mine, mine_direction
from .preprocess import (
    CleanupConfig,
    DocLengthFilter,
    LengthFilterMode,
    clean_sentence,
    document_stats,
    filter_documents,
)

__version__ = "0.1.0"

__all__ = [
    "CandidatePair",
    "Channel",
    "ChannelInputs",
    "CleanupConfig",
    "CombineMode",
    "ConfigError",
    "CorpusSide",
    "DocLengthFilter",
    "DocLink",
    "DocumentPairing",
    "EmbeddingSet",
    "EvalReport",
    "FilterKind",
    "FilterSpec",
    "GoldAlignment",
    "InputError",
    "Join",
    "LengthFilterMode",
    "MarginHistogram",
    "MiningConfig",
    "MiningError",
    "MiningJob",
    "NeighborList",
    "PairSet",
    "Scope",
    "Sentence",
    "SentenceId",
    "Side",
    "THRESHOLD_PRESETS",
    "apply_filters",
    "bow_overlap",
    "clean_sentence",
    "combine",
    "document_stats",
    "evaluate",
    "filter_documents",
    "histogram",
    "histogram_csv",
    "histogram_svg",
    "knn",
    "length_ratio",
    "load_job",
    "margin_score",
    "mean_topk_cos",
    "mine",
    "mine_channel",
    "mine_direction",
    "pair_set_algebra",
    "read_doc_links",
    "read_embeddings",
    "read_gold",
    "read_metadata",
    "read_pairs",
    "read_stopwords",
    "read_translations",
    "sentence_bleu",
    "summarize_methods",
    "validate_embedding_set",
    "write_doc_links",
    "write_embeddings",
    "write_metadata",
    "write_pairs",
    "__version__",
]
