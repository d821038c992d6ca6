"""Turn sentence metadata files into embedding and translation files.

This package sits upstream of the mining engine: it reads the same
metadata JSONL the engine consumes, runs an encoder (and optionally a
translation model) over the text column, and writes the binary
embedding format and line-aligned translation text the engine expects.
It never imports the engine; the file formats are the whole contract.
"""

from embed_export.errors import (
    ConfigError,
    EncodingError,
    ExportError,
    FormatError,
    InputError,
    ModelLoadError,
    UnsupportedDirection,
)
from embed_export.export import (
    EmbeddingExport,
    ExportSpec,
    TranslationExport,
    export_embeddings,
    export_translations,
    read_metadata,
)
from embed_export.encoders import Encoder, HashEncoder, load_encoder
from embed_export.translators import Translator, check_direction, load_translator

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "EncodingError",
    "ExportError",
    "FormatError",
    "InputError",
    "ModelLoadError",
    "UnsupportedDirection",
    "EmbeddingExport",
    "ExportSpec",
    "TranslationExport",
    "export_embeddings",
    "export_translations",
    "read_metadata",
    "Encoder",
    "HashEncoder",
    "load_encoder",
    "Translator",
    "check_direction",
    "load_translator",
    "__version__",
]
