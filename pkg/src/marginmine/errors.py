"""Exception hierarchy for the mining engine.

Two branches matter to callers: InputError covers malformed or
inconsistent data (bad files, id mismatches, empty inputs) and maps to
process exit code 2; ConfigError covers invalid parameter combinations
and maps to exit code 3.
"""

from __future__ import annotations


class MiningError(Exception):
    """Base class for every error raised by this package."""


class InputError(MiningError):
    """The data handed to the engine is malformed or inconsistent."""


class ConfigError(MiningError):
    """A parameter value or combination of parameters is invalid."""


class FormatError(InputError):
    """A file does not conform to its declared layout.

    ``line`` is 1-based when the failure can be pinned to a line.
    """

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
            if line is not None:
                prefix = f"{path}:{line}: "
        super().__init__(prefix + message)


class IdMismatch(InputError):
    """Two inputs that must describe the same sentences disagree on ids."""


class DimensionMismatch(InputError):
    """Embedding rows do not all share one dimensionality."""


class NonFinite(InputError):
    """An embedding contains NaN or infinity."""


class DegenerateVector(InputError):
    """An embedding row has (near-)zero norm and cannot be normalized."""


class EmptyCorpus(InputError):
    """A filtering step removed every document."""


class MissingDocument(InputError):
    """Document links and sentence metadata disagree about which documents exist."""


class EmptyPool(InputError):
    """A neighbor search was asked to rank an empty candidate pool."""


class EmptyNeighborList(InputError):
    """A top-k mean was requested over zero neighbors."""


class NoDocumentLinks(InputError):
    """Document-scoped mining needs at least one linked document pair."""


class MissingChannel(InputError):
    """A translation channel was requested without its embeddings."""


class EmptyText(InputError):
    """A text-level filter received an empty or whitespace-only sentence."""


class BothEmptyAfterFiltering(InputError):
    """Both token sets vanished (e.g. all stopwords), leaving overlap undefined."""


class EmptyInput(InputError):
    """A string operation received empty input where content is required."""


class MissingTranslation(InputError):
    """A translation-based filter found no translation for either side of a pair."""


class EmptyGold(InputError):
    """Evaluation needs a non-empty gold alignment."""


class EmptyPairSet(InputError):
    """A histogram needs at least one scored pair."""


class MissingBaseline(InputError):
    """A method comparison names a baseline absent from the report table."""
