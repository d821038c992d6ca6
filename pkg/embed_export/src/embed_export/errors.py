"""Exception hierarchy for the export tool."""


class ExportError(Exception):
    """Base class for everything this package raises on purpose."""


class ConfigError(ExportError):
    """A spec or identifier is malformed (bad batch size, bad model string)."""


class InputError(ExportError):
    """An input file is missing or unreadable."""


class FormatError(InputError):
    """An input file exists but its contents violate the format."""


class ModelLoadError(ExportError):
    """An encoder or translation model could not be constructed."""


class EncodingError(ExportError):
    """A model produced unusable output for a specific input line."""


class UnsupportedDirection(ExportError):
    """The requested translation direction is not one the model serves."""
