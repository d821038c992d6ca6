"""Translation models behind a common line-level interface.

Built-in identifiers:

* ``identity`` returns every line unchanged; serves any direction.
  This is the plumbing translator: it lets the full translate-and-embed
  pipeline run without model weights.
* ``upper`` uppercases lines; declared for the en-xx and xx-en
  directions only, which gives the direction check a real target.
* ``hf:<model-id>`` loads a Hugging Face translation model lazily
  (Marian-style checkpoints work). Direction bookkeeping is left to the
  caller since checkpoint names encode it already.
"""

from __future__ import annotations

from typing import Protocol, Sequence

from embed_export.errors import ModelLoadError, UnsupportedDirection

_HF_PREFIX = "hf:"


class Translator(Protocol):
    name: str
    #: directions this model serves, or None when any direction is fine
    directions: frozenset[str] | None

    def translate(self, lines: Sequence[str]) -> list[str]:
        ...


class IdentityTranslator:
    name = "identity"
    directions = None

    def translate(self, lines: Sequence[str]) -> list[str]:
        return list(lines)


class UppercaseTranslator:
    name = "upper"
    directions = frozenset({"en-xx", "xx-en"})

    def translate(self, lines: Sequence[str]) -> list[str]:
        return [line.upper() for line in lines]


class HuggingFaceTranslator:
    """Wraps a transformers translation pipeline. Built via load_translator."""

    directions = None

    def __init__(self, name: str, pipe):
        self.name = name
        self._pipe = pipe

    def translate(self, lines: Sequence[str]) -> list[str]:
        out = self._pipe(list(lines))
        return [item["translation_text"] for item in out]


def load_translator(identifier: str) -> Translator:
    """Resolve a translation model identifier.

    Raises ModelLoadError for unknown identifiers or construction
    failures.
    """
    if not identifier or not identifier.strip():
        raise ModelLoadError("empty translator identifier")
    identifier = identifier.strip()
    if identifier == "identity":
        return IdentityTranslator()
    if identifier == "upper":
        return UppercaseTranslator()
    if identifier.startswith(_HF_PREFIX):
        model_id = identifier[len(_HF_PREFIX):]
        if not model_id:
            raise ModelLoadError(f"missing model id in {identifier!r}")
        try:
            from transformers import pipeline
        except ImportError as exc:
            raise ModelLoadError(
                f"translator {identifier!r} needs the transformers package: {exc}"
            ) from exc
        try:
            pipe = pipeline("translation", model=model_id)
        except Exception as exc:
            raise ModelLoadError(f"cannot load translator {identifier!r}: {exc}") from exc
        return HuggingFaceTranslator(identifier, pipe)
    raise ModelLoadError(
        f"unknown translator {identifier!r}; use identity, upper, or hf:<model-id>"
    )


def check_direction(translator: Translator, direction: str | None) -> None:
    """Raise UnsupportedDirection if the model declares directions and the
    requested one is not among them."""
    if translator.directions is None:
        return
    if direction is None:
        raise UnsupportedDirection(
            f"translator {translator.name!r} requires a direction, one of "
            f"{sorted(translator.directions)}"
        )
    if direction not in translator.directions:
        raise UnsupportedDirection(
            f"translator {translator.name!r} does not serve {direction!r}; "
            f"supported: {sorted(translator.directions)}"
        )
