"""Language adapter registry.

Adapters are immutable after registration; ``parse_fragment`` is safe to call
from concurrent workers.
"""

from __future__ import annotations

from ..errors import UnsupportedLanguage
from .adapters import (
    c_adapter,
    go_adapter,
    java_adapter,
    javascript_adapter,
    rust_adapter,
)
from .model import (
    FunctionFragment,
    LanguageId,
    SyntaxNode,
    TranslationPair,
    language_from_name,
)
from .python_lang import PythonAdapter

_REGISTRY: dict[LanguageId, object] = {}


def register_adapter(adapter) -> None:
    _REGISTRY[adapter.language] = adapter


def get_adapter(language: LanguageId):
    try:
        return _REGISTRY[language]
    except KeyError:
        raise UnsupportedLanguage(str(language))


def supported_languages() -> set[LanguageId]:
    return set(_REGISTRY)


def parse_fragment(fragment: FunctionFragment) -> SyntaxNode:
    return get_adapter(fragment.language).parse(fragment)


def _register_builtins() -> None:
    register_adapter(PythonAdapter())
    register_adapter(java_adapter())
    register_adapter(javascript_adapter())
    register_adapter(c_adapter())
    register_adapter(go_adapter())
    register_adapter(rust_adapter())


_register_builtins()

__all__ = [
    "FunctionFragment",
    "LanguageId",
    "SyntaxNode",
    "TranslationPair",
    "language_from_name",
    "get_adapter",
    "parse_fragment",
    "register_adapter",
    "supported_languages",
]
