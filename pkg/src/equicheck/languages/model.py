"""Core data model for function fragments and their uniform syntax trees.

Every language adapter parses a fragment into the same ``SyntaxNode`` shape so
the CFG and data-flow builders never look at language-specific grammars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class LanguageId(str, Enum):
    PYTHON = "python"
    JAVA = "java"
    JAVASCRIPT = "javascript"
    GO = "go"
    RUST = "rust"
    C = "c"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


_ALIASES = {"js": "javascript", "py": "python", "golang": "go"}


def language_from_name(name: str) -> LanguageId:
    lowered = name.lower()
    try:
        return LanguageId(_ALIASES.get(lowered, lowered))
    except ValueError:
        from ..errors import UnsupportedLanguage

        raise UnsupportedLanguage(name)


@dataclass(frozen=True)
class FunctionFragment:
    """A single function/method plus where it came from."""

    language: LanguageId
    source_text: str
    qualified_name: str = ""
    file_path: Optional[str] = None
    span: Optional[tuple[int, int]] = None  # 1-based inclusive line range


@dataclass(frozen=True)
class TranslationPair:
    source: FunctionFragment
    target: FunctionFragment
    same_language_override: bool = False

    def __post_init__(self):
        if (
            self.source.language == self.target.language
            and not self.same_language_override
        ):
            from ..errors import ConfigError

            raise ConfigError(
                "source and target share a language; "
                "set same_language_override to allow self-pairs"
            )


@dataclass
class SyntaxNode:
    """Uniform syntax-tree node.

    ``kind`` uses a small adapter-independent vocabulary (``if_statement``,
    ``block``, ``return_statement``, ...) so downstream passes are generic.
    ``span`` is a half-open character range into the fragment's source_text.
    """

    kind: str
    span: tuple[int, int]
    children: list["SyntaxNode"] = field(default_factory=list)
    # condition / name payloads some kinds carry (e.g. the condition text of
    # an if_statement, the variable list of a parameters node)
    text: str = ""
    # adapter-supplied side data: display header, def/use name lists, is_call
    extra: dict = field(default_factory=dict)

    def slice(self, source: str) -> str:
        return source[self.span[0] : self.span[1]]

    def find_all(self, kind: str) -> list["SyntaxNode"]:
        out = []
        if self.kind == kind:
            out.append(self)
        for child in self.children:
            out.extend(child.find_all(kind))
        return out
