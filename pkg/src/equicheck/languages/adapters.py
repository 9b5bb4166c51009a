"""Adapters for the brace-delimited languages, built on the shared parser."""

from __future__ import annotations

from .clike import CLikeParser, LangConfig
from .model import FunctionFragment, LanguageId, SyntaxNode

_JAVA_KEYWORDS = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum",
    "extends", "final", "finally", "float", "for", "goto", "if", "implements",
    "import", "instanceof", "int", "interface", "long", "native", "new",
    "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while", "var", "true", "false",
    "null",
}

_JS_KEYWORDS = {
    "async", "await", "break", "case", "catch", "class", "const", "continue",
    "debugger", "default", "delete", "do", "else", "export", "extends",
    "finally", "for", "function", "if", "import", "in", "instanceof", "let",
    "new", "of", "return", "static", "super", "switch", "this", "throw",
    "try", "typeof", "var", "void", "while", "with", "yield", "true", "false",
    "null", "undefined",
}

_C_KEYWORDS = {
    "auto", "break", "case", "char", "const", "continue", "default", "do",
    "double", "else", "enum", "extern", "float", "for", "goto", "if",
    "inline", "int", "long", "register", "restrict", "return", "short",
    "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
    "unsigned", "void", "volatile", "while", "size_t", "bool", "true",
    "false", "NULL", "uint8_t", "uint16_t", "uint32_t", "uint64_t", "int8_t",
    "int16_t", "int32_t", "int64_t", "ssize_t", "FILE",
}

_GO_KEYWORDS = {
    "break", "case", "chan", "const", "continue", "default", "defer", "else",
    "fallthrough", "for", "func", "go", "goto", "if", "import", "interface",
    "map", "package", "range", "return", "select", "struct", "switch", "type",
    "var", "nil", "true", "false", "int", "int8", "int16", "int32", "int64",
    "uint", "uint8", "uint16", "uint32", "uint64", "float32", "float64",
    "string", "bool", "byte", "rune", "error", "make", "len", "cap", "new",
    "append", "copy", "delete", "panic", "recover", "print", "println",
}

_RUST_KEYWORDS = {
    "as", "async", "await", "break", "const", "continue", "crate", "dyn",
    "else", "enum", "extern", "fn", "for", "if", "impl", "in", "let", "loop",
    "match", "mod", "move", "mut", "pub", "ref", "return", "self", "Self",
    "static", "struct", "super", "trait", "type", "unsafe", "use", "where",
    "while", "true", "false", "i8", "i16", "i32", "i64", "i128", "u8", "u16",
    "u32", "u64", "u128", "f32", "f64", "usize", "isize", "bool", "char",
    "str", "String", "Vec", "Some", "None", "Ok", "Err",
}


class _CLikeAdapter:
    def __init__(self, language: LanguageId, config: LangConfig,
                 file_extensions: tuple[str, ...],
                 error_handling_markers: tuple[str, ...],
                 test_command: list[str]):
        self.language = language
        self._parser = CLikeParser(config)
        self.file_extensions = file_extensions
        self.error_handling_markers = error_handling_markers
        self.test_command = test_command

    def parse(self, fragment: FunctionFragment) -> SyntaxNode:
        return self._parser.parse(fragment)

    def find_function(self, file_text: str, qualified_name: str):
        return self._parser.find_function(file_text, qualified_name)

    def negate_condition(self, condition: str) -> str:
        return self._parser.negate_condition(condition)


def java_adapter() -> _CLikeAdapter:
    return _CLikeAdapter(
        LanguageId.JAVA,
        LangConfig(
            name="java",
            keywords=_JAVA_KEYWORDS,
            paren_conditions=True,
            auto_semicolon=False,
            decl_keywords={"var", "final"},
            has_try=True,
            has_throw=True,
            typed_decls=True,
        ),
        (".java",),
        ("try", "catch", "throw ", "throws ", "finally"),
        ["java", "{file}"],
    )


def javascript_adapter() -> _CLikeAdapter:
    return _CLikeAdapter(
        LanguageId.JAVASCRIPT,
        LangConfig(
            name="javascript",
            keywords=_JS_KEYWORDS,
            paren_conditions=True,
            auto_semicolon=True,
            decl_keywords={"let", "var", "const"},
            has_try=True,
            has_throw=True,
        ),
        (".js", ".mjs", ".cjs"),
        ("try", "catch", "throw ", "finally"),
        ["node", "{file}"],
    )


def c_adapter() -> _CLikeAdapter:
    return _CLikeAdapter(
        LanguageId.C,
        LangConfig(
            name="c",
            keywords=_C_KEYWORDS,
            paren_conditions=True,
            auto_semicolon=False,
            typed_decls=True,
        ),
        (".c", ".h"),
        ("errno", "perror", "exit(", "abort(", "assert("),
        ["sh", "-c", "cc {file} -o {out} && {out}"],
    )


def go_adapter() -> _CLikeAdapter:
    return _CLikeAdapter(
        LanguageId.GO,
        LangConfig(
            name="go",
            keywords=_GO_KEYWORDS,
            paren_conditions=False,
            auto_semicolon=True,
            decl_keywords={"var", "const"},
        ),
        (".go",),
        ("err != nil", "panic(", "recover(", "errors."),
        ["go", "run", "{file}"],
    )


def rust_adapter() -> _CLikeAdapter:
    return _CLikeAdapter(
        LanguageId.RUST,
        LangConfig(
            name="rust",
            keywords=_RUST_KEYWORDS,
            paren_conditions=False,
            auto_semicolon=False,
            decl_keywords={"let", "const"},
        ),
        (".rs",),
        ("panic!", "unwrap(", "expect(", "Result<", "? ;", ".err()"),
        ["sh", "-c", "rustc {file} -o {out} && {out}"],
    )
