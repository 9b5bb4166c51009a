"""Exception hierarchy shared across the pipeline."""


class EquicheckError(Exception):
    """Base class for all pipeline errors."""


class UnsupportedLanguage(EquicheckError):
    def __init__(self, language: str):
        super().__init__(f"no adapter registered for language {language!r}")
        self.language = language


class ParseError(EquicheckError):
    pass


class UnsupportedConstruct(EquicheckError):
    def __init__(self, construct: str):
        super().__init__(f"no control-flow mapping for construct {construct!r}")
        self.construct = construct


class TransportError(EquicheckError):
    pass


class BudgetExceeded(EquicheckError):
    pass


class MalformedOutput(EquicheckError):
    pass


class AnalyzerUnavailable(EquicheckError):
    pass


class AgentTimeout(EquicheckError):
    pass


class AgentCrash(EquicheckError):
    pass


class MalformedAgentOutput(EquicheckError):
    pass


class MissingToolchain(EquicheckError):
    def __init__(self, language: str, command: str):
        super().__init__(f"toolchain {command!r} for {language} not found on PATH")
        self.language = language
        self.command = command


class PatchApplyError(EquicheckError):
    pass


class TestHarnessError(EquicheckError):
    pass


class IncompleteLog(EquicheckError):
    pass


class ConfigError(EquicheckError):
    pass
