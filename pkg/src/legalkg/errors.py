"""Exception hierarchy shared by every stage of the pipeline."""


class LegalKGError(Exception):
    """Base class for all errors raised by legalkg."""


class CorpusError(LegalKGError, ValueError):
    """Malformed or inconsistent input records."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ExtractionError(LegalKGError, ValueError):
    pass


class GraphSchemaError(LegalKGError, ValueError):
    """An insertion or import would violate the entity/relation schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownNodeError(LegalKGError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown node"


class UnknownDomainError(LegalKGError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown domain"


class Bm25Error(LegalKGError, ValueError):
    """BM25 index misuse (duplicate ids, unknown documents)."""


class RetrievalError(LegalKGError, ValueError):
    pass
