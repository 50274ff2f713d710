"""Exception types shared across the engine."""

from __future__ import annotations


class SemcubeError(Exception):
    """Base class for every error raised by this package."""


class TaxonomyError(SemcubeError):
    pass


class TaxonomyFormatError(TaxonomyError):
    """A taxonomy record does not follow the line-delimited JSON contract."""


class DuplicateConceptError(TaxonomyError):
    pass


class DanglingParentError(TaxonomyError):
    pass


class CycleError(TaxonomyError):
    """The parent relation contains a cycle; ``cycle`` lists the ids on it."""

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__("cycle in parent relation: " + " -> ".join(self.cycle))


class UnknownConceptError(TaxonomyError):
    def __init__(self, concept_id: str):
        self.concept_id = concept_id
        super().__init__(f"unknown concept: {concept_id!r}")


class IexmlParseError(SemcubeError):
    """Malformed annotated document. Carries the doc id and byte offset."""

    def __init__(self, message: str, doc_id: str, offset: int):
        self.doc_id = doc_id
        self.offset = offset
        super().__init__(f"{doc_id}: byte {offset}: {message}")


class SchemaViolationError(SemcubeError):
    pass


class DegenerateDocumentError(SemcubeError):
    """The ranking system for a document could not be solved or iterated."""


class InvalidOperationError(SemcubeError):
    """A browsing operation that is known but not applicable right now."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class UnknownBallError(SemcubeError):
    def __init__(self, concept_id: str):
        self.concept_id = concept_id
        super().__init__(f"no visible ball for concept {concept_id!r}")


class UnknownMapError(SemcubeError):
    def __init__(self, map_id: str):
        self.map_id = map_id
        super().__init__(f"unknown map: {map_id!r}")


class ConfigError(SemcubeError):
    pass


class SnapshotError(SemcubeError):
    pass


class IngestError(SemcubeError):
    pass
