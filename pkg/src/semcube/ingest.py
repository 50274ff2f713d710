"""Corpus ingestion: taxonomy + annotated documents -> persisted index.

The pipeline is all-or-nothing. Every document must parse and normalize
before anything is written, and the snapshot lands through an atomic
directory swap, so a failed run leaves any previous index untouched. A
sibling ``<index>.lock`` file keeps two ingests from racing each other.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from pathlib import Path

from .config import EngineConfig
from .errors import (DegenerateDocumentError, IexmlParseError, IngestError,
                     SemcubeError)
from .facts import normalize_document
from .iexml import AnnotatedDocument, read_corpus
from .schema import build_schema
from .snapshot import IndexSnapshot, save_snapshot
from .taxonomy import load_taxonomy_path


@contextmanager
def ingest_lock(index_path: Path):
    """Exclusive advisory lock for one index directory."""
    lock_path = index_path.with_name(index_path.name + ".lock")
    lock_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise IngestError(
            f"another ingest is running (lock file {lock_path} exists; "
            "remove it if that run crashed)") from None
    try:
        os.write(fd, f"{os.getpid()}\n".encode("ascii"))
        os.close(fd)
        yield
    finally:
        try:
            os.unlink(lock_path)
        except FileNotFoundError:
            pass


def _load_documents(corpus_path: Path) -> list[AnnotatedDocument]:
    try:
        docs = list(read_corpus(corpus_path))
    except IexmlParseError as exc:
        raise IngestError(f"corpus document {exc.doc_id!r}: {exc}") from exc
    except SemcubeError as exc:
        raise IngestError(f"corpus: {exc}") from exc
    except OSError as exc:
        raise IngestError(f"cannot read corpus {corpus_path}: {exc}") from exc
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise IngestError(f"corpus document {doc.doc_id!r} appears twice")
        seen.add(doc.doc_id)
    return docs


def build_index(config: EngineConfig) -> IndexSnapshot:
    """The ingest pipeline up to, but not including, persistence."""
    if not config.taxonomy.is_file():
        raise IngestError(f"taxonomy file not found: {config.taxonomy}")
    if not config.corpus.exists():
        raise IngestError(f"corpus not found: {config.corpus}")

    try:
        ontology = load_taxonomy_path(config.taxonomy)
    except SemcubeError as exc:
        raise IngestError(f"taxonomy: {exc}") from exc

    docs = _load_documents(config.corpus)

    known: set[str] = set()
    dropped: set[str] = set()
    for doc in docs:
        for mention in doc.mentions:
            for reading in mention.readings:
                target = known if reading.cui in ontology else dropped
                target.add(reading.cui)

    try:
        schema = build_schema(ontology, known, config.group_map)
    except SemcubeError as exc:
        raise IngestError(f"schema: {exc}") from exc

    facts = []
    object_types: dict[str, str] = {}
    flagged: list[str] = []
    for doc in docs:
        try:
            fact, _ = normalize_document(doc, schema, config.alpha)
        except DegenerateDocumentError as exc:
            raise IngestError(f"document {doc.doc_id!r}: {exc}") from exc
        facts.append(fact)
        object_types[doc.doc_id] = doc.object_type
        if fact.rank.via_iteration:
            flagged.append(doc.doc_id)

    summary = {
        "documents": len(docs),
        "dimensions": len(schema.dimensions),
        "distinct_concepts": len(known),
        "dropped_cuis": sorted(dropped),
        "flagged_docs": sorted(flagged),
    }
    snapshot = IndexSnapshot(
        ontology=ontology, schema=schema, facts=facts,
        object_types=object_types, alpha=config.alpha, summary=summary)
    try:
        snapshot.to_index()
    except SemcubeError as exc:
        raise IngestError(f"index self-check failed: {exc}") from exc
    return snapshot


def run_ingest(config: EngineConfig) -> dict:
    """Build and persist the index described by ``config``.

    Returns the ingest summary (the same dict stored in the snapshot).
    """
    with ingest_lock(config.index):
        snapshot = build_index(config)
        save_snapshot(snapshot, config.index)
    return snapshot.summary
