"""On-disk index format.

A snapshot is a directory of deterministic files:

    meta.json         format version, smoothing factor, ingest summary
    concepts.jsonl    the taxonomy, one record per line, sorted by id
    descriptors.jsonl interval labels as built at ingest time
    dimensions.json   dimension members plus category strata
    facts.jsonl       one fact per document: assignments and rank scores
    manifest.jsonl    document ids and their object types

Everything is written with sorted keys and canonical separators, so the
same inputs always produce byte-identical snapshots. Loading re-derives
the interval labels from the stored taxonomy and refuses the snapshot if
they disagree with the stored ones, which catches files produced by an
incompatible labeling scheme.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass
from pathlib import Path

from .cube import CorpusIndex
from .errors import SemcubeError, SnapshotError
from .facts import DocumentFact, RankVector
from .schema import Category, Dimension, Schema, validate_schema
from .taxonomy import Concept, ConceptDescriptor, Ontology, load_taxonomy

SNAPSHOT_VERSION = 1

_FILES = ("meta.json", "concepts.jsonl", "descriptors.jsonl",
          "dimensions.json", "facts.jsonl", "manifest.jsonl")


@dataclass
class IndexSnapshot:
    """Everything the service needs, reconstructed or about to be saved."""

    ontology: Ontology
    schema: Schema
    facts: list[DocumentFact]
    object_types: dict[str, str]
    alpha: float
    summary: dict
    version: int = SNAPSHOT_VERSION

    def to_index(self) -> CorpusIndex:
        return CorpusIndex(self.schema, self.facts, self.object_types)


def _canon_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False) + "\n"


def _canon_doc(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _concept_record(concept: Concept) -> dict:
    return {
        "id": concept.id,
        "preferred": concept.preferred_label,
        "lex": list(concept.lex),
        "semtypes": list(concept.semtypes),
        "parents": list(concept.parents),
        "group": concept.group,
    }


def _descriptor_record(descriptor: ConceptDescriptor) -> dict:
    return {
        "id": descriptor.concept_id,
        "pre_index": descriptor.pre_index,
        "anc_index": descriptor.anc_index,
        "desc_intervals": [list(pair) for pair in descriptor.desc_intervals],
        "anc_intervals": [list(pair) for pair in descriptor.anc_intervals],
        "topo_order": descriptor.topo_order,
    }


def _dimension_record(dim: Dimension) -> dict:
    return {
        "id": dim.id,
        "name": dim.name,
        "groups": list(dim.groups),
        "members": sorted(dim.member_concepts),
        "categories": [sorted(cat.concepts) for cat in dim.categories],
    }


def _fact_record(fact: DocumentFact) -> dict:
    return {
        "doc_id": fact.doc_id,
        "assignments": dict(fact.assignments),
        "rank": dict(fact.rank.items()),
    }


def save_snapshot(snapshot: IndexSnapshot, path) -> None:
    """Write the snapshot atomically.

    The files are assembled in a sibling directory and swapped in with a
    rename, so a crash can leave stray ``.partial`` or ``.stale``
    directories behind but never a half-written snapshot at ``path``.
    """
    path = Path(path)
    partial = path.with_name(path.name + ".partial")
    stale = path.with_name(path.name + ".stale")
    for leftover in (partial, stale):
        if leftover.exists():
            shutil.rmtree(leftover)
    partial.mkdir(parents=True)

    meta = {
        "version": snapshot.version,
        "alpha": snapshot.alpha,
        "summary": snapshot.summary,
    }
    (partial / "meta.json").write_text(_canon_doc(meta), encoding="utf-8")

    ontology = snapshot.ontology
    with open(partial / "concepts.jsonl", "w", encoding="utf-8") as out:
        for cid in ontology:
            out.write(_canon_line(_concept_record(ontology.concept(cid))))
    with open(partial / "descriptors.jsonl", "w", encoding="utf-8") as out:
        for cid in ontology:
            out.write(_canon_line(_descriptor_record(ontology.descriptor(cid))))

    dims = [_dimension_record(dim) for dim in snapshot.schema]
    (partial / "dimensions.json").write_text(_canon_doc(dims), encoding="utf-8")

    facts = sorted(snapshot.facts, key=lambda f: f.doc_id)
    with open(partial / "facts.jsonl", "w", encoding="utf-8") as out:
        for fact in facts:
            out.write(_canon_line(_fact_record(fact)))
    with open(partial / "manifest.jsonl", "w", encoding="utf-8") as out:
        for fact in facts:
            record = {"doc_id": fact.doc_id,
                      "object_type": snapshot.object_types.get(
                          fact.doc_id, "document")}
            out.write(_canon_line(record))

    if path.exists():
        path.rename(stale)
    partial.rename(path)
    if stale.exists():
        shutil.rmtree(stale)


def _read_lines(path: Path) -> list[dict]:
    records = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"{path.name}:{number}: bad JSON: {exc}") from exc
    return records


def load_snapshot(path) -> IndexSnapshot:
    """Read and verify a snapshot directory.

    Raises SnapshotError when the directory is incomplete, the format
    version does not match, the stored labels disagree with freshly
    rebuilt ones, the schema fails validation or a fact references a
    concept the taxonomy does not know.
    """
    path = Path(path)
    if not path.is_dir():
        raise SnapshotError(f"no snapshot at {path}")
    missing = [name for name in _FILES if not (path / name).is_file()]
    if missing:
        raise SnapshotError(
            f"snapshot at {path} is incomplete: missing {', '.join(missing)}")

    try:
        meta = json.loads((path / "meta.json").read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"meta.json: bad JSON: {exc}") from exc
    version = meta.get("version")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(
            f"snapshot format version {version!r} is not supported "
            f"(this build reads version {SNAPSHOT_VERSION})")
    alpha = meta.get("alpha", 0.9)
    summary = meta.get("summary", {})

    try:
        ontology = load_taxonomy(
            (path / "concepts.jsonl").read_text(encoding="utf-8").splitlines())
    except SemcubeError as exc:
        raise SnapshotError(f"concepts.jsonl: {exc}") from exc

    stored = _read_lines(path / "descriptors.jsonl")
    if len(stored) != len(ontology):
        raise SnapshotError(
            f"descriptors.jsonl holds {len(stored)} records for "
            f"{len(ontology)} concepts")
    for record in stored:
        cid = record.get("id")
        if cid not in ontology:
            raise SnapshotError(f"descriptor for unknown concept {cid!r}")
        if _descriptor_record(ontology.descriptor(cid)) != record:
            raise SnapshotError(
                f"stored labels for {cid!r} disagree with rebuilt ones; "
                "the snapshot was produced by an incompatible build")

    try:
        dim_records = json.loads(
            (path / "dimensions.json").read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"dimensions.json: bad JSON: {exc}") from exc
    dimensions = []
    for record in dim_records:
        members = record.get("members", [])
        for cid in members:
            if cid not in ontology:
                raise SnapshotError(
                    f"dimension {record.get('id')!r} member {cid!r} is not "
                    "in the taxonomy")
        try:
            fragment = ontology.extract_fragment(members)
        except SemcubeError as exc:
            raise SnapshotError(
                f"dimension {record.get('id')!r}: {exc}") from exc
        if set(fragment.concepts) != set(members):
            raise SnapshotError(
                f"dimension {record.get('id')!r} member list is not closed "
                "under ancestors")
        dim = Dimension(
            id=record["id"], name=record.get("name", record["id"]),
            groups=tuple(record.get("groups", ())),
            member_concepts=frozenset(members), fragment=fragment)
        dim.categories = [
            Category(dimension_id=dim.id, level_index=i,
                     concepts=frozenset(level))
            for i, level in enumerate(record.get("categories", []))]
        dimensions.append(dim)
    problems = validate_schema(dimensions)
    if problems:
        raise SnapshotError(
            "stored schema fails validation: "
            + "; ".join(v.message for v in problems[:5]))
    schema = Schema(ontology, dimensions)

    flagged = set(summary.get("flagged_docs", ()))
    facts: list[DocumentFact] = []
    seen: set[str] = set()
    for record in _read_lines(path / "facts.jsonl"):
        doc_id = record.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise SnapshotError("facts.jsonl: record without doc_id")
        if doc_id in seen:
            raise SnapshotError(f"facts.jsonl: duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        assignments = record.get("assignments", {})
        for dim_id, cid in assignments.items():
            if dim_id not in schema:
                raise SnapshotError(
                    f"fact {doc_id!r} references unknown dimension {dim_id!r}")
            if cid is not None and cid not in ontology:
                raise SnapshotError(
                    f"fact {doc_id!r} assigns unknown concept {cid!r}")
        scores = record.get("rank", {})
        for cid in scores:
            if cid not in ontology:
                raise SnapshotError(
                    f"fact {doc_id!r} ranks unknown concept {cid!r}")
        rank = RankVector({cid: float(score) for cid, score in scores.items()},
                          via_iteration=doc_id in flagged)
        facts.append(DocumentFact(doc_id, dict(assignments), rank))

    object_types: dict[str, str] = {}
    for record in _read_lines(path / "manifest.jsonl"):
        object_types[record["doc_id"]] = record.get("object_type", "document")
    if set(object_types) != seen:
        raise SnapshotError("manifest.jsonl does not list the same documents "
                            "as facts.jsonl")

    return IndexSnapshot(ontology=ontology, schema=schema, facts=facts,
                         object_types=object_types, alpha=alpha,
                         summary=summary, version=version)
