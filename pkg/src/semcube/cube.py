"""Contingency cubes, relevance aggregation, and semantic bridges.

The corpus index holds one posting list per (dimension, concept) pair:
all documents whose fact assignment in that dimension lies at or below
the concept. Pair counts between two concept sets are intersections of
posting lists; they are cached per (dimension, concept set) pair because
the counts do not depend on the association measure or the contingency
completion mode.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import SchemaViolationError, UnknownConceptError
from .facts import DocumentFact, RankVector
from .schema import Category, Schema

MEASURES = ("interest_factor", "log_likelihood_ratio", "mutual_information", "f1")
CONTINGENCY_MODES = ("standard", "paper-literal")


@dataclass(frozen=True)
class ContingencyCell:
    concept_i: str
    concept_j: str
    n_ij: int
    n_i: int
    n_j: int


@dataclass(frozen=True)
class Bridge:
    concept_i: str
    concept_j: str
    measure: str
    score: float


class CorpusIndex:
    """Immutable fact store with descendant-closed posting lists."""

    def __init__(self, schema: Schema, facts: Sequence[DocumentFact],
                 object_types: Mapping[str, str] | None = None):
        self.schema = schema
        self.facts: dict[str, DocumentFact] = {}
        for fact in facts:
            if fact.doc_id in self.facts:
                raise SchemaViolationError(
                    f"duplicate document id {fact.doc_id!r}")
            for dim_id in fact.assignments:
                if dim_id not in schema:
                    raise SchemaViolationError(
                        f"fact {fact.doc_id!r} references unknown dimension "
                        f"{dim_id!r}")
            self.facts[fact.doc_id] = fact
        self.doc_ids: tuple[str, ...] = tuple(sorted(self.facts))
        self.ranks: dict[str, RankVector] = {
            doc_id: self.facts[doc_id].rank for doc_id in self.doc_ids}
        types = dict(object_types or {})
        self.object_types: dict[str, str] = {
            doc_id: types.get(doc_id, "document") for doc_id in self.doc_ids}

        self.postings: dict[tuple[str, str], tuple[str, ...]] = {}
        self._exact_docs: dict[tuple[str, str], tuple[str, ...]] = {}
        self._exact_score: dict[tuple[str, str], float] = {}
        self._build_postings()

        self._cube_cache: dict[tuple, dict[tuple[str, str], int]] = {}
        self._cache_lock = threading.Lock()

    @property
    def n_col(self) -> int:
        return len(self.doc_ids)

    def _build_postings(self) -> None:
        buckets: dict[tuple[str, str], list[str]] = {}
        exact: dict[tuple[str, str], list[str]] = {}
        for doc_id in self.doc_ids:
            fact = self.facts[doc_id]
            for dim in self.schema:
                concept = fact.assignments.get(dim.id)
                if concept is None:
                    continue
                if concept not in dim.fragment:
                    raise UnknownConceptError(concept)
                exact.setdefault((dim.id, concept), []).append(doc_id)
                for anc in dim.fragment.ancestors_of(concept):
                    buckets.setdefault((dim.id, anc), []).append(doc_id)
        self.postings = {k: tuple(v) for k, v in buckets.items()}
        self._exact_docs = {k: tuple(v) for k, v in exact.items()}
        for (dim_id, concept), docs in self._exact_docs.items():
            self._exact_score[(dim_id, concept)] = sum(
                self.ranks[d][concept] for d in docs)

    def exact_hits(self, dimension_id: str, concept_id: str) -> int:
        """Documents whose fact is exactly this concept."""
        return len(self._exact_docs.get((dimension_id, concept_id), ()))

    def exact_score(self, dimension_id: str, concept_id: str) -> float:
        return self._exact_score.get((dimension_id, concept_id), 0.0)

    def exact_docs(self, dimension_id: str, concept_id: str) -> tuple[str, ...]:
        return self._exact_docs.get((dimension_id, concept_id), ())


def index_corpus(facts: Sequence[DocumentFact], schema: Schema,
                 object_types: Mapping[str, str] | None = None) -> CorpusIndex:
    return CorpusIndex(schema, facts, object_types)


def hits(index: CorpusIndex, concept_id: str, dimension_id: str) -> int:
    """Documents whose fact in the dimension is at or below the concept."""
    return len(index.postings.get((dimension_id, concept_id), ()))


def annotated_descendant_score(index: CorpusIndex, doc_id: str,
                               concept_id: str) -> float:
    """Sum of the document's rank over annotated concepts at or below c."""
    ontology = index.schema.ontology
    rank = index.ranks[doc_id]
    total = 0.0
    for annotated, value in rank.items():
        if annotated in ontology and ontology.is_descendant(annotated, concept_id):
            total += value
    return total


def score_sum(index: CorpusIndex, concept_id: str, dimension_id: str) -> float:
    """Aggregate rank mass below the concept over its posting documents."""
    docs = index.postings.get((dimension_id, concept_id), ())
    return sum(annotated_descendant_score(index, d, concept_id) for d in docs)


def concept_relevance(index: CorpusIndex, concept_id: str, dimension_id: str,
                      aggregator: str = "sum", scorer: str = "hits",
                      distinct_docs: bool = False) -> float:
    """Aggregate per-descendant scores into one relevance value.

    Each descendant contributes its exact-assignment score (documents whose
    fact is that very concept), so with the sum aggregator every document is
    counted once even on multi-parent fragments. ``distinct_docs`` gathers
    the union of contributing documents instead of summing per descendant;
    with exact-assignment scores both modes agree, the flag exists so the
    deduplicating reading stays selectable.
    """
    if aggregator not in ("sum", "avg", "max"):
        raise ValueError(f"unknown aggregator {aggregator!r}")
    if scorer not in ("hits", "score_sum"):
        raise ValueError(f"unknown scorer {scorer!r}")
    dimension = index.schema[dimension_id]
    if concept_id not in dimension.fragment:
        raise UnknownConceptError(concept_id)
    descendants = sorted(dimension.fragment.descendants_of(concept_id))

    if distinct_docs and aggregator == "sum":
        seen: set[str] = set()
        total = 0.0
        for sub in descendants:
            for doc_id in index.exact_docs(dimension_id, sub):
                if doc_id in seen:
                    continue
                seen.add(doc_id)
                total += 1.0 if scorer == "hits" else index.ranks[doc_id][sub]
        return total

    if scorer == "hits":
        values = [float(index.exact_hits(dimension_id, sub))
                  for sub in descendants]
    else:
        values = [index.exact_score(dimension_id, sub) for sub in descendants]
    if aggregator == "sum":
        return sum(values)
    if aggregator == "avg":
        return sum(values) / len(values)
    return max(values)


def _layer_spec(layer) -> tuple[str, tuple[str, ...]]:
    """Accept a Category or a (dimension_id, concepts) pair."""
    if isinstance(layer, Category):
        return layer.dimension_id, tuple(sorted(layer.concepts))
    dim_id, concepts = layer
    return dim_id, tuple(sorted(concepts))


def pair_counts(index: CorpusIndex, layer_i, layer_j) -> dict[tuple[str, str], int]:
    """Co-occurrence counts for every concept pair with n_ij > 0, cached.

    The cache key ignores the association measure and contingency mode:
    counts depend only on the posting lists. Concurrent duplicate
    computation is harmless, the last writer stores an identical map.
    """
    dim_i, concepts_i = _layer_spec(layer_i)
    dim_j, concepts_j = _layer_spec(layer_j)
    if dim_i == dim_j:
        raise ValueError(
            f"contingency pair needs two distinct dimensions, got {dim_i!r}")
    key = (dim_i, concepts_i, dim_j, concepts_j)
    with index._cache_lock:
        cached = index._cube_cache.get(key)
    if cached is not None:
        return cached
    counts: dict[tuple[str, str], int] = {}
    for c_i in concepts_i:
        docs_i = set(index.postings.get((dim_i, c_i), ()))
        if not docs_i:
            continue
        for c_j in concepts_j:
            docs_j = index.postings.get((dim_j, c_j), ())
            n_ij = sum(1 for d in docs_j if d in docs_i)
            if n_ij:
                counts[(c_i, c_j)] = n_ij
    with index._cache_lock:
        index._cube_cache[key] = counts
    return counts


def build_cube(index: CorpusIndex, layer_i, layer_j) -> list[ContingencyCell]:
    """Cells with n_ij > 0; zero cells are reconstructible from marginals."""
    dim_i, concepts_i = _layer_spec(layer_i)
    dim_j, concepts_j = _layer_spec(layer_j)
    counts = pair_counts(index, layer_i, layer_j)
    cells = []
    for (c_i, c_j), n_ij in sorted(counts.items()):
        cells.append(ContingencyCell(
            c_i, c_j, n_ij, hits(index, c_i, dim_i), hits(index, c_j, dim_j)))
    return cells


def _g_squared(table: list[list[float]]) -> float:
    total = sum(sum(row) for row in table)
    if total <= 0:
        return 0.0
    row_totals = [sum(row) for row in table]
    col_totals = [sum(row[k] for row in table) for k in range(2)]
    g = 0.0
    for r in range(2):
        for k in range(2):
            observed = table[r][k]
            if observed <= 0:
                continue
            expected = row_totals[r] * col_totals[k] / total
            if expected <= 0:
                continue
            g += observed * math.log(observed / expected)
    return 2.0 * g


def measure_score(cell: ContingencyCell, n_col: int, measure: str,
                  contingency: str = "standard") -> float:
    """Association score of one cell under the named measure."""
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    if contingency not in CONTINGENCY_MODES:
        raise ValueError(f"unknown contingency mode {contingency!r}")
    n_ij, n_i, n_j = cell.n_ij, cell.n_i, cell.n_j
    if n_i == 0 or n_j == 0:
        raise ValueError(
            f"zero marginal for pair ({cell.concept_i!r}, {cell.concept_j!r})")
    if measure == "interest_factor":
        return n_ij * n_col / (n_i * n_j)
    if measure == "f1":
        return 2.0 * n_ij / (n_i + n_j)
    if measure == "mutual_information":
        if n_ij == 0:
            return float("-inf")
        return math.log2(n_ij * n_col / (n_i * n_j))
    bottom_right = n_col - n_i - n_j
    if contingency == "standard":
        bottom_right += n_ij
    table = [[float(n_ij), float(n_i - n_ij)],
             [float(n_j - n_ij), float(bottom_right)]]
    return _g_squared(table)


def bridges(index: CorpusIndex, layer_i, layer_j, measure: str,
            delta: float, contingency: str = "standard") -> list[Bridge]:
    """Concept pairs scoring strictly above delta, strongest first.

    Pairs with a zero marginal have no defined score and are skipped.
    Zero-count pairs are scored too: the log likelihood ratio can flag a
    strong negative association that the threshold may admit.
    """
    dim_i, concepts_i = _layer_spec(layer_i)
    dim_j, concepts_j = _layer_spec(layer_j)
    counts = pair_counts(index, layer_i, layer_j)
    found = []
    for c_i in concepts_i:
        n_i = hits(index, c_i, dim_i)
        if n_i == 0:
            continue
        for c_j in concepts_j:
            n_j = hits(index, c_j, dim_j)
            if n_j == 0:
                continue
            cell = ContingencyCell(c_i, c_j, counts.get((c_i, c_j), 0), n_i, n_j)
            score = measure_score(cell, index.n_col, measure, contingency)
            if score > delta:
                found.append(Bridge(c_i, c_j, measure, score))
    found.sort(key=lambda b: (-b.score, b.concept_i, b.concept_j))
    return found


def cube_rows_tsv(cells: Iterable[ContingencyCell], n_col: int, measure: str,
                  contingency: str = "standard") -> str:
    """Tab-separated dump of cube cells with their scores."""
    lines = []
    for cell in cells:
        score = measure_score(cell, n_col, measure, contingency)
        lines.append("\t".join((
            cell.concept_i, cell.concept_j, str(cell.n_ij),
            str(cell.n_i), str(cell.n_j), repr(score))))
    return "\n".join(lines)
