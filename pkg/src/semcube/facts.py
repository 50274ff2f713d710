"""Per-document concept ranking and fact assignment.

Every document is reduced to one fact: for each dimension, the concept of
that dimension the document is most about. "Most about" is decided by a
smoothing walk over the document's concept affinity matrix M, built from
two signals with max precedence on overlap:

* concepts read in the same sentence reinforce each other fully
  (M[i][j] = M[j][i] = 1),
* a taxonomic link sends full weight down to the descendant and half
  weight up to the ancestor (c_i below c_j gives M[i][j] = 0.5 and
  M[j][i] = 1),

with ones on the diagonal and zeros elsewhere. M is normalized like a
graph Laplacian, S = D^(-1/2) M D^(-1/2) with D the diagonal of row sums,
and the rank vector solves R = (1 - alpha) (I - alpha S)^(-1) Y where Y
holds the document's concept frequencies scaled to unit sum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DegenerateDocumentError
from .iexml import AnnotatedDocument, sentence_cooccurrences
from .schema import Schema
from .taxonomy import Ontology

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.9

# Residual bound for accepting the direct solve; above it the literal
# propagation loop takes over and the document is flagged.
_RESIDUAL_TOLERANCE = 1e-8
_FALLBACK_ITERATIONS = 10000

# Scores this close (relative) count as tied and fall back to the concept
# with the smallest pre_index. Uniform documents produce mathematically
# equal ranks that differ by a few ulps after the solve.
_TIE_TOLERANCE = 1e-12


@dataclass
class AffinityMatrix:
    """Concept order plus the affinity values for one document."""

    concepts: tuple[str, ...]
    values: np.ndarray
    dropped: tuple[str, ...] = ()

    def __getitem__(self, pair: tuple[str, str]) -> float:
        i = self.concepts.index(pair[0])
        j = self.concepts.index(pair[1])
        return float(self.values[i, j])


@dataclass
class RankVector:
    """Concept id -> rank score for one document."""

    scores: dict[str, float]
    via_iteration: bool = False

    def __getitem__(self, concept_id: str) -> float:
        return self.scores[concept_id]

    def get(self, concept_id: str, default: float = 0.0) -> float:
        return self.scores.get(concept_id, default)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.scores

    def __iter__(self) -> Iterator[str]:
        return iter(self.scores)

    def __len__(self) -> int:
        return len(self.scores)

    def items(self):
        return self.scores.items()


@dataclass
class DocumentFact:
    """One row of the corpus: per dimension, the dominating concept."""

    doc_id: str
    assignments: dict[str, str | None]
    rank: RankVector


def build_affinity(doc: AnnotatedDocument, ontology: Ontology) -> AffinityMatrix:
    """Affinity matrix over the document's distinct resolvable cuis.

    Concept order follows first appearance in the document. Cuis missing
    from the ontology are dropped and reported in ``dropped``.
    """
    concepts: list[str] = []
    dropped: list[str] = []
    seen: set[str] = set()
    for mention in doc.mentions:
        for reading in mention.readings:
            cui = reading.cui
            if cui in seen:
                continue
            seen.add(cui)
            (concepts if cui in ontology else dropped).append(cui)
    if dropped:
        logger.warning("%s: dropped %d unknown cuis", doc.doc_id, len(dropped))

    n = len(concepts)
    index = {cid: i for i, cid in enumerate(concepts)}
    m = np.zeros((n, n))
    np.fill_diagonal(m, 1.0)
    for a, b in sentence_cooccurrences(doc):
        if a in index and b in index:
            m[index[a], index[b]] = 1.0
            m[index[b], index[a]] = 1.0
    for ci in concepts:
        for cj in concepts:
            if ci != cj and ontology.is_descendant(ci, cj):
                i, j = index[ci], index[cj]
                m[i, j] = max(m[i, j], 0.5)
                m[j, i] = max(m[j, i], 1.0)
    return AffinityMatrix(concepts=tuple(concepts), values=m,
                          dropped=tuple(dropped))


def normalize_laplacian(m: np.ndarray) -> np.ndarray:
    """S = D^(-1/2) M D^(-1/2) with D the diagonal of row sums."""
    if m.size == 0:
        return m.copy()
    degrees = m.sum(axis=1)
    if np.any(degrees <= 0):
        raise DegenerateDocumentError("affinity matrix has a zero row sum")
    scale = 1.0 / np.sqrt(degrees)
    return m * np.outer(scale, scale)


def normalize_frequencies(freqs: Sequence[float]) -> np.ndarray:
    """Scale a frequency vector to unit sum (zero vectors pass through)."""
    y = np.asarray(freqs, dtype=float)
    total = y.sum()
    return y / total if total > 0 else y.copy()


@dataclass
class RankResult:
    values: np.ndarray
    via_iteration: bool = False


def rank_concepts(s: np.ndarray, y: np.ndarray,
                  alpha: float = DEFAULT_ALPHA) -> RankResult:
    """Solve R = (1 - alpha) (I - alpha S)^(-1) Y.

    ``y`` is used as given; normalize it first if unit sum is intended.
    When the direct solve fails or its residual exceeds 1e-8, the literal
    propagation F <- alpha S F + (1 - alpha) Y runs for 10000 rounds and
    the result is flagged ``via_iteration``.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return RankResult(values=y.copy())
    a = np.eye(len(y)) - alpha * s
    try:
        r = (1.0 - alpha) * np.linalg.solve(a, y)
        residual = np.max(np.abs(a @ (r / (1.0 - alpha)) - y))
        if np.isfinite(residual) and residual <= _RESIDUAL_TOLERANCE * max(1.0, np.max(np.abs(y))):
            return RankResult(values=r)
    except np.linalg.LinAlgError:
        pass
    logger.warning("direct rank solve rejected; falling back to propagation")
    f = y.astype(float).copy()
    for _ in range(_FALLBACK_ITERATIONS):
        f = alpha * (s @ f) + (1.0 - alpha) * y
    if not np.all(np.isfinite(f)):
        raise DegenerateDocumentError("rank propagation diverged")
    return RankResult(values=f, via_iteration=True)


def rank_document(doc: AnnotatedDocument, ontology: Ontology,
                  alpha: float = DEFAULT_ALPHA) -> tuple[RankVector, AffinityMatrix]:
    """The full per-document pipeline up to the rank vector."""
    affinity = build_affinity(doc, ontology)
    if not affinity.concepts:
        return RankVector(scores={}), affinity
    s = normalize_laplacian(affinity.values)
    y = normalize_frequencies([doc.frequencies[c] for c in affinity.concepts])
    result = rank_concepts(s, y, alpha)
    scores = {cid: float(v) for cid, v in zip(affinity.concepts, result.values)}
    return RankVector(scores=scores, via_iteration=result.via_iteration), affinity


def build_fact(doc: AnnotatedDocument, schema: Schema,
               rank: RankVector) -> DocumentFact:
    """Pick, per dimension, the top-ranked annotated member concept.

    Dimensions with no annotated member get a null assignment. Scores
    within a 1e-12 relative band are treated as tied and resolved toward
    the smallest pre_index in the reference ontology.
    """
    ontology = schema.ontology
    assignments: dict[str, str | None] = {}
    for dim in schema.dimensions:
        candidates = [cid for cid in rank if cid in dim.member_concepts]
        if not candidates:
            assignments[dim.id] = None
            continue
        best = max(rank[cid] for cid in candidates)
        band = _TIE_TOLERANCE * max(1.0, abs(best))
        tied = [cid for cid in candidates if rank[cid] >= best - band]
        assignments[dim.id] = min(
            tied, key=lambda cid: ontology.descriptor(cid).pre_index)
    return DocumentFact(doc_id=doc.doc_id, assignments=assignments, rank=rank)


def normalize_document(doc: AnnotatedDocument, schema: Schema,
                       alpha: float = DEFAULT_ALPHA
                       ) -> tuple[DocumentFact, AffinityMatrix]:
    """Affinity, smoothing and fact assignment in one call."""
    rank, affinity = rank_document(doc, schema.ontology, alpha)
    return build_fact(doc, schema, rank), affinity
