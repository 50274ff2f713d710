"""Layered conceptual maps over the corpus index.

A map is an ordered stack of layers, each showing an antichain of concept
balls from one dimension, with bridges between adjacent layers. Maps are
mutable session objects: drill-down swaps a ball for its children, roll-up
undoes that, keep-only and remove filter what is visible. The underlying
index never changes; bridge recomputation after a drill always equals a
fresh computation over the current ball sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cube import (
    Bridge,
    CorpusIndex,
    annotated_descendant_score,
    bridges,
    concept_relevance,
)
from .errors import InvalidOperationError, UnknownBallError, UnknownConceptError
from .schema import Dimension, Schema
from .taxonomy import match_lexicon

BALL_STATES = ("normal", "expanded-child", "query-match")
SCORERS = ("hits", "score_sum")


@dataclass
class Ball:
    concept_id: str
    label: str
    relevance: float
    state: str = "normal"


@dataclass(frozen=True)
class ExpansionRecord:
    """What a drill-down did, so roll-up can undo it."""

    parent: str
    parent_state: str
    children: tuple[str, ...]


@dataclass
class MapLayer:
    dimension_id: str
    source: str
    balls: list[Ball]

    def concept_ids(self) -> list[str]:
        return [b.concept_id for b in self.balls]


@dataclass
class ConceptMap:
    map_id: str
    layers: list[MapLayer]
    bridges: dict[tuple[int, int], list[Bridge]]
    measure: str
    delta: float
    scorer: str
    contingency: str = "standard"
    query: tuple[str, ...] = ()
    expansions: dict[int, list[ExpansionRecord]] = field(default_factory=dict)

    def layer(self, index: int) -> MapLayer:
        if not 0 <= index < len(self.layers):
            raise ValueError(f"layer index {index} out of range")
        return self.layers[index]

    def find_ball(self, layer_index: int, concept_id: str) -> Ball:
        for ball in self.layer(layer_index).balls:
            if ball.concept_id == concept_id:
                return ball
        raise UnknownBallError(concept_id)


@dataclass(frozen=True)
class DrillHit:
    doc_id: str
    object_type: str
    score: float


def dimension_of_fragment(schema: Schema, concept_id: str) -> Dimension:
    """The unique dimension whose fragment holds the concept.

    Fragments are pairwise disjoint by schema validation, so at most one
    dimension can match.
    """
    for dim in schema:
        if concept_id in dim.fragment:
            return dim
    raise UnknownConceptError(concept_id)


def _make_ball(index: CorpusIndex, dimension: Dimension, concept_id: str,
               state: str, scorer: str) -> Ball:
    concept = dimension.fragment.concept(concept_id)
    relevance = concept_relevance(index, concept_id, dimension.id,
                                  "sum", scorer)
    return Ball(concept_id, concept.preferred_label, relevance, state)


def _sort_balls(dimension: Dimension, balls: list[Ball]) -> None:
    balls.sort(key=lambda b: dimension.fragment.descriptor(b.concept_id).pre_index)


def define_layer(index: CorpusIndex, dimension_id: str, category_index: int,
                 scorer: str = "hits") -> MapLayer:
    """One ball per concept of the chosen category, in taxonomy order."""
    dimension = index.schema[dimension_id]
    if not 0 <= category_index < len(dimension.categories):
        raise ValueError(
            f"dimension {dimension_id!r} has no category {category_index}")
    category = dimension.categories[category_index]
    balls = [_make_ball(index, dimension, cid, "normal", scorer)
             for cid in category.concepts]
    _sort_balls(dimension, balls)
    return MapLayer(dimension_id, f"category:{category_index}", balls)


def define_layer_by_query(index: CorpusIndex, dimension_id: str,
                          keywords: Sequence[str],
                          scorer: str = "hits") -> MapLayer:
    """Most specific concepts of the dimension matching every keyword."""
    if not keywords:
        raise ValueError("query layer needs at least one keyword")
    dimension = index.schema[dimension_id]
    fragment = dimension.fragment
    matches = [cid for cid in fragment
               if match_lexicon(fragment.concept(cid), keywords)]
    specific = [cid for cid in matches
                if not any(other != cid and fragment.is_descendant(other, cid)
                           for other in matches)]
    balls = [_make_ball(index, dimension, cid, "query-match", scorer)
             for cid in specific]
    _sort_balls(dimension, balls)
    return MapLayer(dimension_id, "query:" + " ".join(keywords), balls)


def contains(index: CorpusIndex, dimension_id: str, concept_id: str,
             keywords: Sequence[str]) -> set[str]:
    """Concepts at or below the given one whose lexicon matches."""
    dimension = index.schema[dimension_id]
    fragment = dimension.fragment
    if concept_id not in fragment:
        raise UnknownConceptError(concept_id)
    return {cid for cid in fragment.descendants_of(concept_id)
            if match_lexicon(fragment.concept(cid), keywords)}


@dataclass(frozen=True)
class LayerRequest:
    """How one layer should be populated: a category index or a query."""

    dimension_id: str
    category: int | None = None
    keywords: tuple[str, ...] = ()


def build_map(index: CorpusIndex, map_id: str,
              requests: Sequence[LayerRequest],
              query: Sequence[str] = (),
              measure: str = "interest_factor", delta: float = 1.0,
              scorer: str = "hits",
              contingency: str = "standard") -> ConceptMap:
    if scorer not in SCORERS:
        raise ValueError(f"unknown scorer {scorer!r}")
    if not requests:
        raise ValueError("a map needs at least one layer")
    layers = []
    for request in requests:
        has_query = bool(request.keywords)
        if has_query == (request.category is not None):
            raise ValueError(
                "layer must give exactly one of category or keywords")
        if has_query:
            layers.append(define_layer_by_query(
                index, request.dimension_id, request.keywords, scorer))
        else:
            layers.append(define_layer(
                index, request.dimension_id, request.category, scorer))
    query = tuple(query)
    if query:
        for layer in layers:
            for ball in layer.balls:
                if ball.state != "normal":
                    continue
                if contains(index, layer.dimension_id, ball.concept_id, query):
                    ball.state = "query-match"
    concept_map = ConceptMap(map_id, layers, {}, measure, float(delta),
                             scorer, contingency, query)
    for i in range(len(layers) - 1):
        _recompute_pair(concept_map, index, i)
    return concept_map


def _recompute_pair(concept_map: ConceptMap, index: CorpusIndex,
                    left: int) -> None:
    if not 0 <= left < len(concept_map.layers) - 1:
        return
    layer_i = concept_map.layers[left]
    layer_j = concept_map.layers[left + 1]
    concept_map.bridges[(left, left + 1)] = bridges(
        index,
        (layer_i.dimension_id, layer_i.concept_ids()),
        (layer_j.dimension_id, layer_j.concept_ids()),
        concept_map.measure, concept_map.delta, concept_map.contingency)


def _prune_dangling(concept_map: ConceptMap) -> None:
    for (i, j), items in concept_map.bridges.items():
        left = set(concept_map.layers[i].concept_ids())
        right = set(concept_map.layers[j].concept_ids())
        concept_map.bridges[(i, j)] = [
            b for b in items
            if b.concept_i in left and b.concept_j in right]


def drill_down(concept_map: ConceptMap, index: CorpusIndex,
               layer_index: int, concept_id: str) -> ConceptMap:
    """Swap a ball for its children and rebuild the touched bridges."""
    layer = concept_map.layer(layer_index)
    ball = concept_map.find_ball(layer_index, concept_id)
    dimension = index.schema[layer.dimension_id]
    fragment = dimension.fragment
    children = fragment.children_of(concept_id)
    if not children:
        raise InvalidOperationError(
            "leaf-concept", f"{concept_id!r} has no children to expand")
    others = [cid for cid in layer.concept_ids() if cid != concept_id]
    added: list[str] = []
    for child in children:
        # children arrive ancestors-first, so a comparable pair among the
        # children themselves keeps the shallower one
        comparable = any(fragment.is_descendant(child, o)
                         or fragment.is_descendant(o, child)
                         for o in others + added)
        if not comparable:
            added.append(child)
    layer.balls.remove(ball)
    for child in added:
        layer.balls.append(
            _make_ball(index, dimension, child, "expanded-child",
                       concept_map.scorer))
    _sort_balls(dimension, layer.balls)
    concept_map.expansions.setdefault(layer_index, []).append(
        ExpansionRecord(concept_id, ball.state, tuple(added)))
    _recompute_pair(concept_map, index, layer_index - 1)
    _recompute_pair(concept_map, index, layer_index)
    return concept_map


def roll_up(concept_map: ConceptMap, index: CorpusIndex,
            layer_index: int, concept_id: str) -> ConceptMap:
    """Undo the drill-down that produced the concept (or the concept's own).

    The concept may name either the collapsed parent or any child it
    introduced. Expansions nested below the restored parent collapse with
    it.
    """
    layer = concept_map.layer(layer_index)
    records = concept_map.expansions.get(layer_index, [])
    record = None
    for candidate in reversed(records):
        if candidate.parent == concept_id:
            record = candidate
            break
    if record is None:
        for candidate in reversed(records):
            if concept_id in candidate.children:
                record = candidate
                break
    if record is None:
        raise InvalidOperationError(
            "no-expansion", f"{concept_id!r} was not produced by a drill-down")
    dimension = index.schema[layer.dimension_id]
    fragment = dimension.fragment
    parent = record.parent
    # anything comparable to the parent goes: its drilled lineage below,
    # and any coarser view that slipped in after the lineage was filtered
    # away, so the layer stays an antichain
    layer.balls = [
        ball for ball in layer.balls
        if not (fragment.is_descendant(ball.concept_id, parent)
                or fragment.is_descendant(parent, ball.concept_id))]
    layer.balls.append(
        _make_ball(index, dimension, parent, record.parent_state,
                   concept_map.scorer))
    _sort_balls(dimension, layer.balls)
    concept_map.expansions[layer_index] = [
        r for r in records if not fragment.is_descendant(r.parent, parent)]
    _recompute_pair(concept_map, index, layer_index - 1)
    _recompute_pair(concept_map, index, layer_index)
    return concept_map


def keep_only(concept_map: ConceptMap, layer_index: int,
              concept_id: str) -> ConceptMap:
    """Focus on one ball: its layer shrinks to it, neighbours keep only
    balls bridged to it under the map's current bridges."""
    ball = concept_map.find_ball(layer_index, concept_id)
    concept_map.layer(layer_index).balls = [ball]
    left_pair = (layer_index - 1, layer_index)
    if left_pair in concept_map.bridges:
        linked = {b.concept_i for b in concept_map.bridges[left_pair]
                  if b.concept_j == concept_id}
        left_layer = concept_map.layers[layer_index - 1]
        left_layer.balls = [b for b in left_layer.balls
                            if b.concept_id in linked]
    right_pair = (layer_index, layer_index + 1)
    if right_pair in concept_map.bridges:
        linked = {b.concept_j for b in concept_map.bridges[right_pair]
                  if b.concept_i == concept_id}
        right_layer = concept_map.layers[layer_index + 1]
        right_layer.balls = [b for b in right_layer.balls
                             if b.concept_id in linked]
    _prune_dangling(concept_map)
    return concept_map


def remove_concept(concept_map: ConceptMap, layer_index: int,
                   concept_id: str) -> ConceptMap:
    ball = concept_map.find_ball(layer_index, concept_id)
    concept_map.layer(layer_index).balls.remove(ball)
    _prune_dangling(concept_map)
    return concept_map


def drill_through_concept(index: CorpusIndex,
                          concept_id: str) -> list[DrillHit]:
    """Documents below the concept, strongest annotation mass first."""
    dimension = dimension_of_fragment(index.schema, concept_id)
    docs = index.postings.get((dimension.id, concept_id), ())
    hits = [DrillHit(doc_id, index.object_types[doc_id],
                     annotated_descendant_score(index, doc_id, concept_id))
            for doc_id in docs]
    hits.sort(key=lambda h: (-h.score, h.doc_id))
    return hits


def drill_through_bridge(index: CorpusIndex, concept_i: str,
                         concept_j: str) -> list[DrillHit]:
    """Documents under both endpoints, scored by the product of sides."""
    dim_i = dimension_of_fragment(index.schema, concept_i)
    dim_j = dimension_of_fragment(index.schema, concept_j)
    docs_i = set(index.postings.get((dim_i.id, concept_i), ()))
    docs_j = index.postings.get((dim_j.id, concept_j), ())
    hits = []
    for doc_id in docs_j:
        if doc_id not in docs_i:
            continue
        product = (annotated_descendant_score(index, doc_id, concept_i)
                   * annotated_descendant_score(index, doc_id, concept_j))
        if product > 0:
            hits.append(DrillHit(doc_id, index.object_types[doc_id], product))
    hits.sort(key=lambda h: (-h.score, h.doc_id))
    return hits


def map_payload(concept_map: ConceptMap) -> dict:
    """JSON-shaped snapshot of the map, the wire format of the service."""
    return {
        "map_id": concept_map.map_id,
        "measure": concept_map.measure,
        "delta": concept_map.delta,
        "scorer": concept_map.scorer,
        "contingency": concept_map.contingency,
        "query": list(concept_map.query),
        "layers": [
            {
                "dimension": layer.dimension_id,
                "source": layer.source,
                "balls": [
                    {
                        "concept": ball.concept_id,
                        "label": ball.label,
                        "relevance": ball.relevance,
                        "state": ball.state,
                    }
                    for ball in layer.balls
                ],
            }
            for layer in concept_map.layers
        ],
        "bridges": [
            {
                "layer_pair": [i, j],
                "items": [
                    {"from": b.concept_i, "to": b.concept_j, "score": b.score}
                    for b in items
                ],
            }
            for (i, j), items in sorted(concept_map.bridges.items())
        ],
    }
