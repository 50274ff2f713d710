"""Taxonomy loading, interval labeling, and taxonomic queries.

Concepts with multiple parents form a DAG. At load time every concept gets
a descriptor carrying two integer coordinates and two interval lists, so
that "a below b" is decided by interval membership instead of graph walks:

* ``pre_index`` is the concept's position in a pre-order walk of a
  deterministic spanning tree of the DAG. ``desc_intervals(b)`` is the
  interval compression of the pre_index values of everything below b, so
  ``a below b  <=>  pre_index(a) in desc_intervals(b)``.
* ``anc_index`` plays the same role for the edge-reversed DAG (rooted at a
  virtual sink over the leaves), giving the dual test
  ``a below b  <=>  anc_index(b) in anc_intervals(a)``.

The spanning tree is fixed by three rules: a node with several parents
hangs under its lexicographically smallest parent, siblings are visited in
(topo_order, id) order, and a virtual root covers forests. Virtual nodes
never show up in query results.
"""

from __future__ import annotations

import heapq
import json
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import (
    CycleError,
    DanglingParentError,
    DuplicateConceptError,
    TaxonomyFormatError,
    UnknownConceptError,
)

TAXONOMY_FIELDS = ("id", "preferred", "lex", "semtypes", "parents", "group")

Interval = tuple[int, int]


@dataclass(frozen=True)
class Concept:
    """One taxonomy entry as loaded from the input stream."""

    id: str
    preferred_label: str
    lex: tuple[str, ...]
    semtypes: tuple[str, ...]
    parents: tuple[str, ...]
    group: str


@dataclass(frozen=True)
class ConceptDescriptor:
    """Interval labels for one concept.

    ``desc_intervals`` and ``anc_intervals`` are sorted, pairwise disjoint
    and maximally merged closed integer intervals.
    """

    concept_id: str
    pre_index: int
    anc_index: int
    desc_intervals: tuple[Interval, ...]
    anc_intervals: tuple[Interval, ...]
    topo_order: int


def merge_intervals(values: Iterable[int]) -> tuple[Interval, ...]:
    """Compress a set of integers into sorted maximal closed intervals."""
    ordered = sorted(set(values))
    if not ordered:
        return ()
    out: list[list[int]] = [[ordered[0], ordered[0]]]
    for v in ordered[1:]:
        if v == out[-1][1] + 1:
            out[-1][1] = v
        else:
            out.append([v, v])
    return tuple((lo, hi) for lo, hi in out)


def interval_covers(intervals: tuple[Interval, ...], value: int) -> bool:
    """True when ``value`` lies inside one of the sorted intervals."""
    i = bisect_right(intervals, (value, float("inf"))) - 1
    return i >= 0 and intervals[i][1] >= value


@dataclass
class _Labeling:
    descriptors: dict[str, ConceptDescriptor]
    children: dict[str, tuple[str, ...]]
    roots: tuple[str, ...]
    pre_to_id: list[str | None]
    anc_to_id: list[str | None]
    tree_depth: dict[str, int]


def _topological_order(concepts: Mapping[str, Concept],
                       children: Mapping[str, list[str]]) -> dict[str, int]:
    indegree = {cid: len(concepts[cid].parents) for cid in concepts}
    heap = [cid for cid, d in indegree.items() if d == 0]
    heapq.heapify(heap)
    topo: dict[str, int] = {}
    while heap:
        cid = heapq.heappop(heap)
        topo[cid] = len(topo)
        for ch in children[cid]:
            indegree[ch] -= 1
            if indegree[ch] == 0:
                heapq.heappush(heap, ch)
    if len(topo) != len(concepts):
        leftover = {cid for cid in concepts if cid not in topo}
        raise CycleError(_find_cycle(concepts, leftover))
    return topo


def _find_cycle(concepts: Mapping[str, Concept], leftover: set[str]) -> list[str]:
    start = min(leftover)
    seen: dict[str, int] = {}
    path: list[str] = []
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = next(p for p in concepts[node].parents if p in leftover)
    return path[seen[node]:] + [node]


def _preorder(roots: list[str], tree_children: Mapping[str, list[str]]) -> dict[str, int]:
    order: dict[str, int] = {}
    counter = 1
    stack = list(reversed(roots))
    while stack:
        node = stack.pop()
        order[node] = counter
        counter += 1
        stack.extend(reversed(tree_children[node]))
    return order


def _build_labeling(concepts: Mapping[str, Concept]) -> _Labeling:
    ids = sorted(concepts)
    children: dict[str, list[str]] = {cid: [] for cid in ids}
    for cid in ids:
        for parent in concepts[cid].parents:
            if parent not in concepts:
                raise DanglingParentError(
                    f"concept {cid!r} names missing parent {parent!r}")
            children[parent].append(cid)

    topo = _topological_order(concepts, children)
    for cid in ids:
        children[cid].sort(key=lambda c: (topo[c], c))

    # Forward spanning tree: multi-parent nodes hang under their smallest
    # parent; a virtual root (never materialized) covers multi-root inputs.
    tree_children: dict[str, list[str]] = {cid: [] for cid in ids}
    roots: list[str] = []
    for cid in ids:
        parents = concepts[cid].parents
        if parents:
            tree_children[min(parents)].append(cid)
        else:
            roots.append(cid)
    for cid in ids:
        tree_children[cid].sort(key=lambda c: (topo[c], c))
    roots.sort(key=lambda c: (topo[c], c))
    pre = _preorder(roots, tree_children)

    tree_depth: dict[str, int] = {}
    for cid in sorted(ids, key=lambda c: pre[c]):
        parents = concepts[cid].parents
        tree_depth[cid] = 0 if not parents else tree_depth[min(parents)] + 1

    # Dual labeling over the edge-reversed DAG: original leaves become the
    # roots, hanging from a virtual sink, ordered by id.
    rev_tree_children: dict[str, list[str]] = {cid: [] for cid in ids}
    rev_roots: list[str] = []
    for cid in ids:
        if children[cid]:
            rev_tree_children[min(children[cid])].append(cid)
        else:
            rev_roots.append(cid)
    for cid in ids:
        rev_tree_children[cid].sort()
    rev_roots.sort()
    anc = _preorder(rev_roots, rev_tree_children)

    # True descendant and ancestor sets; the interval lists are computed
    # from these sets, so query results never depend on tree choices.
    desc_sets: dict[str, set[str]] = {}
    for cid in sorted(ids, key=lambda c: -topo[c]):
        acc = {cid}
        for ch in children[cid]:
            acc |= desc_sets[ch]
        desc_sets[cid] = acc
    anc_sets: dict[str, set[str]] = {}
    for cid in sorted(ids, key=lambda c: topo[c]):
        acc = {cid}
        for parent in concepts[cid].parents:
            acc |= anc_sets[parent]
        anc_sets[cid] = acc

    descriptors: dict[str, ConceptDescriptor] = {}
    for cid in ids:
        descriptors[cid] = ConceptDescriptor(
            concept_id=cid,
            pre_index=pre[cid],
            anc_index=anc[cid],
            desc_intervals=merge_intervals(pre[c] for c in desc_sets[cid]),
            anc_intervals=merge_intervals(anc[c] for c in anc_sets[cid]),
            topo_order=topo[cid],
        )

    pre_to_id: list[str | None] = [None] * (len(ids) + 1)
    anc_to_id: list[str | None] = [None] * (len(ids) + 1)
    for cid in ids:
        pre_to_id[pre[cid]] = cid
        anc_to_id[anc[cid]] = cid

    return _Labeling(
        descriptors=descriptors,
        children={cid: tuple(children[cid]) for cid in ids},
        roots=tuple(roots),
        pre_to_id=pre_to_id,
        anc_to_id=anc_to_id,
        tree_depth=tree_depth,
    )


class Ontology:
    """An immutable concept DAG with interval descriptors.

    All taxonomic queries run on the descriptors; none of them walk the
    graph. ``a below b`` is reflexive: every concept is its own descendant.
    """

    def __init__(self, concepts: Mapping[str, Concept]):
        self.concepts: dict[str, Concept] = dict(concepts)
        labeling = _build_labeling(self.concepts)
        self.descriptors = labeling.descriptors
        self.children = labeling.children
        self.roots = labeling.roots
        self._pre_to_id = labeling.pre_to_id
        self._anc_to_id = labeling.anc_to_id
        self._tree_depth = labeling.tree_depth

    def __len__(self) -> int:
        return len(self.concepts)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.concepts

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.concepts))

    def concept(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise UnknownConceptError(concept_id) from None

    def descriptor(self, concept_id: str) -> ConceptDescriptor:
        try:
            return self.descriptors[concept_id]
        except KeyError:
            raise UnknownConceptError(concept_id) from None

    def is_descendant(self, a: str, b: str) -> bool:
        """True when a lies below b (or a == b), by interval membership."""
        pre_a = self.descriptor(a).pre_index
        return interval_covers(self.descriptor(b).desc_intervals, pre_a)

    def descendants_of(self, concept_id: str) -> set[str]:
        out: set[str] = set()
        for lo, hi in self.descriptor(concept_id).desc_intervals:
            out.update(self._pre_to_id[i] for i in range(lo, hi + 1))
        return out

    def ancestors_of(self, concept_id: str) -> set[str]:
        out: set[str] = set()
        for lo, hi in self.descriptor(concept_id).anc_intervals:
            out.update(self._anc_to_id[i] for i in range(lo, hi + 1))
        return out

    def children_of(self, concept_id: str) -> list[str]:
        """Direct children, sorted by (topo_order, id)."""
        self.descriptor(concept_id)
        return list(self.children[concept_id])

    def parents_of(self, concept_id: str) -> list[str]:
        return list(self.concept(concept_id).parents)

    def tree_depth(self, concept_id: str) -> int:
        """Depth of the concept along spanning-tree parents (roots are 0)."""
        self.descriptor(concept_id)
        return self._tree_depth[concept_id]

    def extract_fragment(self, signature: Iterable[str]) -> "Ontology":
        """Sub-ontology induced on the signature plus all its ancestors.

        The kept set is closed upward, so every parent edge of a kept
        concept survives and descriptors are rebuilt from scratch.
        """
        keep: set[str] = set()
        for cid in signature:
            keep |= self.ancestors_of(cid)
        return Ontology({cid: self.concepts[cid] for cid in keep})


def match_lexicon(concept: Concept, keywords: Iterable[str]) -> bool:
    """Case-insensitive keyword match against one lexical variant.

    Every keyword must appear as a substring of some whitespace token of a
    single variant (the preferred label counts as a variant). An empty
    keyword list matches vacuously.
    """
    kws = [k.lower() for k in keywords]
    if not kws:
        return True
    for variant in (concept.preferred_label, *concept.lex):
        tokens = variant.lower().split()
        if all(any(kw in tok for tok in tokens) for kw in kws):
            return True
    return False


def build_labeling(ontology: Ontology) -> dict[str, ConceptDescriptor]:
    """Recompute descriptors for an ontology's concepts (deterministic)."""
    return _build_labeling(ontology.concepts).descriptors


def _string_list(record: dict, key: str, where: str) -> tuple[str, ...]:
    value = record[key]
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise TaxonomyFormatError(f"{where}: field {key!r} must be a list of strings")
    return tuple(value)


def concept_from_record(record: dict, where: str = "record") -> Concept:
    if not isinstance(record, dict):
        raise TaxonomyFormatError(f"{where}: expected a JSON object")
    missing = [k for k in TAXONOMY_FIELDS if k not in record]
    extra = [k for k in record if k not in TAXONOMY_FIELDS]
    if missing or extra:
        raise TaxonomyFormatError(
            f"{where}: wrong fields (missing {missing!r}, unexpected {extra!r})")
    cid = record["id"]
    if not isinstance(cid, str) or not cid:
        raise TaxonomyFormatError(f"{where}: 'id' must be a non-empty string")
    if not isinstance(record["preferred"], str):
        raise TaxonomyFormatError(f"{where}: 'preferred' must be a string")
    if not isinstance(record["group"], str):
        raise TaxonomyFormatError(f"{where}: 'group' must be a string")
    parents = _string_list(record, "parents", where)
    # Repeated parent ids carry no extra information; collapse them.
    parents = tuple(dict.fromkeys(parents))
    return Concept(
        id=cid,
        preferred_label=record["preferred"],
        lex=_string_list(record, "lex", where),
        semtypes=_string_list(record, "semtypes", where),
        parents=parents,
        group=record["group"],
    )


def ontology_from_records(records: Iterable[dict]) -> Ontology:
    concepts: dict[str, Concept] = {}
    for i, record in enumerate(records):
        concept = concept_from_record(record, where=f"record {i}")
        if concept.id in concepts:
            raise DuplicateConceptError(f"duplicate concept id {concept.id!r}")
        concepts[concept.id] = concept
    return Ontology(concepts)


def load_taxonomy(stream: Iterable[str]) -> Ontology:
    """Build an ontology from line-delimited JSON concept records.

    Records may arrive in any order; parents are resolved after the whole
    stream is read. Blank lines are skipped.
    """

    def records() -> Iterator[dict]:
        for lineno, line in enumerate(stream, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise TaxonomyFormatError(f"line {lineno}: invalid JSON: {exc}") from None

    return ontology_from_records(records())


def load_taxonomy_path(path) -> Ontology:
    with open(path, encoding="utf-8") as handle:
        return load_taxonomy(handle)
