"""Dimensions and categories over a corpus-relevant ontology slice.

A dimension collects the corpus concepts of one semantic group together
with all their ancestors (the fragment). Dimensions must partition the
concepts they cover: a concept showing up in two dimensions, or carrying a
group that belongs to a different dimension, is a hard error rather than
something to patch silently.

Categories stratify a dimension into antichains. Concepts start at their
spanning-tree depth below the dimension root and are pushed down one level
at a time (in topo order) until no level contains two comparable concepts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import SchemaViolationError, UnknownConceptError
from .taxonomy import Ontology

VIRTUAL_ROOT = "__root__"


@dataclass(frozen=True)
class Category:
    """One antichain stratum of a dimension."""

    dimension_id: str
    level_index: int
    concepts: frozenset[str]


@dataclass
class Dimension:
    id: str
    name: str
    groups: tuple[str, ...]
    member_concepts: frozenset[str]
    fragment: Ontology
    categories: list[Category] = field(default_factory=list)

    @property
    def root_ids(self) -> tuple[str, ...]:
        """Fragment roots. Several roots imply a virtual dimension root,
        which is structural only and never rendered or queried."""
        return self.fragment.roots


@dataclass(frozen=True)
class Violation:
    kind: str
    dimension_id: str
    concepts: tuple[str, ...]
    message: str


class Schema:
    """The dimensions of one corpus, with concept -> dimension lookup."""

    def __init__(self, ontology: Ontology, dimensions: Sequence[Dimension]):
        self.ontology = ontology
        self.dimensions = list(dimensions)
        self._by_id = {d.id: d for d in self.dimensions}
        self._dimension_of: dict[str, str] = {}
        for dim in self.dimensions:
            for cid in dim.member_concepts:
                self._dimension_of[cid] = dim.id

    def __iter__(self):
        return iter(self.dimensions)

    def __getitem__(self, dimension_id: str) -> Dimension:
        try:
            return self._by_id[dimension_id]
        except KeyError:
            raise UnknownConceptError(dimension_id) from None

    def __contains__(self, dimension_id: str) -> bool:
        return dimension_id in self._by_id

    def dimension_of(self, concept_id: str) -> Dimension | None:
        dim_id = self._dimension_of.get(concept_id)
        return self._by_id[dim_id] if dim_id else None


def build_dimensions(ontology: Ontology, corpus_signature: Iterable[str],
                     group_map: Mapping[str, str]) -> list[Dimension]:
    """One dimension per mapped group, seeded by the corpus signature.

    ``group_map`` sends semantic-group names to dimension names; several
    groups may share a dimension. Signature concepts whose group is not
    mapped are left out entirely. Raises SchemaViolationError when the
    resulting fragments overlap or mix groups of different dimensions.
    """
    groups_by_dim: dict[str, list[str]] = {}
    for group, dim_name in group_map.items():
        groups_by_dim.setdefault(dim_name, []).append(group)

    signature = sorted(set(corpus_signature))
    for cid in signature:
        ontology.concept(cid)

    dimensions: list[Dimension] = []
    for dim_name in sorted(groups_by_dim):
        groups = sorted(groups_by_dim[dim_name])
        seeds = [cid for cid in signature
                 if ontology.concept(cid).group in groups]
        if not seeds:
            continue
        fragment = ontology.extract_fragment(seeds)
        members = frozenset(fragment.concepts)
        for cid in sorted(members):
            group = ontology.concept(cid).group
            if group in group_map and group_map[group] != dim_name:
                raise SchemaViolationError(
                    f"concept {cid!r} with group {group!r} was pulled into "
                    f"dimension {dim_name!r} (groups {groups!r}); the group "
                    f"partition is violated between {group!r} and {groups[0]!r}")
        dimensions.append(Dimension(
            id=dim_name, name=dim_name, groups=tuple(groups),
            member_concepts=members, fragment=fragment))

    seen: dict[str, str] = {}
    for dim in dimensions:
        for cid in sorted(dim.member_concepts):
            if cid in seen:
                raise SchemaViolationError(
                    f"concept {cid!r} belongs to dimensions {seen[cid]!r} and "
                    f"{dim.id!r}; dimensions must be disjoint")
            seen[cid] = dim.id
    return dimensions


def build_categories(dimension: Dimension) -> list[Category]:
    """Antichain strata for a dimension, deepest concepts last.

    Deterministic: concepts are placed in ascending topo order, starting
    at their spanning-tree depth, each deferred one level at a time while
    its target level already holds a comparable concept. Levels left empty
    by deferral are dropped and the rest renumbered.
    """
    frag = dimension.fragment
    ordered = sorted(frag.concepts, key=lambda c: frag.descriptor(c).topo_order)
    levels: dict[int, list[str]] = {}
    for cid in ordered:
        level = frag.tree_depth(cid)
        while any(frag.is_descendant(cid, other) or frag.is_descendant(other, cid)
                  for other in levels.get(level, ())):
            level += 1
        levels.setdefault(level, []).append(cid)

    categories = []
    for index, key in enumerate(sorted(levels)):
        categories.append(Category(
            dimension_id=dimension.id,
            level_index=index,
            concepts=frozenset(levels[key]),
        ))
    return categories


def build_schema(ontology: Ontology, corpus_signature: Iterable[str],
                 group_map: Mapping[str, str]) -> Schema:
    """Dimensions plus categories, validated."""
    dimensions = build_dimensions(ontology, corpus_signature, group_map)
    for dim in dimensions:
        dim.categories = build_categories(dim)
    schema = Schema(ontology, dimensions)
    problems = validate_schema(dimensions)
    if problems:
        raise SchemaViolationError(
            "; ".join(v.message for v in problems[:5])
            + (f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""))
    return schema


def validate_schema(dimensions: Sequence[Dimension]) -> list[Violation]:
    """Brute-force re-check of the structural constraints.

    Looks for comparable pairs inside a category, members shared between
    dimensions, categories that fail to partition the members, and members
    detached from every fragment root.
    """
    violations: list[Violation] = []

    for dim in dimensions:
        frag = dim.fragment
        for category in dim.categories:
            members = sorted(category.concepts)
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    if frag.is_descendant(a, b) or frag.is_descendant(b, a):
                        violations.append(Violation(
                            kind="antichain", dimension_id=dim.id,
                            concepts=(a, b),
                            message=f"{dim.id} level {category.level_index}: "
                                    f"{a!r} and {b!r} are comparable"))
        covered: list[str] = []
        for category in dim.categories:
            covered.extend(category.concepts)
        if sorted(covered) != sorted(dim.member_concepts):
            violations.append(Violation(
                kind="coverage", dimension_id=dim.id, concepts=(),
                message=f"{dim.id}: categories do not partition the members"))
        roots = set(frag.roots)
        for cid in sorted(dim.member_concepts):
            if not roots & frag.ancestors_of(cid):
                violations.append(Violation(
                    kind="rootedness", dimension_id=dim.id, concepts=(cid,),
                    message=f"{dim.id}: {cid!r} unreachable from any root"))

    for i, first in enumerate(dimensions):
        for second in dimensions[i + 1:]:
            shared = first.member_concepts & second.member_concepts
            for cid in sorted(shared):
                violations.append(Violation(
                    kind="partition", dimension_id=first.id,
                    concepts=(cid,),
                    message=f"{cid!r} is in both {first.id!r} and {second.id!r}"))
    return violations
