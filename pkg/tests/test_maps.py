"""Map construction, browsing operations, and drill-through."""

from __future__ import annotations

import random

import pytest

from semcube.cube import bridges, hits, index_corpus
from semcube.errors import (
    InvalidOperationError,
    UnknownBallError,
    UnknownConceptError,
)
from semcube.facts import DocumentFact, RankVector, normalize_document
from semcube.fixtures import demo_documents, demo_group_map, demo_ontology
from semcube.mapping import (
    LayerRequest,
    build_map,
    contains,
    define_layer,
    define_layer_by_query,
    drill_down,
    drill_through_bridge,
    drill_through_concept,
    keep_only,
    map_payload,
    remove_concept,
    roll_up,
)
from semcube.schema import build_schema
from semcube.taxonomy import ontology_from_records

from oracles import taxonomy_records

_DEMO_INDEX = None


def demo_index():
    global _DEMO_INDEX
    if _DEMO_INDEX is None:
        onto = demo_ontology()
        docs = demo_documents()
        signature = {r.cui for d in docs for m in d.mentions
                     for r in m.readings}
        schema = build_schema(onto, signature, demo_group_map())
        facts = [normalize_document(d, schema)[0] for d in docs]
        types = {d.doc_id: d.object_type for d in docs}
        _DEMO_INDEX = index_corpus(facts, schema, types)
    return _DEMO_INDEX


def procedures_findings_map(query=(), delta=1.0):
    return build_map(
        demo_index(), "m1",
        [LayerRequest("Health_Procedures", category=1),
         LayerRequest("Finding", category=1)],
        query=query, delta=delta)


def test_define_layer_orders_and_scores():
    layer = define_layer(demo_index(), "Health_Procedures", 1)
    assert layer.concept_ids() == ["implantation", "operation"]
    by_id = {b.concept_id: b for b in layer.balls}
    assert by_id["operation"].relevance == hits(
        demo_index(), "operation", "Health_Procedures") == 10
    assert by_id["implantation"].relevance == 2
    assert all(b.state == "normal" for b in layer.balls)
    assert by_id["operation"].label == "Operation"


def test_define_layer_rejects_unknown():
    with pytest.raises(ValueError):
        define_layer(demo_index(), "Health_Procedures", 9)
    with pytest.raises(UnknownConceptError):
        define_layer(demo_index(), "Verbs", 0)


def test_query_layer_most_specific():
    layer = define_layer_by_query(demo_index(), "Disease", ["epilepsy"])
    assert layer.concept_ids() == [
        "att_epi", "epi_extra", "epi_foc", "epi_intr", "epi_lobe"]
    assert all(b.state == "query-match" for b in layer.balls)


def test_query_layer_child_shadows_parent():
    # both match "lobe"? no: parent and child both matching the keyword
    layer = define_layer_by_query(demo_index(), "Disease",
                                  ["temporal", "lobe"])
    assert layer.concept_ids() == ["epi_lobe"]


def test_query_layer_edge_cases():
    assert define_layer_by_query(
        demo_index(), "Disease", ["astrocytoma"]).balls == []
    with pytest.raises(ValueError):
        define_layer_by_query(demo_index(), "Disease", [])


def test_contains():
    index = demo_index()
    assert "repair_fallot" in contains(
        index, "Health_Procedures", "operation", ["repair"])
    assert "repair_fallot" in contains(
        index, "Health_Procedures", "repair_fallot", ["fallot"])
    assert contains(index, "Health_Procedures", "implantation", ["repair"]) \
        == set()
    with pytest.raises(UnknownConceptError):
        contains(index, "Health_Procedures", "glioma", ["x"])


def test_map_query_marks_matching_ancestors():
    concept_map = procedures_findings_map(query=("repair",))
    states = {b.concept_id: b.state
              for layer in concept_map.layers for b in layer.balls}
    assert states["operation"] == "query-match"
    assert states["implantation"] == "normal"
    assert states["death"] == "normal"


def test_map_bridges_match_direct_computation():
    concept_map = procedures_findings_map()
    expected = bridges(demo_index(),
                       ("Health_Procedures", ["operation", "implantation"]),
                       ("Finding", ["death", "recovery", "complication"]),
                       "interest_factor", 1.0)
    assert concept_map.bridges[(0, 1)] == expected
    assert len(expected) == 5


def test_single_layer_map_has_no_bridges():
    concept_map = build_map(demo_index(), "m",
                            [LayerRequest("Disease", keywords=("epilepsy",))])
    assert concept_map.bridges == {}


def test_build_map_validation():
    index = demo_index()
    with pytest.raises(ValueError):
        build_map(index, "m", [])
    with pytest.raises(ValueError):
        build_map(index, "m", [LayerRequest("Disease")])
    with pytest.raises(ValueError):
        build_map(index, "m", [LayerRequest("Disease", category=1,
                                            keywords=("x",))])
    with pytest.raises(ValueError):
        build_map(index, "m", [LayerRequest("Disease", category=1)],
                  scorer="pagerank")


def test_drill_down_replaces_ball_with_children():
    concept_map = procedures_findings_map()
    drill_down(concept_map, demo_index(), 0, "operation")
    layer = concept_map.layers[0]
    assert layer.concept_ids() == [
        "implantation", "cardio_ops", "catheterisation", "surgical_repair"]
    states = {b.concept_id: b.state for b in layer.balls}
    assert states["cardio_ops"] == "expanded-child"
    assert states["implantation"] == "normal"


def test_drill_down_errors():
    concept_map = procedures_findings_map()
    with pytest.raises(UnknownBallError):
        drill_down(concept_map, demo_index(), 0, "repair_fallot")
    with pytest.raises(InvalidOperationError) as err:
        drill_down(concept_map, demo_index(), 1, "death")
    assert err.value.code == "leaf-concept"
    with pytest.raises(ValueError):
        drill_down(concept_map, demo_index(), 5, "operation")


def test_drill_down_bridges_equal_fresh_build():
    concept_map = procedures_findings_map()
    index = demo_index()
    drill_down(concept_map, index, 0, "operation")
    drill_down(concept_map, index, 0, "cardio_ops")
    fresh = bridges(index,
                    ("Health_Procedures", concept_map.layers[0].concept_ids()),
                    ("Finding", concept_map.layers[1].concept_ids()),
                    "interest_factor", 1.0)
    assert concept_map.bridges[(0, 1)] == fresh
    pairs = {(b.concept_i, b.concept_j) for b in fresh}
    assert ("repair_fallot", "death") in pairs
    assert ("repair_fallot", "recovery") not in pairs  # scores 0.95


def test_drill_down_middle_layer_refreshes_both_pairs():
    index = demo_index()
    concept_map = build_map(index, "m3", [
        LayerRequest("Health_Procedures", category=1),
        LayerRequest("Finding", category=0),
        LayerRequest("Disease", category=2),
    ])
    drill_down(concept_map, index, 1, "finding_root")
    for left, layers in ((0, (0, 1)), (1, (1, 2))):
        li, lj = layers
        fresh = bridges(
            index,
            (concept_map.layers[li].dimension_id,
             concept_map.layers[li].concept_ids()),
            (concept_map.layers[lj].dimension_id,
             concept_map.layers[lj].concept_ids()),
            "interest_factor", 1.0)
        assert concept_map.bridges[(li, lj)] == fresh
    assert {(b.concept_i, b.concept_j)
            for b in concept_map.bridges[(1, 2)]} == {("death", "glioma")}


def dag_fixture_index():
    records = taxonomy_records(
        {"A": [], "B": ["A"], "C": ["A"], "D": ["B", "C"]}, "g")
    records += taxonomy_records({"r": [], "z": ["r"]}, "h")
    onto = ontology_from_records(records)
    schema = build_schema(onto, {"B", "C", "D", "z"}, {"g": "Dim", "h": "E"})
    facts = [
        DocumentFact("x1", {"Dim": "D", "E": "z"},
                     RankVector({"D": 1.0, "z": 1.0})),
        DocumentFact("x2", {"Dim": "B", "E": "z"},
                     RankVector({"B": 1.0, "z": 1.0})),
    ]
    return index_corpus(facts, schema)


def test_drill_down_skips_children_comparable_to_visible():
    index = dag_fixture_index()
    concept_map = build_map(index, "m", [
        LayerRequest("Dim", category=1),
        LayerRequest("E", category=1),
    ], delta=0.0)
    assert concept_map.layers[0].concept_ids() == ["B", "C"]
    drill_down(concept_map, index, 0, "B")
    # B's only child D sits below the still-visible C, so it is skipped
    assert concept_map.layers[0].concept_ids() == ["C"]
    record = concept_map.expansions[0][-1]
    assert record.parent == "B" and record.children == ()
    roll_up(concept_map, index, 0, "B")
    assert concept_map.layers[0].concept_ids() == ["B", "C"]


def test_layer_never_holds_comparable_pair():
    index = dag_fixture_index()
    concept_map = build_map(index, "m", [
        LayerRequest("Dim", category=0),
        LayerRequest("E", category=1),
    ], delta=0.0)
    drill_down(concept_map, index, 0, "A")
    ids = concept_map.layers[0].concept_ids()
    fragment = index.schema["Dim"].fragment
    for a in ids:
        for b in ids:
            if a != b:
                assert not fragment.is_descendant(a, b)


def test_roll_up_restores_map_exactly():
    index = demo_index()
    concept_map = procedures_findings_map(query=("repair",))
    before = map_payload(concept_map)
    drill_down(concept_map, index, 0, "operation")
    drill_down(concept_map, index, 0, "cardio_ops")
    roll_up(concept_map, index, 0, "cardio_ops")
    roll_up(concept_map, index, 0, "operation")
    assert map_payload(concept_map) == before
    assert concept_map.expansions[0] == []


def test_roll_up_by_child_and_nested_collapse():
    index = demo_index()
    concept_map = procedures_findings_map()
    drill_down(concept_map, index, 0, "operation")
    drill_down(concept_map, index, 0, "cardio_ops")
    # naming a child of the first expansion collapses the nested one too
    roll_up(concept_map, index, 0, "catheterisation")
    assert concept_map.layers[0].concept_ids() == ["implantation", "operation"]
    assert concept_map.expansions[0] == []


def test_roll_up_without_expansion_is_an_error():
    concept_map = procedures_findings_map()
    with pytest.raises(InvalidOperationError) as err:
        roll_up(concept_map, demo_index(), 0, "operation")
    assert err.value.code == "no-expansion"


def test_keep_only_filters_adjacent_layer():
    index = demo_index()
    concept_map = procedures_findings_map()
    drill_down(concept_map, index, 0, "operation")
    drill_down(concept_map, index, 0, "cardio_ops")
    keep_only(concept_map, 0, "repair_fallot")
    assert concept_map.layers[0].concept_ids() == ["repair_fallot"]
    # only death is bridged to repair_fallot at delta 1: recovery scores
    # 0.95 and complication never co-occurs with it
    assert concept_map.layers[1].concept_ids() == ["death"]
    for items in concept_map.bridges.values():
        for bridge in items:
            assert bridge.concept_i == "repair_fallot"
            assert bridge.concept_j == "death"


def test_keep_only_fully_bridged_is_noop():
    index = demo_index()
    concept_map = build_map(index, "m", [
        LayerRequest("Finding", category=0),
        LayerRequest("Health_Procedures", category=1),
    ])
    before = map_payload(concept_map)
    keep_only(concept_map, 0, "finding_root")
    assert map_payload(concept_map) == before


def test_keep_only_unknown_ball():
    concept_map = procedures_findings_map()
    with pytest.raises(UnknownBallError):
        keep_only(concept_map, 0, "repair_fallot")


def test_remove_concept_drops_ball_and_bridges():
    concept_map = procedures_findings_map()
    remove_concept(concept_map, 1, "death")
    assert "death" not in concept_map.layers[1].concept_ids()
    assert all(b.concept_j != "death"
               for b in concept_map.bridges[(0, 1)])
    with pytest.raises(UnknownBallError):
        remove_concept(concept_map, 1, "death")


def test_drill_through_concept_ranked():
    index = demo_index()
    hits_list = drill_through_concept(index, "repair_fallot")
    assert [h.doc_id for h in hits_list] == ["d01", "d02", "d03", "d04", "d05"]
    assert all(h.object_type == "publication" for h in hits_list)
    # uniform two-concept documents all give the same leaf rank
    assert len({h.score for h in hits_list}) == 1
    parent = drill_through_concept(index, "cardio_ops")
    assert {h.doc_id for h in parent} >= {h.doc_id for h in hits_list}
    assert drill_through_concept(index, "glioma")[0].object_type == "protein"
    with pytest.raises(UnknownConceptError):
        drill_through_concept(index, "nowhere")


def test_drill_through_concept_scores_sum_annotated_descendants():
    index = dag_fixture_index()
    results = {h.doc_id: h.score for h in drill_through_concept(index, "A")}
    assert results == {"x1": pytest.approx(1.0), "x2": pytest.approx(1.0)}
    only_b = {h.doc_id: h.score for h in drill_through_concept(index, "B")}
    assert set(only_b) == {"x1", "x2"}


def test_drill_through_bridge_intersection_and_product():
    index = demo_index()
    results = drill_through_bridge(index, "repair_fallot", "death")
    assert [h.doc_id for h in results] == ["d01", "d02", "d03", "d04"]
    side_i = {h.doc_id: h.score
              for h in drill_through_concept(index, "repair_fallot")}
    side_j = {h.doc_id: h.score
              for h in drill_through_concept(index, "death")}
    for hit in results:
        assert hit.score == pytest.approx(
            side_i[hit.doc_id] * side_j[hit.doc_id])
        assert hit.score > 0
    assert set(h.doc_id for h in results) <= set(side_i) & set(side_j)


def test_map_payload_shape():
    concept_map = procedures_findings_map(query=("repair",))
    payload = map_payload(concept_map)
    assert payload["map_id"] == "m1"
    assert payload["measure"] == "interest_factor"
    assert payload["delta"] == 1.0
    assert payload["scorer"] == "hits"
    assert payload["query"] == ["repair"]
    assert [l["dimension"] for l in payload["layers"]] == [
        "Health_Procedures", "Finding"]
    ball = payload["layers"][0]["balls"][0]
    assert set(ball) == {"concept", "label", "relevance", "state"}
    assert payload["bridges"][0]["layer_pair"] == [0, 1]
    item = payload["bridges"][0]["items"][0]
    assert set(item) == {"from", "to", "score"}


def _assert_invariants(concept_map, index):
    for (i, j), items in concept_map.bridges.items():
        left = set(concept_map.layers[i].concept_ids())
        right = set(concept_map.layers[j].concept_ids())
        for bridge in items:
            assert bridge.concept_i in left
            assert bridge.concept_j in right
    for layer in concept_map.layers:
        fragment = index.schema[layer.dimension_id].fragment
        ids = layer.concept_ids()
        assert len(ids) == len(set(ids))
        for a in ids:
            for b in ids:
                if a != b:
                    assert not fragment.is_descendant(a, b)


def test_randomized_browsing_keeps_invariants():
    rng = random.Random(2025)
    index = demo_index()
    for trial in range(5):
        concept_map = build_map(index, f"m{trial}", [
            LayerRequest("Health_Procedures", category=0),
            LayerRequest("Finding", category=0),
            LayerRequest("Disease", category=1),
        ], delta=0.0)
        for _ in range(30):
            layer_index = rng.randrange(3)
            layer = concept_map.layers[layer_index]
            if not layer.balls:
                continue
            concept = rng.choice(layer.concept_ids())
            op = rng.choice(["drill", "roll", "keep", "remove"])
            try:
                if op == "drill":
                    drill_down(concept_map, index, layer_index, concept)
                    for left in (layer_index - 1, layer_index):
                        if not 0 <= left < 2:
                            continue
                        li, lj = concept_map.layers[left], \
                            concept_map.layers[left + 1]
                        fresh = bridges(
                            index, (li.dimension_id, li.concept_ids()),
                            (lj.dimension_id, lj.concept_ids()),
                            concept_map.measure, concept_map.delta)
                        assert concept_map.bridges[(left, left + 1)] == fresh
                elif op == "roll":
                    roll_up(concept_map, index, layer_index, concept)
                elif op == "keep":
                    keep_only(concept_map, layer_index, concept)
                else:
                    remove_concept(concept_map, layer_index, concept)
            except (InvalidOperationError, UnknownBallError):
                pass
            _assert_invariants(concept_map, index)
