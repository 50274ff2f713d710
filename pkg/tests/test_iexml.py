"""Annotated-document parsing, including the bundled trial sentence."""

from __future__ import annotations

import json

import pytest

from semcube.errors import IexmlParseError
from semcube.fixtures import jia_document
from semcube.iexml import (
    Reading,
    concept_frequencies,
    iter_corpus_dir,
    iter_corpus_jsonl,
    parse_iexml,
    sentence_cooccurrences,
    serialize_iexml,
)


def test_trial_sentence_mention_and_reading_counts():
    doc = jia_document()
    assert len(doc.mentions) == 15
    assert sum(len(m.readings) for m in doc.mentions) == 18
    assert doc.sentence_count == 1
    assert all(m.sentence_index == 0 for m in doc.mentions)


def test_trial_sentence_selected_readings():
    doc = jia_document()
    by_cui = {r.cui: r for m in doc.mentions for r in m.readings}
    assert by_cui["C0063717"].semtypes == ("T116", "T129", "T192")
    assert by_cui["C0063717"].word_ids == (1, 2)
    assert by_cui["C1384600"].word_ids == (1, 2, 3, 4)
    assert by_cui["C0682057"].word_ids == (2,)
    assert by_cui["C0205171"].word_ids is None
    # The Caucasian mention carries two alternative readings.
    caucasian = next(m for m in doc.mentions if m.surface == "Caucasian")
    assert [r.cui for r in caucasian.readings] == ["C0007457", "C0043157"]


def test_trial_sentence_frequencies():
    doc = jia_document()
    freqs = concept_frequencies(doc)
    assert len(freqs) == 18
    assert set(freqs.values()) == {1}
    assert freqs["C1384600"] == 1


def test_trial_sentence_cooccurrences_match_pairing_oracle():
    doc = jia_document()
    cuis = sorted({r.cui for m in doc.mentions for r in m.readings})
    expected = {(a, b) for i, a in enumerate(cuis) for b in cuis[i + 1:]}
    assert len(expected) == 18 * 17 // 2
    assert sentence_cooccurrences(doc) == expected


def test_word_surface_is_verbatim():
    doc = jia_document()
    il6 = next(m for m in doc.mentions if "IL-6" in m.surface)
    assert il6.surface == "IL-6 receptor "
    assert il6.words == {1: "IL-6", 2: "receptor"}


def test_roundtrip_through_canonical_serializer():
    doc = jia_document()
    again = parse_iexml(serialize_iexml(doc), doc_id=doc.doc_id,
                        object_type=doc.object_type)
    assert again == doc


def test_roundtrip_multi_sentence():
    text = '<s><e id="X:c1:T1">one</e></s><s><e id="X:c2:T1">two</e></s>'
    doc = parse_iexml(text, doc_id="d")
    assert doc.sentence_count == 2
    assert [m.sentence_index for m in doc.mentions] == [0, 1]
    again = parse_iexml(serialize_iexml(doc), doc_id="d")
    assert again == doc


def test_sentence_styles_agree():
    wrapped = '<s><e id="X:a:T1">a</e></s> <s><e id="X:b:T1">b</e></s>'
    trailing = '<e id="X:a:T1">a</e></s> <e id="X:b:T1">b</e></s>'
    for text in (wrapped, trailing):
        doc = parse_iexml(text, doc_id="d")
        assert [m.sentence_index for m in doc.mentions] == [0, 1], text
        assert doc.sentence_count == 2


def test_no_sentence_markup_is_one_sentence():
    doc = parse_iexml('<e id="X:a:T1">a</e> and <e id="X:b:T1">b</e>', doc_id="d")
    assert doc.sentence_count == 1
    assert {m.sentence_index for m in doc.mentions} == {0}


def test_open_sentence_tags_without_closers():
    text = '<s>plain <e id="X:a:T1">a</e><s><e id="X:b:T1">b</e>'
    doc = parse_iexml(text, doc_id="d")
    assert [m.sentence_index for m in doc.mentions] == [0, 1]


def test_cooccurrence_respects_sentences():
    text = ('<e id="X:a:T1">a</e> <e id="X:b:T1">b</e></s>'
            '<e id="X:c:T1">c</e></s>')
    doc = parse_iexml(text, doc_id="d")
    assert sentence_cooccurrences(doc) == {("a", "b")}


def test_alternates_in_one_mention_cooccur():
    doc = parse_iexml('<e id="X:a:T1|X:b:T2">w</e>', doc_id="d")
    assert sentence_cooccurrences(doc) == {("a", "b")}


def test_repeated_readings_accumulate_frequency():
    doc = parse_iexml('<e id="X:a:T1">x</e> <e id="X:a:T1">y</e></s>', doc_id="d")
    assert concept_frequencies(doc) == {"a": 2}


@pytest.mark.parametrize("snippet, fragment", [
    ('<e id="X:a">x</e>', "expected SRC:CUI:SEMTYPES"),
    ('<e id="X:a:T1:extra">x</e>', "expected SRC:CUI:SEMTYPES"),
    ('<e id="X:a:">x</e>', "no semantic types"),
    ('<e id="X:a:T1::9"><w id="1">x</w></e>', "no such <w>"),
    ('<e id="X:a:T1::x,y">x</e>', "bad word ids"),
    ('<e id="X:a:T1">x', "unbalanced"),
    ('text</e>', "without open mention"),
    ('<w id="1">x</w>', "outside <e>"),
    ('<e id="X:a:T1"><e id="X:b:T1">x</e></e>', "nested <e>"),
    ('<e>x</e>', "missing its id"),
    ('<e id="X:a:T1"><s>x</s></e>', "inside <e>"),
])
def test_malformed_documents(snippet, fragment):
    with pytest.raises(IexmlParseError) as err:
        parse_iexml(snippet, doc_id="bad-doc")
    assert "bad-doc" in str(err.value)
    assert fragment in str(err.value)
    assert err.value.offset >= 0


def test_error_reports_byte_offset():
    text = 'über <e id="X:a">x</e>'
    with pytest.raises(IexmlParseError) as err:
        parse_iexml(text, doc_id="d")
    assert err.value.offset == len("über ".encode("utf-8"))


def test_corpus_jsonl_reader(tmp_path):
    path = tmp_path / "corpus.jsonl"
    rows = [
        {"doc_id": "d1", "object_type": "publication",
         "iexml": '<e id="X:a:T1">a</e></s>'},
        {"doc_id": "d2", "object_type": "protein",
         "iexml": '<e id="X:b:T1">b</e></s>'},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
    docs = list(iter_corpus_jsonl(path))
    assert [(d.doc_id, d.object_type) for d in docs] == [
        ("d1", "publication"), ("d2", "protein")]


def test_corpus_dir_reader(tmp_path):
    (tmp_path / "doc1.iexml").write_text('<e id="X:a:T1">a</e></s>', encoding="utf-8")
    (tmp_path / "manifest.json").write_text(json.dumps({"doc1": "patient"}),
                                            encoding="utf-8")
    docs = list(iter_corpus_dir(tmp_path))
    assert docs[0].doc_id == "doc1"
    assert docs[0].object_type == "patient"


def test_corpus_dir_requires_manifest_entry(tmp_path):
    (tmp_path / "doc1.iexml").write_text('x', encoding="utf-8")
    (tmp_path / "manifest.json").write_text("{}", encoding="utf-8")
    with pytest.raises(IexmlParseError):
        list(iter_corpus_dir(tmp_path))
