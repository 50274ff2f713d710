"""Lenient parser for IeXML-style annotated documents.

The format marks entity mentions inline: ``<e id="SRC:CUI:T1,T2::1,2">``
wraps the mention text, with optional ``<w id="n">`` word elements inside
when a reading refers to a subset of the words. Alternative readings of
one mention are joined with ``|`` in the id attribute. Sentences are
delimited by ``<s>`` elements, but real corpora are sloppy about them, so
both the wrapped style (``<s>text</s>``) and the bare trailing-delimiter
style (``text</s>``) are accepted; a document without any ``<s>`` markup
counts as a single sentence.

Only ``e``, ``w`` and ``s`` tags are interpreted; everything else is plain
text. No entity decoding is attempted. Errors report the document id and
the byte offset of the offending construct.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import IexmlParseError

_TAG = re.compile(r"<(/?)([sew])((?:\s+[^<>]*?)?)\s*(/?)>")
_ID_ATTR = re.compile(r"""\bid\s*=\s*"([^"]*)"|\bid\s*=\s*'([^']*)'""")

# A mention's inner content, kept verbatim so documents can be re-emitted:
# ("text", None, s) for loose text, ("word", word_id, s) for a word element.
Segment = tuple[str, int | None, str]


@dataclass(frozen=True)
class Reading:
    """One concept reading of a mention."""

    source: str
    cui: str
    semtypes: tuple[str, ...]
    word_ids: tuple[int, ...] | None = None


@dataclass(frozen=True)
class EntityMention:
    sentence_index: int
    surface: str
    readings: tuple[Reading, ...]
    segments: tuple[Segment, ...] = ()

    @property
    def words(self) -> dict[int, str]:
        return {wid: text for kind, wid, text in self.segments if kind == "word"}


@dataclass
class AnnotatedDocument:
    doc_id: str
    object_type: str
    sentence_count: int
    mentions: list[EntityMention]
    frequencies: dict[str, int] = field(default_factory=dict)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _parse_reading(spec: str, doc_id: str, offset: int) -> Reading:
    head, sep, wordspec = spec.partition("::")
    parts = head.split(":")
    if len(parts) != 3:
        raise IexmlParseError(
            f"malformed reading id {spec!r}: expected SRC:CUI:SEMTYPES", doc_id, offset)
    source, cui, types = parts
    if not source or not cui:
        raise IexmlParseError(
            f"malformed reading id {spec!r}: empty source or cui", doc_id, offset)
    semtypes = tuple(t for t in types.split(",") if t)
    if not semtypes:
        raise IexmlParseError(
            f"malformed reading id {spec!r}: no semantic types", doc_id, offset)
    word_ids: tuple[int, ...] | None = None
    if sep:
        try:
            word_ids = tuple(int(w) for w in wordspec.split(","))
        except ValueError:
            raise IexmlParseError(
                f"malformed reading id {spec!r}: bad word ids", doc_id, offset) from None
        if not word_ids:
            raise IexmlParseError(
                f"malformed reading id {spec!r}: empty word id list", doc_id, offset)
    return Reading(source=source, cui=cui, semtypes=semtypes, word_ids=word_ids)


def _id_attr(attrs: str, tag: str, doc_id: str, offset: int) -> str:
    m = _ID_ATTR.search(attrs)
    if not m:
        raise IexmlParseError(f"<{tag}> is missing its id attribute", doc_id, offset)
    return m.group(1) if m.group(1) is not None else m.group(2)


def parse_iexml(text: str, doc_id: str, object_type: str = "document") -> AnnotatedDocument:
    mentions: list[EntityMention] = []
    sentence = 0
    dirty = False          # mention or non-whitespace text since last boundary
    mention_start: int | None = None
    readings: tuple[Reading, ...] = ()
    segments: list[Segment] = []
    word_start: int | None = None
    word_id: int | None = None

    def advance_sentence() -> None:
        nonlocal sentence, dirty
        sentence += 1
        dirty = False

    pos = 0
    for m in _TAG.finditer(text):
        gap = text[pos:m.start()]
        if gap:
            if word_start is not None:
                pass  # word text collected at </w>
            elif mention_start is not None:
                segments.append(("text", None, gap))
            elif gap.strip():
                dirty = True
        pos = m.end()
        closing, tag, attrs, selfclose = m.groups()
        offset = _byte_offset(text, m.start())

        if tag == "s":
            if mention_start is not None:
                raise IexmlParseError("sentence boundary inside <e>", doc_id, offset)
            if closing:
                advance_sentence()
            elif dirty:
                advance_sentence()
        elif tag == "e":
            if closing:
                if mention_start is None:
                    raise IexmlParseError("</e> without open mention", doc_id, offset)
                if word_start is not None:
                    raise IexmlParseError("</e> inside <w>", doc_id, offset)
                mentions.append(_finish_mention(
                    sentence, readings, segments, doc_id, mention_start, text))
                mention_start = None
                segments = []
                dirty = True
            else:
                if mention_start is not None:
                    raise IexmlParseError("nested <e> elements", doc_id, offset)
                mention_start = m.start()
                spec = _id_attr(attrs, "e", doc_id, offset)
                readings = tuple(_parse_reading(part, doc_id, offset)
                                 for part in spec.split("|"))
                segments = []
                if selfclose:
                    mentions.append(_finish_mention(
                        sentence, readings, segments, doc_id, mention_start, text))
                    mention_start = None
                    dirty = True
        else:  # w
            if closing:
                if word_start is None:
                    raise IexmlParseError("</w> without open word", doc_id, offset)
                segments.append(("word", word_id, text[word_start:m.start()]))
                word_start = None
                word_id = None
            else:
                if mention_start is None:
                    raise IexmlParseError("<w> outside <e>", doc_id, offset)
                if word_start is not None:
                    raise IexmlParseError("nested <w> elements", doc_id, offset)
                raw = _id_attr(attrs, "w", doc_id, offset)
                try:
                    word_id = int(raw)
                except ValueError:
                    raise IexmlParseError(
                        f"word id {raw!r} is not an integer", doc_id, offset) from None
                if selfclose:
                    segments.append(("word", word_id, ""))
                    word_id = None
                else:
                    word_start = m.end()

    if mention_start is not None or word_start is not None:
        where = mention_start if mention_start is not None else 0
        raise IexmlParseError("unbalanced markup at end of document",
                              doc_id, _byte_offset(text, where))
    tail = text[pos:]
    if tail.strip():
        dirty = True

    frequencies: Counter[str] = Counter()
    for mention in mentions:
        for reading in mention.readings:
            frequencies[reading.cui] += 1
    count = max((m.sentence_index for m in mentions), default=-1) + 1
    return AnnotatedDocument(
        doc_id=doc_id,
        object_type=object_type,
        sentence_count=count,
        mentions=mentions,
        frequencies=dict(frequencies),
    )


def _finish_mention(sentence: int, readings: tuple[Reading, ...],
                    segments: list[Segment], doc_id: str, start: int,
                    text: str) -> EntityMention:
    words = {wid for kind, wid, _ in segments if kind == "word"}
    for reading in readings:
        for wid in reading.word_ids or ():
            if wid not in words:
                raise IexmlParseError(
                    f"reading {reading.source}:{reading.cui} refers to word "
                    f"{wid} but the mention has no such <w>",
                    doc_id, _byte_offset(text, start))
    surface = "".join(s for _, _, s in segments)
    return EntityMention(
        sentence_index=sentence,
        surface=surface,
        readings=readings,
        segments=tuple(segments),
    )


def _reading_spec(reading: Reading) -> str:
    spec = f"{reading.source}:{reading.cui}:{','.join(reading.semtypes)}"
    if reading.word_ids is not None:
        spec += "::" + ",".join(str(w) for w in reading.word_ids)
    return spec


def serialize_iexml(doc: AnnotatedDocument) -> str:
    """Emit a document in canonical trailing-delimiter form.

    Mention content is reproduced verbatim from the parsed segments, so
    ``parse(serialize(parse(text)))`` equals ``parse(text)``. Loose text
    between mentions is not retained.
    """
    by_sentence: dict[int, list[EntityMention]] = {}
    for mention in doc.mentions:
        by_sentence.setdefault(mention.sentence_index, []).append(mention)
    parts: list[str] = []
    for s in range(doc.sentence_count):
        rendered = []
        for mention in by_sentence.get(s, []):
            spec = "|".join(_reading_spec(r) for r in mention.readings)
            inner = "".join(
                seg if kind == "text" else f'<w id="{wid}">{seg}</w>'
                for kind, wid, seg in mention.segments)
            if not mention.segments:
                inner = mention.surface
            rendered.append(f'<e id="{spec}">{inner}</e>')
        parts.append(" ".join(rendered) + "</s>")
    return "".join(parts)


def sentence_cooccurrences(doc: AnnotatedDocument) -> set[tuple[str, str]]:
    """Unordered pairs of distinct cuis read within a common sentence."""
    per_sentence: dict[int, set[str]] = {}
    for mention in doc.mentions:
        bucket = per_sentence.setdefault(mention.sentence_index, set())
        bucket.update(r.cui for r in mention.readings)
    pairs: set[tuple[str, str]] = set()
    for cuis in per_sentence.values():
        ordered = sorted(cuis)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1:]:
                pairs.add((a, b))
    return pairs


def concept_frequencies(doc: AnnotatedDocument) -> dict[str, int]:
    """Reading counts per cui, as computed at parse time."""
    return dict(doc.frequencies)


def iter_corpus_jsonl(path) -> Iterator[AnnotatedDocument]:
    """Documents from line-delimited {"doc_id","object_type","iexml"} records."""
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                doc_id = record["doc_id"]
                object_type = record["object_type"]
                text = record["iexml"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise IexmlParseError(
                    f"bad corpus record ({exc})", f"{path}:{lineno}", 0) from None
            yield parse_iexml(text, doc_id=doc_id, object_type=object_type)


def iter_corpus_dir(path) -> Iterator[AnnotatedDocument]:
    """One .iexml file per document; object types come from manifest.json."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise IexmlParseError("corpus directory has no manifest.json",
                              str(root), 0)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    for file in sorted(root.glob("*.iexml")):
        doc_id = file.stem
        if doc_id not in manifest:
            raise IexmlParseError("document missing from manifest.json", doc_id, 0)
        yield parse_iexml(file.read_text(encoding="utf-8"),
                          doc_id=doc_id, object_type=manifest[doc_id])


def read_corpus(path) -> Iterator[AnnotatedDocument]:
    """Dispatch between the directory and the line-delimited corpus forms."""
    p = Path(path)
    if p.is_dir():
        return iter_corpus_dir(p)
    return iter_corpus_jsonl(p)
