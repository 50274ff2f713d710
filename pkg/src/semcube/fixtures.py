"""Loaders for the synthetic corpora bundled with the package.

Two data sets ship under ``semcube/data``:

* ``jia_*``: a single annotated trial announcement about juvenile
  idiopathic arthritis, with a small schema whose groups mirror UMLS
  semantic types. Good for exercising the per-document pipeline.
* ``demo_*``: a cardiology and neurology themed collection (operations,
  findings, brain diseases, proteins) used by the browsing walkthroughs
  and the command line demo.
"""

from __future__ import annotations

import json
from importlib import resources

from .iexml import AnnotatedDocument, parse_iexml
from .taxonomy import Ontology, load_taxonomy


def _fixture_text(name: str) -> str:
    return resources.files("semcube").joinpath("data", name).read_text(encoding="utf-8")


def fixture_path(name: str):
    """Filesystem path of a bundled fixture (fixtures ship as real files)."""
    return resources.files("semcube").joinpath("data", name)


def jia_document() -> AnnotatedDocument:
    """The annotated arthritis trial sentence."""
    return parse_iexml(_fixture_text("jia_trial.iexml"),
                       doc_id="jia-trial", object_type="publication")


def jia_ontology() -> Ontology:
    return load_taxonomy(_fixture_text("jia_taxonomy.jsonl").splitlines())


def jia_group_map() -> dict[str, str]:
    return json.loads(_fixture_text("jia_groups.json"))


def demo_ontology() -> Ontology:
    return load_taxonomy(_fixture_text("demo_taxonomy.jsonl").splitlines())


def demo_documents() -> list[AnnotatedDocument]:
    docs = []
    for line in _fixture_text("demo_corpus.jsonl").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        docs.append(parse_iexml(record["iexml"], doc_id=record["doc_id"],
                                object_type=record["object_type"]))
    return docs


def demo_group_map() -> dict[str, str]:
    return json.loads(_fixture_text("demo_groups.json"))


def write_demo_config(directory, index_dir=None, port: int = 8080) -> str:
    """Materialize an engine config pointing at the bundled demo corpus.

    Returns the path of the written config file. ``index_dir`` defaults to
    ``<directory>/index``.
    """
    from pathlib import Path

    directory = Path(directory).resolve()
    directory.mkdir(parents=True, exist_ok=True)
    index_dir = Path(index_dir).resolve() if index_dir else directory / "index"
    config = {
        "taxonomy": str(fixture_path("demo_taxonomy.jsonl")),
        "corpus": str(fixture_path("demo_corpus.jsonl")),
        "index": str(index_dir),
        "group_map": demo_group_map(),
        "alpha": 0.9,
        "measure": "interest_factor",
        "delta": 1.0,
        "contingency": "standard",
        "port": port,
        "link_templates": {
            "publication": "https://example.org/pubmed/{doc_id}",
            "protein": "https://example.org/swissprot/{doc_id}",
        },
    }
    path = directory / "demo_config.json"
    path.write_text(json.dumps(config, indent=2, sort_keys=True), encoding="utf-8")
    return str(path)
