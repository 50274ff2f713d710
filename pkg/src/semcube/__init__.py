"""Semantic OLAP over annotated document collections.

The pipeline in one breath: a taxonomy is loaded and interval-labeled so
subsumption checks cost O(log k); annotated documents are parsed, their
concepts smoothed into per-document rank vectors, and each document is
normalized to one fact row (one concept per dimension); a corpus index
aggregates facts into descendant-closed counts, association measures and
semantic bridges; concept maps expose the whole thing as browsable layers
over HTTP.
"""

from .config import EngineConfig, load_config
from .cube import (CONTINGENCY_MODES, MEASURES, Bridge, ContingencyCell,
                   CorpusIndex, bridges, build_cube, concept_relevance, hits,
                   index_corpus, measure_score, pair_counts, score_sum)
from .errors import (ConfigError, CycleError, DanglingParentError,
                     DegenerateDocumentError, DuplicateConceptError,
                     IexmlParseError, IngestError, InvalidOperationError,
                     SchemaViolationError, SemcubeError, SnapshotError,
                     TaxonomyFormatError, UnknownBallError, UnknownConceptError,
                     UnknownMapError)
from .facts import (DEFAULT_ALPHA, AffinityMatrix, DocumentFact, RankVector,
                    build_affinity, build_fact, normalize_document,
                    rank_concepts, rank_document)
from .iexml import (AnnotatedDocument, EntityMention, Reading, parse_iexml,
                    read_corpus, serialize_iexml)
from .ingest import build_index, run_ingest
from .mapping import (BALL_STATES, SCORERS, Ball, ConceptMap, LayerRequest,
                      MapLayer, build_map, drill_down, drill_through_bridge,
                      drill_through_concept, keep_only, map_payload,
                      remove_concept, roll_up)
from .schema import Category, Dimension, Schema, build_schema, validate_schema
from .server import MapStore, create_app, export_map, serve
from .snapshot import (SNAPSHOT_VERSION, IndexSnapshot, load_snapshot,
                       save_snapshot)
from .taxonomy import (Concept, ConceptDescriptor, Ontology, load_taxonomy,
                       load_taxonomy_path, match_lexicon,
                       ontology_from_records)

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix", "AnnotatedDocument", "BALL_STATES", "Ball", "Bridge",
    "CONTINGENCY_MODES", "Category", "Concept", "ConceptDescriptor",
    "ConceptMap", "ConfigError", "ContingencyCell", "CorpusIndex",
    "CycleError", "DEFAULT_ALPHA", "DanglingParentError",
    "DegenerateDocumentError", "Dimension", "DocumentFact",
    "DuplicateConceptError", "EngineConfig", "EntityMention",
    "IexmlParseError", "IndexSnapshot", "IngestError",
    "InvalidOperationError", "LayerRequest", "MEASURES", "MapLayer",
    "MapStore", "Ontology", "RankVector", "Reading", "SCORERS",
    "SNAPSHOT_VERSION", "Schema", "SchemaViolationError", "SemcubeError",
    "SnapshotError", "TaxonomyFormatError", "UnknownBallError",
    "UnknownConceptError", "UnknownMapError", "bridges", "build_affinity",
    "build_cube", "build_fact", "build_index", "build_map", "build_schema",
    "concept_relevance", "create_app", "drill_down", "drill_through_bridge",
    "drill_through_concept", "export_map", "hits", "index_corpus",
    "keep_only", "load_config", "load_snapshot", "load_taxonomy",
    "load_taxonomy_path", "map_payload", "match_lexicon", "measure_score",
    "normalize_document", "ontology_from_records", "pair_counts",
    "parse_iexml", "rank_concepts", "rank_document", "read_corpus",
    "remove_concept", "roll_up", "run_ingest", "save_snapshot",
    "score_sum", "serialize_iexml", "serve", "validate_schema",
]
