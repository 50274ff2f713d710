"""HTTP facade over a loaded index.

The server holds one immutable CorpusIndex plus a store of live maps.
Map bodies are rendered once, as canonical JSON bytes (sorted keys,
compact separators), so exporting a map and GETting it produce the same
bytes. Reads and mutations of one map serialize on a per-map lock; the
index itself is never written to while serving.
"""

from __future__ import annotations

import json
import socket
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .config import EngineConfig
from .cube import CorpusIndex
from .errors import (ConfigError, InvalidOperationError, SemcubeError,
                     UnknownBallError, UnknownConceptError, UnknownMapError)
from .mapping import (ConceptMap, LayerRequest, build_map, drill_down,
                      drill_through_bridge, drill_through_concept, keep_only,
                      map_payload, remove_concept, roll_up)
from .snapshot import load_snapshot

MAP_TTL_SECONDS = 30 * 60


def canonical_bytes(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


@dataclass
class _MapEntry:
    concept_map: ConceptMap
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = 0.0


class MapStore:
    """Live maps by id, with per-map locks and idle expiry."""

    def __init__(self, ttl: float = MAP_TTL_SECONDS, clock=time.monotonic):
        self._entries: dict[str, _MapEntry] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._ttl = ttl
        self._clock = clock

    def _purge(self, now: float) -> None:
        for map_id, entry in list(self._entries.items()):
            if now - entry.last_used <= self._ttl:
                continue
            if entry.lock.acquire(blocking=False):
                del self._entries[map_id]
                entry.lock.release()

    def allocate_id(self) -> str:
        with self._lock:
            self._counter += 1
            return f"m{self._counter}"

    def put(self, concept_map: ConceptMap) -> _MapEntry:
        now = self._clock()
        with self._lock:
            self._purge(now)
            entry = _MapEntry(concept_map, last_used=now)
            self._entries[concept_map.map_id] = entry
            return entry

    def entry(self, map_id: str) -> _MapEntry:
        now = self._clock()
        with self._lock:
            self._purge(now)
            entry = self._entries.get(map_id)
            if entry is None:
                raise UnknownMapError(map_id)
            entry.last_used = now
            return entry

    def __len__(self) -> int:
        return len(self._entries)


def export_map(store: MapStore, map_id: str) -> bytes:
    """The canonical body of one live map, as served by GET."""
    entry = store.entry(map_id)
    with entry.lock:
        return canonical_bytes(map_payload(entry.concept_map))


class LayerSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dimension: str
    category: int | None = None
    query: str | None = None


class MapRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    layers: list[LayerSpec]
    query: str | None = None
    measure: str | None = None
    delta: float | None = None
    scorer: str | None = None
    contingency: str | None = None


class OpRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    concept: str
    layer: int | None = None


def _keywords(query: str | None) -> tuple[str, ...]:
    return tuple(query.split()) if query else ()


def _error_response(status: int, code: str, message: str,
                    context: dict) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message,
                           "context": context}})


def create_app(index: CorpusIndex, config: EngineConfig,
               store: MapStore | None = None) -> FastAPI:
    app = FastAPI(title="semcube", docs_url=None, redoc_url=None)
    # The browser client is served as a static page from wherever, so the
    # API answers cross-origin requests. There is no auth to protect.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["GET", "POST"], allow_headers=["*"])
    store = store if store is not None else MapStore()
    app.state.index = index
    app.state.config = config
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def bad_request_body(request: Request, exc: RequestValidationError):
        details = [{"loc": [str(part) for part in err.get("loc", ())],
                    "msg": str(err.get("msg", "")),
                    "type": str(err.get("type", ""))}
                   for err in exc.errors()]
        return _error_response(400, "validation",
                               "request does not match the endpoint schema",
                               {"errors": details})

    @app.exception_handler(ValueError)
    async def bad_request(request: Request, exc: ValueError):
        return _error_response(400, "bad-request", str(exc), {})

    @app.exception_handler(SemcubeError)
    async def engine_error(request: Request, exc: SemcubeError):
        if isinstance(exc, UnknownMapError):
            return _error_response(404, "unknown-map", str(exc),
                                   {"map_id": exc.map_id})
        if isinstance(exc, UnknownBallError):
            return _error_response(404, "unknown-ball", str(exc),
                                   {"concept": exc.concept_id})
        if isinstance(exc, UnknownConceptError):
            return _error_response(404, "unknown-concept", str(exc),
                                   {"concept": exc.concept_id})
        if isinstance(exc, InvalidOperationError):
            return _error_response(409, exc.code, str(exc), {})
        return _error_response(400, "bad-request", str(exc), {})

    def map_response(concept_map: ConceptMap) -> Response:
        return Response(content=canonical_bytes(map_payload(concept_map)),
                        media_type="application/json")

    @app.get("/tree")
    def tree() -> Response:
        dimensions = []
        for dim in index.schema:
            fragment = dim.fragment
            categories = []
            for cat in dim.categories:
                ordered = sorted(
                    cat.concepts,
                    key=lambda cid: fragment.descriptor(cid).pre_index)
                categories.append({
                    "index": cat.level_index,
                    "concepts": [
                        {"id": cid,
                         "label": fragment.concept(cid).preferred_label}
                        for cid in ordered],
                })
            dimensions.append({"id": dim.id, "name": dim.name,
                               "categories": categories})
        return Response(content=canonical_bytes({"dimensions": dimensions}),
                        media_type="application/json")

    @app.post("/maps")
    def create_map(body: MapRequest) -> Response:
        requests = []
        for spec in body.layers:
            requests.append(LayerRequest(
                dimension_id=spec.dimension,
                category=spec.category,
                keywords=_keywords(spec.query)))
        concept_map = build_map(
            index, store.allocate_id(), requests,
            query=_keywords(body.query),
            measure=body.measure or config.measure,
            delta=config.delta if body.delta is None else body.delta,
            scorer=body.scorer or "hits",
            contingency=body.contingency or config.contingency)
        store.put(concept_map)
        return map_response(concept_map)

    @app.get("/maps/{map_id}")
    def get_map(map_id: str) -> Response:
        return Response(content=export_map(store, map_id),
                        media_type="application/json")

    def _visible_layer(concept_map: ConceptMap, concept: str,
                       layer: int | None) -> int:
        if layer is not None:
            concept_map.layer(layer)
            return layer
        where = [i for i, lay in enumerate(concept_map.layers)
                 if concept in lay.concept_ids()]
        if not where:
            raise UnknownBallError(concept)
        if len(where) > 1:
            raise ValueError(
                f"concept {concept!r} is visible in layers {where}; "
                "pass \"layer\" to disambiguate")
        return where[0]

    def _expansion_layer(concept_map: ConceptMap, concept: str,
                         layer: int | None) -> int:
        if layer is not None:
            concept_map.layer(layer)
            return layer
        where = [i for i, records in sorted(concept_map.expansions.items())
                 if any(r.parent == concept or concept in r.children
                        for r in records)]
        if len(where) > 1:
            raise ValueError(
                f"concept {concept!r} matches expansions in layers {where}; "
                "pass \"layer\" to disambiguate")
        if where:
            return where[0]
        visible = [i for i, lay in enumerate(concept_map.layers)
                   if concept in lay.concept_ids()]
        if visible:
            return visible[0]
        raise InvalidOperationError(
            "no-expansion", f"{concept!r} was not produced by a drill-down")

    def _mutate(map_id: str, body: OpRequest, op) -> Response:
        entry = store.entry(map_id)
        with entry.lock:
            op(entry.concept_map, body)
            return map_response(entry.concept_map)

    @app.post("/maps/{map_id}/drill-down")
    def post_drill_down(map_id: str, body: OpRequest) -> Response:
        def op(concept_map: ConceptMap, body: OpRequest) -> None:
            layer = _visible_layer(concept_map, body.concept, body.layer)
            drill_down(concept_map, index, layer, body.concept)
        return _mutate(map_id, body, op)

    @app.post("/maps/{map_id}/roll-up")
    def post_roll_up(map_id: str, body: OpRequest) -> Response:
        def op(concept_map: ConceptMap, body: OpRequest) -> None:
            layer = _expansion_layer(concept_map, body.concept, body.layer)
            roll_up(concept_map, index, layer, body.concept)
        return _mutate(map_id, body, op)

    @app.post("/maps/{map_id}/keep-only")
    def post_keep_only(map_id: str, body: OpRequest) -> Response:
        def op(concept_map: ConceptMap, body: OpRequest) -> None:
            layer = _visible_layer(concept_map, body.concept, body.layer)
            keep_only(concept_map, layer, body.concept)
        return _mutate(map_id, body, op)

    @app.post("/maps/{map_id}/remove")
    def post_remove(map_id: str, body: OpRequest) -> Response:
        def op(concept_map: ConceptMap, body: OpRequest) -> None:
            layer = _visible_layer(concept_map, body.concept, body.layer)
            remove_concept(concept_map, layer, body.concept)
        return _mutate(map_id, body, op)

    def _object_items(hits, type_filter: str | None, limit: int | None) -> list[dict]:
        items = []
        for hit in hits:
            if type_filter is not None and hit.object_type != type_filter:
                continue
            item = {"doc_id": hit.doc_id, "object_type": hit.object_type,
                    "relevance": hit.score}
            template = config.link_templates.get(hit.object_type)
            if template:
                item["link"] = template.format(doc_id=hit.doc_id)
            items.append(item)
            if limit is not None and len(items) >= limit:
                break
        return items

    @app.get("/maps/{map_id}/concepts/{concept_id}/objects")
    def concept_objects(map_id: str, concept_id: str,
                        type: str | None = Query(default=None),
                        limit: int | None = Query(default=None, ge=0),
                        ) -> Response:
        entry = store.entry(map_id)
        with entry.lock:
            _visible_layer(entry.concept_map, concept_id, None)
        hits = drill_through_concept(index, concept_id)
        body = {"items": _object_items(hits, type, limit)}
        return Response(content=canonical_bytes(body),
                        media_type="application/json")

    @app.get("/maps/{map_id}/bridges/objects")
    def bridge_objects(map_id: str,
                       from_concept: str = Query(alias="from"),
                       to_concept: str = Query(alias="to"),
                       type: str | None = Query(default=None),
                       limit: int | None = Query(default=None, ge=0),
                       ) -> Response:
        entry = store.entry(map_id)
        with entry.lock:
            _visible_layer(entry.concept_map, from_concept, None)
            _visible_layer(entry.concept_map, to_concept, None)
        hits = drill_through_bridge(index, from_concept, to_concept)
        body = {"items": _object_items(hits, type, limit)}
        return Response(content=canonical_bytes(body),
                        media_type="application/json")

    return app


def _require_free_port(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise ConfigError(f"port {port} on {host} is already in use "
                          f"({exc})") from exc
    finally:
        probe.close()


def serve(config: EngineConfig, port: int | None = None,
          host: str = "127.0.0.1") -> None:
    """Load the snapshot and block serving HTTP until interrupted."""
    import uvicorn

    snapshot = load_snapshot(config.index)
    app = create_app(snapshot.to_index(), config)
    chosen = port if port is not None else config.port
    _require_free_port(host, chosen)
    uvicorn.run(app, host=host, port=chosen, log_level="warning")
