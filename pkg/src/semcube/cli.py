"""Command line entry points: ingest, serve, one-shot map export."""

from __future__ import annotations

import click

from .config import load_config
from .cube import CONTINGENCY_MODES, MEASURES
from .errors import SemcubeError
from .ingest import build_index, run_ingest
from .mapping import SCORERS, LayerRequest, build_map, map_payload
from .server import canonical_bytes, serve
from .snapshot import load_snapshot


@click.group()
def main() -> None:
    """Semantic data cube over annotated document collections."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(dir_okay=False),
              help="Engine config JSON file.")
def ingest(config_path: str) -> None:
    """Build the index described by the config and persist it."""
    try:
        config = load_config(config_path)
        summary = run_ingest(config)
    except SemcubeError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"indexed {summary['documents']} documents into {config.index}")
    click.echo(f"dimensions: {summary['dimensions']}")
    click.echo(f"distinct concepts: {summary['distinct_concepts']}")
    click.echo(f"dropped cuis: {len(summary['dropped_cuis'])}")
    click.echo(f"flagged documents: {len(summary['flagged_docs'])}")


@main.command(name="serve")
@click.option("--config", "config_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--port", type=int, default=None,
              help="Override the port from the config.")
def serve_cmd(config_path: str, port: int | None) -> None:
    """Serve the persisted index over HTTP."""
    try:
        config = load_config(config_path)
        serve(config, port=port)
    except SemcubeError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_layers(spec: str) -> list[LayerRequest]:
    requests = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        dim, dot, idx = token.rpartition(".")
        if not dot or not dim:
            raise click.BadParameter(
                f"layer {token!r} must look like Dimension.CATEGORY",
                param_hint="--layers")
        try:
            category = int(idx)
        except ValueError:
            raise click.BadParameter(
                f"layer {token!r} has a non-integer category index",
                param_hint="--layers") from None
        requests.append(LayerRequest(dimension_id=dim, category=category))
    if not requests:
        raise click.BadParameter("at least one layer is required",
                                 param_hint="--layers")
    return requests


@main.command(name="map")
@click.option("--config", "config_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--layers", required=True,
              help="Comma-separated Dimension.CATEGORY pairs, left to right.")
@click.option("--query", default=None,
              help="Whitespace-separated keywords to highlight.")
@click.option("--measure", type=click.Choice(MEASURES), default=None)
@click.option("--delta", type=float, default=None)
@click.option("--scorer", type=click.Choice(SCORERS), default="hits")
@click.option("--contingency", type=click.Choice(CONTINGENCY_MODES),
              default=None)
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False, writable=True))
def map_cmd(config_path: str, layers: str, query: str | None,
            measure: str | None, delta: float | None, scorer: str,
            contingency: str | None, out_path: str) -> None:
    """Build one map without the service and write its JSON body.

    Uses the persisted index when it exists, otherwise runs the in-memory
    pipeline against the configured taxonomy and corpus.
    """
    requests = _parse_layers(layers)
    try:
        config = load_config(config_path)
        if config.index.is_dir():
            snapshot = load_snapshot(config.index)
        else:
            snapshot = build_index(config)
        index = snapshot.to_index()
        concept_map = build_map(
            index, "cli", requests,
            query=tuple(query.split()) if query else (),
            measure=measure or config.measure,
            delta=config.delta if delta is None else delta,
            scorer=scorer,
            contingency=contingency or config.contingency)
    except SemcubeError as exc:
        raise click.ClickException(str(exc)) from exc
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    body = canonical_bytes(map_payload(concept_map))
    with open(out_path, "wb") as out:
        out.write(body)
    click.echo(f"wrote {out_path} ({len(body)} bytes)")


if __name__ == "__main__":
    main()
