"""Command line entry points: ingest, validate, serve, export."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import ingest as ingest_mod
from . import projection
from .ingest import CorpusStore, load_bundle
from .service import ModelService, create_app


@click.group()
def main():
    """Emotion coherence analytics over presentation video bundles."""


@main.command("ingest")
@click.argument("bundle_dirs", nargs=-1, required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
@click.option("--laughter-threshold", default=ingest_mod.LAUGHTER_OVERLAP_THRESHOLD,
              show_default=True, help="Laughter overlap fraction that clears audio emotion.")
def ingest_cmd(bundle_dirs: tuple[str, ...], store_dir: str, laughter_threshold: float):
    """Load, validate and persist bundles into a corpus store."""
    store = CorpusStore(store_dir, laughter_threshold=laughter_threshold)
    for bundle_dir in bundle_dirs:
        record = store.ingest(bundle_dir)
        click.echo(
            f"ingested {record.id}: {len(record.segments)} segments, "
            f"{len(record.frames)} frames"
        )


@main.command("validate")
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
def validate_cmd(bundle_dir: str):
    """Check one bundle; print violations and exit non-zero if any."""
    try:
        record = load_bundle(bundle_dir)
    except ingest_mod.ValidationError as exc:
        for violation in exc.report.violations:
            click.echo(str(violation))
        sys.exit(1)
    except (ingest_mod.ParseError, FileNotFoundError) as exc:
        click.echo(str(exc))
        sys.exit(1)
    click.echo(f"{record.id}: ok")


@main.command("serve")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_cmd(store_dir: str, host: str, port: int):
    """Serve the exploration API over a corpus store."""
    import uvicorn

    uvicorn.run(create_app(CorpusStore(store_dir)), host=host, port=port)


@main.command("export")
@click.argument("video_id")
@click.option("--what", required=True,
              type=click.Choice(["summary", "sankey", "projection", "words"]))
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Output file; stdout when omitted.")
@click.option("--seed", default=0, show_default=True, type=int, help="Projection seed.")
def export_cmd(video_id: str, what: str, store_dir: str, out_path: str | None, seed: int):
    """Write one derived model as the same JSON body the service emits."""
    svc = ModelService(CorpusStore(store_dir))
    if what == "summary":
        body = svc.summary(video_id)
    elif what == "sankey":
        body = svc.sankey(video_id)
    elif what == "projection":
        body = svc.projection(video_id, projection.ProjectionParams(seed=seed))
    else:
        body = svc.words(video_id, "frequency", "")
    text = json.dumps(body, indent=2, allow_nan=False)
    if out_path is None:
        click.echo(text)
    else:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
