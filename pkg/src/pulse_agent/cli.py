"""Command-line interface: ingestion, batch evaluation, service, and a
terminal REPL against a local orchestrator."""

from __future__ import annotations

import sys

import click

from .batch import evaluate_store
from .config import load_config
from .datastore import DataStore
from .errors import PulseAgentError
from .orchestrator import ClarificationRequest, DataPipe, ToolContext, default_registry, run_session
from .service import build_backend, create_app


def _load(config_path):
    return load_config(config_path)


@click.group()
def main():
    """Physiological time-series analysis agent."""


@main.command()
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--user", "user_id", required=True)
@click.option("--modality", type=click.Choice(["PPG", "ECG_LEAD_II"]), required=True)
@click.option("--start", "start_epoch_s", type=float, required=True, help="Start time, Unix epoch seconds.")
@click.option("--rate", "sample_rate_hz", type=float, required=True, help="Sampling rate in Hz.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def ingest(csv_file, user_id, modality, start_epoch_s, sample_rate_hz, config_path):
    """Ingest a recording CSV (header: t_offset_s,value) into the data store."""
    config = _load(config_path)
    store = DataStore(config.data_root, timezone=config.timezone)
    try:
        meta = store.ingest(csv_file, user_id, modality, start_epoch_s, sample_rate_hz)
    except PulseAgentError as exc:
        click.echo(f"{exc.code}: {exc}", err=True)
        sys.exit(1)
    click.echo(f"ingested {meta.recording_id}: {meta.duration_s:.1f} s of {meta.modality} for {meta.user_id}")


@main.command()
@click.option("--data-root", default=None, help="Override the configured store root.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def evaluate(data_root, out_dir, config_path):
    """Run both HR pipelines over all paired recordings and write the report."""
    config = _load(config_path)
    root = data_root or config.data_root
    store = DataStore(root, timezone=config.timezone)
    try:
        report_path = evaluate_store(store, config, out_dir)
    except PulseAgentError as exc:
        click.echo(f"{exc.code}: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {report_path}")


@main.command()
@click.option("--port", type=int, default=None)
@click.option("--host", default=None, help="Bind address; loopback by default.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(port, host, config_path):
    """Start the HTTP service."""
    import uvicorn

    config = _load(config_path)
    app = create_app(config)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.command()
@click.option("--user", "user_id", default=None, help="Default user id mentioned to the agent.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def ask(user_id, config_path):
    """Terminal REPL against a local orchestrator with the configured backend."""
    config = _load(config_path)
    store = DataStore(config.data_root, timezone=config.timezone)
    llm = build_backend(config)
    registry = default_registry()
    datapipe = DataPipe()
    ctx = ToolContext(
        store=store,
        datapipe=datapipe,
        trim_s=config.trim_s,
        window_len_s=config.window_len_s,
        hop_s=config.hop_s,
        ppg_config=config.ppg,
    )
    click.echo("pulse-agent REPL; empty line to exit.")
    while True:
        try:
            query = click.prompt("you", default="", show_default=False)
        except (EOFError, click.Abort):
            break
        if not query.strip():
            break
        if user_id and user_id not in query:
            query = f"{query} (user {user_id})"
        try:
            result = run_session(query, registry, llm, ctx)
        except PulseAgentError as exc:
            click.echo(f"error {exc.code}: {exc}", err=True)
            continue
        if isinstance(result, ClarificationRequest):
            click.echo(f"agent (clarification): {result.question}")
        else:
            click.echo(f"agent: {result.text}")


if __name__ == "__main__":
    main()
