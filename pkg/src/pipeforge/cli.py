"""Command-line interface: upload, catalog, profile, run, bench, serve.

Environment variables provide deployment defaults: PIPEFORGE_STORE (store
directory), PIPEFORGE_API_TOKEN (HTTP auth), PIPEFORGE_STEP_TIMEOUT seconds,
PIPEFORGE_SELECTION_TIMEOUT seconds, and PIPEFORGE_ANALYSIS_ENDPOINT plus
PIPEFORGE_ANALYSIS_KEY to switch code analysis to a remote provider.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .catalog import RemoteAnalysisProvider, load_bundle
from .errors import PipeforgeError
from .gateway.engine import Engine, EngineConfig
from .profiler import profile as profile_bytes
from .recommender import DEFAULT_WEIGHTS, validate_weights


def _engine(store_dir: str, weights=DEFAULT_WEIGHTS, **overrides) -> Engine:
    env = os.environ
    settings = dict(
        store_dir=Path(store_dir),
        weights=weights,
        api_token=env.get("PIPEFORGE_API_TOKEN"),
        step_timeout=float(env.get("PIPEFORGE_STEP_TIMEOUT", 300.0)),
        selection_timeout=float(env.get("PIPEFORGE_SELECTION_TIMEOUT", 600.0)),
    )
    endpoint = env.get("PIPEFORGE_ANALYSIS_ENDPOINT")
    if endpoint:
        settings["analysis_provider"] = RemoteAnalysisProvider(
            endpoint, env.get("PIPEFORGE_ANALYSIS_KEY", ""))
    settings.update(overrides)
    return Engine(EngineConfig(**settings))


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
@click.option("--store", default=lambda: os.environ.get("PIPEFORGE_STORE", ".pipeforge"),
              show_default=".pipeforge",
              help="Directory for the embedded store, trace log and workspaces.")
@click.pass_context
def main(ctx, store):
    """Turn a tabular dataset plus a plain-language goal into an executed pipeline."""
    ctx.ensure_object(dict)
    ctx.obj["store"] = store


@main.command()
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--publish", is_flag=True, help="Index the service after analysis.")
@click.pass_context
def upload(ctx, bundle_dir, publish):
    """Upload a microservice bundle (manifest.json + main.py + requirements.txt)."""
    engine = _engine(ctx.obj["store"])
    try:
        _, submission, _ = load_bundle(bundle_dir)
        ms = engine.upload(submission, auto_publish=publish)
    except (PipeforgeError, OSError, KeyError) as exc:
        _fail(str(exc))
    click.echo(json.dumps({"id": ms.id, "state": ms.state,
                           "findings": ms.to_dict()["validation"] or []}, indent=2))
    if ms.state == "rejected":
        sys.exit(1)


@main.group()
def catalog():
    """Inspect the microservice catalog."""


@catalog.command("list")
@click.pass_context
def catalog_list(ctx):
    engine = _engine(ctx.obj["store"])
    for ms in engine.catalog.list():
        click.echo(f"{ms.id}  {ms.state:<10} {ms.submission.name}")


@catalog.command("show")
@click.argument("ms_id")
@click.pass_context
def catalog_show(ctx, ms_id):
    engine = _engine(ctx.obj["store"])
    try:
        ms = engine.get_microservice(ms_id)
    except KeyError:
        _fail(f"unknown microservice: {ms_id}")
    click.echo(json.dumps(ms.to_dict(), indent=2, sort_keys=True))


@main.command("profile")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Canonical profile JSON on stdout.")
def profile_cmd(dataset, as_json):
    """Profile a dataset file (csv, tsv or json records)."""
    path = Path(dataset)
    try:
        prof = profile_bytes(path.read_bytes(), path.name)
    except PipeforgeError as exc:
        _fail(str(exc))
    if as_json:
        click.echo(prof.to_json())
        return
    click.echo(f"{prof.source_name}: {prof.row_count} rows x {prof.column_count} columns "
               f"({prof.format})")
    for col in prof.schema:
        click.echo(f"  {col.name:<24} {col.storage_type:<9} {col.semantic_type}")
    q = prof.quality
    click.echo(f"quality: overall {q.overall:.3f} (completeness {q.completeness:.3f}, "
               f"consistency {q.consistency:.3f}, uniqueness {q.uniqueness:.3f})")
    click.echo(f"best target: {prof.best_target or '(none)'}")


@main.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--goal", required=True, help="Plain-language goal for the pipeline.")
@click.option("--interactive", is_flag=True,
              help="Choose candidates per stage instead of taking the top ranked.")
@click.option("--k", default=3, show_default=True, help="Candidates per stage.")
@click.option("--weights", default=None,
              help="Four comma-separated scoring weights summing to 1.")
@click.option("--user", default="default", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="RunRecord JSON on stdout.")
@click.pass_context
def run(ctx, dataset, goal, interactive, k, weights, user, as_json):
    """Profile DATASET, build a pipeline for GOAL, execute it."""
    weight_tuple = DEFAULT_WEIGHTS
    if weights:
        try:
            weight_tuple = validate_weights(tuple(float(w) for w in weights.split(",")))
        except (ValueError, PipeforgeError) as exc:
            _fail(f"invalid --weights: {exc}")
    engine = _engine(ctx.obj["store"], weights=weight_tuple)
    path = Path(dataset)
    data = path.read_bytes()

    choices = None
    if interactive and not as_json:
        try:
            dataset_id, prof = engine.add_dataset(path.name, data)
            _, recs = engine.recommend(goal, dataset_id, k=k, user=user)
        except PipeforgeError as exc:
            _fail(str(exc))
        choices = {}
        for stage, rec in recs.items():
            click.echo(f"\nstage: {stage}")
            for i, (ms_id, bd) in enumerate(rec.candidates, start=1):
                name = engine.catalog.get(ms_id).submission.name
                click.echo(f"  [{i}] {name} ({ms_id})  composite {bd.composite:.3f}")
                click.echo(f"      {bd.explanation}")
            pick = click.prompt("pick", default=1, type=click.IntRange(1, len(rec.candidates)))
            choices[stage] = rec.candidates[pick - 1][0]

    try:
        record = engine.run_end_to_end(
            data, goal, mode="interactive" if choices else "autonomous",
            user=user, choices=choices, dataset_name=path.name, k=k)
    except PipeforgeError as exc:
        _fail(f"[{getattr(exc, 'agent', 'engine')}] {exc}")
    if as_json:
        click.echo(json.dumps(record.to_dict(), indent=2, sort_keys=True))
    else:
        click.echo(f"pipeline {record.pipeline_id}: {record.final_status}")
        for r in record.step_results:
            click.echo(f"  step {r.step_order} [{r.microservice_id}] {r.outcome} "
                       f"({r.duration:.2f}s, {r.attempt_count} attempt(s))")
        if record.substitutions:
            for stage, original, sub in record.substitutions:
                click.echo(f"  self-healed {stage}: {original} -> {sub}")
    if record.final_status != "completed":
        sys.exit(1)


@main.command()
@click.argument("protocol", type=click.Choice(
    ["cold_start", "doc_degradation", "temporal", "failure_injection"]))
@click.option("--config", "config_name", default="A", show_default=True,
              type=click.Choice(["A", "B", "C", "D"]))
@click.option("--seed", default=7, show_default=True, type=int)
@click.option("--parallel", is_flag=True,
              help="Run tasks on a thread pool; order-free protocols only.")
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="Write the report JSON to this file.")
@click.pass_context
def bench(ctx, protocol, config_name, seed, parallel, out):
    """Run a desk-scale evaluation protocol and print its report."""
    from .bench import BENCH_CONFIGS, run_protocol
    from .errors import UnknownProtocol
    try:
        report = run_protocol(protocol, BENCH_CONFIGS[config_name], seed=seed,
                              work_dir=Path(ctx.obj["store"]) / "bench",
                              parallel=parallel)
    except UnknownProtocol as exc:
        _fail(str(exc))
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        click.echo(f"report written to {out}")
    click.echo(report.summary())


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_context
def serve(ctx, port, host):
    """Serve the HTTP API (and the workbench, when built)."""
    import uvicorn

    from .gateway.http import create_app
    engine = _engine(ctx.obj["store"])
    frontend = Path(__file__).parent.parent.parent / "frontend" / "dist"
    app = create_app(engine, frontend_dir=frontend if frontend.is_dir() else None)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
