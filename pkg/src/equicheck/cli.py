"""Command line entry points: validate one pair, run a batch manifest, or
replay a recorded run."""

from __future__ import annotations

import sys
import time
from pathlib import Path

import click

from .errors import ConfigError, EquicheckError, IncompleteLog
from .pipeline import (
    PairEntry,
    PairManifest,
    RunConfig,
    replay_run,
    run_batch,
    validate_pair,
)
from .reporting import render_figures, render_table, write_summary_csv
from .similarity import SimilarityConfig


def _config_from_options(backend, timeout_s, no_semantic_analysis,
                         standalone_agent, cfg_threshold, df_threshold,
                         path_metric, agent_cmd, model_id,
                         parallelism=1) -> RunConfig:
    return RunConfig(
        model_id=model_id,
        backend=backend,
        similarity=SimilarityConfig(path_metric=path_metric),
        cfg_threshold=cfg_threshold,
        df_threshold=df_threshold,
        timeout_s=timeout_s,
        agent_cmd=list(agent_cmd) if agent_cmd else [],
        no_semantic_analysis=no_semantic_analysis,
        standalone_agent=standalone_agent,
        parallelism=parallelism,
    )


_COMMON = [
    click.option("--backend", type=click.Choice(["remote", "mock", "replay"]),
                 default="mock", show_default=True),
    click.option("--timeout-s", type=float, default=1000.0, show_default=True,
                 help="wall-clock budget for the test generation agent"),
    click.option("--no-semantic-analysis", is_flag=True,
                 help="omit analyzer results from the agent prompt and disable gates"),
    click.option("--standalone-agent", is_flag=True,
                 help="skip the semantic analyzers entirely"),
    click.option("--cfg-threshold", type=float, default=None,
                 help="override the control-flow gate threshold"),
    click.option("--df-threshold", type=float, default=None,
                 help="override the data-flow gate threshold"),
    click.option("--path-metric", type=click.Choice(["edit", "jaccard"]),
                 default="edit", show_default=True),
    click.option("--agent-cmd", multiple=True,
                 help="agent command template, one token per flag"),
    click.option("--model-id", default="mock-model", show_default=True),
    click.option("--run-dir", type=click.Path(path_type=Path), default=None,
                 help="output directory (default: runs/<timestamp>)"),
]


def _common(f):
    for option in reversed(_COMMON):
        f = option(f)
    return f


def _default_run_dir() -> Path:
    return Path("runs") / time.strftime("%Y%m%d-%H%M%S")


@click.group()
def main():
    """Cross-language translation validation and repair."""


@main.command()
@click.option("--source-project", required=True, type=click.Path(exists=True))
@click.option("--target-project", required=True, type=click.Path(exists=True))
@click.option("--source-func", required=True,
              help="fragment locator: FILE:NAME or FILE:START-END")
@click.option("--target-func", required=True)
@click.option("--source-language", required=True)
@click.option("--target-language", required=True)
@_common
def validate(source_project, target_project, source_func, target_func,
             source_language, target_language, backend, timeout_s,
             no_semantic_analysis, standalone_agent, cfg_threshold,
             df_threshold, path_metric, agent_cmd, model_id, run_dir):
    """Judge one translation pair."""
    try:
        config = _config_from_options(
            backend, timeout_s, no_semantic_analysis, standalone_agent,
            cfg_threshold, df_threshold, path_metric, agent_cmd, model_id,
        )
        entry = PairEntry(
            pair_id="pair-0001",
            source_project=str(source_project),
            target_project=str(target_project),
            source_language=source_language,
            target_language=target_language,
            source_locator=_parse_locator(source_func),
            target_locator=_parse_locator(target_func),
        )
        run_dir = run_dir or _default_run_dir()
        report = validate_pair(entry, config, run_dir)
    except EquicheckError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"verdict: {report['verdict']['verdict']}")
    click.echo(f"summary: {report['verdict']['summary']}")
    click.echo(f"report: {Path(run_dir) / entry.pair_id / 'report.json'}")


def _parse_locator(spec: str) -> dict:
    if ":" not in spec:
        raise ConfigError(
            f"locator {spec!r} must be FILE:NAME or FILE:START-END"
        )
    file_part, _, rest = spec.rpartition(":")
    if "-" in rest and rest.replace("-", "").isdigit():
        start, end = rest.split("-", 1)
        return {"file": file_part, "start_line": int(start), "end_line": int(end)}
    return {"file": file_part, "name": rest}


@main.command()
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--parallelism", type=int, default=1, show_default=True)
@click.option("--figures/--no-figures", default=True,
              help="render summary charts alongside the CSV")
@_common
def batch(manifest_path, parallelism, figures, backend, timeout_s,
          no_semantic_analysis, standalone_agent, cfg_threshold, df_threshold,
          path_metric, agent_cmd, model_id, run_dir):
    """Run every pair in a manifest and summarize the outcomes."""
    try:
        config = _config_from_options(
            backend, timeout_s, no_semantic_analysis, standalone_agent,
            cfg_threshold, df_threshold, path_metric, agent_cmd, model_id,
            parallelism=parallelism,
        )
        manifest = PairManifest.from_file(manifest_path)
        run_dir = run_dir or _default_run_dir()
        summary = run_batch(manifest, config, run_dir)
        csv_path = write_summary_csv(run_dir)
        figure_paths = render_figures(run_dir) if figures else []
    except EquicheckError as exc:
        raise click.ClickException(str(exc))
    click.echo(render_table(summary.to_dict()))
    click.echo(f"summary: {Path(run_dir) / 'summary.json'}")
    click.echo(f"csv: {csv_path}")
    for path in figure_paths:
        click.echo(f"figure: {path}")


@main.command()
@click.option("--run-dir", "run_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
def replay(run_dir):
    """Re-execute a recorded run and verify byte-identical reports."""
    try:
        results = replay_run(run_dir)
    except (IncompleteLog, ConfigError, EquicheckError) as exc:
        raise click.ClickException(str(exc))
    for pair_id, report in results.items():
        click.echo(f"{pair_id}: {report['verdict']['verdict']} (replay verified)")


if __name__ == "__main__":
    sys.exit(main())
