"""Batch command line: probe, night stage, day stage, full run, serve.

Exit codes: 0 success, 2 probe found hard conflicts, 3 solver timeout,
4 input/output error."""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path

import click

from . import pipeline
from .catalog.ids import Stage
from .catalog.registry import catalog_listing
from .io_config import (
    GRID_CSV,
    STRUCTURED_JSONLIKE,
    IoError,
    dump_session,
    export_roster,
    load_condition_file,
    load_weight_table,
    load_wish_table,
)
from .pipeline import PipelineError, ProbeFailure
from .shifts import parse_shift
from .solving.exact import SolverCommand, bundled_solver_command, cbc_solver_command
from .solving.probe import probe_hard
from .solving.reports import SolveStatus

EXIT_OK = 0
EXIT_PROBE = 2
EXIT_TIMEOUT = 3
EXIT_IO = 4


def _fail_io(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_IO)


def _load_inputs(config_path, wishes_path, weights_path=None):
    try:
        cfg, cfg_warnings = load_condition_file(Path(config_path).read_bytes())
        wishes, wish_warnings = load_wish_table(
            Path(wishes_path).read_bytes(), cfg.calendar)
        if weights_path:
            cfg = cfg.with_updates(
                weights=load_weight_table(Path(weights_path).read_bytes()))
    except (OSError, IoError) as exc:
        _fail_io(str(exc))
    for w in cfg_warnings + wish_warnings:
        click.echo(f"warning: {w}", err=True)
    return cfg, wishes


def _solver_command(name: str) -> SolverCommand | None:
    if name == "bundled":
        return bundled_solver_command()
    if name == "cbc":
        return cbc_solver_command()
    return None


def _write(path: Path, data: bytes):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        _fail_io(str(exc))


def _stage_outputs(out_dir: Path, tag: str, session, result):
    _write(out_dir / f"{tag}_roster.csv",
           export_roster(result.roster, GRID_CSV))
    _write(out_dir / f"{tag}_roster.json",
           export_roster(result.roster, STRUCTURED_JSONLIKE))
    _write(out_dir / f"{tag}_trace.csv",
           result.report.trace_csv().encode())
    feedback = result.feedback + [
        r.human_note() for r in result.violations
    ]
    _write(out_dir / f"{tag}_feedback.txt",
           ("\n".join(feedback) + "\n" if feedback else "clean\n").encode())
    _write(out_dir / "session.json", dump_session(session))


@click.group()
def main():
    """Two-stage nurse rostering."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--wishes", "wishes_path", required=True, type=click.Path())
@click.option("--stage", default="night",
              type=click.Choice(["night", "day"]))
@click.option("--time", "time_limit", default=120.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def probe(config_path, wishes_path, stage, time_limit, out_path):
    """Run the hard-relaxation probe and print its report."""
    cfg, wishes = _load_inputs(config_path, wishes_path)
    st = Stage.NIGHT if stage == "night" else Stage.DAY
    report = probe_hard(cfg, wishes, st, time_limit=time_limit)
    text = report.render()
    click.echo(text, nl=False)
    if out_path:
        _write(Path(out_path), text.encode())
    sys.exit(EXIT_OK if report.clean else EXIT_PROBE)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--wishes", "wishes_path", required=True, type=click.Path())
@click.option("--weights", "weights_path", type=click.Path(), default=None)
@click.option("--time", "time_limit", default=60.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--solver", default="heuristic",
              type=click.Choice(["heuristic", "exact"]))
@click.option("--solver-command", default="bundled",
              type=click.Choice(["bundled", "cbc"]))
@click.option("--acknowledge-probe", is_flag=True, default=False)
@click.option("--out-dir", default="out", type=click.Path())
def night(config_path, wishes_path, weights_path, time_limit, seed, solver,
          solver_command, acknowledge_probe, out_dir):
    """Night stage: solve and write the roster, feedback and trace."""
    cfg, wishes = _load_inputs(config_path, wishes_path, weights_path)
    session = pipeline.new_session(cfg, wishes, "batch")
    try:
        result = pipeline.run_night_stage(
            session, solver=solver, time_limit=time_limit, seed=seed,
            command=_solver_command(solver_command),
            acknowledge_probe=acknowledge_probe)
    except ProbeFailure as exc:
        click.echo(exc.report.render(), nl=False, err=True)
        sys.exit(EXIT_PROBE)
    except PipelineError as exc:
        _fail_io(str(exc))
    _stage_outputs(Path(out_dir), "night", session, result)
    if result.report.status is SolveStatus.TIMEOUT:
        sys.exit(EXIT_TIMEOUT)
    click.echo(f"night objective {result.report.objective}, "
               f"hard violations {result.report.hard_violations}")
    sys.exit(EXIT_OK)


def _apply_edit_list(session, edits_path):
    try:
        entries = json.loads(Path(edits_path).read_text())
        edits = [
            (e["nurse"], dt.date.fromisoformat(e["date"]),
             parse_shift(e["shift"]))
            for e in entries
        ]
    except (OSError, ValueError, KeyError) as exc:
        _fail_io(f"edit list: {exc}")
    if edits:
        warnings = pipeline.apply_edits(session, edits)
        for r in warnings:
            click.echo(f"warning: {r.human_note()}", err=True)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--wishes", "wishes_path", required=True, type=click.Path())
@click.option("--edited", "edited_path", required=True, type=click.Path(),
              help="night roster after human edits (grid CSV)")
@click.option("--weights", "weights_path", type=click.Path(), default=None)
@click.option("--time", "time_limit", default=60.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--solver", default="heuristic",
              type=click.Choice(["heuristic", "exact"]))
@click.option("--solver-command", default="bundled",
              type=click.Choice(["bundled", "cbc"]))
@click.option("--acknowledge-probe", is_flag=True, default=False)
@click.option("--out-dir", default="out", type=click.Path())
def day(config_path, wishes_path, edited_path, weights_path, time_limit,
        seed, solver, solver_command, acknowledge_probe, out_dir):
    """Day stage: post-process the edited night roster, then complete it."""
    cfg, wishes = _load_inputs(config_path, wishes_path, weights_path)
    try:
        edited, _ = load_wish_table(Path(edited_path).read_bytes(),
                                    cfg.calendar)
    except (OSError, IoError) as exc:
        _fail_io(str(exc))
    session = pipeline.new_session(cfg, wishes, "batch")
    # adopt the edited roster as the night result
    from .pipeline import Phase

    session.edited = edited
    session.phase = Phase.NIGHT_SOLVED
    pipeline.post_process_longday(session)
    try:
        result = pipeline.run_day_stage(
            session, solver=solver, time_limit=time_limit, seed=seed,
            command=_solver_command(solver_command),
            acknowledge_probe=acknowledge_probe)
    except ProbeFailure as exc:
        click.echo(exc.report.render(), nl=False, err=True)
        sys.exit(EXIT_PROBE)
    except PipelineError as exc:
        _fail_io(str(exc))
    _stage_outputs(Path(out_dir), "day", session, result)
    doc = pipeline.final_report(session)
    _write(Path(out_dir) / "final_report.txt",
           pipeline.render_final_report(doc).encode())
    _write(Path(out_dir) / "final_report.json",
           (json.dumps(doc, indent=1) + "\n").encode())
    if result.report.status is SolveStatus.TIMEOUT:
        sys.exit(EXIT_TIMEOUT)
    click.echo(f"day objective {result.report.objective}, "
               f"hard violations {result.report.hard_violations}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--wishes", "wishes_path", required=True, type=click.Path())
@click.option("--edits", "edits_path", type=click.Path(), default=None,
              help="JSON list of {nurse, date, shift} applied between stages")
@click.option("--weights", "weights_path", type=click.Path(), default=None)
@click.option("--time", "time_limit", default=60.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--solver", default="heuristic",
              type=click.Choice(["heuristic", "exact"]))
@click.option("--acknowledge-probe", is_flag=True, default=False)
@click.option("--out-dir", default="out", type=click.Path())
def run(config_path, wishes_path, edits_path, weights_path, time_limit,
        seed, solver, acknowledge_probe, out_dir):
    """Full pipeline: night solve, optional edits, post step, day solve."""
    cfg, wishes = _load_inputs(config_path, wishes_path, weights_path)
    session = pipeline.new_session(cfg, wishes, "batch")
    try:
        night_result = pipeline.run_night_stage(
            session, solver=solver, time_limit=time_limit, seed=seed,
            acknowledge_probe=acknowledge_probe)
        if edits_path:
            _apply_edit_list(session, edits_path)
        pipeline.post_process_longday(session)
        day_result = pipeline.run_day_stage(
            session, solver=solver, time_limit=time_limit, seed=seed,
            acknowledge_probe=acknowledge_probe)
    except ProbeFailure as exc:
        click.echo(exc.report.render(), nl=False, err=True)
        sys.exit(EXIT_PROBE)
    except PipelineError as exc:
        _fail_io(str(exc))
    out = Path(out_dir)
    _stage_outputs(out, "night", session, night_result)
    _stage_outputs(out, "day", session, day_result)
    doc = pipeline.final_report(session)
    _write(out / "final_report.txt",
           pipeline.render_final_report(doc).encode())
    _write(out / "final_report.json", (json.dumps(doc, indent=1) + "\n").encode())
    click.echo(f"night {night_result.report.objective} / "
               f"day {day_result.report.objective}, "
               f"hard violations {day_result.report.hard_violations}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--stage", default="night", type=click.Choice(["night", "day"]))
def listing(config_path, stage):
    """Print the constraint catalog with per-ward enablement."""
    try:
        cfg, _warnings = load_condition_file(Path(config_path).read_bytes())
    except (OSError, IoError) as exc:
        _fail_io(str(exc))
    st = Stage.NIGHT if stage == "night" else Stage.DAY
    for cid, enabled, desc in catalog_listing(st, cfg):
        flag = " " if enabled else "x"
        click.echo(f"[{flag}] {str(cid):10s} {desc}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8077, show_default=True)
@click.option("--data-dir", default=None)
@click.option("--token", default=None)
def serve(host, port, data_dir, token):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir=data_dir, token=token),
                host=host, port=port)


if __name__ == "__main__":
    main()
