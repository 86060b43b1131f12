"""Batch command-line entry point.

Thin client over the same project/runner layer the HTTP service uses, so
`label` here and POST /runs produce byte-identical outputs. Exit codes:
0 ok, 1 usage, 2 validation errors, 3 runtime failure.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .errors import (
    DetectionsError,
    EventLabError,
    ManifestError,
    ParseError,
    ProjectError,
    RuleError,
    RunError,
    UndefinedMetricError,
)
from .evaluation import compute_metrics, metrics_to_dict, stats_to_dict, dataset_stats
from .ingest import load_detections
from .project import MatcherConfig, Project, open_project
from .rules import event_to_dict, serialize_events
from .runner import (
    STATUS_DONE,
    load_run,
    read_labels,
    record_to_dict,
    run_labeling,
)
from .sequencer import SequencerConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


@dataclass
class CommandOutcome:
    exit_code: int
    summary: str
    report_path: Path | None = None


def _write_report(report: Path | None, payload: dict) -> Path | None:
    if report is None:
        return None
    report.parent.mkdir(parents=True, exist_ok=True)
    report.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return report


def _override(cfg, **kwargs):
    changes = {k: v for k, v in kwargs.items() if v is not None}
    return dataclasses.replace(cfg, **changes) if changes else cfg


_CONFIG_FLAGS = [
    click.option("--keypoint-score-min", type=float, default=None, help="Keypoint confidence gate."),
    click.option("--person-score-min", type=float, default=None, help="Person confidence gate."),
    click.option("--object-score-min", type=float, default=None, help="Object confidence gate."),
    click.option("--iou-min", type=float, default=None, help="Tracker association IoU floor."),
    click.option("--max-gap-frames", type=int, default=None, help="Tracker dropout tolerance."),
    click.option("--contact-iou", type=float, default=None, help="Contact IoU threshold."),
    click.option("--keypoint-box-scale", type=float, default=None, help="Body-part contact box scale."),
    click.option("--min-delay-s", type=float, default=None, help="Minimum inter-state delay (strict mode)."),
    click.option(
        "--max-embeddings-per-frame", type=int, default=None, help="Per-frame embedding cap."
    ),
]


def _with_config_flags(fn):
    for flag in reversed(_CONFIG_FLAGS):
        fn = flag(fn)
    return fn


def _apply_overrides(project: Project, opts: dict) -> None:
    cfg = project.configs
    cfg.ingest = _override(
        cfg.ingest,
        keypoint_score_min=opts.get("keypoint_score_min"),
        person_score_min=opts.get("person_score_min"),
        object_score_min=opts.get("object_score_min"),
    )
    project.manifest.thresholds = cfg.ingest
    cfg.tracker = _override(
        cfg.tracker, iou_min=opts.get("iou_min"), max_gap_frames=opts.get("max_gap_frames")
    )
    cfg.geometry = _override(
        cfg.geometry,
        contact_iou_min=opts.get("contact_iou"),
        keypoint_box_scale=opts.get("keypoint_box_scale"),
    )
    if opts.get("min_delay_s") is not None:
        cfg.sequencer = SequencerConfig(min_delay_s=opts["min_delay_s"])
    if opts.get("max_embeddings_per_frame") is not None:
        cfg.matcher = MatcherConfig(max_embeddings_per_frame=opts["max_embeddings_per_frame"])


@click.group(name="eventlab")
def cli():
    """Define key events, label video datasets, and review label quality."""


def _project_option(fn):
    return click.option(
        "--project",
        "project_root",
        type=click.Path(file_okay=False, path_type=Path),
        required=True,
        help="Project directory (contains manifest.json).",
    )(fn)


@cli.command()
@_project_option
@_with_config_flags
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None)
def ingest(project_root: Path, report: Path | None, **opts) -> CommandOutcome:
    """Validate the manifest and every detections file."""
    project = open_project(project_root)
    _apply_overrides(project, opts)
    per_video = {}
    for meta in project.manifest.videos:
        frames = load_detections(meta, project.configs.ingest)
        per_video[meta.video_id] = {
            "frames": len(frames),
            "persons": sum(len(f.persons) for f in frames),
            "objects": sum(len(f.objects) for f in frames),
        }
        click.echo(f"{meta.video_id}: {len(frames)} frames ok")
    summary = f"{len(per_video)} videos validated"
    click.echo(summary)
    return CommandOutcome(
        exit_code=EXIT_OK,
        summary=summary,
        report_path=_write_report(report, {"videos": per_video}),
    )


@cli.command()
@_project_option
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None)
def validate(project_root: Path, report: Path | None) -> CommandOutcome:
    """Parse and validate the project's event definitions."""
    project = open_project(project_root)
    errors = [d for d in project.diagnostics if d.severity == "error"]
    warnings = [d for d in project.diagnostics if d.severity == "warning"]
    for d in project.diagnostics:
        click.echo(f"{d.severity}: {d.location}: {d.message}")
    summary = f"{len(errors)} errors, {len(warnings)} warnings"
    click.echo(summary)
    payload = {"diagnostics": [dataclasses.asdict(d) for d in project.diagnostics]}
    return CommandOutcome(
        exit_code=EXIT_VALIDATION if errors else EXIT_OK,
        summary=summary,
        report_path=_write_report(report, payload),
    )


@cli.command()
@_project_option
@_with_config_flags
@click.option("--events", "event_ids", default=None, help="Comma-separated event ids (default: all).")
def label(project_root: Path, event_ids: str | None, **opts) -> CommandOutcome:
    """Run labeling over the whole dataset and write runs/<id>/ outputs."""
    project = open_project(project_root)
    _apply_overrides(project, opts)
    selected = None if event_ids is None else [e.strip() for e in event_ids.split(",") if e.strip()]
    record = run_labeling(project, selected)
    doc = record_to_dict(record)
    for vid, v in doc["videos"].items():
        note = f" ({v['error']})" if v["error"] else ""
        click.echo(f"{vid}: {v['instances']} instances, {v['labels']} labels{note}")
    summary = (
        f"run {record.run_id} {record.status}: "
        f"{doc['totals']['instances']} instances, {doc['totals']['labels']} labels"
    )
    click.echo(summary)
    if record.status != STATUS_DONE:
        raise RunError(record.error or f"run {record.run_id} {record.status}")
    return CommandOutcome(
        exit_code=EXIT_OK, summary=summary, report_path=record.run_dir / "report.json"
    )


@cli.command(name="eval")
@_project_option
@click.option("--run", "run_id", type=int, required=True)
@click.option("--action", default=None, help="Restrict to one action label.")
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None)
def eval_cmd(project_root: Path, run_id: int, action: str | None, report: Path | None) -> CommandOutcome:
    """Compute label quality against the project's ground truth."""
    project = open_project(project_root)
    if not project.groundtruth:
        raise UndefinedMetricError("no ground truth in project")
    record = load_run(project, run_id)
    if record.status != STATUS_DONE:
        raise RunError(f"run {run_id} is {record.status}")
    labels = read_labels(record.labels_path)
    events_by_id = {e.event_id: e for e in project.events}
    actions = sorted(
        {events_by_id[eid].action_label for eid in record.event_ids if eid in events_by_id}
    )
    if action is not None:
        actions = [a for a in actions if a == action]
    if not actions:
        raise UndefinedMetricError("no matching action labels for this run")
    results = {}
    for act in actions:
        event_ids = {e.event_id for e in project.events if e.action_label == act}
        act_labels = [l for l in labels if l.event_id in event_ids]
        m = compute_metrics(act_labels, project.groundtruth, act)
        results[act] = metrics_to_dict(m)
        click.echo(
            f"{act}: precision {m.frame_precision:.3f}, recall {m.instance_recall:.3f} "
            f"({m.hit_instances}/{m.gt_instances} instances, {m.labeled_frames} labels)"
        )
    summary = f"evaluated {len(results)} action(s) on run {run_id}"
    return CommandOutcome(
        exit_code=EXIT_OK,
        summary=summary,
        report_path=_write_report(report, {"run_id": run_id, "metrics": results}),
    )


@cli.command()
@_project_option
@click.option("--run", "run_id", type=int, required=True)
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None)
def stats(project_root: Path, run_id: int, report: Path | None) -> CommandOutcome:
    """Show per-video label distribution for a finished run."""
    project = open_project(project_root)
    record = load_run(project, run_id)
    if record.status != STATUS_DONE:
        raise RunError(f"run {run_id} is {record.status}")
    labels = read_labels(record.labels_path)
    st = dataset_stats(labels, project.manifest)
    payload = stats_to_dict(st)
    for vid, v in payload["videos"].items():
        click.echo(f"{vid}: {v['count']} labels across {len(v['positions'])} frames")
    summary = f"stats for run {run_id}"
    return CommandOutcome(
        exit_code=EXIT_OK, summary=summary, report_path=_write_report(report, payload)
    )


@cli.command()
@_project_option
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["dsl", "json"]), default="dsl")
def export(project_root: Path, out: Path | None, fmt: str) -> CommandOutcome:
    """Export event definitions (canonical DSL or structured JSON)."""
    project = open_project(project_root)
    if project.has_rule_errors():
        raise RuleError("cannot export: event definitions have errors")
    if fmt == "dsl":
        text = serialize_events(project.events)
    else:
        text = json.dumps({"version": 1, "events": [event_to_dict(e) for e in project.events]}, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
    summary = f"exported {len(project.events)} events"
    return CommandOutcome(exit_code=EXIT_OK, summary=summary, report_path=out)


@cli.command()
@_project_option
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option(
    "--ui-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory with the built web UI; mounted at /ui when given.",
)
def serve(project_root: Path, host: str, port: int, ui_dir: Path | None) -> CommandOutcome:
    """Serve the HTTP API (and UI, if built) for a project."""
    import uvicorn

    from .server import create_app

    app = create_app(project_root, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return CommandOutcome(exit_code=EXIT_OK, summary="server stopped")


def dispatch(argv: list[str]) -> int:
    """Route argv to a subcommand and map errors to exit codes."""
    try:
        result = cli.main(args=argv, prog_name="eventlab", standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return EXIT_USAGE
    except click.Abort:
        return EXIT_RUNTIME
    except (
        ManifestError,
        DetectionsError,
        ParseError,
        RuleError,
        ProjectError,
        UndefinedMetricError,
    ) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_VALIDATION
    except (RunError, EventLabError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_RUNTIME
    if isinstance(result, CommandOutcome):
        return result.exit_code
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
