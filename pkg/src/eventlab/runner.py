"""Labeling-run orchestration: the end-to-end pipeline over a project.

For every video: load detections, track identities, build per-frame
graphs, match every state of every selected event, collapse matches into
runs, chain runs into instances, and emit frame labels. Outputs land in an
immutable runs/<id>/ snapshot (event definitions included) so refinement
history stays inspectable. Identical project state and request produce
byte-identical labels.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from .errors import DetectionsError, RuleError, RunError
from .evaluation import dataset_stats, stats_to_dict
from .ingest import VideoMeta, load_detections
from .matcher import build_frame_graph, match_state
from .project import EVENTS_DSL_FILE, Project, atomic_write_text
from .rules import KeyEvent, serialize_events
from .sequencer import (
    FrameLabel,
    collapse_runs,
    detect_instances,
    generate_labels,
    label_from_record,
    label_to_record,
)
from .tracker import track_video

LABELS_FILE = "labels.jsonl"
STATS_FILE = "stats.json"
REPORT_FILE = "report.json"

STATUS_QUEUED = "queued"
STATUS_RUNNING = "running"
STATUS_DONE = "done"
STATUS_FAILED = "failed"


@dataclass
class VideoReport:
    frames: int = 0
    instances: int = 0
    labels: int = 0
    truncated_frames: int = 0
    frames_matched: int = 0
    match_seconds: float = 0.0
    error: str | None = None


@dataclass
class RunRecord:
    run_id: int
    event_ids: list[str]
    status: str = STATUS_QUEUED
    videos_total: int = 0
    videos_done: int = 0
    started_at: str | None = None
    finished_at: str | None = None
    error: str | None = None
    run_dir: Path | None = None
    videos: dict[str, VideoReport] = field(default_factory=dict)

    @property
    def labels_path(self) -> Path | None:
        return None if self.run_dir is None else self.run_dir / LABELS_FILE

    @property
    def stats_path(self) -> Path | None:
        return None if self.run_dir is None else self.run_dir / STATS_FILE


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _next_run_id(project: Project) -> int:
    existing = [int(p.name) for p in project.runs_dir.iterdir() if p.name.isdigit()]
    return max(existing, default=0) + 1


def label_video(
    meta: VideoMeta,
    events: Sequence[KeyEvent],
    project: Project,
) -> tuple[list[FrameLabel], VideoReport]:
    """Run the full matching pipeline on one video."""
    report = VideoReport()
    cfg = project.configs
    frames = load_detections(meta, cfg.ingest)
    report.frames = len(frames)
    tracks = track_video(frames, cfg.tracker)
    graphs = [build_frame_graph(fe, tracks, cfg.ingest, video_id=meta.video_id) for fe in frames]

    cap = cfg.matcher.max_embeddings_per_frame
    labels: list[FrameLabel] = []
    started = time.perf_counter()
    for event in events:
        runs_by_state = {}
        for state in event.states:
            matches = {}
            for g in graphs:
                embs = match_state(state, g, cfg.geometry, limit=cap + 1)
                if len(embs) > cap:
                    embs = embs[:cap]
                    report.truncated_frames += 1
                if embs:
                    matches[g.frame_index] = embs
                report.frames_matched += 1
            runs_by_state[state.name] = collapse_runs(state.name, matches)
        instances = detect_instances(
            event, runs_by_state, meta.fps, video_id=meta.video_id, cfg=cfg.sequencer
        )
        report.instances += len(instances)
        labels.extend(generate_labels(instances))
    report.match_seconds = time.perf_counter() - started
    report.labels = len(labels)
    return labels, report


def prepare_run(project: Project, event_ids: Sequence[str] | None = None) -> RunRecord:
    """Allocate the run directory and snapshot the event definitions."""
    if project.has_rule_errors():
        raise RuleError("rule errors block label runs; fix events first")
    available = {e.event_id: e for e in project.events}
    if event_ids is None:
        selected_ids = list(available)
    else:
        unknown = [e for e in event_ids if e not in available]
        if unknown:
            raise RunError(f"unknown event ids: {', '.join(unknown)}")
        selected_ids = list(event_ids)

    record = RunRecord(run_id=_next_run_id(project), event_ids=selected_ids)
    record.videos_total = len(project.manifest.videos)
    record.run_dir = project.runs_dir / str(record.run_id)
    record.run_dir.mkdir(parents=True)
    selected = [available[eid] for eid in selected_ids]
    atomic_write_text(record.run_dir / EVENTS_DSL_FILE, serialize_events(selected))
    return record


def execute_run(
    project: Project,
    record: RunRecord,
    on_progress: Callable[[RunRecord], None] | None = None,
) -> RunRecord:
    """Run the pipeline for a prepared record, writing all outputs.

    Per-video data errors are recorded and the run continues; I/O errors
    fail the whole run. Progress (videos done) is monotone non-decreasing.
    """
    record.status = STATUS_RUNNING
    record.started_at = _now()
    events = [e for e in project.events if e.event_id in set(record.event_ids)]

    all_labels: list[FrameLabel] = []
    failed_io: str | None = None
    try:
        def work(meta: VideoMeta) -> tuple[str, list[FrameLabel], VideoReport]:
            try:
                labels, report = label_video(meta, events, project)
            except DetectionsError as exc:
                # Data problem: record it, keep the run going.
                report = VideoReport(error=str(exc))
                labels = []
            except OSError as exc:
                raise RunError(f"video {meta.video_id!r}: {exc}") from exc
            return meta.video_id, labels, report

        max_workers = max(1, min(len(project.manifest.videos), 8))
        if project.manifest.videos:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                for vid, labels, report in pool.map(work, project.manifest.videos):
                    record.videos[vid] = report
                    all_labels.extend(labels)
                    record.videos_done += 1
                    if on_progress is not None:
                        on_progress(record)
    except (OSError, RunError) as exc:
        failed_io = str(exc)

    if failed_io is None:
        all_labels.sort(
            key=lambda l: (l.video_id, l.frame_index, l.event_id, l.instance_id, l.state_index)
        )
        try:
            write_labels(record.run_dir / LABELS_FILE, all_labels)
            stats = dataset_stats(all_labels, project.manifest)
            atomic_write_text(
                record.run_dir / STATS_FILE, json.dumps(stats_to_dict(stats), indent=2) + "\n"
            )
        except OSError as exc:
            failed_io = str(exc)

    record.finished_at = _now()
    if failed_io is not None:
        record.status = STATUS_FAILED
        record.error = failed_io
    else:
        record.status = STATUS_DONE
    _write_report(record)
    return record


def run_labeling(project: Project, event_ids: Sequence[str] | None = None) -> RunRecord:
    """Prepare and execute a labeling run synchronously."""
    record = prepare_run(project, event_ids)
    return execute_run(project, record)


def write_labels(path: Path, labels: Sequence[FrameLabel]) -> None:
    lines = [json.dumps(label_to_record(l)) for l in labels]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_labels(path: Path) -> list[FrameLabel]:
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                labels.append(label_from_record(json.loads(line)))
    return labels


def record_to_dict(record: RunRecord) -> dict:
    totals_matched = sum(v.frames_matched for v in record.videos.values())
    totals_seconds = sum(v.match_seconds for v in record.videos.values())
    return {
        "run_id": record.run_id,
        "event_ids": record.event_ids,
        "status": record.status,
        "videos_total": record.videos_total,
        "videos_done": record.videos_done,
        "started_at": record.started_at,
        "finished_at": record.finished_at,
        "error": record.error,
        "videos": {
            vid: {
                "frames": v.frames,
                "instances": v.instances,
                "labels": v.labels,
                "truncated_frames": v.truncated_frames,
                "frames_matched": v.frames_matched,
                "match_seconds": v.match_seconds,
                "error": v.error,
            }
            for vid, v in record.videos.items()
        },
        "totals": {
            "instances": sum(v.instances for v in record.videos.values()),
            "labels": sum(v.labels for v in record.videos.values()),
            "frames_matched": totals_matched,
            "frames_per_second": (totals_matched / totals_seconds) if totals_seconds > 0 else None,
        },
    }


def _write_report(record: RunRecord) -> None:
    atomic_write_text(
        record.run_dir / REPORT_FILE, json.dumps(record_to_dict(record), indent=2) + "\n"
    )


def load_run(project: Project, run_id: int) -> RunRecord:
    run_dir = project.runs_dir / str(run_id)
    report_path = run_dir / REPORT_FILE
    if not run_dir.is_dir():
        raise RunError(f"no such run: {run_id}")
    record = RunRecord(run_id=run_id, event_ids=[], run_dir=run_dir)
    if not report_path.is_file():
        record.status = STATUS_FAILED
        record.error = "incomplete run (no report)"
        return record
    doc = json.loads(report_path.read_text(encoding="utf-8"))
    record.event_ids = list(doc.get("event_ids", []))
    record.status = doc.get("status", STATUS_FAILED)
    record.videos_total = doc.get("videos_total", 0)
    record.videos_done = doc.get("videos_done", 0)
    record.started_at = doc.get("started_at")
    record.finished_at = doc.get("finished_at")
    record.error = doc.get("error")
    for vid, v in doc.get("videos", {}).items():
        record.videos[vid] = VideoReport(
            frames=v.get("frames", 0),
            instances=v.get("instances", 0),
            labels=v.get("labels", 0),
            truncated_frames=v.get("truncated_frames", 0),
            frames_matched=v.get("frames_matched", 0),
            match_seconds=v.get("match_seconds", 0.0),
            error=v.get("error"),
        )
    return record


def list_runs(project: Project) -> list[RunRecord]:
    ids = sorted(int(p.name) for p in project.runs_dir.iterdir() if p.name.isdigit())
    return [load_run(project, rid) for rid in ids]
