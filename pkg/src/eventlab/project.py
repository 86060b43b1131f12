"""Project directory persistence.

Layout:

    project/
      manifest.json          # videos, configs, markers
      events.pdl             # rule DSL, canonical human-readable form
      events.json            # structured mirror, written on save
      groundtruth.json       # optional
      runs/<id>/...          # immutable run snapshots and outputs
      frames/<video_id>/<n>.jpg   # optional pre-extracted stills

The DSL file is the source of truth for events; the JSON mirror is written
alongside on every save. Saves are atomic (temp file + rename), so a crash
never leaves a half-written file visible.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .constraints import GeometryConfig
from .errors import ParseError, ProjectError
from .evaluation import GroundTruthInterval, load_groundtruth
from .ingest import DatasetManifest, IngestConfig, load_manifest
from .rules import (
    KeyEvent,
    RuleDiagnostic,
    event_to_dict,
    parse_events,
    serialize_events,
    validate_events,
)
from .sequencer import SequencerConfig
from .tracker import TrackerConfig

MANIFEST_FILE = "manifest.json"
EVENTS_DSL_FILE = "events.pdl"
EVENTS_JSON_FILE = "events.json"
GROUNDTRUTH_FILE = "groundtruth.json"
RUNS_DIR = "runs"
FRAMES_DIR = "frames"

DEFAULT_MAX_EMBEDDINGS = 64


@dataclass(frozen=True)
class MatcherConfig:
    max_embeddings_per_frame: int = DEFAULT_MAX_EMBEDDINGS

    def __post_init__(self):
        if self.max_embeddings_per_frame < 1:
            raise ValueError("max_embeddings_per_frame must be >= 1")

    @classmethod
    def from_mapping(cls, data: dict) -> "MatcherConfig":
        if "max_embeddings_per_frame" in data:
            return cls(max_embeddings_per_frame=int(data["max_embeddings_per_frame"]))
        return cls()


@dataclass
class ProjectConfigs:
    ingest: IngestConfig = field(default_factory=IngestConfig)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    sequencer: SequencerConfig = field(default_factory=SequencerConfig)
    matcher: MatcherConfig = field(default_factory=MatcherConfig)


@dataclass
class Project:
    root: Path
    manifest: DatasetManifest
    manifest_doc: dict
    configs: ProjectConfigs
    events: list[KeyEvent] = field(default_factory=list)
    diagnostics: list[RuleDiagnostic] = field(default_factory=list)
    groundtruth: list[GroundTruthInterval] | None = None
    markers: dict[str, list[int]] = field(default_factory=dict)

    @property
    def runs_dir(self) -> Path:
        return self.root / RUNS_DIR

    def has_rule_errors(self) -> bool:
        return any(d.severity == "error" for d in self.diagnostics)

    def frames_dir_for(self, video_id: str) -> Path | None:
        meta = self.manifest.video(video_id)
        if meta.frames_dir is not None:
            return meta.frames_dir
        default = self.root / FRAMES_DIR / video_id
        return default if default.is_dir() else None


def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _parse_configs(doc: dict, manifest: DatasetManifest) -> ProjectConfigs:
    raw = doc.get("configs", {})
    try:
        return ProjectConfigs(
            ingest=manifest.thresholds,
            tracker=TrackerConfig.from_mapping(raw.get("tracker", {})),
            geometry=GeometryConfig.from_mapping(raw.get("geometry", {})),
            sequencer=SequencerConfig.from_mapping(raw.get("sequencer", {})),
            matcher=MatcherConfig.from_mapping(raw.get("matcher", {})),
        )
    except (TypeError, ValueError) as exc:
        raise ProjectError(f"invalid configs: {exc}") from exc


def open_project(root: str | Path) -> Project:
    """Open and validate a project directory.

    Rule problems do not abort the open: they surface as diagnostics and
    block labeling runs until fixed. A missing runs directory is created.
    """
    root = Path(root)
    manifest_path = root / MANIFEST_FILE
    if not root.is_dir() or not manifest_path.is_file():
        raise ProjectError(f"not a project directory (no {MANIFEST_FILE}): {root}")
    manifest = load_manifest(manifest_path)
    doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    configs = _parse_configs(doc, manifest)

    markers: dict[str, list[int]] = {}
    for vid, frames in (doc.get("markers") or {}).items():
        markers[str(vid)] = sorted(int(f) for f in frames)

    events: list[KeyEvent] = []
    diagnostics: list[RuleDiagnostic] = []
    dsl_path = root / EVENTS_DSL_FILE
    if dsl_path.is_file():
        try:
            events = parse_events(dsl_path.read_text(encoding="utf-8"))
        except ParseError as exc:
            diagnostics.append(
                RuleDiagnostic(
                    severity="error",
                    location=f"{EVENTS_DSL_FILE}:{exc.line}:{exc.col}",
                    message=exc.message,
                )
            )
        else:
            diagnostics.extend(validate_events(events))

    groundtruth = None
    gt_path = root / GROUNDTRUTH_FILE
    if gt_path.is_file():
        groundtruth = load_groundtruth(gt_path, manifest)

    project = Project(
        root=root,
        manifest=manifest,
        manifest_doc=doc,
        configs=configs,
        events=events,
        diagnostics=diagnostics,
        groundtruth=groundtruth,
        markers=markers,
    )
    project.runs_dir.mkdir(parents=True, exist_ok=True)
    return project


def save_project(project: Project) -> None:
    """Write events (DSL + structured mirror) and manifest back atomically."""
    atomic_write_text(
        project.root / MANIFEST_FILE, json.dumps(project.manifest_doc, indent=2) + "\n"
    )
    atomic_write_text(project.root / EVENTS_DSL_FILE, serialize_events(project.events))
    atomic_write_text(
        project.root / EVENTS_JSON_FILE,
        json.dumps(
            {"version": 1, "events": [event_to_dict(e) for e in project.events]}, indent=2
        )
        + "\n",
    )


def set_events(project: Project, events: list[KeyEvent]) -> list[RuleDiagnostic]:
    """Replace the project's events, refresh diagnostics, and persist."""
    diagnostics = validate_events(events)
    project.events = list(events)
    project.diagnostics = diagnostics
    if not any(d.severity == "error" for d in diagnostics):
        save_project(project)
    return diagnostics
