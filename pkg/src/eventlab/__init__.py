"""eventlab: rule-based key-event labeling for video action datasets.

Define key events as ordered constraint-graph states, match them against
per-frame detections, and generate frame-wise weak labels with quality
feedback for iterative refinement.
"""

__version__ = "0.1.0"

from .constraints import GeometryConfig
from .ingest import DatasetManifest, FrameElements, IngestConfig, load_detections, load_manifest
from .matcher import Embedding, FrameGraph, build_frame_graph, explain_mismatch, match_state
from .project import Project, open_project, save_project
from .rules import KeyEvent, StateDef, parse_events, serialize_events, validate_events
from .runner import RunRecord, run_labeling
from .sequencer import FrameLabel, KeyEventInstance, StateRun, collapse_runs, detect_instances, generate_labels
from .tracker import TrackerConfig, TrackSet, iou, track_video

__all__ = [
    "DatasetManifest",
    "Embedding",
    "FrameElements",
    "FrameGraph",
    "FrameLabel",
    "GeometryConfig",
    "IngestConfig",
    "KeyEvent",
    "KeyEventInstance",
    "Project",
    "RunRecord",
    "StateDef",
    "StateRun",
    "TrackSet",
    "TrackerConfig",
    "__version__",
    "build_frame_graph",
    "collapse_runs",
    "detect_instances",
    "explain_mismatch",
    "generate_labels",
    "iou",
    "load_detections",
    "load_manifest",
    "match_state",
    "open_project",
    "parse_events",
    "run_labeling",
    "save_project",
    "serialize_events",
    "track_video",
    "validate_events",
]
