"""Dataset manifests and per-frame detection files.

Detections are consumed from files written by upstream pose/object models
(one JSON record per line, one record per frame). The engine never runs
vision models itself; a missing frame record simply means an empty frame.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .errors import DetectionsError, ManifestError

MANIFEST_VERSION = 1

# Canonical 17-part pose vocabulary, in keypoint-array order.
KEYPOINT_NAMES: tuple[str, ...] = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in image coordinates (origin top-left, +y down)."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not _finite(self.x, self.y, self.w, self.h):
            raise ValueError("bbox coordinates must be finite")
        if self.w <= 0 or self.h <= 0:
            raise ValueError("bbox width and height must be positive")

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Keypoint:
    part: str
    x: float
    y: float
    score: float
    absent: bool = False  # set at load when score falls below the gate

    def __post_init__(self):
        if self.part not in KEYPOINT_NAMES:
            raise ValueError(f"unknown body part {self.part!r}")
        if not _finite(self.x, self.y, self.score) or not 0.0 <= self.score <= 1.0:
            raise ValueError("keypoint score must be in [0, 1]")


@dataclass(frozen=True)
class PersonDetection:
    bbox: BBox
    score: float
    keypoints: tuple[Keypoint, ...]

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("person score must be in [0, 1]")
        if len(self.keypoints) != len(KEYPOINT_NAMES):
            raise ValueError("expected exactly 17 keypoints")
        for kp, name in zip(self.keypoints, KEYPOINT_NAMES):
            if kp.part != name:
                raise ValueError("keypoints must follow the canonical order")


@dataclass(frozen=True)
class ObjectDetection:
    label: str
    bbox: BBox
    score: float

    def __post_init__(self):
        if not self.label:
            raise ValueError("object label must be non-empty")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("object score must be in [0, 1]")


@dataclass(frozen=True)
class FrameElements:
    """Everything detected in one frame, already confidence-gated."""

    frame_index: int
    persons: tuple[PersonDetection, ...] = ()
    objects: tuple[ObjectDetection, ...] = ()


@dataclass(frozen=True)
class IngestConfig:
    keypoint_score_min: float = 0.3
    person_score_min: float = 0.5
    object_score_min: float = 0.5

    def __post_init__(self):
        for name in ("keypoint_score_min", "person_score_min", "object_score_min"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")

    @classmethod
    def from_mapping(cls, data: dict) -> "IngestConfig":
        return cls(**{k: float(v) for k, v in data.items() if k in cls.__dataclass_fields__})


@dataclass
class VideoMeta:
    video_id: str
    fps: float
    frame_count: int
    detections_path: Path
    frames_dir: Path | None = None


@dataclass
class DatasetManifest:
    videos: list[VideoMeta] = field(default_factory=list)
    thresholds: IngestConfig = field(default_factory=IngestConfig)

    def video(self, video_id: str) -> VideoMeta:
        for v in self.videos:
            if v.video_id == video_id:
                return v
        raise KeyError(video_id)


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate a dataset manifest, resolving relative paths.

    Raises ManifestError naming the offending video and field on any
    invariant violation (duplicate ids, non-positive fps, dangling
    detections paths, bad version).
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"manifest unreadable: {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a JSON object")
    version = doc.get("version", MANIFEST_VERSION)
    if version != MANIFEST_VERSION:
        raise ManifestError(f"unsupported manifest version {version!r} (expected {MANIFEST_VERSION})")

    root = path.parent
    try:
        thresholds = IngestConfig.from_mapping(doc.get("configs", {}).get("ingest", {}))
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"configs.ingest: {exc}") from exc

    videos: list[VideoMeta] = []
    seen: set[str] = set()
    for i, entry in enumerate(doc.get("videos", [])):
        vid = entry.get("video_id")
        if not vid or not isinstance(vid, str):
            raise ManifestError(f"videos[{i}]: missing video_id")
        if vid in seen:
            raise ManifestError(f"video {vid!r}: duplicate video_id")
        seen.add(vid)
        fps = entry.get("fps")
        if not isinstance(fps, (int, float)) or not math.isfinite(fps) or fps <= 0:
            raise ManifestError(f"video {vid!r}: fps must be > 0")
        frame_count = entry.get("frame_count")
        if not isinstance(frame_count, int) or frame_count < 0:
            raise ManifestError(f"video {vid!r}: frame_count must be a non-negative integer")
        det = entry.get("detections_path")
        if not det or not isinstance(det, str):
            raise ManifestError(f"video {vid!r}: missing detections_path")
        det_path = (root / det).resolve() if not Path(det).is_absolute() else Path(det)
        if not det_path.is_file():
            raise ManifestError(f"video {vid!r}: detections_path does not exist: {det_path}")
        frames_dir = entry.get("frames_dir")
        frames_path = None
        if frames_dir:
            frames_path = (root / frames_dir).resolve() if not Path(frames_dir).is_absolute() else Path(frames_dir)
        videos.append(
            VideoMeta(
                video_id=vid,
                fps=float(fps),
                frame_count=frame_count,
                detections_path=det_path,
                frames_dir=frames_path,
            )
        )
    return DatasetManifest(videos=videos, thresholds=thresholds)


def _parse_bbox(raw, where: str) -> BBox:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise DetectionsError(f"{where}: bbox must be [x, y, w, h]")
    try:
        return BBox(*(float(v) for v in raw))
    except (TypeError, ValueError) as exc:
        raise DetectionsError(f"{where}: {exc}") from exc


def _parse_score(raw, where: str) -> float:
    try:
        score = float(raw)
    except (TypeError, ValueError):
        raise DetectionsError(f"{where}: score must be a number") from None
    if not math.isfinite(score) or not 0.0 <= score <= 1.0:
        raise DetectionsError(f"{where}: score must be in [0, 1]")
    return score


def _parse_record(raw: dict, where: str, cfg: IngestConfig) -> FrameElements:
    frame = raw.get("frame")
    if not isinstance(frame, int) or frame < 0:
        raise DetectionsError(f"{where}: frame must be a non-negative integer")

    persons: list[PersonDetection] = []
    for j, p in enumerate(raw.get("persons", [])):
        pw = f"{where}: persons[{j}]"
        score = _parse_score(p.get("score"), pw)
        if score < cfg.person_score_min:
            continue
        kps_raw = p.get("keypoints")
        if not isinstance(kps_raw, list) or len(kps_raw) != len(KEYPOINT_NAMES):
            raise DetectionsError(f"{pw}: expected {len(KEYPOINT_NAMES)} keypoints")
        kps = []
        for name, kp_raw in zip(KEYPOINT_NAMES, kps_raw):
            if not isinstance(kp_raw, (list, tuple)) or len(kp_raw) != 3:
                raise DetectionsError(f"{pw}: keypoint {name} must be [x, y, score]")
            kx, ky, ks = (float(v) for v in kp_raw)
            if not _finite(kx, ky, ks) or not 0.0 <= ks <= 1.0:
                raise DetectionsError(f"{pw}: keypoint {name} out of range")
            kps.append(Keypoint(part=name, x=kx, y=ky, score=ks, absent=ks < cfg.keypoint_score_min))
        try:
            persons.append(PersonDetection(bbox=_parse_bbox(p.get("bbox"), pw), score=score, keypoints=tuple(kps)))
        except ValueError as exc:
            raise DetectionsError(f"{pw}: {exc}") from exc

    objects: list[ObjectDetection] = []
    for j, o in enumerate(raw.get("objects", [])):
        ow = f"{where}: objects[{j}]"
        score = _parse_score(o.get("score"), ow)
        if score < cfg.object_score_min:
            continue
        label = o.get("label")
        if not label or not isinstance(label, str):
            raise DetectionsError(f"{ow}: missing label")
        objects.append(ObjectDetection(label=label, bbox=_parse_bbox(o.get("bbox"), ow), score=score))

    return FrameElements(frame_index=frame, persons=tuple(persons), objects=tuple(objects))


def load_detections(meta: VideoMeta, cfg: IngestConfig) -> list[FrameElements]:
    """Load one video's detections, sorted by frame, confidence-gated.

    Detections below their score threshold are dropped; keypoints below
    keypoint_score_min are kept but marked absent so downstream graph
    construction skips them. Frames absent from the file are empty frames,
    not errors.
    """
    path = meta.detections_path
    frames: dict[int, FrameElements] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{meta.video_id}:{lineno}"
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DetectionsError(f"{where}: malformed record: {exc}") from exc
            if not isinstance(raw, dict):
                raise DetectionsError(f"{where}: record must be a JSON object")
            fe = _parse_record(raw, where, cfg)
            if fe.frame_index in frames:
                raise DetectionsError(f"{where}: duplicate frame_index {fe.frame_index}")
            if fe.frame_index >= meta.frame_count:
                raise DetectionsError(
                    f"{where}: frame_index {fe.frame_index} >= frame_count {meta.frame_count}"
                )
            frames[fe.frame_index] = fe
    return [frames[k] for k in sorted(frames)]


def dump_detections(frames: Iterable[FrameElements]) -> str:
    """Serialize frames back to the one-record-per-line detections format."""
    lines = []
    for fe in frames:
        record = {
            "frame": fe.frame_index,
            "persons": [
                {
                    "bbox": [p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h],
                    "score": p.score,
                    "keypoints": [[kp.x, kp.y, kp.score] for kp in p.keypoints],
                }
                for p in fe.persons
            ],
            "objects": [
                {"label": o.label, "bbox": [o.bbox.x, o.bbox.y, o.bbox.w, o.bbox.h], "score": o.score}
                for o in fe.objects
            ],
        }
        lines.append(json.dumps(record))
    return "\n".join(lines) + ("\n" if lines else "")


def regate_keypoints(fe: FrameElements, cfg: IngestConfig) -> FrameElements:
    """Recompute keypoint absence flags for a directly-constructed frame."""
    persons = tuple(
        replace(
            p,
            keypoints=tuple(replace(kp, absent=kp.score < cfg.keypoint_score_min) for kp in p.keypoints),
        )
        for p in fe.persons
    )
    return replace(fe, persons=persons)
