"""Label-quality metrics and dataset label statistics.

Precision is measured at frame granularity (share of labels landing inside
a ground-truth interval of the action); recall at instance granularity
(share of ground-truth intervals containing at least one label). Key-event
labels cover only a sliver of each action, so frame-level recall would be
structurally tiny; instance-level recall is what the refinement loop needs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ManifestError, UndefinedMetricError
from .ingest import DatasetManifest
from .sequencer import FrameLabel


@dataclass(frozen=True)
class GroundTruthInterval:
    video_id: str
    action_label: str
    t_l: int  # inclusive start frame
    t_r: int  # inclusive end frame

    def __post_init__(self):
        if self.t_l < 0 or self.t_r < self.t_l:
            raise ValueError("interval must satisfy 0 <= start <= end")

    def contains(self, frame: int) -> bool:
        return self.t_l <= frame <= self.t_r


@dataclass(frozen=True)
class Metrics:
    frame_precision: float
    instance_recall: float
    labeled_frames: int
    gt_instances: int
    hit_instances: int


@dataclass
class VideoLabelStats:
    count: int = 0
    positions: list[int] = field(default_factory=list)  # sorted unique frames


@dataclass
class LabelStats:
    videos: dict[str, VideoLabelStats] = field(default_factory=dict)


def load_groundtruth(
    path: str | Path, manifest: DatasetManifest | None = None
) -> list[GroundTruthInterval]:
    """Read a ground-truth file (JSON array of interval records)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"ground truth unreadable: {path}: {exc}") from exc
    if not isinstance(doc, list):
        raise ManifestError("ground truth must be a JSON array of records")
    out = []
    frame_counts = {v.video_id: v.frame_count for v in manifest.videos} if manifest else None
    for i, rec in enumerate(doc):
        try:
            gt = GroundTruthInterval(
                video_id=str(rec["video"]),
                action_label=str(rec["action"]),
                t_l=int(rec["start"]),
                t_r=int(rec["end"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"ground truth record {i}: {exc}") from exc
        if frame_counts is not None:
            if gt.video_id not in frame_counts:
                raise ManifestError(f"ground truth record {i}: unknown video {gt.video_id!r}")
            if gt.t_r >= frame_counts[gt.video_id]:
                raise ManifestError(
                    f"ground truth record {i}: end {gt.t_r} >= frame_count of {gt.video_id!r}"
                )
        out.append(gt)
    return out


def _intervals_for(gt: Iterable[GroundTruthInterval], action_label: str) -> list[GroundTruthInterval]:
    return [g for g in gt if g.action_label == action_label]


def frame_precision(
    labels: Sequence[FrameLabel], gt: Sequence[GroundTruthInterval], action_label: str
) -> float:
    """Share of labels whose frame lies in some GT interval of the action."""
    if not labels:
        raise UndefinedMetricError("frame precision undefined: zero labels")
    intervals = _intervals_for(gt, action_label)
    hits = sum(
        1
        for l in labels
        if any(g.video_id == l.video_id and g.contains(l.frame_index) for g in intervals)
    )
    return hits / len(labels)


def instance_recall(
    labels: Sequence[FrameLabel], gt: Sequence[GroundTruthInterval], action_label: str
) -> float:
    """Share of GT intervals of the action containing at least one label."""
    intervals = _intervals_for(gt, action_label)
    if not intervals:
        raise UndefinedMetricError(f"instance recall undefined: no ground truth for {action_label!r}")
    hit = sum(
        1
        for g in intervals
        if any(l.video_id == g.video_id and g.contains(l.frame_index) for l in labels)
    )
    return hit / len(intervals)


def compute_metrics(
    labels: Sequence[FrameLabel], gt: Sequence[GroundTruthInterval], action_label: str
) -> Metrics:
    intervals = _intervals_for(gt, action_label)
    prec = frame_precision(labels, gt, action_label)
    rec = instance_recall(labels, gt, action_label)
    hit = round(rec * len(intervals))
    return Metrics(
        frame_precision=prec,
        instance_recall=rec,
        labeled_frames=len(labels),
        gt_instances=len(intervals),
        hit_instances=hit,
    )


def dataset_stats(labels: Sequence[FrameLabel], manifest: DatasetManifest) -> LabelStats:
    """Per-video label counts and sorted unique label positions.

    Every manifest video appears (count 0 when unlabeled); a label naming
    an unknown video is an error.
    """
    known = {v.video_id for v in manifest.videos}
    stats = LabelStats(videos={vid: VideoLabelStats() for vid in sorted(known)})
    positions: dict[str, set[int]] = {vid: set() for vid in known}
    for l in labels:
        if l.video_id not in known:
            raise ManifestError(f"label references unknown video {l.video_id!r}")
        stats.videos[l.video_id].count += 1
        positions[l.video_id].add(l.frame_index)
    for vid, pos in positions.items():
        stats.videos[vid].positions = sorted(pos)
    return stats


def stats_to_dict(stats: LabelStats) -> dict:
    return {
        "videos": {
            vid: {"count": vs.count, "positions": vs.positions}
            for vid, vs in stats.videos.items()
        }
    }


def metrics_to_dict(m: Metrics) -> dict:
    if not (math.isfinite(m.frame_precision) and math.isfinite(m.instance_recall)):
        raise UndefinedMetricError("metrics must be finite")
    return {
        "frame_precision": m.frame_precision,
        "instance_recall": m.instance_recall,
        "labeled_frames": m.labeled_frames,
        "gt_instances": m.gt_instances,
        "hit_instances": m.hit_instances,
    }
