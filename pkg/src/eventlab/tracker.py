"""Greedy IoU association of detections into per-video tracks.

Adjacent-frame IoU linking keeps identities stable across the short spans
a key event covers; a bounded frame gap bridges brief detector dropouts.
Person tracks and object tracks share one id space per video.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TrackingError
from .ingest import BBox, FrameElements


@dataclass(frozen=True)
class TrackerConfig:
    iou_min: float = 0.3
    max_gap_frames: int = 5

    def __post_init__(self):
        if not 0.0 <= self.iou_min <= 1.0:
            raise ValueError("iou_min must be in [0, 1]")
        if self.max_gap_frames < 0:
            raise ValueError("max_gap_frames must be >= 0")

    @classmethod
    def from_mapping(cls, data: dict) -> "TrackerConfig":
        kwargs = {}
        if "iou_min" in data:
            kwargs["iou_min"] = float(data["iou_min"])
        if "max_gap_frames" in data:
            kwargs["max_gap_frames"] = int(data["max_gap_frames"])
        return cls(**kwargs)


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    ix = max(a.x, b.x)
    iy = max(a.y, b.y)
    ix2 = min(a.x + a.w, b.x + b.w)
    iy2 = min(a.y + a.h, b.y + b.h)
    iw = ix2 - ix
    ih = iy2 - iy
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    # Roundoff in (x + w) - x can nudge the ratio past 1 for identical boxes.
    return min(1.0, inter / (a.area + b.area - inter))


@dataclass
class Track:
    track_id: int
    kind: str  # "person" | "object"
    label: str  # "person" for persons, object class otherwise
    spans: dict[int, BBox] = field(default_factory=dict)

    @property
    def last_frame(self) -> int:
        return max(self.spans)


@dataclass
class TrackSet:
    """All tracks of one video plus a detection -> track index."""

    tracks: list[Track] = field(default_factory=list)
    by_detection: dict[tuple[int, str, int], int] = field(default_factory=dict)

    def track_of(self, frame_index: int, kind: str, det_index: int) -> int:
        key = (frame_index, kind, det_index)
        if key not in self.by_detection:
            raise TrackingError(f"no track for detection {key}")
        return self.by_detection[key]

    def span_count(self) -> int:
        return sum(len(t.spans) for t in self.tracks)


def track_video(frames: list[FrameElements], cfg: TrackerConfig) -> TrackSet:
    """Assign every detection of a video to exactly one track.

    Per adjacent frame pair, same-label detections are matched to open
    tracks greedily in descending IoU (ties broken by lower frame-local
    detection index, then older track). Unmatched detections open new
    tracks; a track stays extendable until it has been unobserved for more
    than max_gap_frames frames.
    """
    result = TrackSet()
    # open track state: (track, last_frame, last_box)
    open_tracks: list[list] = []

    last_index = None
    for fe in frames:
        f = fe.frame_index
        if last_index is not None and f <= last_index:
            raise TrackingError("frames must be sorted by index without duplicates")
        last_index = f

        open_tracks = [st for st in open_tracks if f - st[1] - 1 <= cfg.max_gap_frames]

        dets: list[tuple[int, str, str, int, BBox]] = []  # (ordinal, kind, label, det_index, box)
        for i, p in enumerate(fe.persons):
            dets.append((len(dets), "person", "person", i, p.bbox))
        for j, o in enumerate(fe.objects):
            dets.append((len(dets), "object", o.label, j, o.bbox))

        candidates = []
        for ordinal, kind, label, _idx, box in dets:
            for ti, st in enumerate(open_tracks):
                track = st[0]
                if track.kind != kind or track.label != label:
                    continue
                v = iou(box, st[2])
                if v >= cfg.iou_min:
                    candidates.append((-v, ordinal, track.track_id, ti))
        candidates.sort()

        used_dets: set[int] = set()
        used_tracks: set[int] = set()
        assigned: dict[int, int] = {}  # ordinal -> open_tracks index
        for neg_v, ordinal, _tid, ti in candidates:
            if ordinal in used_dets or ti in used_tracks:
                continue
            used_dets.add(ordinal)
            used_tracks.add(ti)
            assigned[ordinal] = ti

        for ordinal, kind, label, det_index, box in dets:
            if ordinal in assigned:
                st = open_tracks[assigned[ordinal]]
                track = st[0]
                st[1] = f
                st[2] = box
            else:
                track = Track(track_id=len(result.tracks), kind=kind, label=label)
                result.tracks.append(track)
                open_tracks.append([track, f, box])
            track.spans[f] = box
            result.by_detection[(f, kind, det_index)] = track.track_id

    return result
