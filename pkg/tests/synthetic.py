"""Deterministic synthetic serve dataset used across the test suite.

Two 600-frame videos of a static table-tennis-like scene: a player above
the table, a player below, a walking spectator, a table, and a scripted
ball. Four serve patterns are embedded (two front-facing, two back-facing)
plus distractor motion (spectator walk, a mid-rally ball segment, gated
keypoints). The script is pure arithmetic; `_self_check` re-derives every
geometric margin the expected label spans rely on (contact IoU on/off,
angle distances to range bounds, per-step ball IoU for track continuity)
with local helpers, independent of the engine under test.

Frame schedule per serve (t0 = hold start, walk = f(theta)):
    t0      .. t0+7            hold   (ball at wrist, contact + hold angle)
    t0+8                       escape (26 px horizontal hop, contact breaks)
    t0+9    .. t0+8+walk       walk   (angles climb toward the toss range)
    t0+9+walk .. t0+13+walk    toss   (5 frames inside the toss range)
then the ball leaves detection. Labels per serve: 8 hold + 5 toss = 13.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

SCENE_W, SCENE_H = 1280.0, 720.0
FPS = 50.0
FRAME_COUNT = 600

TABLE_BBOX = (460.0, 360.0, 360.0, 80.0)
UP_BBOX = (600.0, 150.0, 80.0, 200.0)
DOWN_BBOX = (600.0, 460.0, 80.0, 200.0)
SPECTATOR_SIZE = (60.0, 120.0)
BALL_SIZE = 40.0

HOLD_RADIUS = 75.0
HOLD_FRAMES = 8
ESCAPE_DX = 26.0
WALK_STEP_DEG = 11.0
WALK_MAX_DEG = 196.0
TOSS_ANGLES = (203.5, 214.5, 225.5, 236.5, 247.5)
RADIUS_STEP = 4.0
RADIUS_CAP = 120.0

FRONT_HOLD_RANGE = (95.0, 165.0)
FRONT_TOSS_RANGE = (200.0, 270.0)
BACK_HOLD_RANGE = (15.0, 85.0)
BACK_TOSS_RANGE = (270.0, 340.0)
UP_RANGE = (225.0, 315.0)  # table -> player above
DOWN_RANGE = (45.0, 135.0)  # table -> player below

KEYPOINT_BOX_SCALE = 0.1
CONTACT_IOU = 0.1
ANGLE_MARGIN = 3.0
STEP_IOU_FLOOR = 0.13  # fixture tracker iou_min is 0.1

REST_FRACTIONS = {
    "nose": (0.5, 0.1),
    "left_eye": (0.45, 0.08),
    "right_eye": (0.55, 0.08),
    "left_ear": (0.4, 0.1),
    "right_ear": (0.6, 0.1),
    "left_shoulder": (0.3, 0.22),
    "right_shoulder": (0.7, 0.22),
    "left_elbow": (0.2, 0.38),
    "right_elbow": (0.8, 0.38),
    "left_wrist": (0.15, 0.52),
    "right_wrist": (0.85, 0.52),
    "left_hip": (0.35, 0.55),
    "right_hip": (0.65, 0.55),
    "left_knee": (0.35, 0.75),
    "right_knee": (0.65, 0.75),
    "left_ankle": (0.35, 0.95),
    "right_ankle": (0.65, 0.95),
}
KEYPOINT_ORDER = list(REST_FRACTIONS)


@dataclass(frozen=True)
class ServeSpec:
    video: str
    t0: int
    facing: str  # "front" | "back"
    theta_front: float  # hold angle before mirroring


SERVES = (
    ServeSpec("v1", 100, "front", 124.0),
    ServeSpec("v1", 350, "back", 152.0),
    ServeSpec("v2", 100, "back", 124.0),
    ServeSpec("v2", 300, "front", 152.0),
)
FALSE_POSITIVE = ServeSpec("v2", 450, "front", 124.0)

RALLY_WINDOWS = {"v1": (180, 250), "v2": (170, 240)}

GROUNDTRUTH = [
    {"video": "v1", "action": "serve", "start": 90, "end": 130},
    {"video": "v1", "action": "serve", "start": 340, "end": 380},
    {"video": "v2", "action": "serve", "start": 90, "end": 130},
    {"video": "v2", "action": "serve", "start": 290, "end": 330},
]

EVENTS_DSL = """\
event serve_front {
  action "serve"
  state hold {
    person P1   person P2
    object "ball" B    object "table" T
    part head H of P1  part right_wrist RW of P1
    contact(B, RW)
    dir(H -> B) in [95 deg, 165 deg]      // ball lower-left of head, 70-degree width
    dir(T -> P1) in [225 deg, 315 deg]
    dir(T -> P2) in [45 deg, 135 deg]
  }
  state toss {
    person P1
    object "ball" B
    part head H of P1
    dir(H -> B) in [200 deg, 270 deg]     // ball above-left after toss
  }
  interval hold -> toss max 0.3 s
}

event serve_back {
  action "serve"
  state hold {
    person P1   person P2
    object "ball" B    object "table" T
    part head H of P1  part right_wrist RW of P1
    contact(B, RW)
    dir(H -> B) in [15 deg, 85 deg]       // ball lower-right of head, mirrored
    dir(T -> P1) in [45 deg, 135 deg]
    dir(T -> P2) in [225 deg, 315 deg]
  }
  state toss {
    person P1
    object "ball" B
    part head H of P1
    dir(H -> B) in [270 deg, 340 deg]     // ball above-right after toss
  }
  interval hold -> toss max 0.3 s
}
"""


def _polar(deg: float, r: float) -> tuple[float, float]:
    rad = math.radians(deg)
    return (r * math.cos(rad), r * math.sin(rad))


def _angle(dx: float, dy: float) -> float:
    return math.degrees(math.atan2(dy, dx)) % 360.0


def _center(bbox: tuple[float, float, float, float]) -> tuple[float, float]:
    return (bbox[0] + bbox[2] / 2.0, bbox[1] + bbox[3] / 2.0)


def _iou(a: tuple[float, float, float, float], b: tuple[float, float, float, float]) -> float:
    ix = max(a[0], b[0])
    iy = max(a[1], b[1])
    ix2 = min(a[0] + a[2], b[0] + b[2])
    iy2 = min(a[1] + a[3], b[1] + b[3])
    iw, ih = ix2 - ix, iy2 - iy
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a[2] * a[3] + b[2] * b[3] - inter)


def _square(center: tuple[float, float], side: float) -> tuple[float, float, float, float]:
    return (center[0] - side / 2.0, center[1] - side / 2.0, side, side)


def _in_arc(angle: float, lo: float, hi: float) -> bool:
    angle %= 360.0
    if lo <= hi:
        return lo <= angle <= hi
    return angle >= lo or angle <= hi


def walk_count(theta_front: float) -> int:
    w = _polar(theta_front, HOLD_RADIUS)
    escape = (w[0] - ESCAPE_DX, w[1])
    phi = _angle(*escape)
    k = 0
    while phi + WALK_STEP_DEG * (k + 1) <= WALK_MAX_DEG:
        k += 1
    return k


def flight_relative(theta_front: float) -> list[tuple[float, float]]:
    """Ball positions relative to the server's head, front orientation."""
    w = _polar(theta_front, HOLD_RADIUS)
    pts = [w] * HOLD_FRAMES
    escape = (w[0] - ESCAPE_DX, w[1])
    pts.append(escape)
    phi = _angle(*escape)
    r = math.hypot(*escape)
    for k in range(1, walk_count(theta_front) + 1):
        r = min(r + RADIUS_STEP, RADIUS_CAP)
        pts.append(_polar(phi + WALK_STEP_DEG * k, r))
    for a in TOSS_ANGLES:
        r = min(r + RADIUS_STEP, RADIUS_CAP)
        pts.append(_polar(a, r))
    return pts


def serve_head(spec: ServeSpec) -> tuple[float, float]:
    bbox = UP_BBOX if spec.facing == "front" else DOWN_BBOX
    return (bbox[0] + 0.5 * bbox[2], bbox[1] + 0.1 * bbox[3])


def serve_ball_positions(spec: ServeSpec) -> dict[int, tuple[float, float]]:
    head = serve_head(spec)
    rel = flight_relative(spec.theta_front)
    if spec.facing == "back":
        rel = [(-x, y) for x, y in rel]
    return {spec.t0 + i: (head[0] + x, head[1] + y) for i, (x, y) in enumerate(rel)}


def serve_wrist(spec: ServeSpec) -> tuple[float, float]:
    head = serve_head(spec)
    w = _polar(spec.theta_front, HOLD_RADIUS)
    if spec.facing == "back":
        w = (-w[0], w[1])
    return (head[0] + w[0], head[1] + w[1])


def serve_spans(spec: ServeSpec) -> tuple[tuple[int, int], tuple[int, int]]:
    """(hold span, toss span), both inclusive, derived from the script."""
    walk = walk_count(spec.theta_front)
    hold = (spec.t0, spec.t0 + HOLD_FRAMES - 1)
    toss = (spec.t0 + HOLD_FRAMES + 1 + walk, spec.t0 + HOLD_FRAMES + walk + len(TOSS_ANGLES))
    return hold, toss


def rally_positions(video: str) -> dict[int, tuple[float, float]]:
    start, end = RALLY_WINDOWS[video]
    out = {}
    for f in range(start, end + 1):
        t = f - start
        out[f] = (530.0 + 40.0 * math.sin(t / 6.0), 330.0 + 30.0 * math.cos(t / 9.0))
    return out


def spectator_bbox(frame: int) -> tuple[float, float, float, float]:
    x = 130.0 + 80.0 * math.sin(2.0 * math.pi * frame / 400.0)
    return (x, 30.0, SPECTATOR_SIZE[0], SPECTATOR_SIZE[1])


def _keypoints(bbox, overrides=None, low_conf=None) -> list[list[float]]:
    overrides = overrides or {}
    low_conf = low_conf or {}
    kps = []
    for name in KEYPOINT_ORDER:
        fx, fy = REST_FRACTIONS[name]
        x, y = bbox[0] + fx * bbox[2], bbox[1] + fy * bbox[3]
        if name in overrides:
            x, y = overrides[name]
        kps.append([round(x, 2), round(y, 2), low_conf.get(name, 0.9)])
    return kps


def _serves_for(video: str, inject_false_positive: bool) -> list[ServeSpec]:
    serves = [s for s in SERVES if s.video == video]
    if inject_false_positive and FALSE_POSITIVE.video == video:
        serves.append(FALSE_POSITIVE)
    return serves


def video_records(video: str, inject_false_positive: bool = False) -> list[dict]:
    serves = _serves_for(video, inject_false_positive)
    ball_by_frame: dict[int, tuple[float, float]] = {}
    for spec in serves:
        ball_by_frame.update(serve_ball_positions(spec))
    ball_by_frame.update(rally_positions(video))

    wrist_by_frame: dict[int, tuple[str, tuple[float, float]]] = {}
    for spec in serves:
        wrist = serve_wrist(spec)
        first = min(serve_ball_positions(spec))
        last = max(serve_ball_positions(spec))
        for f in range(first, last + 1):
            wrist_by_frame[f] = (spec.facing, wrist)

    records = []
    for f in range(FRAME_COUNT):
        up_overrides = {}
        down_overrides = {}
        if f in wrist_by_frame:
            facing, wrist = wrist_by_frame[f]
            if facing == "front":
                up_overrides["right_wrist"] = wrist
            else:
                down_overrides["right_wrist"] = wrist
        spec_bbox = spectator_bbox(f)
        spec_low = {"left_ankle": 0.2} if f % 7 == 0 else {}
        persons = [
            {"bbox": list(UP_BBOX), "score": 0.95, "keypoints": _keypoints(UP_BBOX, up_overrides)},
            {"bbox": list(DOWN_BBOX), "score": 0.95, "keypoints": _keypoints(DOWN_BBOX, down_overrides)},
            {
                "bbox": [round(v, 2) for v in spec_bbox],
                "score": 0.9,
                "keypoints": _keypoints(spec_bbox, low_conf=spec_low),
            },
        ]
        objects = [{"label": "table", "bbox": list(TABLE_BBOX), "score": 0.98}]
        if f in ball_by_frame:
            cx, cy = ball_by_frame[f]
            objects.append(
                {
                    "label": "ball",
                    "bbox": [round(cx - BALL_SIZE / 2, 2), round(cy - BALL_SIZE / 2, 2), BALL_SIZE, BALL_SIZE],
                    "score": 0.9,
                }
            )
        records.append({"frame": f, "persons": persons, "objects": objects})
    return records


def _self_check(inject_false_positive: bool) -> None:
    """Re-derive every geometric property the expected spans depend on."""
    table_c = _center(TABLE_BBOX)
    up_c = _center(UP_BBOX)
    down_c = _center(DOWN_BBOX)
    assert _in_arc(_angle(up_c[0] - table_c[0], up_c[1] - table_c[1]), *UP_RANGE)
    assert _in_arc(_angle(down_c[0] - table_c[0], down_c[1] - table_c[1]), *DOWN_RANGE)

    for f in range(FRAME_COUNT):
        sb = spectator_bbox(f)
        sc = _center(sb)
        a = _angle(sc[0] - table_c[0], sc[1] - table_c[1])
        assert not _in_arc(a, UP_RANGE[0] - ANGLE_MARGIN, UP_RANGE[1] + ANGLE_MARGIN)
        assert not _in_arc(a, DOWN_RANGE[0] - ANGLE_MARGIN, DOWN_RANGE[1] + ANGLE_MARGIN)

    all_videos = {"v1", "v2"}
    for video in sorted(all_videos):
        serves = _serves_for(video, inject_false_positive)
        ball_frames: dict[int, tuple[float, float]] = {}
        for spec in serves:
            positions = serve_ball_positions(spec)
            overlap = set(ball_frames) & set(positions)
            assert not overlap, f"serve windows overlap at {sorted(overlap)[:3]}"
            ball_frames.update(positions)

            head = serve_head(spec)
            wrist = serve_wrist(spec)
            hold_range = FRONT_HOLD_RANGE if spec.facing == "front" else BACK_HOLD_RANGE
            toss_range = FRONT_TOSS_RANGE if spec.facing == "front" else BACK_TOSS_RANGE
            (h0, h1), (s0, s1) = serve_spans(spec)
            person_h = UP_BBOX[3] if spec.facing == "front" else DOWN_BBOX[3]
            wrist_box = _square(wrist, KEYPOINT_BOX_SCALE * person_h)

            prev = None
            for f in sorted(positions):
                pos = positions[f]
                ball_box = _square(pos, BALL_SIZE)
                a = _angle(pos[0] - head[0], pos[1] - head[1])
                in_hold = h0 <= f <= h1
                in_toss = s0 <= f <= s1
                if in_hold:
                    assert _iou(ball_box, wrist_box) >= CONTACT_IOU + ANGLE_MARGIN / 100.0
                    assert _in_arc(a, hold_range[0] + ANGLE_MARGIN, hold_range[1] - ANGLE_MARGIN)
                else:
                    assert _iou(ball_box, wrist_box) <= CONTACT_IOU - ANGLE_MARGIN / 100.0
                if in_toss:
                    assert _in_arc(a, toss_range[0] + ANGLE_MARGIN, toss_range[1] - ANGLE_MARGIN)
                else:
                    assert not _in_arc(a, toss_range[0] - ANGLE_MARGIN, toss_range[1] + ANGLE_MARGIN)
                if prev is not None:
                    step_box = _square(prev, BALL_SIZE)
                    assert _iou(ball_box, step_box) >= STEP_IOU_FLOOR, f"ball step too large at {f}"
                prev = pos
            assert s1 == max(positions), "ball must vanish right after the toss"
            assert (s0 - h1) / FPS <= 0.3 - 0.04, "chain delay must clear the threshold"
            assert s0 > h0

        # No ball frame may contact any non-serving wrist.
        for f, pos in sorted(ball_frames.items()):
            ball_box = _square(pos, BALL_SIZE)
            spec_bbox_f = spectator_bbox(f)
            others = [
                (_keypoint_abs(UP_BBOX, "right_wrist"), UP_BBOX[3]),
                (_keypoint_abs(DOWN_BBOX, "right_wrist"), DOWN_BBOX[3]),
                (_keypoint_abs(spec_bbox_f, "right_wrist"), spec_bbox_f[3]),
            ]
            active = [s for s in serves if f in serve_ball_positions(s)]
            if active and h_active(active[0], f):
                continue  # the serving wrist is in contact by design
            for wrist_pos, height in others:
                wb = _square(wrist_pos, KEYPOINT_BOX_SCALE * height)
                assert _iou(ball_box, wb) <= CONTACT_IOU - 0.03

        rally = rally_positions(video)
        prev = None
        for f in sorted(rally):
            pos = rally[f]
            ball_box = _square(pos, BALL_SIZE)
            for bbox in (UP_BBOX, DOWN_BBOX, spectator_bbox(f)):
                wb = _square(_keypoint_abs(bbox, "right_wrist"), KEYPOINT_BOX_SCALE * bbox[3])
                assert _iou(ball_box, wb) <= CONTACT_IOU - 0.03
            if prev is not None:
                assert _iou(ball_box, _square(prev, BALL_SIZE)) >= STEP_IOU_FLOOR
            prev = pos
            assert f not in ball_frames, "rally must not overlap serve windows"


def _keypoint_abs(bbox, name: str) -> tuple[float, float]:
    fx, fy = REST_FRACTIONS[name]
    return (bbox[0] + fx * bbox[2], bbox[1] + fy * bbox[3])


def h_active(spec: ServeSpec, frame: int) -> bool:
    (h0, h1), _ = serve_spans(spec)
    return h0 <= frame <= h1


def build_project(
    root: Path,
    inject_false_positive: bool = False,
    with_groundtruth: bool = True,
    events_dsl: str = EVENTS_DSL,
) -> Path:
    """Write a complete fixture project directory and return its root."""
    _self_check(inject_false_positive)
    root = Path(root)
    (root / "detections").mkdir(parents=True, exist_ok=True)
    for video in ("v1", "v2"):
        lines = [json.dumps(r) for r in video_records(video, inject_false_positive)]
        (root / "detections" / f"{video}.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    manifest = {
        "version": 1,
        "videos": [
            {
                "video_id": video,
                "fps": FPS,
                "frame_count": FRAME_COUNT,
                "detections_path": f"detections/{video}.jsonl",
            }
            for video in ("v1", "v2")
        ],
        "configs": {
            "ingest": {"keypoint_score_min": 0.3, "person_score_min": 0.5, "object_score_min": 0.5},
            "tracker": {"iou_min": 0.1, "max_gap_frames": 5},
            "geometry": {"contact_iou_min": 0.1, "keypoint_box_scale": 0.1},
            "sequencer": {"min_delay_s": None},
            "matcher": {"max_embeddings_per_frame": 64},
        },
        "markers": {"v1": [100, 114]},
    }
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    (root / "events.pdl").write_text(events_dsl, encoding="utf-8")
    if with_groundtruth:
        (root / "groundtruth.json").write_text(json.dumps(GROUNDTRUTH, indent=2) + "\n", encoding="utf-8")
    return root


def expected_label_records(inject_false_positive: bool = False) -> list[dict]:
    """Labels the engine must produce, derived purely from the script."""
    event_of = {"front": "serve_front", "back": "serve_back"}
    records = []
    instance_counter: dict[tuple[str, str], int] = {}
    all_serves = list(SERVES) + ([FALSE_POSITIVE] if inject_false_positive else [])
    all_serves.sort(key=lambda s: (s.video, s.t0))
    for spec in all_serves:
        event = event_of[spec.facing]
        key = (spec.video, event)
        instance_counter[key] = instance_counter.get(key, 0) + 1
        inst = instance_counter[key]
        (h0, h1), (s0, s1) = serve_spans(spec)
        for f in range(h0, h1 + 1):
            records.append({"video": spec.video, "frame": f, "event": event, "state": 1, "instance": inst})
        for f in range(s0, s1 + 1):
            records.append({"video": spec.video, "frame": f, "event": event, "state": 2, "instance": inst})
    records.sort(key=lambda r: (r["video"], r["frame"], r["event"], r["instance"], r["state"]))
    return records
