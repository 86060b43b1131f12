"""Geometric evaluation of individual constraints against frame elements.

All quantities are measured between anchor points (keypoint location for
body parts, box center for persons and objects) or between boxes, in image
coordinates: origin top-left, +y down, angles screen-clockwise from +x.
Outcomes retain the measured quantity for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Protocol

from .ingest import BBox
from .rules import Constraint, Contact, Direction, DistanceOrder
from .tracker import iou


@dataclass(frozen=True)
class AnchorPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("anchor coordinates must be finite")


class ElementLike(Protocol):
    """Structural view of a frame-graph node as the evaluator needs it."""

    kind: str
    anchor: AnchorPoint
    box: BBox | None
    owner_box: BBox | None


@dataclass(frozen=True)
class GeometryConfig:
    contact_iou_min: float = 0.1
    # A body part participating in contact gets a square box of side
    # keypoint_box_scale x owning person's bbox height, centered on it.
    keypoint_box_scale: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.contact_iou_min <= 1.0:
            raise ValueError("contact_iou_min must be in (0, 1]")
        if self.keypoint_box_scale <= 0:
            raise ValueError("keypoint_box_scale must be positive")

    @classmethod
    def from_mapping(cls, data: dict) -> "GeometryConfig":
        return cls(**{k: float(v) for k, v in data.items() if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class ConstraintOutcome:
    passed: bool
    constraint: Constraint
    measured: float | tuple[float, float] | None = None
    reason: str | None = None


def direction_angle(anchor: AnchorPoint, target: AnchorPoint) -> float:
    """Angle of anchor->target in degrees, [0, 360), y-down clockwise."""
    dx = target.x - anchor.x
    dy = target.y - anchor.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("direction undefined for coincident points")
    return math.degrees(math.atan2(dy, dx)) % 360.0


def angle_in_range(angle: float, deg_min: float, deg_max: float) -> bool:
    """Membership on the closed clockwise arc deg_min..deg_max (wraps past 0)."""
    angle %= 360.0
    if deg_min <= deg_max:
        return deg_min <= angle <= deg_max
    return angle >= deg_min or angle <= deg_max


def element_box(element: ElementLike, cfg: GeometryConfig) -> BBox | None:
    if element.box is not None:
        return element.box
    if element.owner_box is None:
        return None
    side = cfg.keypoint_box_scale * element.owner_box.h
    return BBox(x=element.anchor.x - side / 2.0, y=element.anchor.y - side / 2.0, w=side, h=side)


def contact(
    a: ElementLike,
    b: ElementLike,
    cfg: GeometryConfig,
    constraint: Contact,
    override: float | None = None,
) -> ConstraintOutcome:
    box_a = element_box(a, cfg)
    box_b = element_box(b, cfg)
    if box_a is None or box_b is None:
        return ConstraintOutcome(
            passed=False, constraint=constraint, reason="owner person bbox missing"
        )
    threshold = override if override is not None else cfg.contact_iou_min
    measured = iou(box_a, box_b)
    return ConstraintOutcome(passed=measured >= threshold, constraint=constraint, measured=measured)


def _distance(a: AnchorPoint, b: AnchorPoint) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def eval_constraint(
    c: Constraint, binding: Mapping[str, ElementLike], cfg: GeometryConfig
) -> ConstraintOutcome:
    """Evaluate one constraint against bound elements.

    Unbound or unresolvable elements yield a failed outcome with a reason
    rather than an exception; measured values are recorded whenever both
    endpoints resolve.
    """
    if isinstance(c, Direction):
        anchor = binding.get(c.anchor)
        target = binding.get(c.target)
        if anchor is None or target is None:
            return ConstraintOutcome(passed=False, constraint=c, reason="element absent")
        try:
            angle = direction_angle(anchor.anchor, target.anchor)
        except ValueError:
            return ConstraintOutcome(passed=False, constraint=c, reason="undefined direction")
        return ConstraintOutcome(
            passed=angle_in_range(angle, c.deg_min, c.deg_max), constraint=c, measured=angle
        )

    if isinstance(c, Contact):
        a = binding.get(c.a)
        b = binding.get(c.b)
        if a is None or b is None:
            return ConstraintOutcome(passed=False, constraint=c, reason="element absent")
        return contact(a, b, cfg, c, override=c.iou_min)

    if isinstance(c, DistanceOrder):
        elems = [binding.get(v) for v in (*c.lesser, *c.greater)]
        if any(e is None for e in elems):
            return ConstraintOutcome(passed=False, constraint=c, reason="element absent")
        d_lesser = _distance(elems[0].anchor, elems[1].anchor)
        d_greater = _distance(elems[2].anchor, elems[3].anchor)
        return ConstraintOutcome(
            passed=d_lesser < d_greater, constraint=c, measured=(d_lesser, d_greater)
        )

    raise TypeError(f"unknown constraint {c!r}")
