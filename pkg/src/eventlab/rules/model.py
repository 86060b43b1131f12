"""Key-event definitions: the artifact's labeling functions.

A key event is an ordered sequence of states with bounded inter-state
delays. Each state declares the elements involved (persons, body parts
bound to a person, objects) and the relations that must hold between them.
Variables sharing a name across states denote the same tracked entity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..ingest import KEYPOINT_NAMES

PERSON = "person"
BODY_PART = "body_part"
OBJECT = "object"

# Accepted spellings for body parts beyond the canonical vocabulary.
PART_ALIASES = {"head": "nose"}


@dataclass(frozen=True)
class ElementDecl:
    var: str
    kind: str  # person | body_part | object
    type: str  # "person", body-part name, or object class
    assoc: str | None = None  # owning person variable, body parts only


@dataclass(frozen=True)
class Direction:
    """Angle of anchor->target constrained to a closed arc (may wrap 0)."""

    anchor: str
    target: str
    deg_min: float
    deg_max: float


@dataclass(frozen=True)
class Contact:
    a: str
    b: str
    iou_min: float | None = None  # per-constraint override of the project default


@dataclass(frozen=True)
class DistanceOrder:
    """dist(lesser) strictly below dist(greater); ties fail."""

    lesser: tuple[str, str]
    greater: tuple[str, str]


Constraint = Union[Direction, Contact, DistanceOrder]


@dataclass(frozen=True)
class StateDef:
    name: str
    elements: tuple[ElementDecl, ...]
    constraints: tuple[Constraint, ...] = ()

    @property
    def persons(self) -> tuple[str, ...]:
        return tuple(d.var for d in self.elements if d.kind == PERSON)

    def declared(self) -> dict[str, ElementDecl]:
        return {d.var: d for d in self.elements}


@dataclass(frozen=True)
class KeyEvent:
    event_id: str
    action_label: str
    states: tuple[StateDef, ...]
    intervals: tuple[float, ...] = ()  # seconds between adjacent state onsets


@dataclass(frozen=True)
class RuleDiagnostic:
    severity: str  # "error" | "warning"
    location: str
    message: str


def constraint_vars(c: Constraint) -> tuple[str, ...]:
    if isinstance(c, Direction):
        return (c.anchor, c.target)
    if isinstance(c, Contact):
        return (c.a, c.b)
    return (c.lesser[0], c.lesser[1], c.greater[0], c.greater[1])


def normalize_part(name: str) -> str:
    return PART_ALIASES.get(name, name)


def is_known_part(name: str) -> bool:
    return name in KEYPOINT_NAMES


# --- structured (JSON) mirror -------------------------------------------

def constraint_to_dict(c: Constraint) -> dict:
    if isinstance(c, Direction):
        return {
            "kind": "direction",
            "anchor": c.anchor,
            "target": c.target,
            "deg_min": c.deg_min,
            "deg_max": c.deg_max,
        }
    if isinstance(c, Contact):
        return {"kind": "contact", "a": c.a, "b": c.b, "iou_min": c.iou_min}
    return {"kind": "distance_order", "lesser": list(c.lesser), "greater": list(c.greater)}


def constraint_from_dict(data: dict) -> Constraint:
    kind = data.get("kind")
    if kind == "direction":
        return Direction(
            anchor=str(data["anchor"]),
            target=str(data["target"]),
            deg_min=float(data["deg_min"]),
            deg_max=float(data["deg_max"]),
        )
    if kind == "contact":
        iou_min = data.get("iou_min")
        return Contact(a=str(data["a"]), b=str(data["b"]), iou_min=None if iou_min is None else float(iou_min))
    if kind == "distance_order":
        lesser = data["lesser"]
        greater = data["greater"]
        return DistanceOrder(lesser=(str(lesser[0]), str(lesser[1])), greater=(str(greater[0]), str(greater[1])))
    raise ValueError(f"unknown constraint kind {kind!r}")


def event_to_dict(event: KeyEvent) -> dict:
    return {
        "event_id": event.event_id,
        "action_label": event.action_label,
        "states": [
            {
                "name": s.name,
                "elements": [
                    {"var": d.var, "kind": d.kind, "type": d.type, "assoc": d.assoc}
                    for d in s.elements
                ],
                "constraints": [constraint_to_dict(c) for c in s.constraints],
            }
            for s in event.states
        ],
        "intervals": list(event.intervals),
    }


def event_from_dict(data: dict) -> KeyEvent:
    states = []
    for s in data.get("states", []):
        elements = tuple(
            ElementDecl(
                var=str(d["var"]),
                kind=str(d["kind"]),
                type=normalize_part(str(d["type"])) if d["kind"] == BODY_PART else str(d["type"]),
                assoc=None if d.get("assoc") is None else str(d["assoc"]),
            )
            for d in s.get("elements", [])
        )
        constraints = tuple(constraint_from_dict(c) for c in s.get("constraints", []))
        states.append(StateDef(name=str(s["name"]), elements=elements, constraints=constraints))
    return KeyEvent(
        event_id=str(data["event_id"]),
        action_label=str(data.get("action_label", "")),
        states=tuple(states),
        intervals=tuple(float(v) for v in data.get("intervals", [])),
    )
