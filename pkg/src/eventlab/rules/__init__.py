"""Key-event rule model, DSL parser/printer, and validation."""

from .model import (
    BODY_PART,
    OBJECT,
    PERSON,
    Constraint,
    Contact,
    Direction,
    DistanceOrder,
    ElementDecl,
    KeyEvent,
    RuleDiagnostic,
    StateDef,
    constraint_from_dict,
    constraint_to_dict,
    constraint_vars,
    event_from_dict,
    event_to_dict,
)
from .parser import parse_events
from .printer import serialize_events
from .validation import range_width_deg, validate_event, validate_events

__all__ = [
    "BODY_PART",
    "OBJECT",
    "PERSON",
    "Constraint",
    "Contact",
    "Direction",
    "DistanceOrder",
    "ElementDecl",
    "KeyEvent",
    "RuleDiagnostic",
    "StateDef",
    "constraint_from_dict",
    "constraint_to_dict",
    "constraint_vars",
    "event_from_dict",
    "event_to_dict",
    "parse_events",
    "range_width_deg",
    "serialize_events",
    "validate_event",
    "validate_events",
]
