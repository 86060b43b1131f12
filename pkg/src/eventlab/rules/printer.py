"""Canonical pretty-printer for key events.

serialize_events is the inverse of parse_events: parsing its output yields
structurally identical events, and printing is idempotent (one pass
normalizes whitespace, aliases, and number spellings).
"""

from __future__ import annotations

from typing import Iterable

from ..errors import RuleError
from .model import (
    BODY_PART,
    OBJECT,
    PERSON,
    Contact,
    Direction,
    DistanceOrder,
    KeyEvent,
    StateDef,
)
from .validation import validate_events


def _fmt_num(value: float) -> str:
    # Integral values print bare; everything else uses the shortest float
    # repr, which float() parses back exactly.
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _print_state(state: StateDef, out: list[str]) -> None:
    out.append(f"  state {state.name} {{")
    for d in state.elements:
        if d.kind == PERSON:
            out.append(f"    person {d.var}")
        elif d.kind == OBJECT:
            out.append(f"    object {_quote(d.type)} {d.var}")
        elif d.kind == BODY_PART:
            out.append(f"    part {d.type} {d.var} of {d.assoc}")
        else:
            raise RuleError(f"unknown element kind {d.kind!r}")
    for c in state.constraints:
        if isinstance(c, Direction):
            out.append(
                f"    dir({c.anchor} -> {c.target}) in "
                f"[{_fmt_num(c.deg_min)} deg, {_fmt_num(c.deg_max)} deg]"
            )
        elif isinstance(c, Contact):
            if c.iou_min is None:
                out.append(f"    contact({c.a}, {c.b})")
            else:
                out.append(f"    contact({c.a}, {c.b}, iou {_fmt_num(c.iou_min)})")
        elif isinstance(c, DistanceOrder):
            out.append(f"    closer({c.lesser[0]}, {c.lesser[1]}; {c.greater[0]}, {c.greater[1]})")
        else:
            raise RuleError(f"unknown constraint {c!r}")
    out.append("  }")


def serialize_events(events: Iterable[KeyEvent]) -> str:
    """Render events in the canonical DSL form. Invalid events are rejected."""
    events = list(events)
    errors = [d for d in validate_events(events) if d.severity == "error"]
    if errors:
        first = errors[0]
        raise RuleError(f"cannot serialize invalid events: {first.location}: {first.message}")

    chunks: list[str] = []
    for event in events:
        out: list[str] = [f"event {event.event_id} {{"]
        out.append(f"  action {_quote(event.action_label)}")
        for state in event.states:
            _print_state(state, out)
        for k, thr in enumerate(event.intervals):
            out.append(
                f"  interval {event.states[k].name} -> {event.states[k + 1].name} "
                f"max {_fmt_num(thr)} s"
            )
        out.append("}")
        chunks.append("\n".join(out))
    return "\n\n".join(chunks) + ("\n" if chunks else "")
