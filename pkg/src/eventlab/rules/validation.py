"""Semantic validation of key events, independent of how they were built."""

from __future__ import annotations

import math
import re
from typing import Iterable

from .model import (
    BODY_PART,
    OBJECT,
    PERSON,
    Constraint,
    Contact,
    Direction,
    DistanceOrder,
    KeyEvent,
    RuleDiagnostic,
    StateDef,
    constraint_vars,
    is_known_part,
)
from .parser import RESERVED

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

NARROW_RANGE_DEG = 5.0
LONG_THRESHOLD_S = 10.0


def _err(loc: str, msg: str) -> RuleDiagnostic:
    return RuleDiagnostic(severity="error", location=loc, message=msg)


def _warn(loc: str, msg: str) -> RuleDiagnostic:
    return RuleDiagnostic(severity="warning", location=loc, message=msg)


def _check_ident(name: str, loc: str, what: str, out: list[RuleDiagnostic]) -> None:
    if not _IDENT_RE.match(name or ""):
        out.append(_err(loc, f"{what} {name!r} is not a valid identifier"))
    elif name in RESERVED:
        out.append(_err(loc, f"{what} {name!r} is a reserved word"))


def range_width_deg(deg_min: float, deg_max: float) -> float:
    """Width of the closed clockwise arc from deg_min to deg_max."""
    return (deg_max - deg_min) % 360.0


def _check_constraint(
    c: Constraint, idx: int, state: StateDef, loc: str, out: list[RuleDiagnostic]
) -> None:
    cloc = f"{loc}.constraint[{idx}]"
    declared = state.declared()
    for var in constraint_vars(c):
        if var not in declared:
            out.append(_err(cloc, f"reference to undeclared variable {var!r}"))
    if isinstance(c, Direction):
        if c.anchor == c.target:
            out.append(_err(cloc, "direction anchor and target must differ"))
        for v in (c.deg_min, c.deg_max):
            if not math.isfinite(v) or not 0.0 <= v < 360.0:
                out.append(_err(cloc, f"angle {v!r} must lie in [0, 360)"))
                return
        if range_width_deg(c.deg_min, c.deg_max) < NARROW_RANGE_DEG:
            out.append(
                _warn(cloc, f"direction range is narrower than {NARROW_RANGE_DEG} degrees")
            )
    elif isinstance(c, Contact):
        if c.iou_min is not None and not 0.0 <= c.iou_min <= 1.0:
            out.append(_err(cloc, f"contact iou override {c.iou_min!r} must lie in [0, 1]"))
    elif isinstance(c, DistanceOrder):
        if frozenset(c.lesser) == frozenset(c.greater):
            out.append(_err(cloc, "distance pairs must differ as unordered pairs"))


def _check_state(state: StateDef, loc: str, out: list[RuleDiagnostic]) -> None:
    _check_ident(state.name, loc, "state name", out)
    if not state.elements:
        out.append(_err(loc, "state declares no elements"))
    seen: set[str] = set()
    persons = set(state.persons)
    for d in state.elements:
        dloc = f"{loc}.element[{d.var}]"
        _check_ident(d.var, dloc, "variable", out)
        if d.var in seen:
            out.append(_err(dloc, f"duplicate declaration of {d.var!r}"))
        seen.add(d.var)
        if d.kind == PERSON:
            if d.assoc is not None:
                out.append(_err(dloc, "person declarations carry no association"))
        elif d.kind == BODY_PART:
            if not is_known_part(d.type):
                out.append(_err(dloc, f"unknown body part {d.type!r}"))
            if d.assoc is None:
                out.append(_err(dloc, "body part must be associated with a person"))
            elif d.assoc not in persons:
                out.append(_err(dloc, f"association references undeclared person {d.assoc!r}"))
        elif d.kind == OBJECT:
            if not d.type:
                out.append(_err(dloc, "object class must be non-empty"))
            if d.assoc is not None:
                out.append(_err(dloc, "object declarations carry no association"))
        else:
            out.append(_err(dloc, f"unknown element kind {d.kind!r}"))
    for idx, c in enumerate(state.constraints):
        _check_constraint(c, idx, state, loc, out)


def validate_event(event: KeyEvent) -> list[RuleDiagnostic]:
    """Check every type invariant; errors block label runs, warnings do not."""
    out: list[RuleDiagnostic] = []
    loc = f"event[{event.event_id}]"
    _check_ident(event.event_id, loc, "event id", out)
    if not event.states:
        out.append(_err(loc, "event declares no states"))
    if len(event.intervals) != max(len(event.states) - 1, 0):
        out.append(
            _err(loc, f"expected {max(len(event.states) - 1, 0)} intervals, found {len(event.intervals)}")
        )
    for thr in event.intervals:
        if not math.isfinite(thr) or thr <= 0:
            out.append(_err(loc, f"interval threshold {thr!r} must be finite and positive"))
        elif thr > LONG_THRESHOLD_S:
            out.append(_warn(loc, f"interval threshold {thr} s is unusually long"))

    names = [s.name for s in event.states]
    if len(set(names)) != len(names):
        out.append(_err(loc, "state names must be unique"))

    shared: dict[str, tuple[str, str, str | None]] = {}
    for state in event.states:
        sloc = f"{loc}.state[{state.name}]"
        _check_state(state, sloc, out)
        for d in state.elements:
            key = (d.kind, d.type, d.assoc)
            if d.var in shared and shared[d.var] != key:
                out.append(
                    _err(sloc, f"variable {d.var!r} declared inconsistently across states")
                )
            shared.setdefault(d.var, key)
    return out


def validate_events(events: Iterable[KeyEvent]) -> list[RuleDiagnostic]:
    """Validate a whole event list, including cross-event id uniqueness."""
    out: list[RuleDiagnostic] = []
    seen: set[str] = set()
    for event in events:
        if event.event_id in seen:
            out.append(_err(f"event[{event.event_id}]", "duplicate event id"))
        seen.add(event.event_id)
        out.extend(validate_event(event))
    return out
