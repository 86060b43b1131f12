"""Hypothesis strategies generating valid key events for round-trip laws."""

from __future__ import annotations

from hypothesis import strategies as st

from eventlab.ingest import KEYPOINT_NAMES
from eventlab.rules import (
    BODY_PART,
    OBJECT,
    PERSON,
    Contact,
    Direction,
    DistanceOrder,
    ElementDecl,
    KeyEvent,
    StateDef,
)
from eventlab.rules.parser import RESERVED

idents = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,7}", fullmatch=True).filter(
    lambda s: s not in RESERVED
)
class_names = st.text(
    alphabet=st.characters(min_codepoint=32, max_codepoint=126), min_size=1, max_size=12
)
angles = st.one_of(
    st.integers(min_value=0, max_value=359).map(float),
    st.floats(min_value=0.0, max_value=359.99, allow_nan=False, allow_infinity=False),
)
thresholds = st.floats(min_value=1e-6, max_value=99.0, allow_nan=False, allow_infinity=False)
iou_values = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def element_pools(draw) -> list[ElementDecl]:
    names = draw(st.lists(idents, min_size=1, max_size=6, unique=True))
    decls: list[ElementDecl] = []
    persons: list[str] = []
    for var in names:
        kind = draw(st.sampled_from([PERSON, OBJECT, BODY_PART]))
        if kind == BODY_PART and not persons:
            kind = PERSON
        if kind == PERSON:
            decls.append(ElementDecl(var=var, kind=PERSON, type="person"))
            persons.append(var)
        elif kind == OBJECT:
            decls.append(ElementDecl(var=var, kind=OBJECT, type=draw(class_names)))
        else:
            decls.append(
                ElementDecl(
                    var=var,
                    kind=BODY_PART,
                    type=draw(st.sampled_from(KEYPOINT_NAMES)),
                    assoc=draw(st.sampled_from(persons)),
                )
            )
    return decls


@st.composite
def constraints_for(draw, decls: list[ElementDecl]):
    vars_ = [d.var for d in decls]
    kind = draw(st.sampled_from(["direction", "contact", "closer"]))
    if kind == "direction" and len(vars_) >= 2:
        anchor, target = draw(st.permutations(vars_).map(lambda p: p[:2]))
        return Direction(anchor=anchor, target=target, deg_min=draw(angles), deg_max=draw(angles))
    if kind == "contact":
        a = draw(st.sampled_from(vars_))
        b = draw(st.sampled_from(vars_))
        return Contact(a=a, b=b, iou_min=draw(st.none() | iou_values))
    if len(vars_) >= 3:
        pairs = [(x, y) for i, x in enumerate(vars_) for y in vars_[i:]]
        lesser, greater = draw(
            st.lists(st.sampled_from(pairs), min_size=2, max_size=2).filter(
                lambda ps: frozenset(ps[0]) != frozenset(ps[1])
            )
        )
        return DistanceOrder(lesser=lesser, greater=greater)
    a = draw(st.sampled_from(vars_))
    return Contact(a=a, b=a, iou_min=None)


@st.composite
def states_from_pool(draw, pool: list[ElementDecl], name: str) -> StateDef:
    chosen = draw(
        st.lists(st.sampled_from(pool), min_size=1, max_size=len(pool), unique_by=lambda d: d.var)
    )
    # Close over associations so every part's person is declared in-state.
    by_var = {d.var: d for d in pool}
    needed = {d.assoc for d in chosen if d.kind == BODY_PART and d.assoc is not None}
    for var in needed:
        if var not in {d.var for d in chosen}:
            chosen.append(by_var[var])
    chosen.sort(key=lambda d: [p.var for p in pool].index(d.var))
    n_constraints = draw(st.integers(min_value=0, max_value=3))
    constraints = tuple(draw(constraints_for(chosen)) for _ in range(n_constraints))
    return StateDef(name=name, elements=tuple(chosen), constraints=constraints)


@st.composite
def key_events(draw) -> KeyEvent:
    event_id = draw(idents)
    pool = draw(element_pools())
    state_names = draw(st.lists(idents, min_size=1, max_size=3, unique=True))
    states = tuple(
        draw(states_from_pool(pool, name)) for name in state_names
    )
    intervals = tuple(draw(thresholds) for _ in range(len(states) - 1))
    return KeyEvent(
        event_id=event_id,
        action_label=draw(class_names | st.just("")),
        states=states,
        intervals=intervals,
    )


event_lists = st.lists(key_events(), min_size=0, max_size=3, unique_by=lambda e: e.event_id)
