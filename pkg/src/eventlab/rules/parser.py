"""Recursive-descent parser for the rule DSL.

Grammar (whitespace-insensitive, // line comments):

    file       := event*
    event      := "event" IDENT "{" "action" STRING state+ interval* "}"
    state      := "state" IDENT "{" decl* constraint* "}"
    decl       := "person" IDENT
                | "object" STRING IDENT
                | "part" PART IDENT "of" IDENT
    constraint := "dir" "(" IDENT "->" IDENT ")" "in" "[" NUM "deg" "," NUM "deg" "]"
                | "contact" "(" IDENT "," IDENT ["," "iou" NUM] ")"
                | "closer" "(" IDENT "," IDENT ";" IDENT "," IDENT ")"
    interval   := "interval" IDENT "->" IDENT "max" NUM "s"

Beyond the grammar the parser enforces structure: identifiers may not be
reserved words, declarations are unique per state and consistent across
states, constraint and interval references must resolve, and an event with
n states carries exactly n-1 intervals pairing adjacent states in order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from .model import (
    BODY_PART,
    OBJECT,
    PERSON,
    Contact,
    Direction,
    DistanceOrder,
    ElementDecl,
    KeyEvent,
    StateDef,
    normalize_part,
)

RESERVED = frozenset(
    {
        "event",
        "action",
        "state",
        "person",
        "object",
        "part",
        "of",
        "dir",
        "in",
        "deg",
        "contact",
        "iou",
        "closer",
        "interval",
        "max",
        "s",
    }
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<punct>[{}()\[\],;])
    """,
    re.VERBOSE,
)

_ESCAPES = {'\\"': '"', "\\\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # name | num | string | arrow | punct | eof
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


def _unquote(raw: str) -> str:
    body = raw[1:-1]
    return re.sub(r"\\.", lambda m: _ESCAPES.get(m.group(), m.group()[1]), body)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise self.fail(f"expected {what}, found {tok.value or 'end of input'!r}", tok)
        return tok

    def expect_word(self, word: str) -> Token:
        tok = self.next()
        if tok.kind != "name" or tok.value != word:
            raise self.fail(f"expected {word!r}, found {tok.value or 'end of input'!r}", tok)
        return tok

    def expect_punct(self, char: str) -> Token:
        tok = self.next()
        if tok.kind not in ("punct", "arrow") or tok.value != char:
            raise self.fail(f"expected {char!r}, found {tok.value or 'end of input'!r}", tok)
        return tok

    def ident(self, what: str) -> Token:
        tok = self.expect("name", what)
        if tok.value in RESERVED:
            raise self.fail(f"reserved word {tok.value!r} cannot be used as {what}", tok)
        return tok

    def number(self, what: str) -> tuple[float, Token]:
        tok = self.expect("num", what)
        return float(tok.value), tok

    # --- grammar ---------------------------------------------------------

    def parse_file(self) -> list[KeyEvent]:
        events: list[KeyEvent] = []
        seen_ids: set[str] = set()
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind != "name" or tok.value != "event":
                raise self.fail(f"expected 'event', found {tok.value!r}", tok)
            event = self.parse_event()
            if event.event_id in seen_ids:
                raise self.fail(f"duplicate event id {event.event_id!r}", tok)
            seen_ids.add(event.event_id)
            events.append(event)
        return events

    def parse_event(self) -> KeyEvent:
        self.expect_word("event")
        id_tok = self.ident("event id")
        self.expect_punct("{")
        self.expect_word("action")
        action = _unquote(self.expect("string", "action label string").value)

        states: list[StateDef] = []
        intervals: list[tuple[str, str, float, Token]] = []
        while True:
            tok = self.peek()
            if tok.kind == "name" and tok.value == "state":
                if intervals:
                    raise self.fail("states must precede intervals", tok)
                states.append(self.parse_state())
            elif tok.kind == "name" and tok.value == "interval":
                intervals.append(self.parse_interval())
            elif tok.kind == "punct" and tok.value == "}":
                self.next()
                break
            else:
                raise self.fail(f"expected 'state', 'interval' or '}}', found {tok.value or 'end of input'!r}", tok)

        if not states:
            raise self.fail("event must declare at least one state", id_tok)

        seen_states: dict[str, Token] = {}
        for s in states:
            if s.name in seen_states:
                raise self.fail(f"duplicate state name {s.name!r} in event {id_tok.value!r}", id_tok)
            seen_states[s.name] = id_tok

        self._check_cross_state(states, id_tok)
        thresholds = self._check_intervals(states, intervals, id_tok)

        return KeyEvent(
            event_id=id_tok.value,
            action_label=action,
            states=tuple(states),
            intervals=thresholds,
        )

    def _check_cross_state(self, states: list[StateDef], at: Token) -> None:
        # Same name across states means the same entity; declarations must agree.
        seen: dict[str, ElementDecl] = {}
        for s in states:
            for d in s.elements:
                prior = seen.get(d.var)
                if prior is None:
                    seen[d.var] = d
                elif (prior.kind, prior.type, prior.assoc) != (d.kind, d.type, d.assoc):
                    raise self.fail(
                        f"variable {d.var!r} declared inconsistently across states "
                        f"({prior.kind} {prior.type!r} vs {d.kind} {d.type!r})",
                        at,
                    )

    def _check_intervals(
        self,
        states: list[StateDef],
        intervals: list[tuple[str, str, float, Token]],
        at: Token,
    ) -> tuple[float, ...]:
        expected = len(states) - 1
        if len(intervals) != expected:
            raise self.fail(f"expected {expected} intervals, found {len(intervals)}", at)
        by_pair = {}
        for src, dst, thr, tok in intervals:
            if (src, dst) in by_pair:
                raise self.fail(f"duplicate interval {src} -> {dst}", tok)
            by_pair[(src, dst)] = (thr, tok)
        thresholds = []
        for k in range(expected):
            pair = (states[k].name, states[k + 1].name)
            if pair not in by_pair:
                raise self.fail(f"missing interval {pair[0]} -> {pair[1]}", at)
            thresholds.append(by_pair[pair][0])
        return tuple(thresholds)

    def parse_state(self) -> StateDef:
        self.expect_word("state")
        name_tok = self.ident("state name")
        self.expect_punct("{")

        elements: list[ElementDecl] = []
        pending_assoc: list[tuple[str, Token]] = []  # (person var, token) per part decl
        declared: dict[str, Token] = {}

        def declare(d: ElementDecl, tok: Token) -> None:
            if d.var in declared:
                raise self.fail(f"duplicate declaration of {d.var!r} in state {name_tok.value!r}", tok)
            declared[d.var] = tok
            elements.append(d)

        constraints: list = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.value == "}":
                self.next()
                break
            if tok.kind != "name":
                raise self.fail(f"expected declaration, constraint or '}}', found {tok.value!r}", tok)
            if tok.value in ("person", "object", "part"):
                if constraints:
                    raise self.fail("declarations must precede constraints", tok)
                self._parse_decl(declare, pending_assoc)
            elif tok.value in ("dir", "contact", "closer"):
                constraints.append(self._parse_constraint(declared))
            else:
                raise self.fail(f"expected declaration, constraint or '}}', found {tok.value!r}", tok)

        if not elements:
            raise self.fail(f"state {name_tok.value!r} declares no elements", name_tok)

        persons = {d.var for d in elements if d.kind == PERSON}
        for person_var, tok in pending_assoc:
            if person_var not in persons:
                raise self.fail(f"part references undeclared person {person_var!r}", tok)

        return StateDef(name=name_tok.value, elements=tuple(elements), constraints=tuple(constraints))

    def _parse_decl(self, declare, pending_assoc: list) -> None:
        word = self.next()
        if word.value == "person":
            var = self.ident("person variable")
            declare(ElementDecl(var=var.value, kind=PERSON, type="person"), var)
        elif word.value == "object":
            cls = _unquote(self.expect("string", "object class string").value)
            var = self.ident("object variable")
            declare(ElementDecl(var=var.value, kind=OBJECT, type=cls), var)
        else:  # part
            part_tok = self.expect("name", "body part name")
            var = self.ident("part variable")
            self.expect_word("of")
            owner = self.ident("person variable")
            declare(
                ElementDecl(
                    var=var.value,
                    kind=BODY_PART,
                    type=normalize_part(part_tok.value),
                    assoc=owner.value,
                ),
                var,
            )
            pending_assoc.append((owner.value, owner))

    def _ref(self, declared: dict[str, Token], what: str) -> str:
        tok = self.ident(what)
        if tok.value not in declared:
            raise self.fail(f"reference to undeclared variable {tok.value!r}", tok)
        return tok.value

    def _parse_constraint(self, declared: dict[str, Token]):
        word = self.next()
        if word.value == "dir":
            self.expect_punct("(")
            anchor = self._ref(declared, "anchor variable")
            self.expect_punct("->")
            target = self._ref(declared, "target variable")
            self.expect_punct(")")
            self.expect_word("in")
            self.expect_punct("[")
            deg_min, _ = self.number("angle")
            self.expect_word("deg")
            self.expect_punct(",")
            deg_max, _ = self.number("angle")
            self.expect_word("deg")
            self.expect_punct("]")
            return Direction(anchor=anchor, target=target, deg_min=deg_min, deg_max=deg_max)
        if word.value == "contact":
            self.expect_punct("(")
            a = self._ref(declared, "variable")
            self.expect_punct(",")
            b = self._ref(declared, "variable")
            override = None
            if self.peek().kind == "punct" and self.peek().value == ",":
                self.next()
                self.expect_word("iou")
                override, _ = self.number("iou threshold")
            self.expect_punct(")")
            return Contact(a=a, b=b, iou_min=override)
        # closer
        self.expect_punct("(")
        l1 = self._ref(declared, "variable")
        self.expect_punct(",")
        l2 = self._ref(declared, "variable")
        self.expect_punct(";")
        g1 = self._ref(declared, "variable")
        self.expect_punct(",")
        g2 = self._ref(declared, "variable")
        self.expect_punct(")")
        return DistanceOrder(lesser=(l1, l2), greater=(g1, g2))

    def parse_interval(self) -> tuple[str, str, float, Token]:
        tok = self.expect_word("interval")
        src = self.ident("state name")
        self.expect_punct("->")
        dst = self.ident("state name")
        self.expect_word("max")
        thr, _ = self.number("threshold")
        self.expect_word("s")
        return (src.value, dst.value, thr, tok)


def parse_events(text: str) -> list[KeyEvent]:
    """Parse rule-DSL source into key events.

    Raises ParseError with line/column on syntax errors, references to
    undeclared variables, or wrong interval counts.
    """
    return _Parser(tokenize(text)).parse_file()
