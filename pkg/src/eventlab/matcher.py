"""Per-frame graphs and state matching.

A frame is an attributed graph: one node per person, per surviving body
part, per object, each carrying its anchor point, box, and track identity.
Matching a state into a frame is injective subgraph embedding with typed
nodes; relations are evaluated lazily during the backtracking search
rather than materialized as edges, since state graphs are small.

The search binds state variables most-constrained-first (fewest candidate
nodes) and prunes on type, injectivity, association consistency, track
distinctness, and every constraint as soon as both of its endpoints are
bound. All embeddings are returned in a deterministic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .constraints import AnchorPoint, ConstraintOutcome, GeometryConfig, eval_constraint
from .ingest import BBox, FrameElements, IngestConfig
from .rules import BODY_PART, OBJECT, PERSON, ElementDecl, StateDef, constraint_vars
from .tracker import TrackSet


@dataclass(frozen=True)
class Node:
    index: int
    kind: str  # person | body_part | object
    type: str
    anchor: AnchorPoint
    box: BBox | None
    track: int
    owner_track: int  # for body parts, the owning person's track; else == track
    owner_box: BBox | None = None  # owning person's bbox, body parts only


@dataclass(frozen=True)
class FrameGraph:
    video_id: str
    frame_index: int
    nodes: tuple[Node, ...]


@dataclass(frozen=True)
class Embedding:
    """An injective, constraint-satisfying assignment; witness of a match."""

    state: str
    frame_index: int
    assignment: dict[str, Node]
    signature: dict[str, int]  # person/object var -> track id


@dataclass
class MismatchReport:
    """Why a state failed to match a frame; empty iff an embedding exists."""

    matched: bool
    best_partial: int = 0
    missing_types: tuple[str, ...] = ()
    failures: tuple[ConstraintOutcome, ...] = ()

    def is_empty(self) -> bool:
        return self.matched


def build_frame_graph(
    fe: FrameElements, tracks: TrackSet, cfg: IngestConfig, video_id: str = ""
) -> FrameGraph:
    """Resolve one frame's detections into graph nodes with track identity.

    Persons anchor at their box center and are followed by one node per
    surviving keypoint; objects anchor at their box center. Keypoints below
    the confidence gate produce no node.
    """
    nodes: list[Node] = []
    for i, person in enumerate(fe.persons):
        tid = tracks.track_of(fe.frame_index, PERSON, i)
        cx, cy = person.bbox.center
        nodes.append(
            Node(
                index=len(nodes),
                kind=PERSON,
                type="person",
                anchor=AnchorPoint(cx, cy),
                box=person.bbox,
                track=tid,
                owner_track=tid,
            )
        )
        for kp in person.keypoints:
            if kp.absent or kp.score < cfg.keypoint_score_min:
                continue
            nodes.append(
                Node(
                    index=len(nodes),
                    kind=BODY_PART,
                    type=kp.part,
                    anchor=AnchorPoint(kp.x, kp.y),
                    box=None,
                    track=tid,
                    owner_track=tid,
                    owner_box=person.bbox,
                )
            )
    for j, obj in enumerate(fe.objects):
        tid = tracks.track_of(fe.frame_index, OBJECT, j)
        cx, cy = obj.bbox.center
        nodes.append(
            Node(
                index=len(nodes),
                kind=OBJECT,
                type=obj.label,
                anchor=AnchorPoint(cx, cy),
                box=obj.bbox,
                track=tid,
                owner_track=tid,
            )
        )
    return FrameGraph(video_id=video_id, frame_index=fe.frame_index, nodes=tuple(nodes))


def _node_candidates(decl: ElementDecl, g: FrameGraph) -> list[Node]:
    if decl.kind == PERSON:
        return [n for n in g.nodes if n.kind == PERSON]
    return [n for n in g.nodes if n.kind == decl.kind and n.type == decl.type]


class _Recorder:
    """Collects the deepest frontier and its constraint failures."""

    def __init__(self):
        self.best_partial = 0
        self.failures: list[tuple[int, ConstraintOutcome]] = []

    def reached(self, size: int) -> None:
        if size > self.best_partial:
            self.best_partial = size

    def failed(self, frontier: int, outcome: ConstraintOutcome) -> None:
        self.failures.append((frontier, outcome))

    def frontier_failures(self) -> tuple[ConstraintOutcome, ...]:
        seen: set[int] = set()
        kept: list[ConstraintOutcome] = []
        for frontier, outcome in self.failures:
            if frontier != self.best_partial:
                continue
            key = id(outcome.constraint)
            if key in seen:
                continue
            seen.add(key)
            kept.append(outcome)
        return tuple(kept)


def _search(
    state: StateDef,
    g: FrameGraph,
    cfg: GeometryConfig,
    fixed: Mapping[str, int] | None,
    limit: int | None,
    recorder: _Recorder | None,
) -> list[dict[str, Node]]:
    decls = state.elements
    cand = {d.var: _node_candidates(d, g) for d in decls}
    order = sorted(range(len(decls)), key=lambda i: (len(cand[decls[i].var]), i))

    # Constraints fire at the first search rank where all their vars are bound.
    rank_of = {decls[i].var: r for r, i in enumerate(order)}
    fire: list[list] = [[] for _ in order]
    for c in state.constraints:
        fire[max(rank_of[v] for v in constraint_vars(c))].append(c)

    assignment: dict[str, Node] = {}
    used: set[int] = set()
    results: list[dict[str, Node]] = []
    declared = state.declared()

    def consistent(decl: ElementDecl, node: Node) -> bool:
        if decl.kind == BODY_PART:
            # Wait for the owner if unbound; the owner's check covers it then.
            owner = assignment.get(decl.assoc)  # type: ignore[arg-type]
            return owner is None or node.owner_track == owner.track
        if fixed is not None:
            want = fixed.get(decl.var)
            if want is not None and node.track != want:
                return False
        for var, bound in assignment.items():
            other = declared[var]
            if other.kind == decl.kind and bound.track == node.track:
                return False
            if decl.kind == PERSON and other.kind == BODY_PART and other.assoc == decl.var:
                if bound.owner_track != node.track:
                    return False
        return True

    def extend(rank: int) -> bool:
        if rank == len(order):
            results.append(dict(assignment))
            return limit is None or len(results) < limit
        decl = decls[order[rank]]
        for node in cand[decl.var]:
            if node.index in used:
                continue
            if not consistent(decl, node):
                continue
            assignment[decl.var] = node
            used.add(node.index)
            ok = True
            for c in fire[rank]:
                outcome = eval_constraint(c, assignment, cfg)
                if not outcome.passed:
                    if recorder is not None:
                        recorder.failed(rank, outcome)
                    ok = False
                    break
            if ok:
                if recorder is not None:
                    recorder.reached(rank + 1)
                if not extend(rank + 1):
                    return False
            del assignment[decl.var]
            used.discard(node.index)
        return True

    extend(0)
    return results


def _signature(state: StateDef, assignment: Mapping[str, Node]) -> dict[str, int]:
    return {
        d.var: assignment[d.var].track for d in state.elements if d.kind in (PERSON, OBJECT)
    }


def match_state(
    state: StateDef,
    g: FrameGraph,
    cfg: GeometryConfig,
    fixed: Mapping[str, int] | None = None,
    limit: int | None = None,
) -> list[Embedding]:
    """All embeddings of a state into a frame graph, deterministically ordered.

    When `fixed` is given, only embeddings whose signature extends it are
    produced. `limit` stops the search early (used by the run pipeline to
    apply the per-frame cap); unlimited enumeration is the contract.
    """
    found = _search(state, g, cfg, fixed, limit, recorder=None)
    decl_order = [d.var for d in state.elements]
    found.sort(key=lambda a: tuple(a[v].index for v in decl_order))
    return [
        Embedding(
            state=state.name,
            frame_index=g.frame_index,
            assignment=a,
            signature=_signature(state, a),
        )
        for a in found
    ]


def explain_mismatch(state: StateDef, g: FrameGraph, cfg: GeometryConfig) -> MismatchReport:
    """Diagnose a failed match: missing element types and the constraint
    failures observed at the deepest partial assignments."""
    recorder = _Recorder()
    found = _search(state, g, cfg, fixed=None, limit=1, recorder=recorder)
    if found:
        return MismatchReport(matched=True, best_partial=len(state.elements))
    missing: list[str] = []
    for d in state.elements:
        if not _node_candidates(d, g) and d.type not in missing:
            missing.append(d.type)
    return MismatchReport(
        matched=False,
        best_partial=recorder.best_partial,
        missing_types=tuple(missing),
        failures=recorder.frontier_failures(),
    )
