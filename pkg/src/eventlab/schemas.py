"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class VideoOut(BaseModel):
    video_id: str
    fps: float
    frame_count: int
    has_frames: bool
    markers: list[int] = Field(default_factory=list)


class AnchorOut(BaseModel):
    x: float
    y: float


class BoxOut(BaseModel):
    x: float
    y: float
    w: float
    h: float


class NodeOut(BaseModel):
    index: int
    kind: str
    type: str
    anchor: AnchorOut
    box: BoxOut | None = None
    track: int
    owner_track: int


class ElementsOut(BaseModel):
    video_id: str
    frame_index: int
    nodes: list[NodeOut]


class DiagnosticOut(BaseModel):
    severity: Literal["error", "warning"]
    location: str
    message: str


class ElementDeclIn(BaseModel):
    var: str
    kind: Literal["person", "body_part", "object"]
    type: str = "person"
    assoc: str | None = None


class ConstraintIn(BaseModel):
    kind: Literal["direction", "contact", "distance_order"]
    anchor: str | None = None
    target: str | None = None
    deg_min: float | None = None
    deg_max: float | None = None
    a: str | None = None
    b: str | None = None
    iou_min: float | None = None
    lesser: list[str] | None = None
    greater: list[str] | None = None


class StateIn(BaseModel):
    name: str
    elements: list[ElementDeclIn] = Field(default_factory=list)
    constraints: list[ConstraintIn] = Field(default_factory=list)


class EventIn(BaseModel):
    event_id: str
    action_label: str = ""
    states: list[StateIn] = Field(default_factory=list)
    intervals: list[float] = Field(default_factory=list)


class EventsPayload(BaseModel):
    """Events as DSL text or as structured objects; exactly one of the two."""

    dsl: str | None = None
    events: list[EventIn] | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.dsl is None) == (self.events is None):
            raise ValueError("provide exactly one of 'dsl' or 'events'")
        return self


class EventsOut(BaseModel):
    dsl: str
    events: list[dict]
    diagnostics: list[DiagnosticOut]


class RunRequest(BaseModel):
    event_ids: list[str] | None = None


class RunOut(BaseModel):
    run_id: int
    status: str
    event_ids: list[str]
    videos_total: int
    videos_done: int
    started_at: str | None = None
    finished_at: str | None = None
    error: str | None = None
    totals: dict | None = None
    videos: dict | None = None


class LabelOut(BaseModel):
    video: str
    frame: int
    event: str
    state: int
    instance: int


class LabelsOut(BaseModel):
    run_id: int
    labels: list[LabelOut]


class PreviewRequest(BaseModel):
    video: str
    frame: int
    state: StateIn | None = None
    event_id: str | None = None
    state_name: str | None = None

    @model_validator(mode="after")
    def _state_source(self):
        inline = self.state is not None
        by_ref = self.event_id is not None and self.state_name is not None
        if inline == by_ref:
            raise ValueError("provide either an inline 'state' or 'event_id' + 'state_name'")
        return self


class OutcomeOut(BaseModel):
    passed: bool
    constraint: dict
    measured: float | tuple[float, float] | None = None
    reason: str | None = None


class MismatchOut(BaseModel):
    matched: bool
    best_partial: int
    missing_types: list[str]
    failures: list[OutcomeOut]


class EmbeddingOut(BaseModel):
    state: str
    frame_index: int
    assignment: dict[str, int]  # var -> node index
    signature: dict[str, int]  # var -> track id


class PreviewOut(BaseModel):
    embeddings: list[EmbeddingOut]
    truncated: bool
    report: MismatchOut


class EvaluateRequest(BaseModel):
    run_id: int
    action: str | None = None


class MetricsOut(BaseModel):
    frame_precision: float
    instance_recall: float
    labeled_frames: int
    gt_instances: int
    hit_instances: int


class EvaluateOut(BaseModel):
    run_id: int
    metrics: dict[str, MetricsOut]  # keyed by action label


class StatsVideoOut(BaseModel):
    count: int
    positions: list[int]


class StatsOut(BaseModel):
    videos: dict[str, StatsVideoOut]
