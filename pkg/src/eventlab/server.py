"""HTTP service over a project: the surface the UI and external tools use.

Reads are concurrent and side-effect free; mutations (event updates, run
starts) serialize through one lock. A single labeling run executes in a
background thread at a time, reporting monotone progress.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import FileResponse, PlainTextResponse

from . import schemas
from .errors import ParseError, RuleError, RunError, UndefinedMetricError
from .evaluation import compute_metrics, metrics_to_dict
from .ingest import load_detections
from .matcher import FrameGraph, build_frame_graph, explain_mismatch, match_state
from .project import Project, open_project, set_events
from .rules import (
    KeyEvent,
    RuleDiagnostic,
    StateDef,
    constraint_to_dict,
    event_from_dict,
    event_to_dict,
    parse_events,
    serialize_events,
    validate_events,
)
from .runner import (
    STATUS_DONE,
    RunRecord,
    execute_run,
    list_runs,
    load_run,
    prepare_run,
    read_labels,
    record_to_dict,
)
from .tracker import track_video


class ServiceState:
    def __init__(self, project: Project):
        self.project = project
        self.lock = threading.RLock()
        self.active_run: RunRecord | None = None
        self.run_thread: threading.Thread | None = None
        self._graph_cache: dict[str, dict[int, FrameGraph]] = {}

    def frame_graphs(self, video_id: str) -> dict[int, FrameGraph]:
        with self.lock:
            cached = self._graph_cache.get(video_id)
            if cached is not None:
                return cached
        meta = self.project.manifest.video(video_id)
        frames = load_detections(meta, self.project.configs.ingest)
        tracks = track_video(frames, self.project.configs.tracker)
        graphs = {
            fe.frame_index: build_frame_graph(
                fe, tracks, self.project.configs.ingest, video_id=video_id
            )
            for fe in frames
        }
        with self.lock:
            self._graph_cache[video_id] = graphs
        return graphs

    def invalidate_caches(self) -> None:
        with self.lock:
            self._graph_cache.clear()


def _diag_out(diags: list[RuleDiagnostic]) -> list[schemas.DiagnosticOut]:
    return [
        schemas.DiagnosticOut(severity=d.severity, location=d.location, message=d.message)
        for d in diags
    ]


def _events_out(state: ServiceState) -> schemas.EventsOut:
    project = state.project
    try:
        dsl = serialize_events(project.events)
    except RuleError:
        dsl = ""
    return schemas.EventsOut(
        dsl=dsl,
        events=[event_to_dict(e) for e in project.events],
        diagnostics=_diag_out(project.diagnostics),
    )


def _payload_to_events(payload: schemas.EventsPayload) -> list[KeyEvent]:
    if payload.dsl is not None:
        return parse_events(payload.dsl)
    return [event_from_dict(e.model_dump()) for e in payload.events or []]


def _run_out(record: RunRecord, verbose: bool = False) -> schemas.RunOut:
    doc = record_to_dict(record)
    return schemas.RunOut(
        run_id=record.run_id,
        status=record.status,
        event_ids=list(record.event_ids),
        videos_total=record.videos_total,
        videos_done=record.videos_done,
        started_at=record.started_at,
        finished_at=record.finished_at,
        error=record.error,
        totals=doc["totals"] if verbose else None,
        videos=doc["videos"] if verbose else None,
    )


def _outcome_out(outcome) -> schemas.OutcomeOut:
    return schemas.OutcomeOut(
        passed=outcome.passed,
        constraint=constraint_to_dict(outcome.constraint),
        measured=outcome.measured,
        reason=outcome.reason,
    )


def create_app(
    project_root: str | Path | None = None,
    project: Project | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    if project is None:
        if project_root is None:
            raise ValueError("create_app needs a project root or an open project")
        project = open_project(project_root)
    state = ServiceState(project)

    app = FastAPI(title="eventlab", version="0.1.0")
    app.state.service = state

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.get("/videos", response_model=list[schemas.VideoOut])
    def get_videos():
        return [
            schemas.VideoOut(
                video_id=v.video_id,
                fps=v.fps,
                frame_count=v.frame_count,
                has_frames=state.project.frames_dir_for(v.video_id) is not None,
                markers=state.project.markers.get(v.video_id, []),
            )
            for v in state.project.manifest.videos
        ]

    def _video_or_404(video_id: str):
        try:
            return state.project.manifest.video(video_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown video {video_id!r}")

    @app.get("/videos/{video_id}/frames/{frame}")
    def get_frame_image(video_id: str, frame: int):
        _video_or_404(video_id)
        frames_dir = state.project.frames_dir_for(video_id)
        if frames_dir is not None:
            path = frames_dir / f"{frame}.jpg"
            if path.is_file():
                return FileResponse(path, media_type="image/jpeg")
        raise HTTPException(status_code=404, detail="no still for this frame")

    @app.get("/videos/{video_id}/elements/{frame}", response_model=schemas.ElementsOut)
    def get_frame_elements(video_id: str, frame: int):
        meta = _video_or_404(video_id)
        if frame < 0 or frame >= meta.frame_count:
            raise HTTPException(status_code=404, detail="frame out of range")
        graphs = state.frame_graphs(video_id)
        g = graphs.get(frame)
        nodes = []
        if g is not None:
            for n in g.nodes:
                nodes.append(
                    schemas.NodeOut(
                        index=n.index,
                        kind=n.kind,
                        type=n.type,
                        anchor=schemas.AnchorOut(x=n.anchor.x, y=n.anchor.y),
                        box=None
                        if n.box is None
                        else schemas.BoxOut(x=n.box.x, y=n.box.y, w=n.box.w, h=n.box.h),
                        track=n.track,
                        owner_track=n.owner_track,
                    )
                )
        return schemas.ElementsOut(video_id=video_id, frame_index=frame, nodes=nodes)

    @app.get("/events", response_model=schemas.EventsOut)
    def get_events():
        return _events_out(state)

    @app.get("/events.pdl", response_class=PlainTextResponse)
    def get_events_dsl():
        return _events_out(state).dsl

    @app.put("/events", response_model=schemas.EventsOut)
    def put_events(payload: schemas.EventsPayload):
        with state.lock:
            try:
                events = _payload_to_events(payload)
            except ParseError as exc:
                raise HTTPException(
                    status_code=422,
                    detail={
                        "diagnostics": [
                            {
                                "severity": "error",
                                "location": f"dsl:{exc.line}:{exc.col}",
                                "message": exc.message,
                            }
                        ]
                    },
                )
            diagnostics = validate_events(events)
            if any(d.severity == "error" for d in diagnostics):
                raise HTTPException(
                    status_code=422,
                    detail={"diagnostics": [d.__dict__ for d in diagnostics]},
                )
            set_events(state.project, events)
        return _events_out(state)

    @app.post("/events/validate", response_model=list[schemas.DiagnosticOut])
    def post_validate(payload: schemas.EventsPayload):
        try:
            events = _payload_to_events(payload)
        except ParseError as exc:
            return _diag_out(
                [
                    RuleDiagnostic(
                        severity="error",
                        location=f"dsl:{exc.line}:{exc.col}",
                        message=exc.message,
                    )
                ]
            )
        return _diag_out(validate_events(events))

    @app.post("/runs", response_model=schemas.RunOut, status_code=201)
    def post_run(payload: schemas.RunRequest):
        with state.lock:
            if state.active_run is not None and state.active_run.status in ("queued", "running"):
                raise HTTPException(status_code=409, detail="a run is already executing")
            try:
                record = prepare_run(state.project, payload.event_ids)
            except RuleError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            except RunError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            state.active_run = record

            def _go():
                execute_run(state.project, record)

            thread = threading.Thread(target=_go, name=f"run-{record.run_id}", daemon=True)
            state.run_thread = thread
            thread.start()
        return _run_out(record)

    @app.get("/runs", response_model=list[schemas.RunOut])
    def get_runs():
        with state.lock:
            active = state.active_run
        records = {r.run_id: r for r in list_runs(state.project)}
        if active is not None:
            records[active.run_id] = active
        return [_run_out(records[k]) for k in sorted(records)]

    def _run_or_404(run_id: int) -> RunRecord:
        with state.lock:
            active = state.active_run
        if active is not None and active.run_id == run_id:
            return active
        try:
            return load_run(state.project, run_id)
        except RunError:
            raise HTTPException(status_code=404, detail=f"no such run {run_id}")

    @app.get("/runs/{run_id}", response_model=schemas.RunOut)
    def get_run(run_id: int):
        return _run_out(_run_or_404(run_id), verbose=True)

    @app.get("/runs/{run_id}/labels", response_model=schemas.LabelsOut)
    def get_run_labels(run_id: int, video: str | None = Query(default=None)):
        record = _run_or_404(run_id)
        if record.status != STATUS_DONE:
            raise HTTPException(status_code=409, detail=f"run {run_id} is {record.status}")
        labels = read_labels(record.labels_path)
        if video is not None:
            labels = [l for l in labels if l.video_id == video]
        return schemas.LabelsOut(
            run_id=run_id,
            labels=[
                schemas.LabelOut(
                    video=l.video_id,
                    frame=l.frame_index,
                    event=l.event_id,
                    state=l.state_index,
                    instance=l.instance_id,
                )
                for l in labels
            ],
        )

    @app.get("/runs/{run_id}/stats", response_model=schemas.StatsOut)
    def get_run_stats(run_id: int):
        record = _run_or_404(run_id)
        if record.status != STATUS_DONE:
            raise HTTPException(status_code=409, detail=f"run {run_id} is {record.status}")
        import json as _json

        return schemas.StatsOut(**_json.loads(record.stats_path.read_text(encoding="utf-8")))

    def _resolve_preview_state(payload: schemas.PreviewRequest) -> StateDef:
        if payload.state is not None:
            event = event_from_dict(
                {
                    "event_id": "preview",
                    "action_label": "",
                    "states": [payload.state.model_dump()],
                    "intervals": [],
                }
            )
            diags = [d for d in validate_events([event]) if d.severity == "error"]
            if diags:
                raise HTTPException(status_code=422, detail={"diagnostics": [d.__dict__ for d in diags]})
            return event.states[0]
        for event in state.project.events:
            if event.event_id == payload.event_id:
                for s in event.states:
                    if s.name == payload.state_name:
                        return s
        raise HTTPException(status_code=404, detail="unknown event or state")

    @app.post("/match/preview", response_model=schemas.PreviewOut)
    def post_preview(payload: schemas.PreviewRequest):
        meta = _video_or_404(payload.video)
        if payload.frame < 0 or payload.frame >= meta.frame_count:
            raise HTTPException(status_code=404, detail="frame out of range")
        target = _resolve_preview_state(payload)
        graphs = state.frame_graphs(payload.video)
        g = graphs.get(payload.frame)
        if g is None:
            g = FrameGraph(video_id=payload.video, frame_index=payload.frame, nodes=())
        cap = state.project.configs.matcher.max_embeddings_per_frame
        embeddings = match_state(target, g, state.project.configs.geometry, limit=cap + 1)
        truncated = len(embeddings) > cap
        embeddings = embeddings[:cap]
        report = explain_mismatch(target, g, state.project.configs.geometry)
        return schemas.PreviewOut(
            embeddings=[
                schemas.EmbeddingOut(
                    state=e.state,
                    frame_index=e.frame_index,
                    assignment={v: n.index for v, n in e.assignment.items()},
                    signature=dict(e.signature),
                )
                for e in embeddings
            ],
            truncated=truncated,
            report=schemas.MismatchOut(
                matched=report.matched,
                best_partial=report.best_partial,
                missing_types=list(report.missing_types),
                failures=[_outcome_out(o) for o in report.failures],
            ),
        )

    @app.post("/evaluate", response_model=schemas.EvaluateOut)
    def post_evaluate(payload: schemas.EvaluateRequest):
        record = _run_or_404(payload.run_id)
        if record.status != STATUS_DONE:
            raise HTTPException(status_code=409, detail=f"run {payload.run_id} is {record.status}")
        gt = state.project.groundtruth
        if not gt:
            raise HTTPException(status_code=422, detail="no ground truth in project")
        labels = read_labels(record.labels_path)
        events_by_id = {e.event_id: e for e in state.project.events}
        actions = sorted(
            {
                events_by_id[eid].action_label
                for eid in record.event_ids
                if eid in events_by_id
            }
        )
        if payload.action is not None:
            actions = [a for a in actions if a == payload.action]
        metrics: dict[str, schemas.MetricsOut] = {}
        for action in actions:
            event_ids = {e.event_id for e in state.project.events if e.action_label == action}
            action_labels = [l for l in labels if l.event_id in event_ids]
            try:
                m = compute_metrics(action_labels, gt, action)
            except UndefinedMetricError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            metrics[action] = schemas.MetricsOut(**metrics_to_dict(m))
        return schemas.EvaluateOut(run_id=payload.run_id, metrics=metrics)

    return app
