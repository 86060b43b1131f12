from __future__ import annotations

import time

import pytest
from fastapi.testclient import TestClient

import synthetic
from eventlab.runner import RunRecord
from eventlab.server import create_app


@pytest.fixture
def client(serve_project):
    app = create_app(serve_project)
    with TestClient(app) as c:
        yield c


def _wait_done(client: TestClient, run_id: int, timeout: float = 30.0) -> list[dict]:
    """Poll a run to completion, returning the progress sequence."""
    seen = []
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/runs/{run_id}").json()
        seen.append(body)
        if body["status"] in ("done", "failed"):
            return seen
        time.sleep(0.05)
    raise AssertionError("run did not finish in time")


class TestVideos:
    def test_list(self, client):
        body = client.get("/videos").json()
        assert [(v["video_id"], v["fps"], v["frame_count"]) for v in body] == [
            ("v1", 50.0, 600),
            ("v2", 50.0, 600),
        ]
        assert body[0]["markers"] == [100, 114]

    def test_elements_counts(self, client):
        # Frame 100: 3 persons + 51 parts + table + ball.
        nodes = client.get("/videos/v1/elements/100").json()["nodes"]
        assert len(nodes) == 56
        kinds = {n["kind"] for n in nodes}
        assert kinds == {"person", "body_part", "object"}
        # Frame 98: no ball yet, and the spectator's left ankle is gated
        # (98 % 7 == 0), so 3 persons + 50 parts + table.
        nodes98 = client.get("/videos/v1/elements/98").json()["nodes"]
        assert len(nodes98) == 54

    def test_elements_unknown_video(self, client):
        assert client.get("/videos/ghost/elements/0").status_code == 404

    def test_frame_image_missing(self, client):
        assert client.get("/videos/v1/frames/0").status_code == 404

    def test_frame_image_served(self, serve_project):
        frames_dir = serve_project / "frames" / "v1"
        frames_dir.mkdir(parents=True)
        (frames_dir / "7.jpg").write_bytes(b"\xff\xd8fakejpeg")
        with TestClient(create_app(serve_project)) as client:
            resp = client.get("/videos/v1/frames/7")
            assert resp.status_code == 200
            assert resp.content.startswith(b"\xff\xd8")


class TestEvents:
    def test_get_events(self, client):
        body = client.get("/events").json()
        assert [e["event_id"] for e in body["events"]] == ["serve_front", "serve_back"]
        assert "event serve_front {" in body["dsl"]
        assert body["diagnostics"] == []

    def test_put_invalid_dsl_reports_position(self, client):
        resp = client.put("/events", json={"dsl": "event e {\n  action }"})
        assert resp.status_code == 422
        diag = resp.json()["detail"]["diagnostics"][0]
        assert diag["location"].startswith("dsl:2:")

    def test_put_dsl_then_get(self, client):
        resp = client.put("/events", json={"dsl": synthetic.EVENTS_DSL})
        assert resp.status_code == 200
        assert [e["event_id"] for e in resp.json()["events"]] == ["serve_front", "serve_back"]

    def test_put_structured(self, client):
        events = client.get("/events").json()["events"]
        resp = client.put("/events", json={"events": events[:1]})
        assert resp.status_code == 200
        assert [e["event_id"] for e in client.get("/events").json()["events"]] == ["serve_front"]

    def test_put_requires_exactly_one_form(self, client):
        assert client.put("/events", json={}).status_code == 422

    def test_validate_endpoint(self, client):
        src = 'event e { action "a" state st { person P dir(P -> Q) in [0 deg, 10 deg] } }'
        body = client.post("/events/validate", json={"dsl": src}).json()
        assert body[0]["severity"] == "error"
        assert "undeclared" in body[0]["message"]

    def test_read_endpoints_side_effect_free(self, client, serve_project):
        before = (serve_project / "events.pdl").read_bytes()
        first = client.get("/events").json()
        second = client.get("/events").json()
        assert first == second
        assert (serve_project / "events.pdl").read_bytes() == before


class TestRuns:
    def test_run_lifecycle_and_progress(self, client):
        resp = client.post("/runs", json={})
        assert resp.status_code == 201
        run_id = resp.json()["run_id"]
        polls = _wait_done(client, run_id)
        assert polls[-1]["status"] == "done"
        progress = [p["videos_done"] for p in polls]
        assert progress == sorted(progress), "progress must be nondecreasing"
        assert polls[-1]["videos_done"] == 2
        assert polls[-1]["totals"]["instances"] == 4

    def test_labels_endpoint_with_filter(self, client):
        run_id = client.post("/runs", json={}).json()["run_id"]
        _wait_done(client, run_id)
        body = client.get(f"/runs/{run_id}/labels", params={"video": "v1"}).json()
        assert len(body["labels"]) == 26
        assert {l["video"] for l in body["labels"]} == {"v1"}
        all_labels = client.get(f"/runs/{run_id}/labels").json()["labels"]
        assert len(all_labels) == 52

    def test_stats_endpoint(self, client):
        run_id = client.post("/runs", json={}).json()["run_id"]
        _wait_done(client, run_id)
        stats = client.get(f"/runs/{run_id}/stats").json()
        assert stats["videos"]["v1"]["count"] == 26
        assert stats["videos"]["v2"]["positions"][0] == 100

    def test_conflict_while_running(self, client):
        service = client.app.state.service
        service.active_run = RunRecord(run_id=99, event_ids=[], status="running")
        try:
            assert client.post("/runs", json={}).status_code == 409
        finally:
            service.active_run = None

    def test_unknown_run(self, client):
        assert client.get("/runs/12345").status_code == 404

    def test_run_with_selected_events(self, client):
        run_id = client.post("/runs", json={"event_ids": ["serve_front"]}).json()["run_id"]
        polls = _wait_done(client, run_id)
        assert polls[-1]["totals"]["instances"] == 2

    def test_unknown_event_rejected(self, client):
        assert client.post("/runs", json={"event_ids": ["nope"]}).status_code == 422

    def test_service_and_cli_outputs_byte_identical(self, client, serve_project):
        from eventlab.cli import dispatch

        run_id = client.post("/runs", json={}).json()["run_id"]
        _wait_done(client, run_id)
        assert dispatch(["label", "--project", str(serve_project)]) == 0
        service_bytes = (serve_project / "runs" / str(run_id) / "labels.jsonl").read_bytes()
        cli_bytes = (serve_project / "runs" / str(run_id + 1) / "labels.jsonl").read_bytes()
        assert service_bytes == cli_bytes and len(service_bytes) > 0


class TestPreviewAndEvaluate:
    def test_preview_matching_frame(self, client):
        resp = client.post(
            "/match/preview",
            json={"video": "v1", "frame": 100, "event_id": "serve_front", "state_name": "hold"},
        )
        body = resp.json()
        assert len(body["embeddings"]) == 1
        assert body["report"]["matched"] is True
        assignment = body["embeddings"][0]["assignment"]
        assert set(assignment) == {"P1", "P2", "B", "T", "H", "RW"}

    def test_preview_mismatch_reports_missing_ball(self, client):
        resp = client.post(
            "/match/preview",
            json={"video": "v1", "frame": 50, "event_id": "serve_front", "state_name": "hold"},
        )
        body = resp.json()
        assert body["embeddings"] == []
        assert "ball" in body["report"]["missing_types"]

    def test_preview_inline_state_with_failure_measured(self, client):
        state = {
            "name": "probe",
            "elements": [
                {"var": "P1", "kind": "person", "type": "person"},
                {"var": "H", "kind": "body_part", "type": "nose", "assoc": "P1"},
                {"var": "B", "kind": "object", "type": "ball"},
            ],
            "constraints": [
                {"kind": "direction", "anchor": "H", "target": "B", "deg_min": 0.0, "deg_max": 5.0}
            ],
        }
        body = client.post(
            "/match/preview", json={"video": "v1", "frame": 100, "state": state}
        ).json()
        assert body["embeddings"] == []
        failures = body["report"]["failures"]
        assert failures and failures[0]["constraint"]["kind"] == "direction"
        assert failures[0]["measured"] is not None

    def test_preview_requires_state_or_ref(self, client):
        assert client.post("/match/preview", json={"video": "v1", "frame": 0}).status_code == 422

    def test_evaluate_fixture(self, client):
        run_id = client.post("/runs", json={}).json()["run_id"]
        _wait_done(client, run_id)
        body = client.post("/evaluate", json={"run_id": run_id}).json()
        metrics = body["metrics"]["serve"]
        assert metrics["frame_precision"] == 1.0
        assert metrics["instance_recall"] == 1.0
        assert metrics["gt_instances"] == 4

    def test_evaluate_without_groundtruth(self, tmp_path):
        root = synthetic.build_project(tmp_path / "nogt", with_groundtruth=False)
        with TestClient(create_app(root)) as client:
            run_id = client.post("/runs", json={"event_ids": []}).json()["run_id"]
            _wait_done(client, run_id)
            resp = client.post("/evaluate", json={"run_id": run_id})
            assert resp.status_code == 422
            assert "ground truth" in resp.json()["detail"]
