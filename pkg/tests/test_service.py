import json

import pytest
from fastapi.testclient import TestClient

from runform.motion_io import serialize_motion
from runform.service import create_app
from runform.synth import GaitParams, synth_gait


@pytest.fixture(scope="module")
def docs():
    sample = synth_gait(GaitParams(stance_fraction=0.46, n_cycles=4)).sequence
    exemplar = synth_gait(GaitParams(n_cycles=4)).sequence
    return serialize_motion(sample), serialize_motion(exemplar)


@pytest.fixture()
def client(tmp_path):
    app = create_app(store_path=tmp_path / "sessions", ui_dir=tmp_path / "no-ui")
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def session_id(client, docs):
    sample, exemplar = docs
    resp = client.post("/sessions", json={"sample": sample, "exemplar": exemplar})
    assert resp.status_code == 200, resp.text
    return resp.json()["id"]


class TestSessions:
    def test_create_and_fetch_report(self, client, session_id):
        resp = client.get(f"/sessions/{session_id}/report")
        assert resp.status_code == 200
        report = resp.json()
        assert report["version"] == "1"
        names = {s["name"] for s in report["suggestions"]}
        assert "foot contact time (right)" in names

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/nope/report").status_code == 404

    def test_profile_endpoint(self, client, session_id):
        resp = client.get(f"/sessions/{session_id}/profile")
        assert resp.status_code == 200
        assert {"sample", "exemplar"} <= set(resp.json())

    def test_delete_session(self, client, session_id):
        assert client.delete(f"/sessions/{session_id}").json() == {"deleted": True}
        assert client.get(f"/sessions/{session_id}/report").status_code == 404

    def test_list_sessions(self, client, session_id):
        assert session_id in client.get("/sessions").json()["sessions"]

    def test_skeleton_endpoint(self, client):
        doc = client.get("/skeleton").json()
        assert len(doc) == 24
        assert doc[0]["name"] == "pelvis"

    def test_malformed_sample_is_422(self, client, docs):
        _, exemplar = docs
        bad = {"version": "1", "fps": 30}
        resp = client.post("/sessions", json={"sample": bad, "exemplar": exemplar})
        assert resp.status_code == 422

    def test_gaitless_input_is_422_with_stage(self, client, docs):
        sample, _ = docs
        frozen = {
            "version": "1",
            "fps": 30.0,
            "skeleton": sample["skeleton"],
            "frames": [
                {"q": sample["frames"][0]["q"], "t": [0.0, 1.0, 0.1 * i]}
                for i in range(40)
            ],
        }
        resp = client.post("/sessions", json={"sample": sample, "exemplar": frozen})
        assert resp.status_code == 422
        assert resp.json()["stage"] == "segmentation"


class TestAttributes:
    def test_add_attribute_updates_report(self, client, session_id):
        meta = {
            "name": "my elbow",
            "class": "angular",
            "subtype": "A1",
            "jA": "left_shoulder",
            "jO": "left_elbow",
            "jB": "left_wrist",
            "axis": None,
            "side": "left",
            "phase": 0.5,
        }
        resp = client.post(f"/sessions/{session_id}/attributes", json=meta)
        assert resp.status_code == 200
        names = [r["name"] for r in resp.json()["attributes"]]
        assert "my elbow" in names

    def test_invalid_attribute_errors_carry_field_paths(self, client, session_id):
        meta = {"name": "broken", "class": "positional", "subtype": "P2",
                "jA": "pelvis", "jO": "left_knee", "jB": None, "axis": None,
                "side": "left", "phase": None}
        resp = client.post(f"/sessions/{session_id}/attributes", json=meta)
        assert resp.status_code == 422
        fields = {e["field"] for e in resp.json()["errors"]}
        assert "axis" in fields

    def test_duplicate_name_rejected(self, client, session_id):
        meta = {"name": "elbow angle (left)", "class": "angular", "subtype": "A1",
                "jA": "left_shoulder", "jO": "left_elbow", "jB": "left_wrist",
                "axis": None, "side": "left", "phase": None}
        resp = client.post(f"/sessions/{session_id}/attributes", json=meta)
        assert resp.status_code == 422
        assert any("already defined" in e["message"] for e in resp.json()["errors"])


class TestAnimations:
    def test_animation_for_each_suggestion(self, client, session_id):
        report = client.get(f"/sessions/{session_id}/report").json()
        assert report["suggestions"]
        for sugg in report["suggestions"]:
            resp = client.get(f"/sessions/{session_id}/animations/{sugg['id']}")
            assert resp.status_code == 200
            doc = resp.json()
            assert doc["id"] == sugg["id"]
            assert doc["durationFrames"] >= 2
            assert "viewpoint" in doc and "marker" in doc

    def test_animation_bytes_stable_across_calls(self, client, session_id):
        report = client.get(f"/sessions/{session_id}/report").json()
        sid = report["suggestions"][0]["id"]
        a = client.get(f"/sessions/{session_id}/animations/{sid}").content
        b = client.get(f"/sessions/{session_id}/animations/{sid}").content
        assert a == b

    def test_unknown_animation_is_404(self, client, session_id):
        resp = client.get(f"/sessions/{session_id}/animations/not-here")
        assert resp.status_code == 404


def test_store_survives_restart(tmp_path, docs):
    sample, exemplar = docs
    store_dir = tmp_path / "sessions"
    app = create_app(store_path=store_dir, ui_dir=tmp_path / "no-ui")
    with TestClient(app) as c:
        sid = c.post("/sessions", json={"sample": sample, "exemplar": exemplar}).json()["id"]
        before = c.get(f"/sessions/{sid}/report").content

    fresh = create_app(store_path=store_dir, ui_dir=tmp_path / "no-ui")
    with TestClient(fresh) as c:
        after = c.get(f"/sessions/{sid}/report").content
    assert before == after
