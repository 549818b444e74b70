"""HTTP API tests: lifecycle, jobs, edits, conflicts, exports."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from rostra.service import create_app


def ward_doc():
    return {
        "schema": "ward-config/1",
        "month": {"year": 2024, "month": 11, "holidays": ["2024-11-04"]},
        "off_quota": 4,
        "nurses": [
            {"id": "a", "group": 1, "day_leader": True},
            {"id": "b", "group": 2, "day_leader": True},
            {"id": "c", "group": 3, "day_leader": True},
        ],
        "staffing": {
            "night": {"total": {"lb": 1, "ub": 1}},
            "day": {"total": {"lb": 1, "ub": 3}},
        },
    }


def wish_csv(days):
    header = "nurse," + ",".join(d.isoformat() for d in days)
    rows = []
    for nid in ("a", "b", "c"):
        cells = []
        for i, _d in enumerate(days):
            cells.append("OFF" if i < 5 or i >= len(days) - 5 else "")
        rows.append(nid + "," + ",".join(cells))
    return "\n".join([header] + rows) + "\n"


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=tmp_path / "data", max_workers=2)
    with TestClient(app) as c:
        yield c


def _create(client):
    from rostra.calendars import build_calendar

    cal = build_calendar(2024, 11, holidays=[])
    body = {
        "condition_file": json.dumps(ward_doc()),
        "wish_table": wish_csv(cal.days),
        "session_id": "w1",
    }
    r = client.post("/sessions", json=body)
    assert r.status_code == 200, r.text
    return r.json()


def _wait(client, job_id, timeout=120):
    deadline = time.time() + timeout
    while time.time() < deadline:
        r = client.get(f"/jobs/{job_id}")
        assert r.status_code == 200
        doc = r.json()
        if doc["status"] in ("done", "failed"):
            return doc
        time.sleep(0.1)
    raise AssertionError("job did not finish in time")


def test_full_happy_path(client):
    created = _create(client)
    sid = created["session_id"]

    # probe: clean
    job = client.post(f"/sessions/{sid}/probe", json={"stage": "night"}).json()
    done = _wait(client, job["job_id"])
    assert done["status"] == "done" and done["result"]["clean"]

    # night solve
    job = client.post(f"/sessions/{sid}/solve/night",
                      json={"time_limit": 3, "seed": 5}).json()
    done = _wait(client, job["job_id"])
    assert done["status"] == "done", done
    assert done["result"]["hard_violations"] == 0

    info = client.get(f"/sessions/{sid}").json()
    assert info["phase"] == "night_solved"

    # empty edit batch, then a real one
    r = client.post(f"/sessions/{sid}/edits",
                    json={"revision": 0, "edits": []})
    assert r.status_code == 200

    roster = client.get(f"/sessions/{sid}/roster").json()
    day = roster["roster"]["days"][7]
    r = client.post(f"/sessions/{sid}/edits", json={
        "revision": roster["revision"],
        "edits": [{"nurse": "a", "date": day, "shift": "SOFF"}],
    })
    assert r.status_code == 200
    rev = r.json()["revision"]
    assert rev == roster["revision"] + 1

    # stale revision is rejected
    r = client.post(f"/sessions/{sid}/edits", json={
        "revision": rev - 1,
        "edits": [{"nurse": "a", "date": day, "shift": "OFF"}],
    })
    assert r.status_code == 409

    # post-process, then day solve
    r = client.post(f"/sessions/{sid}/post-process")
    assert r.status_code == 200 and r.json()["phase"] == "day_ready"

    job = client.post(f"/sessions/{sid}/solve/day",
                      json={"time_limit": 3, "seed": 5}).json()
    done = _wait(client, job["job_id"])
    assert done["status"] == "done", done

    final = client.get(f"/sessions/{sid}/reports/final")
    assert final.status_code == 200
    doc = final.json()["document"]
    assert doc["objective"]["total"] >= 0
    # the edited cell survived into the final roster
    csv_out = client.get(f"/sessions/{sid}/export/roster.csv").text
    assert "SOFF" in csv_out

    # incumbent trace is non-increasing
    trace = done["progress"]["trace"]
    assert all(b[1] <= a[1] for a, b in zip(trace, trace[1:]))


def test_wrong_phase_conflicts(client):
    created = _create(client)
    sid = created["session_id"]
    r = client.post(f"/sessions/{sid}/solve/day", json={})
    assert r.status_code == 409
    r = client.post(f"/sessions/{sid}/edits",
                    json={"revision": 0,
                          "edits": [{"nurse": "a", "date": "2024-11-05",
                                     "shift": "OFF"}]})
    assert r.status_code == 409


def test_edit_during_solve_conflicts(client):
    created = _create(client)
    sid = created["session_id"]
    job = client.post(f"/sessions/{sid}/solve/night",
                      json={"time_limit": 5, "seed": 1}).json()
    r = client.post(f"/sessions/{sid}/edits",
                    json={"revision": 0, "edits": []})
    assert r.status_code == 409
    assert "busy" in r.json()["detail"]
    _wait(client, job["job_id"])


def test_unknown_ids_404(client):
    assert client.get("/sessions/ghost").status_code == 404
    assert client.get("/jobs/ghost").status_code == 404
    assert client.get("/sessions/ghost/roster").status_code == 404


def test_invalid_inputs_422(client):
    r = client.post("/sessions", json={
        "condition_file": "{}", "wish_table": "x"})
    assert r.status_code == 422


def test_duplicate_session_409(client):
    _create(client)
    from rostra.calendars import build_calendar

    cal = build_calendar(2024, 11)
    r = client.post("/sessions", json={
        "condition_file": json.dumps(ward_doc()),
        "wish_table": wish_csv(cal.days),
        "session_id": "w1",
    })
    assert r.status_code == 409


def test_token_auth(tmp_path):
    app = create_app(data_dir=tmp_path / "data", token="sekrit")
    with TestClient(app) as client:
        assert client.get("/sessions").status_code == 401
        ok = client.get("/sessions",
                        headers={"Authorization": "Bearer sekrit"})
        assert ok.status_code == 200


def test_snapshot_survives_restart(tmp_path):
    app = create_app(data_dir=tmp_path / "data")
    with TestClient(app) as client:
        created = _create(client)
        sid = created["session_id"]
        job = client.post(f"/sessions/{sid}/solve/night",
                          json={"time_limit": 2, "seed": 3}).json()
        _wait(client, job["job_id"])

    # a fresh app over the same data dir sees the finalized state
    app2 = create_app(data_dir=tmp_path / "data")
    with TestClient(app2) as client2:
        info = client2.get(f"/sessions/{sid}")
        assert info.status_code == 200
        assert info.json()["phase"] == "night_solved"


def test_catalog_and_instance_export(client):
    created = _create(client)
    sid = created["session_id"]
    rows = client.get(f"/sessions/{sid}/catalog?stage=night").json()
    assert len(rows["constraints"]) == 49
    lp = client.get(f"/sessions/{sid}/export/instance.lp").text
    assert lp.startswith("\\ rostra_night")
