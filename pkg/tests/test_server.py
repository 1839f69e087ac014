import time

import pytest
from fastapi.testclient import TestClient

from preftransfer.config import parse_run_config
from preftransfer.runner import build_engine
from preftransfer.server import create_app

BASE = {
    "env": "bandit4",
    "oracle": "emulated",
    "transfer": {"epsilon": 0.1, "max_episodes": 2, "inner_steps": 30,
                 "candidates_per_episode": 10},
    "irl": {"batch_episodes": 8, "demo_pairs_per_step": 32,
            "policy_step_size": 0.01, "disc_step_size": 0.003,
            "eval_every": 1000000000},
    "seeds": {"master": 3, "oracle": 1},
}


@pytest.fixture()
def client():
    return TestClient(create_app(parse_run_config(BASE)))


def wait_for(client, sid, predicate, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/sessions/{sid}").json()
        if predicate(body):
            return body
        time.sleep(0.05)
    raise TimeoutError(f"session {sid} never satisfied predicate; last: {body}")


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_unknown_session_404(client):
    assert client.get("/sessions/deadbeef").status_code == 404
    assert client.get("/sessions/deadbeef/query").status_code == 404
    assert client.post("/sessions/deadbeef/selection",
                       json={"kept": [], "dropped": []}).status_code == 404


def test_invalid_session_config_400(client):
    r = client.post("/sessions", json={"transfer": {"epsilon": 5.0}})
    assert r.status_code == 400
    assert "epsilon" in r.json()["error"]


def test_emulated_session_runs_to_completion(client):
    sid = client.post("/sessions", json={}).json()["id"]
    body = wait_for(client, sid, lambda b: b["status"].startswith("stopped")
                    or "error" in b)
    assert "error" not in body, body
    assert body["status"].startswith("stopped")
    assert len(body["history"]) == body["episode"]
    # completed sessions have no pending query
    assert client.get(f"/sessions/{sid}/query").status_code == 404
    # every completed episode's candidates were archived for rendering
    for ep in range(1, body["episode"] + 1):
        r = client.get(f"/sessions/{sid}/trajectories/{ep}")
        assert r.status_code == 200
        assert len(r.json()["candidates"]) == 10
    assert client.get(f"/sessions/{sid}/trajectories/99").status_code == 404


def test_human_session_protocol(client):
    sid = client.post("/sessions", json={"oracle": "human"}).json()["id"]
    wait_for(client, sid, lambda b: b["status"] == "awaiting_preference")

    q = client.get(f"/sessions/{sid}/query").json()
    assert q["episode"] == 1
    assert q["max_drops"] == 5
    assert len(q["candidates"]) == 10

    # malformed body
    r = client.post(f"/sessions/{sid}/selection", json={"kept": [0]})
    assert r.status_code == 400

    # constraint violation carries max_drops
    r = client.post(f"/sessions/{sid}/selection",
                    json={"kept": [0], "dropped": list(range(1, 10))})
    assert r.status_code == 400
    assert r.json()["max_drops"] == 5

    # valid selection
    r = client.post(f"/sessions/{sid}/selection",
                    json={"kept": list(range(5)), "dropped": list(range(5, 10))})
    assert r.status_code == 200

    # duplicate submission for the same query -> conflict
    r = client.post(f"/sessions/{sid}/selection",
                    json={"kept": list(range(5)), "dropped": list(range(5, 10))})
    assert r.status_code == 409

    body = wait_for(client, sid, lambda b: b["status"] != "running")
    assert body["history"][0]["drop_fraction"] == pytest.approx(0.5)


def test_api_session_matches_in_process_run(client):
    # the HTTP transport must not change the computation: an emulated API
    # session reproduces the in-process engine byte-for-byte
    sid = client.post("/sessions", json={}).json()["id"]
    body = wait_for(client, sid, lambda b: b["status"].startswith("stopped"))

    engine = build_engine(parse_run_config(BASE))
    engine.run()
    assert body["status"] == engine.session.status
    assert body["episode"] == engine.session.episode
    for got, want in zip(body["history"], engine.session.history):
        assert got["drop_fraction"] == want["drop_fraction"]
        assert got["mean_target_cost"] == pytest.approx(want["mean_target_cost"])
        assert got["query_count"] == want["query_count"]
