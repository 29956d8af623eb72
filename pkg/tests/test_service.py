"""HTTP contract: status codes, JSON schemas, session lifecycle,
persistence across restarts, and per-session serialization."""

import concurrent.futures
import json

import pytest
from fastapi.testclient import TestClient

import regex2dpl.service as service
from regex2dpl.optimize import LlmConfig, Suggestion
from regex2dpl.service import create_app

FIG_REGEX = r"(?<addr>\d{1,3}\.\d{1,3}\.\d{1,3}\.\d{1,3}).*\s+(?<rc>\d{3})"
FIG_DPL = '(DIGIT{1,3} "." DIGIT{1,3} "." DIGIT{1,3} "." DIGIT{1,3}):addr LD* SPACE+ DIGIT{3}:rc'


@pytest.fixture(autouse=True)
def no_llm_env(monkeypatch):
    # keep the optimize endpoint deterministic regardless of the host env
    monkeypatch.delenv("LLM_ENDPOINT", raising=False)


@pytest.fixture()
def client():
    return TestClient(create_app())


def convert(client, regex: str) -> dict:
    response = client.post("/api/convert", json={"regex": regex})
    assert response.status_code == 200, response.text
    return response.json()


def test_health(client):
    body = client.get("/api/health").json()
    assert body["status"] == "ok"
    assert body["sessions"] == 0


def test_convert_returns_session_view(client):
    body = convert(client, FIG_REGEX)
    assert isinstance(body["session"], str) and body["session"]
    assert body["regex"] == FIG_REGEX
    assert body["classification"] == "best-effort"
    assert body["dpl"] == FIG_DPL
    assert body["revision"] == 0
    assert body["suggestions"] == [] and body["applied"] == []
    assert body["report"] is None

    fragments = body["fragments"]
    assert len(fragments) == 4
    for fragment in fragments:
        assert set(fragment) == {"span", "dpl_span", "text", "strategy", "unsafe_reason"}
        a, b = fragment["dpl_span"]
        assert body["dpl"][a:b] == fragment["text"]
    # the quad-octet group spans the start of the regex and of the pattern
    assert fragments[0]["span"][0] == 0
    assert fragments[0]["text"].endswith(":addr")
    assert fragments[1]["unsafe_reason"] is not None  # the dot scan


def test_convert_syntax_error_carries_position(client):
    response = client.post("/api/convert", json={"regex": "(a"})
    assert response.status_code == 400
    body = response.json()
    assert body["error"] == "syntax"
    assert body["position"] == 2


def test_convert_impossible_carries_reason(client):
    response = client.post("/api/convert", json={"regex": "(?<a>b)*"})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "impossible"
    assert body["reason"] == "quantified named capturing group"

    response = client.post("/api/convert", json={"regex": "(?!x)y"})
    assert response.status_code == 422
    assert "negative lookahead" in response.json()["reason"]


def test_convert_rejects_bad_bodies(client):
    response = client.post(
        "/api/convert", content=b"{oops", headers={"content-type": "application/json"}
    )
    assert response.status_code == 400
    assert response.json()["error"] == "bad-request"
    for payload in ({}, {"regex": ""}, {"regex": 5}):
        assert client.post("/api/convert", json=payload).status_code == 400
    assert client.post("/api/convert", json=[1, 2]).status_code == 400


def test_session_get_round_trips_the_view(client):
    body = convert(client, FIG_REGEX)
    again = client.get("/api/session/%s" % body["session"])
    assert again.status_code == 200
    assert again.json() == body
    assert client.get("/api/session/nope").status_code == 404


def test_validate_is_deterministic_and_cached(client):
    session = convert(client, r"(?<rc>\d{3})")["session"]
    first = client.post(
        "/api/validate", json={"session": session, "n_pos": 20, "n_neg": 20, "seed": 7}
    )
    assert first.status_code == 200
    report = first.json()
    assert report["passed"] is True
    # distinct cases only, so totals may fall just short of the request
    assert 1 <= report["positives"]["total"] <= 20
    assert report["positives"]["passed"] == report["positives"]["total"]
    assert report["negatives"]["passed"] == report["negatives"]["total"]

    second = client.post(
        "/api/validate", json={"session": session, "n_pos": 20, "n_neg": 20, "seed": 7}
    ).json()
    for key in ("passed", "positives", "negatives", "failures", "diagnostics"):
        assert second[key] == report[key]
    assert second["revision"] == report["revision"] + 1

    view = client.get("/api/session/%s" % session).json()
    assert view["report"]["passed"] is True


def test_validate_lists_failing_cases_for_best_effort(client):
    session = convert(client, r"\w+[a-z]")["session"]
    report = client.post(
        "/api/validate", json={"session": session, "n_pos": 10, "n_neg": 10, "seed": 0}
    ).json()
    assert report["passed"] is False
    failing = [case for case in report["failures"] if not case["passed"]]
    assert failing
    assert {"input", "kind", "regex_outcome", "dpl_outcome"} <= set(failing[0])


def test_validate_unknown_session(client):
    response = client.post("/api/validate", json={"session": "missing"})
    assert response.status_code == 404
    assert response.json()["error"] == "unknown-session"


def test_optimize_without_endpoint_uses_heuristic(client):
    session = convert(client, FIG_REGEX)["session"]
    response = client.post("/api/optimize", json={"session": session})
    assert response.status_code == 200
    body = response.json()
    assert [s["matcher"] for s in body["suggestions"]] == ["IPADDR", "INT"]
    assert {s["source"] for s in body["suggestions"]} == {"heuristic"}
    assert body["diagnostics"] == []

    view = client.get("/api/session/%s" % session).json()
    assert view["suggestions"] == body["suggestions"]
    assert client.post("/api/optimize", json={"session": "x"}).status_code == 404


def test_apply_toggles_and_rechecks(client):
    session = convert(client, FIG_REGEX)["session"]
    client.post("/api/optimize", json={"session": session})

    on = client.post("/api/apply", json={"session": session, "suggestion": 1})
    assert on.status_code == 200
    body = on.json()
    assert body["dpl"].endswith("INT:rc")
    assert body["applied"] == [1]
    assert body["syntax"] == []

    off = client.post("/api/apply", json={"session": session, "suggestion": 1}).json()
    assert off["dpl"] == FIG_DPL
    assert off["applied"] == []

    both = client.post("/api/apply", json={"session": session, "suggestion": 0}).json()
    assert both["dpl"].startswith("IPADDR:addr")


def test_apply_rejects_unknown_suggestion_index(client):
    session = convert(client, FIG_REGEX)["session"]
    # nothing pending yet
    assert client.post("/api/apply", json={"session": session, "suggestion": 0}).status_code == 409
    client.post("/api/optimize", json={"session": session})
    response = client.post("/api/apply", json={"session": session, "suggestion": 99})
    assert response.status_code == 409
    assert response.json()["error"] == "unknown-suggestion"
    assert client.post("/api/apply", json={"session": "x", "suggestion": 0}).status_code == 404


def test_revision_strictly_increases(client):
    session = convert(client, FIG_REGEX)["session"]
    revisions = [0]
    revisions.append(client.post("/api/optimize", json={"session": session}).json()["revision"])
    revisions.append(
        client.post("/api/apply", json={"session": session, "suggestion": 0}).json()["revision"]
    )
    revisions.append(
        client.post(
            "/api/validate", json={"session": session, "n_pos": 5, "n_neg": 5}
        ).json()["revision"]
    )
    assert revisions == sorted(set(revisions))
    assert revisions[-1] == 3


def test_unreachable_llm_endpoint_is_a_502():
    app = create_app(llm_config=LlmConfig(endpoint="http://127.0.0.1:9/v1/chat", timeout_ms=2000))
    client = TestClient(app)
    session = convert(client, FIG_REGEX)["session"]
    response = client.post("/api/optimize", json={"session": session})
    assert response.status_code == 502
    assert response.json()["error"] == "llm-failure"


def test_llm_sourced_suggestions_flow_through(client, monkeypatch):
    def fake_suggest(pattern, client_obj=None):
        return [Suggestion(0, "IPADDR", "from model", "llm")], ["dropped one entry"]

    monkeypatch.setattr(service, "suggest", fake_suggest)
    session = convert(client, FIG_REGEX)["session"]
    body = client.post("/api/optimize", json={"session": session}).json()
    assert body["suggestions"] == [
        {"fragment": 0, "matcher": "IPADDR", "rationale": "from model", "source": "llm"}
    ]
    assert body["diagnostics"] == ["dropped one entry"]


def test_restart_restores_identical_state(tmp_path):
    client = TestClient(create_app(data_dir=tmp_path))
    session = convert(client, FIG_REGEX)["session"]
    client.post("/api/optimize", json={"session": session})
    client.post("/api/apply", json={"session": session, "suggestion": 1})
    view = client.get("/api/session/%s" % session).json()

    snapshots = (tmp_path / ("%s.jsonl" % session)).read_text().splitlines()
    assert len(snapshots) == 3  # convert, optimize, apply
    assert json.loads(snapshots[-1])["dpl"] == view["dpl"]

    reopened = TestClient(create_app(data_dir=tmp_path))
    assert reopened.get("/api/session/%s" % session).json() == view
    assert reopened.get("/api/health").json()["sessions"] == 1


def test_alphabet_flag_bounds_negative_sampling():
    client = TestClient(create_app(alphabet="ab01"))
    session = convert(client, "[ab]{2}")["session"]
    report = client.post(
        "/api/validate", json={"session": session, "n_pos": 4, "n_neg": 30, "seed": 1}
    ).json()
    negatives = [case for case in report["failures"] if case["kind"] == "negative"]
    assert negatives
    for case in negatives:
        assert set(case["input"]) <= set("ab01")


def test_concurrent_toggles_stay_serialized(client):
    session = convert(client, FIG_REGEX)["session"]
    client.post("/api/optimize", json={"session": session})
    with concurrent.futures.ThreadPoolExecutor(8) as pool:
        statuses = list(
            pool.map(
                lambda _: client.post(
                    "/api/apply", json={"session": session, "suggestion": 0}
                ).status_code,
                range(10),
            )
        )
    assert statuses == [200] * 10
    view = client.get("/api/session/%s" % session).json()
    assert view["applied"] == []  # even number of toggles
    assert view["dpl"] == FIG_DPL
    assert view["revision"] == 11  # optimize + 10 applies
