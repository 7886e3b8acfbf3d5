"""HTTP facade: endpoint behavior, persistence, and error mapping."""
import json

import pytest
from starlette.testclient import TestClient

from convoy.fixtures import demo_network_json, reference_link_profile
from convoy.pipeline import StageOneCache
from convoy.service import create_app

QUICK_CONFIG = {"iterations": 800, "burnIn": 200, "seed": 5}


@pytest.fixture
def client(tmp_path):
    app = create_app(store_dir=str(tmp_path / "sessions"), cache=StageOneCache())
    with TestClient(app) as c:
        yield c


def network_doc():
    return json.loads(demo_network_json())


def reference_marginal_doc():
    return {
        "1": 0.20, "2": 0.20, "3": 0.06, "4": 0.06, "5": 0.06,
        "6": 0.06, "7": 0.06, "8": 0.06, "9": 0.306, "10": 0.15,
    }


def plan_body(**extra):
    body = {"network": network_doc(), "marginals": reference_marginal_doc()}
    body.update(extra)
    return body


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_assess_flat_closed_form(client):
    # flat curve + uniform prior + 4 clear crossings has the exact posterior
    # mean 1 / (4^(1/4) + 2)
    r = client.post(
        "/assess",
        json={"history": [0, 0, 0, 0], "config": {"flatCurve": True}},
    )
    assert r.status_code == 200
    assert r.headers["X-Stage1-Cache"] == "bypass"
    body = r.json()
    assert body["pAttack"] == pytest.approx(1.0 / (2.0 + 2.0**0.5), abs=1e-4)
    assert body["pAttack"] + body["pClear"] == pytest.approx(1.0, abs=1e-12)
    assert body["provenance"]["stageOne"] is None


def test_assess_full_pipeline_and_cache(client):
    profile = reference_link_profile()
    req = {
        "link": "9",
        "history": list(map(int, profile["history"])),
        "covariates": profile["covariates"],
        "config": QUICK_CONFIG,
    }
    first = client.post("/assess", json=req)
    second = client.post("/assess", json=req)
    assert first.status_code == second.status_code == 200
    assert first.headers["X-Stage1-Cache"] == "miss"
    assert second.headers["X-Stage1-Cache"] == "hit"
    # bodies must be byte-identical; the cache is observable only in the header
    assert first.content == second.content
    body = first.json()
    assert body["linkId"] == "9"
    assert 0.0 < body["pAttack"] < 1.0
    stage = body["provenance"]["stageOne"]
    assert stage["seed"] == 5 and len(stage["cacheKey"]) == 64


def test_assess_schema_violations(client):
    bad_bit = client.post("/assess", json={"history": [0, 2, 0]})
    assert bad_bit.status_code == 400
    assert bad_bit.json()["code"] == "schema_violation"
    extra = client.post("/assess", json={"history": [], "surprise": 1})
    assert extra.status_code == 400
    loc_problems = extra.json()["detail"]
    assert any("surprise" in p["location"] for p in loc_problems)
    bad_grid = client.post("/assess", json={"config": {"grid": "simpson"}})
    assert bad_grid.status_code == 400


def test_assess_invalid_csv(client):
    r = client.post(
        "/assess",
        json={"regionalCsv": "region,s,x1\nr1,notanumber,0\n", "history": []},
    )
    assert r.status_code == 400
    assert r.json()["code"] == "invalid_input"


def test_assess_separation_maps_to_422(client):
    # a covariate identical to the response separates perfectly
    csv = "region,attack,x1\n" + "".join(
        f"r{i},{i % 2},{i % 2}\n" for i in range(1, 9)
    )
    r = client.post(
        "/assess",
        json={"regionalCsv": csv, "history": [0], "config": QUICK_CONFIG},
    )
    assert r.status_code == 422
    body = r.json()
    assert body["code"] == "possible_separation"
    assert set(body) == {"code", "message", "detail"}


def test_plan_reference_decision(client):
    r = client.post(
        "/plan",
        json=plan_body(utility={"kind": "length-penalty", "x_util": 100.0}),
    )
    assert r.status_code == 200
    doc = r.json()
    assert doc["recommendedLinks"] == ["1", "2", "3", "4", "10"]
    by_links = {tuple(e["links"]): e for e in doc["perRoute"]}
    assert by_links[("1", "2", "9")]["expectedUtility"] == pytest.approx(0.414, abs=1e-3)
    assert by_links[("1", "2", "3", "4", "10")]["expectedUtility"] == pytest.approx(0.430, abs=1e-3)
    assert doc["marginals"]["9"] == pytest.approx(0.306)


def test_plan_requires_probability_source(client):
    r = client.post("/plan", json={"network": network_doc()})
    assert r.status_code == 400
    assert r.json()["code"] == "invalid_input"


def test_plan_rejects_unknown_marginal_links(client):
    body = plan_body()
    body["marginals"]["99"] = 0.5
    r = client.post("/plan", json=body)
    assert r.status_code == 400


def test_plan_with_inline_assessment(client):
    # link 9 assessed inline through the flat debug curve, rest supplied
    marginals = reference_marginal_doc()
    del marginals["9"]
    r = client.post(
        "/plan",
        json={
            "network": network_doc(),
            "marginals": marginals,
            "assessments": [
                {"link": "9", "history": [0, 0, 0, 0], "config": {"flatCurve": True}}
            ],
        },
    )
    assert r.status_code == 200
    doc = r.json()
    assert doc["marginals"]["9"] == pytest.approx(1.0 / (2.0 + 2.0**0.5), abs=1e-4)


def test_session_lifecycle(client):
    created = client.post("/sessions", json=plan_body())
    assert created.status_code == 200
    doc = created.json()
    sid = doc["sessionId"]
    assert doc["revision"] == 1
    assert doc["currentNode"] == "A"
    assert doc["continuations"] == ["1"]
    assert doc["recommendation"]["recommendedLinks"] == ["1", "2", "3", "4", "10"]

    adv = client.post(
        f"/sessions/{sid}/advance",
        json={"revision": 1, "link": "1", "outcome": "clear"},
    )
    assert adv.status_code == 200
    doc2 = adv.json()
    assert doc2["revision"] == 2
    assert doc2["currentNode"] == "B"
    assert doc2["traversedLinks"] == [{"link": "1", "outcome": "clear"}]

    fetched = client.get(f"/sessions/{sid}")
    assert fetched.status_code == 200
    assert fetched.json() == doc2


def test_session_revision_conflict(client):
    sid = client.post("/sessions", json=plan_body()).json()["sessionId"]
    ok = client.post(
        f"/sessions/{sid}/advance",
        json={"revision": 1, "link": "1", "outcome": "clear"},
    )
    assert ok.status_code == 200
    stale = client.post(
        f"/sessions/{sid}/advance",
        json={"revision": 1, "link": "2", "outcome": "clear"},
    )
    assert stale.status_code == 409
    body = stale.json()
    assert body["code"] == "revision_conflict"
    assert body["detail"] == {"currentRevision": 2}


def test_session_illegal_observation_maps_to_422(client):
    sid = client.post("/sessions", json=plan_body()).json()["sessionId"]
    r = client.post(
        f"/sessions/{sid}/advance",
        json={"revision": 1, "link": "9", "outcome": "clear"},
    )
    assert r.status_code == 422
    assert r.json()["code"] == "illegal_observation"


def test_session_not_found(client):
    assert client.get("/sessions/absent").status_code == 404
    assert client.get("/sessions/..%2Fescape").status_code == 404
    r = client.post(
        "/sessions/absent/advance",
        json={"revision": 1, "link": "1", "outcome": "clear"},
    )
    assert r.status_code == 404
    assert r.json()["code"] == "not_found"


def test_session_rejected_walk_reweights(client):
    body = plan_body(pocMode="rejected", wClear=2.0, wIncident=1.0)
    sid = client.post("/sessions", json=body).json()["sessionId"]
    client.post(
        f"/sessions/{sid}/advance",
        json={"revision": 1, "link": "1", "outcome": "clear"},
    )
    doc = client.post(
        f"/sessions/{sid}/advance",
        json={"revision": 2, "link": "2", "outcome": "clear"},
    ).json()
    assert doc["marginals"]["9"] == pytest.approx(0.18063754, abs=1e-8)
    assert doc["baseMarginals"]["9"] == pytest.approx(0.306)
    assert doc["continuations"] == ["3", "9"]


def test_session_completion(client):
    sid = client.post("/sessions", json=plan_body()).json()["sessionId"]
    for rev, link in ((1, "1"), (2, "2"), (3, "9")):
        r = client.post(
            f"/sessions/{sid}/advance",
            json={"revision": rev, "link": link, "outcome": "clear"},
        )
        assert r.status_code == 200
    doc = client.get(f"/sessions/{sid}").json()
    assert doc["status"] == "complete"
    assert doc["currentNode"] == "I"
    assert doc["continuations"] == []
    r = client.post(
        f"/sessions/{sid}/advance",
        json={"revision": 4, "link": "9", "outcome": "clear"},
    )
    assert r.status_code == 422


def test_sessions_survive_restart(tmp_path):
    store = str(tmp_path / "sessions")
    with TestClient(create_app(store_dir=store)) as c1:
        sid = c1.post("/sessions", json=plan_body()).json()["sessionId"]
        c1.post(
            f"/sessions/{sid}/advance",
            json={"revision": 1, "link": "1", "outcome": "clear"},
        )
    # a fresh app instance over the same directory sees the latest revision
    with TestClient(create_app(store_dir=store)) as c2:
        doc = c2.get(f"/sessions/{sid}").json()
        assert doc["revision"] == 2
        assert doc["currentNode"] == "B"
        nxt = c2.post(
            f"/sessions/{sid}/advance",
            json={"revision": 2, "link": "2", "outcome": "clear"},
        )
        assert nxt.status_code == 200


def test_assess_deterministic_across_processes(tmp_path):
    # two separate app instances with cold caches agree bit for bit
    profile = reference_link_profile()
    req = {
        "history": [0, 0, 1],
        "covariates": profile["covariates"],
        "config": QUICK_CONFIG,
    }
    bodies = []
    for run in range(2):
        with TestClient(create_app(store_dir=str(tmp_path / f"s{run}"), cache=StageOneCache())) as c:
            r = c.post("/assess", json=req)
            assert r.headers["X-Stage1-Cache"] == "miss"
            bodies.append(r.content)
    assert bodies[0] == bodies[1]
