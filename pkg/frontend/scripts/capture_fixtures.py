"""Capture real service responses as test fixtures.

Every number the planner page displays has to be traceable to a service
response field, so the UI tests run against verbatim captures rather than
hand-written documents. Rerun after any engine change:

    python3 frontend/scripts/capture_fixtures.py
"""
import json
from pathlib import Path

from starlette.testclient import TestClient

from convoy.decision import scale_link_probabilities
from convoy.fixtures import REFERENCE_ATTACK_PROBABILITY, reference_link_profile
from convoy.network import demo_network
from convoy.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def dump(name: str, payload):
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path.relative_to(Path.cwd())}")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    net = demo_network()
    network_doc = net.to_dict()
    marginals = scale_link_probabilities(net, "9", REFERENCE_ATTACK_PROBABILITY, round_2dp=True)

    with TestClient(create_app()) as client:
        dump("network.json", network_doc)
        # the page also serves this copy as its prefilled network document
        (FIXTURES.parent.parent / "demo-network.json").write_text(
            json.dumps(network_doc, indent=2) + "\n", encoding="utf-8"
        )

        plan = client.post("/plan", json={
            "network": network_doc,
            "marginals": marginals,
            "utility": {"kind": "length-penalty", "x_util": 100.0},
        })
        assert plan.status_code == 200, plan.text
        dump("plan.json", plan.json())

        binary = client.post("/plan", json={"network": network_doc, "marginals": marginals})
        assert binary.status_code == 200, binary.text
        dump("plan_binary.json", binary.json())

        empty = client.post("/plan", json={"network": network_doc})
        assert empty.status_code == 400, empty.text
        dump("plan_error_empty.json", empty.json())

        profile = reference_link_profile()
        assess = client.post("/assess", json={
            "link": profile["link"],
            "history": [int(b) for b in profile["history"]],
            "covariates": profile["covariates"],
            "config": {"seed": 1},
        })
        assert assess.status_code == 200, assess.text
        dump("assess.json", assess.json())

        created = client.post("/sessions", json={
            "network": network_doc,
            "marginals": marginals,
            "utility": {"kind": "length-penalty", "x_util": 100.0},
            "pocMode": "rejected",
            "wClear": 2.0,
            "wIncident": 1.0,
        })
        assert created.status_code == 200, created.text
        doc = created.json()
        dump("session_create.json", doc)
        sid = doc["sessionId"]

        after1 = client.post(f"/sessions/{sid}/advance", json={
            "revision": doc["revision"], "link": "1", "outcome": "clear",
        })
        assert after1.status_code == 200, after1.text
        dump("session_after_1.json", after1.json())

        after2 = client.post(f"/sessions/{sid}/advance", json={
            "revision": after1.json()["revision"], "link": "2", "outcome": "clear",
        })
        assert after2.status_code == 200, after2.text
        dump("session_after_2.json", after2.json())

        stale = client.post(f"/sessions/{sid}/advance", json={
            "revision": 1, "link": "9", "outcome": "clear",
        })
        assert stale.status_code == 409, stale.text
        dump("conflict_409.json", stale.json())

        fetched = client.get(f"/sessions/{sid}")
        assert fetched.status_code == 200, fetched.text
        dump("session_get.json", fetched.json())


if __name__ == "__main__":
    main()
