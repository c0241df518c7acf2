import json

import pytest
from fastapi.testclient import TestClient

from texthouse.server import create_app

from conftest import TEXT1


@pytest.fixture(scope="module")
def client(tiny_checkpoints):
    app = create_app(tiny_checkpoints)
    return TestClient(app, raise_server_exceptions=False)


@pytest.fixture()
def cold_client(tmp_path):
    return TestClient(create_app(tmp_path / "nowhere"))


def test_health_before_and_after_load(client, cold_client):
    cold = cold_client.get("/api/health")
    assert cold.status_code == 503
    assert cold.json()["code"] == "ModelsNotLoaded"

    warm = client.get("/api/health")
    assert warm.status_code == 200
    body = warm.json()
    assert body["status"] == "ok"
    assert set(body["checksums"]) == {"layout", "generator"}
    assert all(len(v) == 64 for v in body["checksums"].values())


def test_vocab_endpoint(client):
    body = client.get("/api/vocab").json()
    assert len(body["materials"]) == 19
    assert len(body["colours"]) == 12
    assert "livingroom" in body["room_types"]


def test_parse_valid_text(client):
    resp = client.post("/api/parse", json={"text": TEXT1})
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["rooms"]) == 4
    ids = [r["id"] for r in body["rooms"]]
    assert ids == ["washroom1", "bedroom1", "livingroom1", "kitchen1"]
    assert sorted(tuple(p) for p in body["adjacency"]) == [
        (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)
    ]


def test_parse_error_reports_sentence(client):
    resp = client.post("/api/parse", json={"text": "bedroom1 eats cheese."})
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "UnparsableSentence"
    assert body["detail"]["sentence_index"] == 0
    assert "bedroom1 eats cheese" in body["detail"]["sentence"]


def test_parse_filler_only_text_is_empty_house(client):
    resp = client.post("/api/parse", json={"text": "hello world."})
    assert resp.status_code == 400
    assert resp.json()["code"] == "EmptyHouse"


def test_parse_error_indexes_later_sentence(client):
    text = TEXT1 + " kitchen1 is made of cheese."
    body = client.post("/api/parse", json={"text": text}).json()
    assert body["code"] == "UnparsableSentence"
    assert body["detail"]["sentence_index"] == 7


def test_parse_empty_text(client):
    resp = client.post("/api/parse", json={"text": "   "})
    assert resp.status_code == 400


def test_generate_cold_is_503(cold_client):
    resp = cold_client.post("/api/generate", json={"text": TEXT1})
    assert resp.status_code == 503
    assert resp.json()["code"] == "ModelsNotLoaded"


def test_generate_full_payload(client):
    resp = client.post("/api/generate", json={"text": TEXT1, "seed": 7})
    assert resp.status_code == 200
    body = resp.json()
    assert body["seed"] == 7
    assert len(body["house_spec"]["rooms"]) == 4
    assert len(body["boxes"]) == 4
    assert {r["id"] for r in body["plan"]["rooms"]} == {
        "washroom1", "bedroom1", "livingroom1", "kitchen1"
    }
    assert body["plan_svg"].lstrip().startswith("<svg")
    assert body["topview_svg"].lstrip().startswith("<svg")
    assert body["obj"].splitlines()[0].startswith("#") or "v " in body["obj"]
    assert len(body["textures"]) == 4
    for pair in body["textures"].values():
        assert set(pair) == {"floor", "wall"}


def test_generate_deterministic(client):
    a = client.post("/api/generate", json={"text": TEXT1, "seed": 3}).json()
    b = client.post("/api/generate", json={"text": TEXT1, "seed": 3}).json()
    a.pop("timings")
    b.pop("timings")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_generate_parse_error(client):
    resp = client.post("/api/generate", json={"text": "washroom1 is purple."})
    assert resp.status_code == 400
    assert resp.json()["code"] == "UnparsableSentence"


def test_generate_no_living_room_is_422(client):
    text = (
        "The building contains one kitchen and one bedroom. "
        "kitchen1 has 12 squares in west. bedroom1 has 14 squares in east. "
        "kitchen1 is next to bedroom1."
    )
    resp = client.post("/api/generate", json={"text": text})
    assert resp.status_code == 422
    assert resp.json()["code"] == "NoLivingRoom"


def test_missing_body_field(client):
    resp = client.post("/api/parse", json={})
    assert resp.status_code == 422
