import pytest
from fastapi.testclient import TestClient

from triplesmith.factory import shard_filename
from triplesmith.service import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_generate_and_verify_dataset(client, tmp_path):
    out = str(tmp_path / "ds")
    resp = client.post("/generate", json={
        "start": 1, "end": 20, "out_dir": out, "shard_size": 10,
        "negative_ratio": "0.5", "attack_mix": {"PA01": "0.5", "AR02": "0.5"},
        "seed": 4, "workers": 1,
    })
    assert resp.status_code == 200
    body = resp.json()
    assert body["ok"] and body["record_count"] == 40
    assert len(body["shards"]) == body["shard_count"] == 4
    assert all(len(m["sha256"]) == 64 for m in body["shards"])

    resp = client.post("/dataset/verify", json={"directory": out})
    assert resp.status_code == 200
    assert resp.json()["ok"] is True

    shard = tmp_path / "ds" / shard_filename(0)
    data = bytearray(shard.read_bytes())
    data[1] ^= 0x04
    shard.write_bytes(bytes(data))
    resp = client.post("/dataset/verify", json={"directory": out})
    assert resp.json()["ok"] is False


def test_verify_single_shard(client, tmp_path):
    out = str(tmp_path / "ds")
    client.post("/generate", json={"start": 1, "end": 5, "out_dir": out})
    shard = str(tmp_path / "ds" / shard_filename(0))
    resp = client.post("/verify", json={"path": shard})
    assert resp.status_code == 200
    assert resp.json()["ok"] is True and resp.json()["record_count"] == 5


def test_attack_endpoint(client, tmp_path):
    out = str(tmp_path / "negs.csv")
    resp = client.post("/attack", json={
        "code": "ST02", "count": 6, "seed": 2, "base_start": 1, "out_path": out,
    })
    assert resp.status_code == 200
    body = resp.json()
    assert body["count"] == 6 and body["label_counts"] == {"neg_family": 6}


def test_floatwall_endpoint(client):
    resp = client.post("/floatwall", json={"min_exp": 15, "max_exp": 19})
    assert resp.status_code == 200
    rows = {r["decimal_exp"]: r for r in resp.json()["rows"]}
    assert rows[18]["ulp_gap"] == 256 and rows[18]["collision"] is True
    assert rows[15]["collision"] is False


def test_features_endpoint(client, tmp_path):
    out = str(tmp_path / "ds")
    client.post("/generate", json={"start": 1, "end": 4, "out_dir": out})
    resp = client.post("/features", json={
        "in_path": str(tmp_path / "ds" / shard_filename(0)),
        "path_mode": "exact",
        "out_path": str(tmp_path / "f.csv"),
    })
    assert resp.status_code == 200
    assert resp.json()["count"] == 4


def test_error_mapping(client, tmp_path):
    resp = client.post("/verify", json={"path": str(tmp_path / "nope.csv")})
    assert resp.status_code == 404
    resp = client.post("/generate", json={
        "start": 1, "end": 4, "out_dir": str(tmp_path / "x"),
        "negative_ratio": "0.5", "attack_mix": {"PA01": "0.25"},
    })
    assert resp.status_code == 422
    resp = client.post("/floatwall", json={"min_exp": 9, "max_exp": 5})
    assert resp.status_code == 422
