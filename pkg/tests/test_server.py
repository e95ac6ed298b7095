import json

import pytest
from fastapi.testclient import TestClient

from qlog.pipeline import LogRecord, PipelineConfig, run_pipeline, save_run
from qlog.server import create_app
from qlog.synth import generate_log


@pytest.fixture
def run_dir(tmp_path):
    config = PipelineConfig(cut_k=4)
    run = run_pipeline(
        [LogRecord(sql=s) for s in generate_log(1200, 30, seed=41)], config
    )
    save_run(run, tmp_path / "run")
    return tmp_path / "run"


@pytest.fixture
def client(run_dir):
    return TestClient(create_app(run_dir))


class TestReads:
    def test_run_info(self, client):
        data = client.get("/api/run").json()
        assert data["skeletons"] == 30
        assert data["k"] == 4
        assert set(data["timings_ms"]) == {"preprocess", "relabel", "cluster", "fptree"}
        assert data["labels"]["unknown"] == 4

    def test_cluster_list(self, client):
        clusters = client.get("/api/clusters").json()
        assert len(clusters) == 4
        assert all(c["label"] == "unknown" for c in clusters)
        assert sum(c["skeletons"] for c in clusters) == 30
        assert sum(c["queries"] for c in clusters) == 1200

    def test_cluster_detail(self, client):
        detail = client.get("/api/clusters/0").json()
        assert detail["id"] == 0
        assert detail["size"]["skeletons"] >= 1
        assert "explanation" in detail and "common_features" in detail
        assert detail["representative"]["text"].startswith("select")

    def test_fptree_payload(self, client):
        tree = client.get("/api/clusters/0/fptree").json()
        assert tree["root"]["count"] == tree["size"]
        stack = [tree["root"]]
        while stack:
            node = stack.pop()
            for child in node["children"]:
                assert child["count"] <= node["count"]
                assert child["label"]
                stack.append(child)

    def test_dot_payload(self, client):
        dot = client.get("/api/clusters/0/dot")
        assert dot.headers["content-type"].startswith("text/plain")
        assert dot.text.startswith("digraph")

    def test_unknown_cluster_404(self, client):
        assert client.get("/api/clusters/999").status_code == 404
        assert client.get("/api/clusters/999/fptree").status_code == 404
        assert (
            client.post("/api/clusters/999/label", json={"label": "safe"}).status_code
            == 404
        )


class TestMutations:
    def test_label_persists(self, client, run_dir):
        response = client.post("/api/clusters/2/label", json={"label": "safe"})
        assert response.status_code == 200
        assert client.get("/api/clusters/2").json()["label"] == "safe"
        on_disk = json.loads((run_dir / "labels.json").read_text())
        assert on_disk["2"] == "safe"
        summary = json.loads((run_dir / "summaries" / "2.json").read_text())
        assert summary["label"] == "safe"

    def test_invalid_label_400(self, client):
        response = client.post("/api/clusters/0/label", json={"label": "fine"})
        assert response.status_code == 400

    def test_re_elaborate_splits_unknowns_only(self, client, run_dir):
        client.post("/api/clusters/0/label", json={"label": "safe"})
        client.post("/api/clusters/1/label", json={"label": "unsafe"})
        safe_bytes = (run_dir / "summaries" / "0.json").read_bytes()
        unsafe_bytes = (run_dir / "summaries" / "1.json").read_bytes()
        unknown_ids = [
            c["id"]
            for c in client.get("/api/clusters").json()
            if c["label"] == "unknown"
        ]

        result = client.post("/api/re-elaborate", json={"k": 6}).json()
        assert sorted(result["retired"]) == sorted(unknown_ids)
        assert result["new"]

        assert (run_dir / "summaries" / "0.json").read_bytes() == safe_bytes
        assert (run_dir / "summaries" / "1.json").read_bytes() == unsafe_bytes
        clusters = {c["id"]: c for c in client.get("/api/clusters").json()}
        assert clusters[0]["label"] == "safe"
        assert clusters[1]["label"] == "unsafe"
        for cid in result["retired"]:
            assert cid not in clusters
            assert not (run_dir / "summaries" / f"{cid}.json").exists()
        for cid in result["new"]:
            assert clusters[cid]["label"] == "unknown"
            assert (run_dir / "summaries" / f"{cid}.json").exists()
            assert (run_dir / "summaries" / f"{cid}.dot").exists()
        assignments = json.loads((run_dir / "clusters.json").read_text())[
            "assignments"
        ]
        assert set(assignments.values()) == set(clusters)

    def test_re_elaborate_bad_k(self, client):
        assert client.post("/api/re-elaborate", json={"k": 0}).status_code == 400
