"""HTTP endpoints: happy paths, error mapping, and determinism."""

import pytest
from fastapi.testclient import TestClient

from hagopt import deserialize_hag, value
from hagopt.service.app import app

TWIN_EDGE_LIST = "# twins\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n"


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def twin_payload():
    return {"graph": {"edge_list": TWIN_EDGE_LIST}}


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}


class TestOptimize:
    def test_full_greedy_on_twin(self, client):
        response = client.post("/optimize", json={
            **twin_payload(), "algorithm": "full", "k": 1})
        assert response.status_code == 200
        data = response.json()
        assert data["value"] == 2 and data["k_used"] == 1
        assert data["equivalence_ok"] is True
        # first-appearance remapping makes the two senders dense ids 0 and 4
        assert data["trace"][0]["in_set"] == [0, 4]
        hag = deserialize_hag(data["hag"])
        assert value(hag) == 2

    def test_zero_budget_returns_input_shape(self, client):
        response = client.post("/optimize", json={
            **twin_payload(), "algorithm": "full", "k": 0})
        data = response.json()
        assert data["value"] == 0 and data["trace"] == []
        assert deserialize_hag(data["hag"]).intermediates == []

    def test_graph_as_edge_pairs(self, client):
        response = client.post("/optimize", json={
            "graph": {"node_count": 4, "edges": [[0, 2], [1, 2], [0, 3], [1, 3]]},
            "algorithm": "optimal", "k": 1})
        assert response.json()["value"] == 1

    def test_undirected_expansion(self, client):
        response = client.post("/optimize", json={
            "graph": {"edge_list": "0 1\n", "undirected": True},
            "algorithm": "full", "k": 0})
        assert response.json()["edge_count"] == 2

    def test_regime_violation_maps_to_400(self, client):
        edge_list = "\n".join(f"{s} 25" for s in range(25))
        response = client.post("/optimize", json={
            "graph": {"edge_list": edge_list},
            "algorithm": "partial", "k": 1, "layer_mode": "multi"})
        assert response.status_code == 400
        assert "in-degree 25" in response.json()["detail"]
        assert "receiver" in response.json()["detail"]

    def test_malformed_edge_list_maps_to_400(self, client):
        response = client.post("/optimize", json={
            "graph": {"edge_list": "0 1 junk\n"}, "algorithm": "full", "k": 1})
        assert response.status_code == 400
        assert "line 1" in response.json()["detail"]

    def test_unknown_algorithm_maps_to_422(self, client):
        response = client.post("/optimize", json={
            **twin_payload(), "algorithm": "fastest", "k": 1})
        assert response.status_code == 422

    def test_ambiguous_graph_spec_rejected(self, client):
        response = client.post("/optimize", json={
            "graph": {"edge_list": "0 1\n", "edges": [[0, 1]]},
            "algorithm": "full", "k": 1})
        assert response.status_code == 400


class TestCompare:
    def test_two_algorithms(self, client):
        response = client.post("/compare", json={
            **twin_payload(), "algorithms": ["full", "degree"], "k": 1})
        data = response.json()
        assert [row["algorithm"] for row in data["rows"]] == ["full", "degree"]
        assert data["value_ratios"]["full/degree"] == 1.0
        assert "algorithm" in data["csv"].splitlines()[0]


class TestErExperiment:
    def test_small_sweep(self, client):
        response = client.post("/experiments/erdos-renyi", json={
            "n": 7, "p_grid": [0.3], "trials": 2, "k_list": [2], "seed": 1})
        data = response.json()
        assert len(data["rows"]) == 4  # two algorithms x two trials
        assert data["aggregates"]
        assert all(0.0 <= row["alpha"] <= 1.0 for row in data["rows"])

    def test_deterministic_up_to_wall_clock(self, client):
        payload = {"n": 7, "p_grid": [0.4], "trials": 2, "k_list": [1], "seed": 3}
        a = client.post("/experiments/erdos-renyi", json=payload).json()
        b = client.post("/experiments/erdos-renyi", json=payload).json()

        def strip_timing(rows):
            return [{key: val for key, val in row.items() if key != "elapsed_ms"}
                    for row in rows]

        assert strip_timing(a["rows"]) == strip_timing(b["rows"])
        assert a["aggregates"] == b["aggregates"]


class TestLayerExperiment:
    def test_small_graph(self, client):
        edges = "\n".join(f"{s} {r}" for s in (0, 1) for r in (2, 3, 4))
        response = client.post("/experiments/layers", json={
            "graph": {"edge_list": edges}, "k_max": 2})
        data = response.json()
        assert len(data["rows"]) == 2
        assert data["rows"][0]["single_value"] == 2


class TestValidateEndpoint:
    def test_suite_passes(self, client):
        response = client.post("/validate", json={"seed": 1, "trials": 5})
        data = response.json()
        assert data["ok"] is True
        assert len(data["checks"]) == 6

    def test_fault_injection_reported(self, client):
        response = client.post("/validate", json={
            "seed": 1, "trials": 5, "inject_fault": True})
        data = response.json()
        assert data["ok"] is False
        failed = [c for c in data["checks"] if not c["passed"]]
        assert any(c["name"] == "equivalence" for c in failed)
