"""Tests for the HTTP service."""

import pytest
from fastapi.testclient import TestClient

from config.settings import settings
from src.api.main import app

PREFIX = settings.api.api_prefix


@pytest.fixture
def client():
    return TestClient(app)


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "healthy"
        assert len(body["metadata"]["signature"]) == 16


class TestGroupEndpoint:
    def test_group(self, client):
        response = client.get(f"{PREFIX}/group/12/3")
        assert response.status_code == 200
        body = response.json()
        assert body["h"] == [0, 3, 6, 9]
        assert body["h_perp"] == [0, 4, 8]
        assert body["order_h"] * body["order_h_perp"] == 12
        assert body["bidual"] is True

    def test_invalid_generator(self, client):
        response = client.get(f"{PREFIX}/group/12/5")
        assert response.status_code == 400
        assert response.json()["detail"]["error"] == "INVALID_GENERATOR"

    def test_large_group_refused(self, client):
        assert client.get(f"{PREFIX}/group/65536/2").status_code == 400


class TestChannelEndpoint:
    def test_itu(self, client):
        response = client.get(f"{PREFIX}/channel/itu")
        assert response.status_code == 200
        body = response.json()
        assert len(body["taps"]) == 6
        assert body["n_cp"] == 32

    def test_tdl(self, client):
        response = client.get(f"{PREFIX}/channel/tdl", params={"d": 16})
        assert response.status_code == 200
        assert [tap["sample_index"] for tap in response.json()["taps"]] == [0, 16]

    def test_tdl_without_d(self, client):
        assert client.get(f"{PREFIX}/channel/tdl").status_code == 400

    def test_unknown_model(self, client):
        assert client.get(f"{PREFIX}/channel/bogus").status_code == 404


class TestSweepEndpoint:
    def test_small_sweep(self, client):
        response = client.post(
            f"{PREFIX}/sweep",
            json={"trials": 2, "n": 64, "d_grid": [8], "snr_grid_db": [10.0]},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["success"] is True
        assert [row["estimator"] for row in body["rows"]] == ["ls", "lmmse", "subgroup"]
        assert all(row["trials"] == 2 for row in body["rows"])

    def test_trial_cap(self, client):
        response = client.post(f"{PREFIX}/sweep", json={"trials": 1000})
        assert response.status_code == 400
        detail = response.json()["detail"]
        assert detail["error"] == "REQUEST_LIMIT"
        assert "trials" in detail["message"]

    def test_size_caps(self, client):
        """Large n or too many cells are refused before any work starts."""
        big_n = client.post(f"{PREFIX}/sweep", json={"trials": 1, "n": 4096, "d_grid": [8]})
        assert big_n.status_code == 400
        many_cells = client.post(
            f"{PREFIX}/sweep",
            json={"trials": 1, "n": 64, "d_grid": [2, 4, 8, 16, 32, 64], "snr_grid_db": list(range(11))},
        )
        assert many_cells.status_code == 400
        assert "cells" in many_cells.json()["detail"]["message"]

    def test_bad_grid(self, client):
        response = client.post(
            f"{PREFIX}/sweep", json={"trials": 1, "n": 64, "d_grid": [5]}
        )
        assert response.status_code == 400

    def test_prefix_too_short(self, client):
        response = client.post(
            f"{PREFIX}/sweep",
            json={"trials": 1, "channel": "itu", "n_cp": 10, "d_grid": [8], "snr_grid_db": [0.0]},
        )
        assert response.status_code == 400

    def test_fading_enters_signature(self, client):
        body = {"trials": 1, "n": 64, "channel": "itu", "d_grid": [8], "snr_grid_db": [10.0]}
        default = client.post(f"{PREFIX}/sweep", json=body).json()
        per_tap = client.post(f"{PREFIX}/sweep", json={**body, "fading": "per_tap"}).json()
        assert default["metadata"]["signature"] != per_tap["metadata"]["signature"]

    def test_missing_trials(self, client):
        assert client.post(f"{PREFIX}/sweep", json={"n": 64}).status_code == 422
