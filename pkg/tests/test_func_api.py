import math

import numpy as np
import pytest

from src.conf import messages
from src.services.fit import predict
from src.services.preprocess import apply_woe


def test_index(client):
    response = client.get("/")
    assert response.status_code == 200, response.text
    assert "message" in response.json()


def test_healthchecker(client):
    response = client.get("api/healthchecker")
    assert response.status_code == 200, response.text
    assert response.json()["models"] == 2


def test_list_models(client):
    response = client.get("api/models")
    assert response.status_code == 200, response.text
    assert response.json() == ["gev-woe", "logit"]


def test_read_model(client, woe_model):
    model, _ = woe_model
    response = client.get("api/models/gev-woe")
    assert response.status_code == 200, response.text
    data = response.json()
    assert data["link"] == "gev"
    assert data["tau"] == model.tau
    assert data["linear_terms"] == list(model.spec.linear_terms)
    assert data["smooth_terms"] == []
    assert data["woe_coded"] is True
    assert data["converged"] is True


def test_read_model_not_found(client):
    response = client.get("api/models/absent")
    assert response.status_code == 404, response.text
    assert response.json()["detail"] == messages.MODEL_NOT_FOUND


def test_read_summary(client, logit_model):
    response = client.get("api/models/logit/summary")
    assert response.status_code == 200, response.text
    data = response.json()
    assert data["link"] == "logit"
    assert [row["term"] for row in data["parametric"]] == ["(Intercept)", "x"]
    estimate = data["parametric"][1]["values"]["Estimate"]
    assert math.isclose(estimate, logit_model.beta[0], rel_tol=1e-12)
    assert data["smooth"] == []


def test_predict(client, logit_model, logit_data):
    rows = [{"x": float(v)} for v in logit_data.column("x")[:5]]
    response = client.post("api/models/logit/predict", json={"rows": rows})
    assert response.status_code == 200, response.text
    data = response.json()
    assert data["model"] == "logit"
    np.testing.assert_allclose(data["pd"], predict(logit_model, logit_data.take(range(5))), rtol=1e-12)


def test_predict_applies_woe_tables_and_accepts_missing(client, woe_model, portfolio):
    model, tables = woe_model
    rows = [
        {name: (None if np.isnan(v) else float(v)) for name, v in zip(portfolio.feature_names, portfolio.x[i])}
        for i in range(8)
    ]
    rows.append({"leverage": 0.3})
    response = client.post("api/models/gev-woe/predict", json={"rows": rows})
    assert response.status_code == 200, response.text
    pd_ = response.json()["pd"]
    assert len(pd_) == 9
    expected = predict(model, apply_woe(tables, portfolio.take(range(8))))
    np.testing.assert_allclose(pd_[:8], expected, rtol=1e-12)


def test_predict_missing_value_without_woe(client):
    response = client.post("api/models/logit/predict", json={"rows": [{"x": None}]})
    assert response.status_code == 422, response.text


@pytest.mark.parametrize("body", [{"rows": []}, {}])
def test_predict_rejects_empty_bodies(client, body):
    response = client.post("api/models/logit/predict", json=body)
    assert response.status_code == 422, response.text


def test_predict_not_found(client):
    response = client.post("api/models/absent/predict", json={"rows": [{"x": 1.0}]})
    assert response.status_code == 404, response.text


def test_metrics(client):
    response = client.post("api/metrics", json={"pd": [0.9, 0.2, 0.5, 0.1], "y": [1, 0, 1, 0]})
    assert response.status_code == 200, response.text
    data = response.json()
    assert math.isclose(data["mae_plus"], 0.3)
    assert math.isclose(data["mse_plus"], 0.13)
    assert data["auc"] == 1.0
    assert (data["n_defaults"], data["n_total"]) == (2, 4)


@pytest.mark.parametrize(
    "body",
    [
        {"pd": [0.1, 0.2], "y": [0, 0]},
        {"pd": [0.1, 0.2], "y": [1, 1]},
        {"pd": [0.1, 0.2, 0.3], "y": [0, 1]},
        {"pd": [0.1], "y": [2]},
    ],
)
def test_metrics_rejects_inconsistent_input(client, body):
    response = client.post("api/metrics", json=body)
    assert response.status_code == 422, response.text
