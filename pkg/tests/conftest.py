import pytest
from fastapi.testclient import TestClient

from main import app
from src.database.db import ModelStore, get_store
from src.entity.models import LinkKind, ModelSpec
from src.services.fit import build_spec, fit
from src.services.links import make_link
from src.services.preprocess import apply_woe, fit_woe_tables

from tests.samples import GEV_TAU, gev_portfolio, logit_sample


@pytest.fixture(scope="session")
def portfolio():
    return gev_portfolio()


@pytest.fixture(scope="session")
def complete_portfolio():
    return gev_portfolio(missing_rate=0.0)


@pytest.fixture(scope="session")
def logit_data():
    return logit_sample()


@pytest.fixture(scope="session")
def logit_model(logit_data):
    return fit(logit_data, ModelSpec(make_link(LinkKind.logit), linear_terms=("x",)))


@pytest.fixture(scope="session")
def woe_model(portfolio):
    tables = fit_woe_tables(portfolio)
    coded = apply_woe(tables, portfolio)
    model = fit(coded, build_spec(coded, make_link(LinkKind.gev, GEV_TAU)))
    return model, tables


@pytest.fixture(scope="module")
def store(tmp_path_factory, logit_model, woe_model):
    store = ModelStore(tmp_path_factory.mktemp("models"))
    store.save("logit", logit_model)
    model, tables = woe_model
    store.save("gev-woe", model, tables)
    return store


@pytest.fixture(scope="module")
def client(store):
    app.dependency_overrides[get_store] = lambda: store

    yield TestClient(app)

    app.dependency_overrides.clear()
