import numpy as np
import pandas as pd
from fastapi import APIRouter, Depends, HTTPException, Path, status

from src.conf import messages
from src.database.db import ModelStore, get_store
from src.entity.models import Dataset
from src.schemas.api import ModelInfo, PredictRequest, PredictResponse, SummaryResponse, TermRow
from src.services.fit import predict, summarize
from src.services.preprocess import apply_woe

router = APIRouter(prefix="/models", tags=["models"])


def _document(store: ModelStore, name: str):
    try:
        return store.document(name)
    except KeyError:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=messages.MODEL_NOT_FOUND)


def _rows(frame: pd.DataFrame) -> list[TermRow]:
    rows = []
    for term, values in frame.iterrows():
        rows.append(TermRow(
            term=str(term),
            values={
                key: (bool(v) if isinstance(v, (bool, np.bool_)) else None if pd.isna(v) else float(v))
                for key, v in values.items()
            },
        ))
    return rows


@router.get("", response_model=list[str])
async def list_models(store: ModelStore = Depends(get_store)):
    """Names of the saved models.

    :param store: Model store.
    :type store: ModelStore
    :return: Sorted model names.
    :rtype: list[str]
    """
    return store.names()


@router.get("/{name}", response_model=ModelInfo)
async def read_model(
        name: str = Path(..., title="Saved model name"),
        store: ModelStore = Depends(get_store),
):
    """Link, terms, smoothing parameters and fit statistics of one model.

    :param name: Model name.
    :type name: str
    :param store: Model store.
    :type store: ModelStore
    :raises HTTPException: If the model is not found.
    :return: Model metadata.
    :rtype: ModelInfo
    """
    document = _document(store, name)
    return ModelInfo(
        name=name,
        link=document.link.kind,
        tau=document.link.tau,
        linear_terms=document.linear_terms,
        smooth_terms=[s.covariate for s in document.smooth_terms],
        lambdas=[s.lam for s in document.smooth_terms],
        edf=[s.edf for s in document.smooth_terms],
        deviance=document.deviance,
        converged=document.converged,
        n_obs=document.n_obs,
        woe_coded=document.woe is not None,
    )


@router.get("/{name}/summary", response_model=SummaryResponse)
def read_summary(
        name: str = Path(..., title="Saved model name"),
        store: ModelStore = Depends(get_store),
):
    """Parametric, smooth and linearized coefficient tables of one model."""
    summary = summarize(_document(store, name).to_model())
    return SummaryResponse(
        link=summary.link,
        tau=summary.tau,
        deviance=summary.deviance,
        total_edf=summary.total_edf,
        n_obs=summary.n_obs,
        parametric=_rows(summary.parametric),
        smooth=_rows(summary.smooth),
        linearized=_rows(summary.linearized),
    )


@router.post("/{name}/predict", response_model=PredictResponse)
def predict_rows(
        body: PredictRequest,
        name: str = Path(..., title="Saved model name"),
        store: ModelStore = Depends(get_store),
):
    """Score raw rows with a saved model.

    Absent features and ``null`` values are missing; WoE tables stored with the model
    are applied first, so WoE-coded models accept missing values.

    :param body: Rows of feature values.
    :type body: PredictRequest
    :param name: Model name.
    :type name: str
    :param store: Model store.
    :type store: ModelStore
    :raises HTTPException: If the model is not found.
    :return: Probability of default per row.
    :rtype: PredictResponse
    """
    document = _document(store, name)
    model, woe = document.to_model(), document.woe_tables()
    features = list(dict.fromkeys([*model.spec.covariates, *(woe or {})])) or ["(none)"]
    x = np.array([[np.nan if row.get(f) is None else row[f] for f in features] for row in body.rows], dtype=float)
    ds = Dataset(tuple(features), x, np.zeros(len(body.rows), dtype=np.int64))
    if woe:
        ds = apply_woe(woe, ds)
    return PredictResponse(model=name, pd=predict(model, ds).tolist())
