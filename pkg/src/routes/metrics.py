from fastapi import APIRouter, HTTPException, status

from src.schemas.api import MetricsRequest, MetricsResponse
from src.services.evaluate import evaluate

router = APIRouter(prefix="/metrics", tags=["metrics"])


@router.post("", response_model=MetricsResponse)
def compute_metrics(body: MetricsRequest):
    """MAE+, MSE+ and AUC of predicted probabilities against observed defaults.

    :param body: Predictions and 0/1 outcomes of equal length.
    :type body: MetricsRequest
    :raises HTTPException: If the vectors are inconsistent.
    :return: The metrics report.
    :rtype: MetricsResponse
    """
    try:
        report = evaluate(body.pd, body.y)
    except ValueError as err:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(err))
    return MetricsResponse.model_validate(report)
