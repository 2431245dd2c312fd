from pydantic import BaseModel, ConfigDict, Field

from src.entity.models import LinkKind


class ModelInfo(BaseModel):
    name: str
    link: LinkKind
    tau: float | None
    linear_terms: list[str]
    smooth_terms: list[str]
    lambdas: list[float]
    edf: list[float]
    deviance: float
    converged: bool
    n_obs: int
    woe_coded: bool


class TermRow(BaseModel):
    term: str
    values: dict[str, float | bool | int | None]


class SummaryResponse(BaseModel):
    link: str
    tau: float | None
    deviance: float
    total_edf: float
    n_obs: int
    parametric: list[TermRow]
    smooth: list[TermRow]
    linearized: list[TermRow]


class PredictRequest(BaseModel):
    rows: list[dict[str, float | None]] = Field(min_length=1)


class PredictResponse(BaseModel):
    model: str
    pd: list[float]


class MetricsRequest(BaseModel):
    pd: list[float] = Field(min_length=1)
    y: list[int] = Field(min_length=1)


class MetricsResponse(BaseModel):
    mae_plus: float
    mse_plus: float
    auc: float
    n_defaults: int
    n_total: int
    model_config = ConfigDict(from_attributes=True)
