from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.conf.config import config

Method = Literal["woe", "impute"]
ModelName = Literal["logit", "gev", "alogit", "bgeva"]

ADDITIVE_MODELS = ("alogit", "bgeva")
GEV_MODELS = ("gev", "bgeva")


def parse_smooth(value) -> list[tuple[str, int]]:
    """Parse ``"name:K,name,..."`` (K optional) into ``(name, K)`` pairs."""
    if value is None:
        return []
    if isinstance(value, str):
        terms = []
        for item in filter(None, (part.strip() for part in value.split(","))):
            name, _, k = item.partition(":")
            terms.append((name.strip(), int(k) if k else config.DEFAULT_K))
        return terms
    return [tuple(term) if not isinstance(term, str) else (term, config.DEFAULT_K) for term in value]


def _checked_smooth(value) -> list[tuple[str, int]]:
    terms = parse_smooth(value)
    for name, k in terms:
        if not name:
            raise ValueError("smooth term without a name")
        if k < 4:
            raise ValueError(f"basis dimension of {name!r} must be at least 4")
    return terms


def _select_or_float(value):
    if isinstance(value, str) and value.strip().lower() == "select":
        return "select"
    return float(value)


class RunConfig(BaseModel):
    """One cell of the experiment grid: a missing-value method and a model.

    ``tau`` only applies to the GEV models and ``smooth`` only to the additive ones.
    """

    input: Path
    response: str = "default"
    method: Method = "woe"
    model: ModelName = "bgeva"
    tau: float | Literal["select"] = "select"
    smooth: list[tuple[str, int]] = []
    lambda_: float | Literal["select"] = Field("select", alias="lambda")
    seed: int = 0
    train_frac: float = Field(0.7, gt=0, lt=1)
    out: Path = Path("out")
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    @field_validator("smooth", mode="before")
    @classmethod
    def validate_smooth(cls, v):
        return _checked_smooth(v)

    @field_validator("tau", "lambda_", mode="before")
    @classmethod
    def validate_select_or_float(cls, v):
        return _select_or_float(v)

    @field_validator("lambda_")
    @classmethod
    def validate_lambda(cls, v):
        if v != "select" and v < 0:
            raise ValueError("lambda must be non-negative")
        return v

    @property
    def is_additive(self) -> bool:
        return self.model in ADDITIVE_MODELS

    @property
    def is_gev(self) -> bool:
        return self.model in GEV_MODELS

    @property
    def cell(self) -> str:
        return f"{self.method}-{self.model}"


class ExperimentConfig(BaseModel):
    """The methods x models grid run by the ``pipeline`` command from one JSON file."""

    input: Path
    response: str = "default"
    methods: list[Method] = ["woe", "impute"]
    models: list[ModelName] = ["logit", "gev", "alogit", "bgeva"]
    tau: float | Literal["select"] = "select"
    smooth: list[tuple[str, int]] = []
    lambda_: float | Literal["select"] = Field("select", alias="lambda")
    seed: int = 0
    train_frac: float = Field(0.7, gt=0, lt=1)
    out: Path = Path("out")
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    @field_validator("smooth", mode="before")
    @classmethod
    def validate_smooth(cls, v):
        return _checked_smooth(v)

    @field_validator("tau", "lambda_", mode="before")
    @classmethod
    def validate_select_or_float(cls, v):
        return _select_or_float(v)

    def runs(self) -> list[RunConfig]:
        shared = self.model_dump(exclude={"methods", "models"})
        return [
            RunConfig(**shared, method=method, model=model)
            for method in self.methods
            for model in self.models
        ]
