from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from src.entity.models import (
    CovariateDistribution,
    LinearEffect,
    MissingMechanism,
    SimSpec,
    SmoothEffect,
)
from src.services.links import make_link
from src.services.sampling import TRUTHS


class DistributionSchema(BaseModel):
    kind: Literal["uniform", "normal"] = "uniform"
    a: float = 0.0
    b: float = 1.0

    def to_distribution(self) -> CovariateDistribution:
        return CovariateDistribution(self.kind, self.a, self.b)


class LinearEffectSchema(BaseModel):
    name: str
    coefficient: float
    distribution: DistributionSchema = DistributionSchema()


class SmoothEffectSchema(BaseModel):
    name: str
    truth: str
    distribution: DistributionSchema = DistributionSchema()

    @field_validator("truth")
    @classmethod
    def validate_truth(cls, v):
        if v not in TRUTHS:
            raise ValueError(f"unknown truth function {v!r}; choose from {', '.join(sorted(TRUTHS))}")
        return v


class SimConfig(BaseModel):
    """JSON description of a synthetic portfolio for the ``simulate`` command."""

    n: int = Field(ge=1)
    intercept: float = 0.0
    link: Literal["logit", "loglog", "gev"] = "gev"
    tau: float | None = None
    linear: list[LinearEffectSchema] = []
    smooth: list[SmoothEffectSchema] = []
    missing_rate: float = Field(0.0, ge=0, lt=1)
    missing_columns: list[str] = []
    missing_driver: str | None = None
    missing_strength: float = Field(0.5, ge=0, le=1)
    seed: int = 0
    clamp: bool = True

    @model_validator(mode="after")
    def validate_tau(self):
        if self.link == "gev" and self.tau is None:
            raise ValueError("the GEV link needs tau")
        return self

    def to_spec(self, seed: int | None = None) -> SimSpec:
        return SimSpec(
            n=self.n,
            intercept=self.intercept,
            link=make_link(self.link, self.tau),
            linear_effects=tuple(
                LinearEffect(e.name, e.coefficient, e.distribution.to_distribution()) for e in self.linear
            ),
            smooth_effects=tuple(
                SmoothEffect(e.name, e.truth, e.distribution.to_distribution()) for e in self.smooth
            ),
            missing_rate=self.missing_rate,
            missing_mechanism=MissingMechanism(
                tuple(self.missing_columns), self.missing_driver, self.missing_strength
            ),
            seed=self.seed if seed is None else seed,
            clamp=self.clamp,
        )
