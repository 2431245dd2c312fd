import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.conf.config import VERSION
from src.entity.models import (
    BasisBlock,
    FittedModel,
    LinkKind,
    LinkSpec,
    ModelSpec,
    SmoothSpec,
    WoeBin,
    WoeTable,
)


class LinkDocument(BaseModel):
    kind: LinkKind
    tau: float | None = None
    epsilon: float

    @classmethod
    def from_link(cls, link: LinkSpec) -> "LinkDocument":
        return cls(kind=link.kind, tau=link.tau, epsilon=link.epsilon)

    def to_link(self) -> LinkSpec:
        return LinkSpec(self.kind, self.tau, self.epsilon)


class SmoothTermDocument(BaseModel):
    covariate: str
    K: int = Field(ge=4)
    knots: list[float]
    constraint: list[list[float]]
    penalty: list[list[float]]
    lower: float
    upper: float
    lam: float = Field(ge=0)
    gamma: list[float]
    edf: float
    chi_sq: float
    p_value: float


class WoeBinDocument(BaseModel):
    bads: int = Field(ge=0)
    goods: int = Field(ge=0)
    woe: float


class WoeTableDocument(BaseModel):
    feature: str
    edges: list[float]
    bins: list[WoeBinDocument]
    missing_bin: WoeBinDocument
    total_bads: int
    total_goods: int
    smoothing: float
    offset: float

    @classmethod
    def from_table(cls, table: WoeTable) -> "WoeTableDocument":
        return cls(
            feature=table.feature,
            edges=list(table.edges),
            bins=[WoeBinDocument(bads=b.bads, goods=b.goods, woe=b.woe) for b in table.bins],
            missing_bin=WoeBinDocument(
                bads=table.missing_bin.bads, goods=table.missing_bin.goods, woe=table.missing_bin.woe
            ),
            total_bads=table.total_bads,
            total_goods=table.total_goods,
            smoothing=table.smoothing,
            offset=table.offset,
        )

    def to_table(self) -> WoeTable:
        return WoeTable(
            feature=self.feature,
            edges=tuple(self.edges),
            bins=tuple(WoeBin(b.bads, b.goods, b.woe) for b in self.bins),
            missing_bin=WoeBin(self.missing_bin.bads, self.missing_bin.goods, self.missing_bin.woe),
            total_bads=self.total_bads,
            total_goods=self.total_goods,
            smoothing=self.smoothing,
            offset=self.offset,
        )


class WoeDocument(BaseModel):
    version: str = VERSION
    tables: dict[str, WoeTableDocument]

    @classmethod
    def from_tables(cls, tables: dict[str, WoeTable]) -> "WoeDocument":
        return cls(tables={name: WoeTableDocument.from_table(t) for name, t in tables.items()})

    def to_tables(self) -> dict[str, WoeTable]:
        return {name: doc.to_table() for name, doc in self.tables.items()}


def _matrix(array: np.ndarray) -> list[list[float]]:
    return np.asarray(array, dtype=float).tolist()


class ModelDocument(BaseModel):
    """Everything needed to predict, summarize and draw curves without the training data."""

    version: str = VERSION
    link: LinkDocument
    linear_terms: list[str]
    alpha: float
    beta: list[float]
    std_errors: list[float]
    p_values: list[float]
    smooth_terms: list[SmoothTermDocument]
    covariance: list[list[float]]
    deviance: float
    penalized_deviance: float
    converged: bool
    iterations: int
    n_obs: int
    woe: dict[str, WoeTableDocument] | None = None
    model_config = ConfigDict(ser_json_inf_nan="constants")

    @classmethod
    def from_model(cls, model: FittedModel, woe: dict[str, WoeTable] | None = None) -> "ModelDocument":
        smooth_terms = [
            SmoothTermDocument(
                covariate=block.covariate,
                K=block.K,
                knots=block.knots.tolist(),
                constraint=_matrix(block.constraint),
                penalty=_matrix(block.S),
                lower=block.lower,
                upper=block.upper,
                lam=float(model.lambdas[position]),
                gamma=model.gamma_blocks[position].tolist(),
                edf=float(model.edf[position]),
                chi_sq=float(model.smooth_statistics[position]),
                p_value=float(model.smooth_p_values[position]),
            )
            for position, block in enumerate(model.blocks)
        ]
        return cls(
            link=LinkDocument.from_link(model.link),
            linear_terms=list(model.spec.linear_terms),
            alpha=model.alpha,
            beta=model.beta.tolist(),
            std_errors=model.std_errors.tolist(),
            p_values=model.p_values.tolist(),
            smooth_terms=smooth_terms,
            covariance=_matrix(model.covariance),
            deviance=model.deviance,
            penalized_deviance=model.penalized_deviance,
            converged=model.converged,
            iterations=model.iterations,
            n_obs=model.n_obs,
            woe=None if woe is None else {name: WoeTableDocument.from_table(t) for name, t in woe.items()},
        )

    def to_model(self) -> FittedModel:
        spec = ModelSpec(
            link=self.link.to_link(),
            linear_terms=tuple(self.linear_terms),
            smooth_terms=tuple(SmoothSpec(s.covariate, s.K) for s in self.smooth_terms),
        )
        blocks = tuple(
            BasisBlock(
                covariate=s.covariate,
                K=s.K,
                knots=np.array(s.knots),
                constraint=np.array(s.constraint).reshape(s.K, s.K - 1),
                S=np.array(s.penalty).reshape(s.K - 1, s.K - 1),
                lower=s.lower,
                upper=s.upper,
                lam=s.lam,
            )
            for s in self.smooth_terms
        )
        return FittedModel(
            spec=spec,
            alpha=self.alpha,
            beta=np.array(self.beta, dtype=float),
            gamma_blocks=tuple(np.array(s.gamma, dtype=float) for s in self.smooth_terms),
            lambdas=np.array([s.lam for s in self.smooth_terms], dtype=float),
            blocks=blocks,
            covariance=np.array(self.covariance, dtype=float),
            edf=np.array([s.edf for s in self.smooth_terms], dtype=float),
            std_errors=np.array(self.std_errors, dtype=float),
            p_values=np.array(self.p_values, dtype=float),
            smooth_statistics=np.array([s.chi_sq for s in self.smooth_terms], dtype=float),
            smooth_p_values=np.array([s.p_value for s in self.smooth_terms], dtype=float),
            deviance=self.deviance,
            penalized_deviance=self.penalized_deviance,
            converged=self.converged,
            iterations=self.iterations,
            n_obs=self.n_obs,
        )

    def woe_tables(self) -> dict[str, WoeTable] | None:
        return None if self.woe is None else {name: doc.to_table() for name, doc in self.woe.items()}
