import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from src.conf import messages
from src.conf.config import config
from src.services.errors import InvalidDatasetError, MissingCovariateError, UnknownTermError


def _frozen(array, dtype=float) -> np.ndarray:
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rectangular table of numeric features with per-cell missingness and a binary response.

    Missing cells are stored as NaN; ``missing`` exposes them as a boolean mask.
    Arrays are copied and made read-only on construction.
    """

    feature_names: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        names = tuple(str(name) for name in self.feature_names)
        x = np.array(self.x, dtype=float, copy=True)
        y = np.asarray(self.y)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise InvalidDatasetError(messages.EMPTY_DATASET)
        if len(names) != x.shape[1] or len(set(names)) != len(names):
            raise InvalidDatasetError("feature_names must be unique and match the number of columns")
        if y.shape != (x.shape[0],):
            raise InvalidDatasetError("y must hold one response per row")
        if not np.all((y == 0) | (y == 1)):
            raise InvalidDatasetError("y values must be exactly 0 or 1")
        if np.isinf(x).any():
            raise InvalidDatasetError("feature values must be finite or missing")
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.x)

    @property
    def has_missing(self) -> bool:
        return bool(self.missing.any())

    @property
    def n_defaults(self) -> int:
        return int(self.y.sum())

    def index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise MissingCovariateError(messages.MISSING_COVARIATE.format(column=name)) from None

    def column(self, name: str) -> np.ndarray:
        return self.x[:, self.index(name)]

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=int)
        return Dataset(self.feature_names, self.x[rows], self.y[rows])

    def with_x(self, x, feature_names=None) -> "Dataset":
        return Dataset(feature_names or self.feature_names, x, self.y)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.feature_names == other.feature_names
            and np.array_equal(self.x, other.x, equal_nan=True)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None


class LinkKind(enum.Enum):
    logit = "logit"
    loglog = "loglog"
    gev = "gev"


@dataclass(frozen=True)
class LinkSpec:
    """Link between the linear predictor and the default probability.

    ``tau`` is the GEV tail parameter and is only carried by the GEV kind;
    the tau -> 0 limit is the LogLog kind.
    """

    kind: LinkKind
    tau: float | None = None
    epsilon: float = field(default_factory=lambda: config.EPSILON)

    def __post_init__(self):
        kind = LinkKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is LinkKind.gev:
            if self.tau is None or not math.isfinite(self.tau) or self.tau == 0:
                raise ValueError("GEV link requires a finite non-zero tau")
            object.__setattr__(self, "tau", float(self.tau))
        elif self.tau is not None:
            raise ValueError(f"{kind.value} link takes no tau")
        if not 0 < self.epsilon < 1e-4:
            raise ValueError("epsilon must lie in (0, 1e-4)")

    @property
    def name(self) -> str:
        if self.kind is LinkKind.gev:
            return f"gev({self.tau:g})"
        return self.kind.value


@dataclass(frozen=True)
class CovariateDistribution:
    """Uniform on [a, b] or normal with mean a and standard deviation b."""

    kind: str = "uniform"
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "normal"):
            raise ValueError("distribution must be 'uniform' or 'normal'")
        if self.kind == "uniform" and not self.a < self.b:
            raise ValueError("uniform distribution needs a < b")
        if self.kind == "normal" and self.b <= 0:
            raise ValueError("normal distribution needs a positive standard deviation")


@dataclass(frozen=True)
class LinearEffect:
    name: str
    coefficient: float
    distribution: CovariateDistribution = CovariateDistribution()


@dataclass(frozen=True)
class SmoothEffect:
    name: str
    truth: str
    distribution: CovariateDistribution = CovariateDistribution()


@dataclass(frozen=True)
class MissingMechanism:
    """MAR missingness: the chance that a cell of ``columns`` is missing grows with the rank
    of the always-observed ``driver`` covariate.

    Empty ``columns`` means every covariate except the driver; ``driver`` None means the
    first covariate.
    """

    columns: tuple[str, ...] = ()
    driver: str | None = None
    strength: float = 0.5

    def __post_init__(self):
        if not 0 <= self.strength <= 1:
            raise ValueError("strength must lie in [0, 1]")


@dataclass(frozen=True)
class SimSpec:
    n: int
    intercept: float
    link: LinkSpec
    linear_effects: tuple[LinearEffect, ...] = ()
    smooth_effects: tuple[SmoothEffect, ...] = ()
    missing_rate: float = 0.0
    missing_mechanism: MissingMechanism = MissingMechanism()
    seed: int = 0
    clamp: bool = True

    def __post_init__(self):
        object.__setattr__(self, "linear_effects", tuple(self.linear_effects))
        object.__setattr__(self, "smooth_effects", tuple(self.smooth_effects))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.missing_rate < 1:
            raise ValueError("missing_rate must lie in [0, 1)")
        if not self.linear_effects and not self.smooth_effects:
            raise ValueError("at least one covariate is required")
        names = [e.name for e in self.linear_effects + self.smooth_effects]
        if len(set(names)) != len(names):
            raise ValueError("covariate names must be unique")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.linear_effects + self.smooth_effects)


@dataclass(frozen=True, eq=False)
class BasisBlock:
    """Centered cubic B-spline basis and difference penalty of one covariate.

    ``constraint`` maps the K raw coefficients to the K-1 centered ones
    (raw = constraint @ gamma). ``B`` is the centered design on the training
    rows and is dropped once a model is fitted.
    """

    covariate: str
    K: int
    knots: np.ndarray
    constraint: np.ndarray
    S: np.ndarray
    lower: float
    upper: float
    B: np.ndarray | None = None
    lam: float = 0.0

    @property
    def dim(self) -> int:
        return self.K - 1

    def with_lambda(self, lam: float) -> "BasisBlock":
        return replace(self, lam=float(lam))

    def without_design(self) -> "BasisBlock":
        return replace(self, B=None)


@dataclass(frozen=True)
class SmoothSpec:
    covariate: str
    K: int = field(default_factory=lambda: config.DEFAULT_K)


@dataclass(frozen=True)
class ModelSpec:
    link: LinkSpec
    linear_terms: tuple[str, ...] = ()
    smooth_terms: tuple[SmoothSpec, ...] = ()
    include_intercept: bool = True

    def __post_init__(self):
        linear = tuple(self.linear_terms)
        smooth = tuple(s if isinstance(s, SmoothSpec) else SmoothSpec(*s) for s in self.smooth_terms)
        object.__setattr__(self, "linear_terms", linear)
        object.__setattr__(self, "smooth_terms", smooth)
        if not self.include_intercept:
            raise ValueError("models always include an intercept")
        smooth_names = [s.covariate for s in smooth]
        if len(set(linear)) != len(linear) or len(set(smooth_names)) != len(smooth_names):
            raise ValueError("a covariate may appear only once per term list")
        if set(linear) & set(smooth_names):
            raise ValueError("a covariate cannot be both linear and smooth")

    @property
    def smooth_names(self) -> tuple[str, ...]:
        return tuple(s.covariate for s in self.smooth_terms)

    @property
    def covariates(self) -> tuple[str, ...]:
        return self.linear_terms + self.smooth_names

    @property
    def is_additive(self) -> bool:
        return bool(self.smooth_terms)

    def with_link(self, link: LinkSpec) -> "ModelSpec":
        return replace(self, link=link)


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Converged (or diagnosed) penalized fit.

    Coefficients are laid out as [alpha, beta..., gamma_1..., gamma_2..., ...];
    ``covariance`` is the penalized (Bayesian) covariance in that order.
    ``std_errors``/``p_values`` cover the intercept and linear terms,
    ``smooth_p_values``/``edf`` the smooth terms.
    """

    spec: ModelSpec
    alpha: float
    beta: np.ndarray
    gamma_blocks: tuple[np.ndarray, ...]
    lambdas: np.ndarray
    blocks: tuple[BasisBlock, ...]
    covariance: np.ndarray
    edf: np.ndarray
    std_errors: np.ndarray
    p_values: np.ndarray
    smooth_statistics: np.ndarray
    smooth_p_values: np.ndarray
    deviance: float
    penalized_deviance: float
    converged: bool
    iterations: int
    n_obs: int

    @property
    def tau(self) -> float | None:
        return self.spec.link.tau

    @property
    def link(self) -> LinkSpec:
        return self.spec.link

    @property
    def coefficients(self) -> np.ndarray:
        return np.concatenate([[self.alpha], self.beta, *self.gamma_blocks])

    @property
    def n_parametric(self) -> int:
        return 1 + len(self.spec.linear_terms)

    @property
    def parametric_names(self) -> list[str]:
        return ["(Intercept)", *self.spec.linear_terms]

    @property
    def total_edf(self) -> float:
        return float(self.edf.sum()) + self.n_parametric

    def smooth_slice(self, position: int) -> slice:
        start = self.n_parametric + sum(b.dim for b in self.blocks[:position])
        return slice(start, start + self.blocks[position].dim)

    def block(self, term: str) -> tuple[int, BasisBlock]:
        for position, block in enumerate(self.blocks):
            if block.covariate == term:
                return position, block
        raise UnknownTermError(messages.UNKNOWN_TERM.format(term=term))


@dataclass(frozen=True)
class WoeBin:
    bads: int
    goods: int
    woe: float = 0.0

    @property
    def count(self) -> int:
        return self.bads + self.goods

    @property
    def bad_rate(self) -> float:
        return self.bads / self.count if self.count else math.nan


@dataclass(frozen=True)
class WoeTable:
    """Weights-of-Evidence classes of one feature.

    Finite bin ``i`` covers ``(edges[i-1], edges[i]]`` with the outer bins open
    towards -inf and +inf, so ``len(bins) == len(edges) + 1``. ``smoothing`` is the
    count offset actually applied (0 unless some non-empty bin has a zero count);
    ``offset`` is the configured value it takes when applied.
    """

    feature: str
    edges: tuple[float, ...]
    bins: tuple[WoeBin, ...]
    missing_bin: WoeBin
    total_bads: int
    total_goods: int
    smoothing: float = 0.0
    offset: float = field(default_factory=lambda: config.WOE_SMOOTHING)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(float(e) for e in self.edges))
        object.__setattr__(self, "bins", tuple(self.bins))
        if len(self.bins) != len(self.edges) + 1:
            raise ValueError("a WoE table needs exactly one more bin than edges")

    @property
    def all_bins(self) -> tuple[WoeBin, ...]:
        return self.bins + (self.missing_bin,)


@dataclass(frozen=True)
class ImputationPolicy:
    m: int = field(default_factory=lambda: config.IMPUTATION_M)
    iterations: int = field(default_factory=lambda: config.IMPUTATION_ITERATIONS)
    seed: int = 0
    noise: bool = True
    use_response: bool = True

    def __post_init__(self):
        if self.m < 1 or self.iterations < 1:
            raise ValueError("m and iterations must be at least 1")


@dataclass(frozen=True)
class MetricsReport:
    mae_plus: float
    mse_plus: float
    auc: float
    n_defaults: int
    n_total: int
