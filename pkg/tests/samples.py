import numpy as np

from src.entity.models import (
    CovariateDistribution,
    Dataset,
    LinearEffect,
    LinkKind,
    MissingMechanism,
    SimSpec,
    SmoothEffect,
)
from src.services.links import make_link
from src.services.sampling import simulate

GEV_TAU = -0.41


def gev_portfolio(n=1500, seed=11, missing_rate=0.1) -> Dataset:
    """Low-default GEV portfolio with one linear and two nonlinear covariates."""
    return simulate(SimSpec(
        n=n,
        intercept=-1.5,
        link=make_link(LinkKind.gev, GEV_TAU),
        linear_effects=(LinearEffect("leverage", 0.6, CovariateDistribution("normal", 0.0, 1.0)),),
        smooth_effects=(
            SmoothEffect("liquidity", "sin"),
            SmoothEffect("size", "quadratic"),
        ),
        missing_rate=missing_rate,
        missing_mechanism=MissingMechanism(columns=("liquidity", "size"), driver="leverage"),
        seed=seed,
    ))


def logit_sample(n=400, seed=3, beta=(-0.5, 1.0)) -> Dataset:
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    p = 1 / (1 + np.exp(-(beta[0] + beta[1] * x)))
    y = (rng.random(n) < p).astype(int)
    return Dataset(("x",), x.reshape(-1, 1), y)
