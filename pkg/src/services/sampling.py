"""Stratified splitting, synthetic portfolios and descriptive statistics."""
import logging
import math

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from src.conf import messages
from src.entity.models import CovariateDistribution, Dataset, LinkKind, SimSpec
from src.services.errors import LinkSupportError, StratificationError
from src.services.links import link_inverse, support

logger = logging.getLogger(__name__)

TRUTHS = {
    "sin": lambda x: np.sin(2 * np.pi * x),
    "linear": lambda x: x,
    "quadratic": lambda x: 4 * (x - 0.5) ** 2,
    "bump": lambda x: np.exp(-20 * (x - 0.5) ** 2),
    "decay": lambda x: np.exp(-3 * x),
    "zero": lambda x: np.zeros_like(x),
}


def stratified_split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Split into training and control samples, stratified on the default indicator.

    Each class is shuffled independently and ``floor(train_fraction * n_class + 0.5)``
    of its rows go to training. Both parts keep the original row order.

    :param ds: Dataset to split.
    :type ds: Dataset
    :param train_fraction: Share of each class in the training sample, in (0, 1).
    :type train_fraction: float
    :param seed: Random seed.
    :type seed: int
    :raises StratificationError: If a class has fewer than 2 members.
    :return: Training and control datasets.
    :rtype: tuple[Dataset, Dataset]
    """
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train_rows = []
    for label in (0, 1):
        members = np.flatnonzero(ds.y == label)
        if members.size < 2:
            raise StratificationError(messages.CANNOT_STRATIFY.format(label=label, count=members.size))
        take = math.floor(train_fraction * members.size + 0.5)
        train_rows.append(rng.permutation(members)[:take])
    train_mask = np.zeros(ds.n, dtype=bool)
    train_mask[np.concatenate(train_rows)] = True
    train, control = ds.take(np.flatnonzero(train_mask)), ds.take(np.flatnonzero(~train_mask))
    logger.info("split %d rows into %d training (%d defaults) and %d control (%d defaults)",
                ds.n, train.n, train.n_defaults, control.n, control.n_defaults)
    return train, control


def _draw(rng: np.random.Generator, distribution: CovariateDistribution, n: int) -> np.ndarray:
    if distribution.kind == "uniform":
        return rng.uniform(distribution.a, distribution.b, n)
    return rng.normal(distribution.a, distribution.b, n)


def _inject_missing(x: np.ndarray, names: tuple[str, ...], spec: SimSpec, rng: np.random.Generator) -> np.ndarray:
    mechanism = spec.missing_mechanism
    driver = names.index(mechanism.driver) if mechanism.driver is not None else 0
    targets = [names.index(c) for c in mechanism.columns] if mechanism.columns else \
        [j for j in range(len(names)) if j != driver]
    if driver in targets:
        raise ValueError("the MAR driver covariate must stay observed")
    ranks = (rankdata(x[:, driver]) - 0.5) / x.shape[0]
    probability = np.clip(spec.missing_rate * (1 + mechanism.strength * (2 * ranks - 1)), 0, 1)
    x = x.copy()
    for j in targets:
        x[rng.random(x.shape[0]) < probability, j] = np.nan
    return x


def simulate(spec: SimSpec) -> Dataset:
    """Generate a synthetic portfolio.

    ``eta = intercept + sum(beta * x) + sum(truth(x))``, ``PD = inverse link(eta)``,
    ``y ~ Bernoulli(PD)``; MAR missingness is injected after the response is drawn.

    :param spec: Simulation design.
    :type spec: SimSpec
    :raises LinkSupportError: If ``clamp`` is off and eta leaves the GEV support.
    :return: The simulated dataset.
    :rtype: Dataset
    """
    rng = np.random.default_rng(spec.seed)
    eta = np.full(spec.n, float(spec.intercept))
    columns = []
    for effect in spec.linear_effects:
        values = _draw(rng, effect.distribution, spec.n)
        eta += effect.coefficient * values
        columns.append(values)
    for effect in spec.smooth_effects:
        values = _draw(rng, effect.distribution, spec.n)
        eta += TRUTHS[effect.truth](values)
        columns.append(values)
    if not spec.clamp and spec.link.kind is LinkKind.gev and not np.all(support(spec.link, eta)):
        raise LinkSupportError()

    probability = link_inverse(spec.link, eta)
    y = (rng.random(spec.n) < probability).astype(np.int64)
    x = np.column_stack(columns)
    if spec.missing_rate > 0:
        x = _inject_missing(x, spec.feature_names, spec, rng)
    logger.info("simulated %d rows under %s: default rate %.4f", spec.n, spec.link.name, y.mean())
    return Dataset(spec.feature_names, x, y)


def describe(ds: Dataset) -> pd.DataFrame:
    """Per-feature mean, std, median, min, max and percentage of missing cells."""
    frame = pd.DataFrame(ds.x, columns=list(ds.feature_names))
    table = pd.DataFrame({
        "mean": frame.mean(),
        "std": frame.std(),
        "median": frame.median(),
        "min": frame.min(),
        "max": frame.max(),
        "missing_pct": 100 * frame.isna().mean(),
    })
    table.index.name = "feature"
    return table
