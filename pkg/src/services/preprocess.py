"""Weights-of-Evidence coarse classing and fully conditional multiple imputation."""
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import stats

from src.conf import messages
from src.conf.config import config
from src.entity.models import Dataset, FittedModel, ImputationPolicy, WoeBin, WoeTable
from src.services.errors import InvalidDatasetError, SingleClassError, SpecMismatchError
from src.services.fit import predict
from src.services.seeds import child_generators

logger = logging.getLogger(__name__)


def _woe_bins(counts: list[tuple[int, int]], offset: float) -> tuple[list[WoeBin], float]:
    """WoE of each (bads, goods) pair; empty pairs get 0 and take no part in the totals."""
    filled = [(b, g) for b, g in counts if b + g > 0]
    smoothing = offset if any(b == 0 or g == 0 for b, g in filled) else 0.0
    if smoothing == 0 and any(b == 0 or g == 0 for b, g in filled):
        raise ValueError("a zero-count bin needs a positive smoothing offset")
    bads = sum(b + smoothing for b, _ in filled)
    goods = sum(g + smoothing for _, g in filled)
    bins = [
        WoeBin(b, g, float(np.log((b + smoothing) * goods / ((g + smoothing) * bads)))) if b + g > 0
        else WoeBin(b, g, 0.0)
        for b, g in counts
    ]
    return bins, smoothing


def _build_table(feature, edges, counts, missing, offset) -> WoeTable:
    counts = list(counts)
    bins, smoothing = _woe_bins(counts + [missing], offset)
    return WoeTable(
        feature=feature,
        edges=tuple(edges),
        bins=tuple(bins[:-1]),
        missing_bin=bins[-1],
        total_bads=sum(b for b, _ in counts) + missing[0],
        total_goods=sum(g for _, g in counts) + missing[1],
        smoothing=smoothing,
        offset=offset,
    )


def woe_fit(train: Dataset, feature: str, n_bins: int | None = None, offset: float | None = None) -> WoeTable:
    """Fine-class one feature into quantile bins plus a missing bin and compute WoE.

    ``WoE_i = ln((b_i + c) G+ / ((g_i + c) B+))`` where ``c`` is 0 unless some
    non-empty bin lacks bads or goods. Duplicate quantiles collapse and edges that
    would leave a bin without rows are dropped, so fewer than ``n_bins`` classes may
    result. A bin holding rows of one response class only is kept and triggers the offset.

    :param train: Training data with both classes.
    :type train: Dataset
    :param feature: Feature to bin.
    :type feature: str
    :param n_bins: Number of fine classes, defaults to ``config.WOE_BINS``.
    :type n_bins: int, optional
    :param offset: Zero-cell smoothing offset, defaults to ``config.WOE_SMOOTHING``.
    :type offset: float, optional
    :raises InvalidDatasetError: If the feature is entirely missing.
    :raises SingleClassError: If the training data hold one class only.
    :return: The WoE table.
    :rtype: WoeTable
    """
    n_bins = config.WOE_BINS if n_bins is None else n_bins
    offset = config.WOE_SMOOTHING if offset is None else offset
    if train.y.min() == train.y.max():
        raise SingleClassError()
    values = train.column(feature)
    observed = ~np.isnan(values)
    if not observed.any():
        raise InvalidDatasetError(messages.FEATURE_ALL_MISSING.format(column=feature))

    present = values[observed]
    edges = np.unique(np.quantile(present, np.arange(1, n_bins) / n_bins))
    edges = edges[edges < present.max()]
    occupied = np.bincount(np.searchsorted(edges, present, side="left"), minlength=edges.size + 1) > 0
    edges = edges[occupied[:-1]]
    index = np.searchsorted(edges, present, side="left")
    y = train.y[observed]
    bads = np.bincount(index[y == 1], minlength=edges.size + 1)
    goods = np.bincount(index[y == 0], minlength=edges.size + 1)
    missing_y = train.y[~observed]
    missing = (int(missing_y.sum()), int((missing_y == 0).sum()))
    table = _build_table(feature, edges, zip(bads.tolist(), goods.tolist()), missing, offset)
    logger.debug("woe %s: %d classes, smoothing %g", feature, len(table.bins), table.smoothing)
    return table


def coarse_merge(table: WoeTable, min_rate_gap: float | None = None, min_bin_count: int | None = None) -> WoeTable:
    """Greedily merge adjacent finite classes with close default rates or few members.

    Scanning left to right, the current class absorbs its right neighbour while their
    bad rates differ by less than ``min_rate_gap`` or either holds fewer than
    ``min_bin_count`` rows. The missing bin is never merged; WoE is recomputed.

    :param table: Fitted table.
    :type table: WoeTable
    :param min_rate_gap: Rate difference below which neighbours merge, defaults to ``config.WOE_MIN_RATE_GAP``.
    :type min_rate_gap: float, optional
    :param min_bin_count: Minimum class size, defaults to ``config.WOE_MIN_BIN_COUNT``.
    :type min_bin_count: int, optional
    :return: The coarse-classed table.
    :rtype: WoeTable
    """
    min_rate_gap = config.WOE_MIN_RATE_GAP if min_rate_gap is None else min_rate_gap
    min_bin_count = config.WOE_MIN_BIN_COUNT if min_bin_count is None else min_bin_count
    counts = [(table.bins[0].bads, table.bins[0].goods)]
    edges = []
    for edge, right in zip(table.edges, table.bins[1:]):
        b, g = counts[-1]
        current = WoeBin(b, g)
        close = abs(current.bad_rate - right.bad_rate) < min_rate_gap
        if close or current.count < min_bin_count or right.count < min_bin_count:
            counts[-1] = (b + right.bads, g + right.goods)
        else:
            counts.append((right.bads, right.goods))
            edges.append(edge)
    missing = (table.missing_bin.bads, table.missing_bin.goods)
    merged = _build_table(table.feature, edges, counts, missing, table.offset)
    logger.debug("coarse classes %s: %d -> %d", table.feature, len(table.bins), len(merged.bins))
    return merged


def woe_transform(table: WoeTable, values) -> np.ndarray:
    """Replace each value by its class WoE; missing values take the missing-bin WoE."""
    values = np.asarray(values, dtype=float)
    woe = np.array([b.woe for b in table.bins])
    missing = np.isnan(values)
    index = np.searchsorted(np.asarray(table.edges), np.where(missing, 0.0, values), side="left")
    return np.where(missing, table.missing_bin.woe, woe[index])


def fit_woe_tables(
    train: Dataset,
    features: Sequence[str] | None = None,
    n_bins: int | None = None,
    min_rate_gap: float | None = None,
    min_bin_count: int | None = None,
) -> dict[str, WoeTable]:
    """Fine- and coarse-class every feature (default: all) on the training sample."""
    features = train.feature_names if features is None else features
    return {
        name: coarse_merge(woe_fit(train, name, n_bins), min_rate_gap, min_bin_count)
        for name in features
    }


def apply_woe(tables: dict[str, WoeTable], ds: Dataset) -> Dataset:
    """WoE-code the tabled columns of ``ds``; other columns pass through unchanged."""
    x = np.array(ds.x)
    for name, table in tables.items():
        x[:, ds.index(name)] = woe_transform(table, ds.column(name))
    return ds.with_x(x)


@dataclass(frozen=True)
class ImputationFallback:
    replicate: int
    sweep: int
    column: str


@dataclass(frozen=True)
class ImputationResult(Sequence):
    """The m completed datasets, usable as a list, plus the mean-imputation fallbacks."""

    datasets: tuple[Dataset, ...]
    fallbacks: tuple[ImputationFallback, ...] = ()

    def __len__(self):
        return len(self.datasets)

    def __getitem__(self, item):
        return self.datasets[item]


def _impute_chain(ds: Dataset, policy: ImputationPolicy, rng: np.random.Generator, replicate: int):
    x = np.array(ds.x)
    missing = ds.missing
    means = np.nanmean(x, axis=0)
    rows, cols = np.nonzero(missing)
    x[rows, cols] = means[cols]
    incomplete = [j for j in range(ds.p) if missing[:, j].any()]
    fallbacks = []
    for sweep in range(1, policy.iterations + 1):
        for j in incomplete:
            predictors = [np.ones(ds.n), np.delete(x, j, axis=1)]
            if policy.use_response:
                predictors.append(ds.y.astype(float))
            A = np.column_stack(predictors)
            observed, absent = ~missing[:, j], missing[:, j]
            A_obs, target = A[observed], x[observed, j]
            if np.linalg.matrix_rank(A_obs) < A.shape[1]:
                logger.warning("replicate %d sweep %d: collinear predictors for %s, mean imputation used",
                               replicate, sweep, ds.feature_names[j])
                fallbacks.append(ImputationFallback(replicate, sweep, ds.feature_names[j]))
                x[absent, j] = means[j]
                continue
            coef, *_ = np.linalg.lstsq(A_obs, target, rcond=None)
            imputed = A[absent] @ coef
            if policy.noise:
                dof = A_obs.shape[0] - A.shape[1]
                residual = target - A_obs @ coef
                sigma = np.sqrt(residual @ residual / dof) if dof > 0 else 0.0
                imputed = imputed + rng.normal(0.0, sigma, imputed.size)
            x[absent, j] = imputed
    return ds.with_x(x), fallbacks


def impute_fcs(ds: Dataset, policy: ImputationPolicy | None = None, n_jobs: int | None = None) -> ImputationResult:
    """Fully conditional specification multiple imputation by linear regression.

    Missing cells start at column means; each sweep regresses every incomplete column
    on all other columns (plus ``y`` when ``policy.use_response``) over its observed
    rows and refills its missing rows, adding a normal residual draw when
    ``policy.noise``. Observed cells never change. Each of the m chains has its own
    generator spawned from ``policy.seed``.

    :param ds: Data with missing cells.
    :type ds: Dataset
    :param policy: Imputation settings, defaults to ``ImputationPolicy()``.
    :type policy: ImputationPolicy, optional
    :param n_jobs: joblib workers for the chains, defaults to ``config.N_JOBS``.
    :type n_jobs: int, optional
    :raises InvalidDatasetError: If a feature has fewer than 2 observed values.
    :return: The m completed datasets and fallback diagnostics.
    :rtype: ImputationResult
    """
    policy = ImputationPolicy() if policy is None else policy
    n_jobs = config.N_JOBS if n_jobs is None else n_jobs
    observed = (~ds.missing).sum(axis=0)
    for name, count in zip(ds.feature_names, observed):
        if count < 2:
            raise InvalidDatasetError(messages.TOO_FEW_OBSERVED.format(column=name))
    if not ds.has_missing:
        return ImputationResult(tuple(ds for _ in range(policy.m)))

    generators = child_generators(policy.seed, policy.m)
    chains = Parallel(n_jobs=n_jobs)(
        delayed(_impute_chain)(ds, policy, rng, replicate) for replicate, rng in enumerate(generators)
    )
    logger.info("imputed %d missing cells in %d datasets", int(ds.missing.sum()), policy.m)
    return ImputationResult(
        datasets=tuple(completed for completed, _ in chains),
        fallbacks=tuple(f for _, fallbacks in chains for f in fallbacks),
    )


def pool_predictions(models: Sequence[FittedModel], ds) -> np.ndarray:
    """Average the predicted PDs of m models fitted on m completed datasets.

    :param models: Models sharing one specification.
    :type models: Sequence[FittedModel]
    :param ds: One dataset scored by every model, or one dataset per model.
    :type ds: Dataset | Sequence[Dataset]
    :raises SpecMismatchError: If the models' specifications differ.
    :return: Pooled probabilities.
    :rtype: np.ndarray
    """
    if not models:
        raise ValueError("at least one model is required")
    if any(model.spec != models[0].spec for model in models):
        raise SpecMismatchError()
    datasets = [ds] * len(models) if isinstance(ds, Dataset) else list(ds)
    if len(datasets) != len(models):
        raise ValueError("one dataset per model is required")
    return np.mean([predict(model, data) for model, data in zip(models, datasets)], axis=0)


def pool_coefficients(models: Sequence[FittedModel]) -> pd.DataFrame:
    """Rubin's-rules pooling of the parametric coefficients of m imputation fits."""
    if not models:
        raise ValueError("at least one model is required")
    if any(model.spec != models[0].spec for model in models):
        raise SpecMismatchError()
    m = len(models)
    estimates = np.array([model.coefficients[:model.n_parametric] for model in models])
    variances = np.array([model.std_errors ** 2 for model in models])
    estimate = estimates.mean(axis=0)
    within = variances.mean(axis=0)
    between = estimates.var(axis=0, ddof=1) if m > 1 else np.zeros_like(estimate)
    total = within + (1 + 1 / m) * between
    with np.errstate(divide="ignore"):
        ratio = (1 + 1 / m) * between / within
        df = np.where(between > 0, (m - 1) * (1 + 1 / np.where(ratio > 0, ratio, 1)) ** 2, np.inf)
    t = estimate / np.sqrt(total)
    return pd.DataFrame(
        {
            "Estimate": estimate,
            "Within": within,
            "Between": between,
            "Std.Error": np.sqrt(total),
            "df": df,
            "p-value": 2 * stats.t.sf(np.abs(t), df),
        },
        index=pd.Index(models[0].parametric_names, name="term"),
    )
