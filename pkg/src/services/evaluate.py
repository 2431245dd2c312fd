"""Out-of-sample accuracy measures and the cross-model comparison report."""
import logging
from collections.abc import Mapping

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from src.conf import messages
from src.entity.models import MetricsReport
from src.services.errors import InvalidDatasetError, SingleClassError
from src.services.fit import ModelSummary

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("MAE+", "MSE+", "AUC")
LOWER_IS_BETTER = {"MAE+": True, "MSE+": True, "AUC": False}


def _vectors(pd_or_scores, y) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(pd_or_scores, dtype=float).ravel()
    y = np.asarray(y).ravel()
    if scores.shape != y.shape:
        raise ValueError(f"{scores.size} scores for {y.size} responses")
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("responses must be 0 or 1")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    return scores, y.astype(np.int64)


def mae_mse_plus(pd_, y) -> tuple[float, float]:
    """Mean absolute and mean squared error over the defaults only.

    :param pd_: Predicted default probabilities.
    :type pd_: array-like
    :param y: Observed 0/1 defaults.
    :type y: array-like
    :raises InvalidDatasetError: If there is no default.
    :return: ``(MAE+, MSE+)``.
    :rtype: tuple[float, float]
    """
    pd_, y = _vectors(pd_, y)
    if not y.any():
        raise InvalidDatasetError(messages.NO_DEFAULTS)
    error = 1 - pd_[y == 1]
    return float(np.mean(np.abs(error))), float(np.mean(error ** 2))


def auc(scores, y) -> float:
    """Area under the ROC curve by the Mann-Whitney rank sum; ties get midranks.

    :raises SingleClassError: If ``y`` holds one class only.
    """
    scores, y = _vectors(scores, y)
    n_defaults = int(y.sum())
    n_goods = y.size - n_defaults
    if n_defaults == 0 or n_goods == 0:
        raise SingleClassError()
    ranks = rankdata(scores, method="average")
    u = ranks[y == 1].sum() - n_defaults * (n_defaults + 1) / 2
    return float(u / (n_defaults * n_goods))


def evaluate(pd_, y) -> MetricsReport:
    mae, mse = mae_mse_plus(pd_, y)
    y = np.asarray(y)
    report = MetricsReport(mae, mse, auc(pd_, y), int(y.sum()), int(y.size))
    logger.info("MAE+ %.6f  MSE+ %.6f  AUC %.6f", report.mae_plus, report.mse_plus, report.auc)
    return report


def compare_models(reports: Mapping) -> pd.DataFrame:
    """Comparison table with one row per report and the best value of each measure flagged.

    :param reports: Reports keyed by model name or by ``(method, model)`` pairs.
    :type reports: Mapping[str | tuple[str, str], MetricsReport]
    :return: ``MAE+``, ``MSE+``, ``AUC``, counts and a ``best_<measure>`` flag per measure;
        ties are all flagged.
    :rtype: pd.DataFrame
    """
    if not reports:
        raise ValueError("nothing to compare")
    keys = list(reports)
    if all(isinstance(key, tuple) for key in keys):
        index = pd.MultiIndex.from_tuples(keys, names=["method", "model"])
    else:
        index = pd.Index([str(key) for key in keys], name="model")
    table = pd.DataFrame(
        {
            "MAE+": [r.mae_plus for r in reports.values()],
            "MSE+": [r.mse_plus for r in reports.values()],
            "AUC": [r.auc for r in reports.values()],
            "n_defaults": [r.n_defaults for r in reports.values()],
            "n_total": [r.n_total for r in reports.values()],
        },
        index=index,
    )
    for column in METRIC_COLUMNS:
        best = table[column].min() if LOWER_IS_BETTER[column] else table[column].max()
        table[f"best_{column}"] = table[column] == best
    return table


def format_comparison(table: pd.DataFrame, digits: int = 4) -> str:
    """Aligned plain-text rendering of :func:`compare_models` output; best values are starred."""
    shown = pd.DataFrame(index=table.index)
    for column in METRIC_COLUMNS:
        shown[column] = [
            f"{value:.{digits}f}{'*' if best else ' '}"
            for value, best in zip(table[column], table[f"best_{column}"])
        ]
    return shown.to_string() + "\n"


def significant_terms(summary: ModelSummary, level: float = 0.10) -> pd.Series:
    """Covariates of one model whose Wald p-value is below ``level``.

    Parametric terms use the coefficient z-test, smooth terms the chi-square test.
    """
    parametric = summary.parametric["p-value"].drop("(Intercept)", errors="ignore")
    smooth = summary.smooth["p-value"] if not summary.smooth.empty else pd.Series(dtype=float)
    p_values = pd.concat([parametric, smooth])
    return (p_values < level).rename("significant")


def significance_matrix(summaries: Mapping[str, ModelSummary], level: float = 0.10) -> pd.DataFrame:
    """Covariates by models; ``<NA>`` where a model does not use the covariate."""
    matrix = pd.DataFrame({name: significant_terms(s, level) for name, s in summaries.items()})
    matrix.index.name = "term"
    return matrix.astype("boolean")
