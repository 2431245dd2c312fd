"""Split, preprocess, fit, predict, evaluate and export one cell or the whole methods x models grid."""
import logging
from pathlib import Path

import pandas as pd

from src.conf.config import config
from src.entity.models import Dataset, FittedModel, ImputationPolicy, LinkKind, ModelSpec
from src.repository import models as repository_models
from src.repository.datasets import load_csv, write_csv
from src.repository.files import atomic_write_text
from src.schemas.run import ExperimentConfig, RunConfig
from src.services.evaluate import compare_models, evaluate, format_comparison, significance_matrix
from src.services.fit import build_spec, fit, predict, select_lambda, select_tau, smooth_curve, summarize
from src.services.links import make_link
from src.services.preprocess import apply_woe, fit_woe_tables, impute_fcs, pool_coefficients, pool_predictions
from src.services.sampling import stratified_split
from src.services.seeds import derive_seed

logger = logging.getLogger(__name__)


def _pilot_tau() -> float:
    grid = config.tau_grid
    return grid[len(grid) // 2]


def run_spec(ds: Dataset, run: RunConfig) -> ModelSpec:
    """Model specification of a run on (complete) training data.

    Additive models smooth the listed covariates, or every feature when none is listed;
    the other features enter linearly.
    """
    if run.is_gev:
        link = make_link(LinkKind.gev, _pilot_tau())
    else:
        link = make_link(LinkKind.logit)
    smooth = (run.smooth or list(ds.feature_names)) if run.is_additive else ()
    return build_spec(ds, link, smooth=smooth)


def choose_tau(ds: Dataset, spec: ModelSpec, run: RunConfig) -> float | None:
    """Fixed or deviance-selected tail parameter; None for logit models.

    With smooth terms, lambdas are first selected at a pilot tau and held while tau is
    searched, so the grid compares links rather than smoothness.
    """
    if not run.is_gev:
        return None
    if run.tau != "select":
        return float(run.tau)
    lambdas = run.lambda_
    if spec.is_additive and lambdas == "select":
        lambdas = select_lambda(ds, spec)
    return select_tau(ds, spec, lambdas=lambdas)


def train_model(ds: Dataset, run: RunConfig) -> FittedModel:
    """Fit the run's model on complete training data, selecting tau and lambda as configured."""
    spec = run_spec(ds, run)
    tau = choose_tau(ds, spec, run)
    if tau is not None:
        spec = spec.with_link(make_link(LinkKind.gev, tau))
    return fit(ds, spec, run.lambda_)


def train_imputed(datasets, run: RunConfig) -> list[FittedModel]:
    """One model per completed dataset, sharing the specification and tau chosen on the first."""
    first = datasets[0]
    spec = run_spec(first, run)
    tau = choose_tau(first, spec, run)
    if tau is not None:
        spec = spec.with_link(make_link(LinkKind.gev, tau))
    return [fit(ds, spec, run.lambda_) for ds in datasets]


def _write_curves(model: FittedModel, out: Path):
    for term in model.spec.smooth_names:
        repository_models.write_frame(smooth_curve(model, term).to_frame(), out / f"curve_{term}.csv")


def run_cell(train: Dataset, control: Dataset, run: RunConfig, out: str | Path):
    """Fit one method/model cell on ``train`` and evaluate it on ``control``.

    WoE cells fit the tables on the training sample, code both samples and embed the
    tables in ``model.json``. Impute cells complete the training sample with the
    response among the predictors and the control sample without it, fit one model per
    completed training set and average the predicted PDs; ``model-<j>.json`` and the
    Rubin's-rules table ``pooled.csv`` are written and curves come from the first model.

    :return: The control-sample metrics and the summary of the (first) model.
    :rtype: tuple[MetricsReport, ModelSummary]
    """
    out = Path(out)
    tables = None
    if run.method == "woe":
        tables = fit_woe_tables(train)
        models = [train_model(apply_woe(tables, train), run)]
        pd_ = predict(models[0], apply_woe(tables, control))
    else:
        train_sets = impute_fcs(train, ImputationPolicy(seed=derive_seed(run.seed, "impute")))
        control_sets = impute_fcs(
            control, ImputationPolicy(seed=derive_seed(run.seed, "impute-control"), use_response=False)
        )
        models = train_imputed(train_sets, run)
        pd_ = pool_predictions(models, list(control_sets))
    report = evaluate(pd_, control.y)
    summary = summarize(models[0])

    if tables is not None:
        repository_models.save_model(models[0], out / "model.json", tables)
    else:
        for j, model in enumerate(models, start=1):
            repository_models.save_model(model, out / f"model-{j}.json")
        repository_models.write_frame(pool_coefficients(models), out / "pooled.csv", index=True)
    repository_models.write_predictions(pd_, out / "predictions.csv", control.y)
    repository_models.write_metrics(report, out / "metrics.csv", run.cell)
    atomic_write_text(out / "summary.txt", summary.to_text() + "\n")
    _write_curves(models[0], out)
    logger.info("%s: AUC %.4f on %d control rows", run.cell, report.auc, control.n)
    return report, summary


def run_experiment(experiment: ExperimentConfig) -> pd.DataFrame:
    """Run every methods x models cell on one stratified split and write the comparison table.

    Writes ``train.csv``, ``control.csv``, one directory per cell, ``comparison.csv``,
    ``comparison.txt`` and ``significance.csv`` under ``experiment.out``.
    """
    out = Path(experiment.out)
    ds = load_csv(experiment.input, experiment.response)
    train, control = stratified_split(ds, experiment.train_frac, derive_seed(experiment.seed, "split"))
    write_csv(train, out / "train.csv", experiment.response)
    write_csv(control, out / "control.csv", experiment.response)

    reports, summaries = {}, {}
    for run in experiment.runs():
        report, summary = run_cell(train, control, run, out / run.cell)
        reports[(run.method, run.model)] = report
        summaries[run.cell] = summary

    table = compare_models(reports)
    repository_models.write_frame(table, out / "comparison.csv", index=True)
    atomic_write_text(out / "comparison.txt", format_comparison(table))
    matrix = significance_matrix(summaries)
    repository_models.write_frame(matrix.astype(object).where(matrix.notna(), ""), out / "significance.csv",
                                  index=True)
    return table
