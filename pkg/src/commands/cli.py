"""``gevscore`` command line: one subcommand per pipeline stage plus ``pipeline`` for the full grid."""
import logging
import sys
from pathlib import Path

import click
import pandas as pd
from pydantic import ValidationError

from src.conf.config import config, setup_logging
from src.entity.models import Dataset, ImputationPolicy
from src.repository import models as repository_models
from src.repository.datasets import load_csv, write_csv
from src.repository.files import atomic_write_text
from src.schemas.run import ExperimentConfig, RunConfig
from src.schemas.simulation import SimConfig
from src.services.errors import ConvergenceError, ScoringError
from src.services.evaluate import compare_models, evaluate, format_comparison
from src.services.fit import predict, smooth_curve, summarize
from src.services.pipeline import run_experiment, train_model
from src.services.preprocess import apply_woe, fit_woe_tables, impute_fcs
from src.services.sampling import describe, simulate, stratified_split
from src.services.seeds import derive_seed

logger = logging.getLogger(__name__)

MODELS = ("logit", "gev", "alogit", "bgeva")
METHODS = ("woe", "impute")


class SelectOrFloat(click.ParamType):
    name = "real|select"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        if str(value).strip().lower() == "select":
            return "select"
        try:
            return float(value)
        except ValueError:
            self.fail(f"{value!r} is neither a number nor 'select'", param, ctx)


SELECT_OR_FLOAT = SelectOrFloat()


def input_option(f):
    return click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False),
                        help="Input CSV file with a header row.")(f)


def response_option(f):
    return click.option("--response", default="default", show_default=True,
                        help="Name of the 0/1 default column.")(f)


def seed_option(f):
    return click.option("--seed", default=0, show_default=True, type=int, help="Run seed.")(f)


def out_option(f):
    return click.option("--out", required=True, type=click.Path(file_okay=False),
                        help="Output directory.")(f)


def model_options(f):
    for option in reversed([
        click.option("--model", type=click.Choice(MODELS), default="bgeva", show_default=True),
        click.option("--tau", type=SELECT_OR_FLOAT, default="select", show_default=True,
                     help="GEV tail parameter or 'select' (GEV models only)."),
        click.option("--smooth", default="", help="Smooth terms as name:K,... (additive models only)."),
        click.option("--lambda", "lambda_", type=SELECT_OR_FLOAT, default="select", show_default=True,
                     help="Smoothing parameter or 'select'."),
    ]):
        f = option(f)
    return f


@click.group()
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Overrides LOG_LEVEL.")
def cli(log_level):
    """Default-probability scoring with GEV and logit GLMs and GAMs."""
    setup_logging(log_level.upper() if log_level else None)


@cli.command()
@input_option
@response_option
@click.option("--train-frac", default=0.7, show_default=True, type=click.FloatRange(0, 1, min_open=True,
                                                                                   max_open=True))
@seed_option
@out_option
def split(input_path, response, train_frac, seed, out):
    """Stratified training/control split into train.csv and control.csv."""
    ds = load_csv(input_path, response)
    train, control = stratified_split(ds, train_frac, derive_seed(seed, "split"))
    write_csv(train, Path(out) / "train.csv", response)
    write_csv(control, Path(out) / "control.csv", response)


@cli.command()
@input_option
@response_option
@click.option("--apply", "apply_paths", multiple=True, type=click.Path(exists=True, dir_okay=False),
              help="Further CSV files to code with the fitted tables.")
@click.option("--bins", default=None, type=click.IntRange(min=2), help="Fine classes per feature.")
@click.option("--min-rate-gap", default=None, type=click.FloatRange(min=0))
@click.option("--min-bin-count", default=None, type=click.IntRange(min=0))
@out_option
def woe(input_path, response, apply_paths, bins, min_rate_gap, min_bin_count, out):
    """Fit WoE tables on the input (training) file and write woe.json plus coded copies."""
    train = load_csv(input_path, response)
    tables = fit_woe_tables(train, n_bins=bins, min_rate_gap=min_rate_gap, min_bin_count=min_bin_count)
    out = Path(out)
    repository_models.save_woe(tables, out / "woe.json")
    for path in (input_path, *apply_paths):
        coded = apply_woe(tables, load_csv(path, response))
        write_csv(coded, out / f"{Path(path).stem}_woe.csv", response)


@cli.command()
@input_option
@response_option
@click.option("--m", default=None, type=click.IntRange(min=1), help="Number of completed datasets.")
@click.option("--iterations", default=None, type=click.IntRange(min=1), help="FCS sweeps.")
@click.option("--use-response/--no-response", default=True, show_default=True,
              help="Whether the default indicator enters the imputation models.")
@click.option("--noise/--no-noise", default=True, show_default=True)
@seed_option
@out_option
def impute(input_path, response, m, iterations, use_response, noise, seed, out):
    """Multiple imputation by chained linear regressions into <stem>_imp<j>.csv files."""
    ds = load_csv(input_path, response)
    policy = ImputationPolicy(
        m=config.IMPUTATION_M if m is None else m,
        iterations=config.IMPUTATION_ITERATIONS if iterations is None else iterations,
        seed=derive_seed(seed, "impute"),
        noise=noise,
        use_response=use_response,
    )
    result = impute_fcs(ds, policy)
    out = Path(out)
    for j, completed in enumerate(result, start=1):
        write_csv(completed, out / f"{Path(input_path).stem}_imp{j}.csv", response)
    fallbacks = pd.DataFrame([vars(f) for f in result.fallbacks], columns=["replicate", "sweep", "column"])
    repository_models.write_frame(fallbacks, out / "imputation_fallbacks.csv")


@cli.command()
@input_option
@response_option
@model_options
@click.option("--woe", "woe_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="WoE tables to apply to the input first; they are embedded in the model.")
@seed_option
@out_option
def train(input_path, response, model, tau, smooth, lambda_, woe_path, seed, out):
    """Fit one model on complete training data and write model.json and summary.txt."""
    run = RunConfig(input=input_path, response=response, model=model, tau=tau, smooth=smooth,
                    lambda_=lambda_, seed=seed, out=out)
    ds = load_csv(input_path, response)
    tables = repository_models.load_woe(woe_path) if woe_path else None
    if tables:
        ds = apply_woe(tables, ds)
    fitted = train_model(ds, run)
    summary = summarize(fitted)
    out = Path(out)
    repository_models.save_model(fitted, out / "model.json", tables)
    atomic_write_text(out / "summary.txt", summary.to_text() + "\n")


def _scoring_data(document, input_path, response) -> Dataset:
    ds = load_csv(input_path, response)
    tables = document.woe_tables()
    return apply_woe(tables, ds) if tables else ds


@cli.command("predict")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@input_option
@response_option
@out_option
def predict_command(model_path, input_path, response, out):
    """Score a CSV file with a saved model into predictions.csv (pd, default)."""
    document = repository_models.load_document(model_path)
    ds = _scoring_data(document, input_path, response)
    pd_ = predict(document.to_model(), ds)
    repository_models.write_predictions(pd_, Path(out) / "predictions.csv", ds.y)


@cli.command("evaluate")
@click.option("--predictions", required=True, type=click.Path(exists=True, dir_okay=False),
              help="CSV with pd and default columns.")
@click.option("--name", required=True, help="Row label in the comparison table, e.g. woe-bgeva.")
@out_option
def evaluate_command(predictions, name, out):
    """Write metrics.csv and add the result to comparison.csv / comparison.txt."""
    frame = repository_models.read_predictions(predictions)
    if "pd" not in frame or "default" not in frame:
        raise click.UsageError("predictions file needs 'pd' and 'default' columns")
    report = evaluate(frame["pd"].to_numpy(), frame["default"].to_numpy())
    out = Path(out)
    repository_models.write_metrics(report, out / "metrics.csv", name)

    comparison = out / "comparison.csv"
    rows = dict(repository_models.read_metrics(comparison)) if comparison.exists() else {}
    rows[name] = report
    table = compare_models(dict(sorted(rows.items())))
    repository_models.write_frame(table, comparison, index=True)
    atomic_write_text(out / "comparison.txt", format_comparison(table))
    click.echo(format_comparison(table), nl=False)


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--grid-size", default=100, show_default=True, type=click.IntRange(min=2))
@out_option
def curves(model_path, grid_size, out):
    """One curve_<term>.csv per smooth term with columns x, fit, lo95, hi95."""
    model = repository_models.load_model(model_path)
    for term in model.spec.smooth_names:
        curve = smooth_curve(model, term, grid_size)
        repository_models.write_frame(curve.to_frame(), Path(out) / f"curve_{term}.csv")


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
def summary(model_path):
    """Print the coefficient and smooth-term tables of a saved model."""
    click.echo(summarize(repository_models.load_model(model_path)).to_text())


@cli.command("describe")
@input_option
@response_option
def describe_command(input_path, response):
    """Print per-feature descriptive statistics and missing percentages."""
    table = describe(load_csv(input_path, response))
    click.echo(table.to_string(float_format=lambda v: f"{v:.4g}"))


@cli.command("simulate")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON simulation design.")
@click.option("--seed", default=None, type=int, help="Overrides the seed of the design.")
@click.option("--response", default="default", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output CSV file.")
def simulate_command(config_path, seed, response, out):
    """Generate a synthetic portfolio from a JSON design."""
    design = SimConfig.model_validate_json(Path(config_path).read_text(encoding="utf-8"))
    ds = simulate(design.to_spec(None if seed is None else derive_seed(seed, "simulate")))
    write_csv(ds, out, response)


@cli.command()
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="JSON experiment file; flags are ignored when given.")
@click.option("--input", "input_path", default=None, type=click.Path(exists=True, dir_okay=False))
@response_option
@click.option("--method", "methods", multiple=True, type=click.Choice(METHODS),
              help="Missing-value method(s), default both.")
@click.option("--model", "models", multiple=True, type=click.Choice(MODELS), help="Model(s), default all four.")
@click.option("--tau", type=SELECT_OR_FLOAT, default="select", show_default=True)
@click.option("--smooth", default="")
@click.option("--lambda", "lambda_", type=SELECT_OR_FLOAT, default="select", show_default=True)
@seed_option
@click.option("--train-frac", default=0.7, show_default=True, type=click.FloatRange(0, 1, min_open=True,
                                                                                   max_open=True))
@click.option("--out", default=None, type=click.Path(file_okay=False))
def pipeline(config_path, input_path, response, methods, models, tau, smooth, lambda_, seed, train_frac, out):
    """Split, preprocess, fit, evaluate and compare every method x model cell."""
    if config_path:
        experiment = ExperimentConfig.model_validate_json(Path(config_path).read_text(encoding="utf-8"))
    else:
        if input_path is None or out is None:
            raise click.UsageError("--input and --out are required without --config")
        experiment = ExperimentConfig(
            input=input_path, response=response, methods=list(methods or METHODS),
            models=list(models or MODELS), tau=tau, smooth=smooth, lambda_=lambda_, seed=seed,
            train_frac=train_frac, out=out,
        )
    table = run_experiment(experiment)
    click.echo(format_comparison(table), nl=False)


def main(argv: list[str] | None = None) -> int:
    """Run the command line and map failures to exit codes.

    :return: 0 on success, 1 on a usage or configuration error, 2 on a data or model error.
    :rtype: int
    """
    try:
        result = cli.main(args=argv, prog_name="gevscore", standalone_mode=False)
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except click.ClickException as err:
        err.show()
        return 1
    except ValidationError as err:
        click.echo(f"error: {err}", err=True)
        return 1
    except ValueError as err:
        click.echo(f"error: {err}", err=True)
        return 1
    except ConvergenceError as err:
        click.echo(f"error: {err} {err.diagnostics}", err=True)
        return 2
    except ScoringError as err:
        click.echo(f"error: {err}", err=True)
        return 2
    return result if isinstance(result, int) else 0


def run():
    sys.exit(main())
