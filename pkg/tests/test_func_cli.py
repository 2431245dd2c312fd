import json

import pandas as pd
import pytest
from click.testing import CliRunner

from src.commands.cli import cli, main
from src.repository.datasets import load_csv, write_csv
from src.repository.models import load_document

from tests.samples import GEV_TAU, gev_portfolio

FAST = ["--tau=-0.41", "--lambda", "10"]


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "portfolio.csv"
    write_csv(gev_portfolio(n=800, seed=21), path)
    return path


@pytest.fixture(scope="module")
def split_dir(tmp_path_factory, data_csv):
    out = tmp_path_factory.mktemp("split")
    assert main(["split", "--input", str(data_csv), "--seed", "3", "--out", str(out)]) == 0
    return out


def test_split_writes_both_samples(split_dir):
    train = load_csv(split_dir / "train.csv", "default")
    control = load_csv(split_dir / "control.csv", "default")

    assert train.n + control.n == 800
    assert train.feature_names == ("leverage", "liquidity", "size")
    assert abs(train.n / 800 - 0.7) < 0.01


def test_woe_codes_training_and_control(tmp_path, split_dir):
    code = main(["woe", "--input", str(split_dir / "train.csv"), "--apply", str(split_dir / "control.csv"),
                 "--out", str(tmp_path)])

    assert code == 0
    assert (tmp_path / "woe.json").exists()
    assert not load_csv(tmp_path / "train_woe.csv", "default").has_missing
    assert not load_csv(tmp_path / "control_woe.csv", "default").has_missing


def test_impute_writes_completed_copies(tmp_path, data_csv):
    code = main(["impute", "--input", str(data_csv), "--m", "2", "--iterations", "3", "--out", str(tmp_path)])

    assert code == 0
    for j in (1, 2):
        completed = load_csv(tmp_path / f"portfolio_imp{j}.csv", "default")
        assert not completed.has_missing
    fallbacks = pd.read_csv(tmp_path / "imputation_fallbacks.csv")
    assert list(fallbacks.columns) == ["replicate", "sweep", "column"]


def test_train_predict_evaluate_curves(tmp_path, data_csv):
    assert main(["impute", "--input", str(data_csv), "--m", "1", "--out", str(tmp_path)]) == 0
    completed = str(tmp_path / "portfolio_imp1.csv")

    assert main(["train", "--input", completed, "--model", "bgeva", *FAST, "--out", str(tmp_path)]) == 0
    document = load_document(tmp_path / "model.json")
    assert document.link.tau == GEV_TAU
    assert [s.covariate for s in document.smooth_terms] == ["leverage", "liquidity", "size"]
    assert all(s.lam == 10.0 for s in document.smooth_terms)
    assert (tmp_path / "summary.txt").read_text(encoding="utf-8").startswith("Link: gev(-0.41)")

    model = str(tmp_path / "model.json")
    assert main(["predict", "--model", model, "--input", completed, "--out", str(tmp_path)]) == 0
    predictions = pd.read_csv(tmp_path / "predictions.csv")
    assert list(predictions.columns) == ["pd", "default"]
    assert predictions["pd"].between(0, 1).all()

    predictions_path = str(tmp_path / "predictions.csv")
    assert main(["evaluate", "--predictions", predictions_path, "--name", "impute-bgeva", "--out", str(tmp_path)]) == 0
    assert main(["evaluate", "--predictions", predictions_path, "--name", "again", "--out", str(tmp_path)]) == 0
    comparison = pd.read_csv(tmp_path / "comparison.csv")
    assert comparison["model"].tolist() == ["again", "impute-bgeva"]
    assert comparison["best_AUC"].all()

    assert main(["curves", "--model", model, "--grid-size", "20", "--out", str(tmp_path)]) == 0
    for term in ("leverage", "liquidity", "size"):
        curve = pd.read_csv(tmp_path / f"curve_{term}.csv")
        assert list(curve.columns) == ["x", "fit", "lo95", "hi95"]
        assert len(curve) == 20


def test_train_with_woe_tables_embeds_them(tmp_path, split_dir):
    train, control = str(split_dir / "train.csv"), str(split_dir / "control.csv")
    assert main(["woe", "--input", train, "--out", str(tmp_path)]) == 0

    code = main(["train", "--input", train, "--model", "logit", "--woe", str(tmp_path / "woe.json"),
                 "--out", str(tmp_path)])

    assert code == 0
    assert load_document(tmp_path / "model.json").woe is not None
    assert main(["predict", "--model", str(tmp_path / "model.json"), "--input", control, "--out", str(tmp_path)]) == 0
    assert len(pd.read_csv(tmp_path / "predictions.csv")) == load_csv(control, "default").n


def test_summary_and_describe_print_tables(tmp_path, data_csv):
    runner = CliRunner()
    completed = tmp_path / "complete.csv"
    write_csv(gev_portfolio(n=400, seed=2, missing_rate=0.0), completed)
    assert main(["train", "--input", str(completed), "--model", "gev", "--tau=-0.41", "--out", str(tmp_path)]) == 0

    summary = runner.invoke(cli, ["summary", "--model", str(tmp_path / "model.json")])
    described = runner.invoke(cli, ["describe", "--input", str(data_csv)])

    assert summary.exit_code == 0, summary.output
    assert "Parametric coefficients:" in summary.output
    assert "leverage" in summary.output
    assert described.exit_code == 0, described.output
    assert "missing_pct" in described.output


def test_simulate_is_seeded(tmp_path):
    design = {
        "n": 300,
        "intercept": -1.5,
        "tau": -0.41,
        "linear": [{"name": "leverage", "coefficient": 0.6}],
        "smooth": [{"name": "liquidity", "truth": "sin"}],
        "missing_rate": 0.1,
        "missing_driver": "leverage",
    }
    config_path = tmp_path / "design.json"
    config_path.write_text(json.dumps(design), encoding="utf-8")

    for name in ("a.csv", "b.csv"):
        assert main(["simulate", "--config", str(config_path), "--seed", "4", "--out", str(tmp_path / name)]) == 0

    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    simulated = load_csv(tmp_path / "a.csv", "default")
    assert simulated.n == 300
    assert simulated.has_missing


def test_pipeline_is_deterministic(tmp_path, data_csv):
    args = ["pipeline", "--input", str(data_csv), "--method", "woe", "--model", "logit", "--model", "bgeva",
            *FAST, "--seed", "5"]

    assert main([*args, "--out", str(tmp_path / "first")]) == 0
    assert main([*args, "--out", str(tmp_path / "second")]) == 0

    for name in ("comparison.csv", "comparison.txt", "significance.csv", "woe-bgeva/predictions.csv",
                 "woe-bgeva/model.json", "woe-logit/summary.txt"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes(), name
    comparison = pd.read_csv(tmp_path / "first" / "comparison.csv")
    assert comparison[["method", "model"]].values.tolist() == [["woe", "logit"], ["woe", "bgeva"]]
    assert "*" in (tmp_path / "first" / "comparison.txt").read_text(encoding="utf-8")


def test_pipeline_from_config_with_imputation(tmp_path, data_csv):
    experiment = {
        "input": str(data_csv),
        "methods": ["impute"],
        "models": ["gev"],
        "tau": GEV_TAU,
        "seed": 1,
        "out": str(tmp_path / "run"),
    }
    config_path = tmp_path / "experiment.json"
    config_path.write_text(json.dumps(experiment), encoding="utf-8")

    assert main(["pipeline", "--config", str(config_path)]) == 0

    cell = tmp_path / "run" / "impute-gev"
    assert sorted(p.name for p in cell.glob("model-*.json")) == [f"model-{j}.json" for j in range(1, 6)]
    pooled = pd.read_csv(cell / "pooled.csv")
    assert pooled["term"].tolist() == ["(Intercept)", "leverage", "liquidity", "size"]
    assert (tmp_path / "run" / "train.csv").exists()


def test_usage_errors_exit_with_one(tmp_path, data_csv):
    assert main(["pipeline", "--method", "woe"]) == 1
    assert main(["train", "--input", str(tmp_path / "absent.csv"), "--out", str(tmp_path)]) == 1
    assert main(["train", "--input", str(data_csv), "--model", "probit", "--out", str(tmp_path)]) == 1
    assert main(["train", "--input", str(data_csv), "--smooth", "size:2", "--out", str(tmp_path)]) == 1
    assert main(["--help"]) == 0


def test_data_errors_exit_with_two(tmp_path, data_csv, capsys):
    broken = tmp_path / "broken.csv"
    broken.write_text("x,default\n1,0\noops,1\n", encoding="utf-8")

    assert main(["describe", "--input", str(broken)]) == 2
    assert main(["train", "--input", str(data_csv), "--model", "logit", "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err
