import unittest

import numpy as np
import pandas as pd
import pytest

from src.entity.models import MetricsReport
from src.services.errors import InvalidDatasetError, SingleClassError
from src.services.evaluate import (
    auc,
    compare_models,
    evaluate,
    format_comparison,
    mae_mse_plus,
    significance_matrix,
    significant_terms,
)
from src.services.fit import summarize


def _pairwise_auc(scores, y):
    defaults, goods = scores[y == 1], scores[y == 0]
    wins = (defaults[:, None] > goods[None, :]).sum() + 0.5 * (defaults[:, None] == goods[None, :]).sum()
    return wins / (defaults.size * goods.size)


class TestAccuracy(unittest.TestCase):
    def test_errors_on_defaults_only(self):
        mae, mse = mae_mse_plus([0.9, 0.2, 0.5, 0.1], [1, 0, 1, 0])
        self.assertAlmostEqual(mae, 0.3)
        self.assertAlmostEqual(mse, 0.13)

    def test_perfect_predictions(self):
        self.assertEqual(mae_mse_plus([1.0, 0.0], [1, 0]), (0.0, 0.0))

    def test_no_defaults(self):
        with self.assertRaises(InvalidDatasetError):
            mae_mse_plus([0.1, 0.2], [0, 0])

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            mae_mse_plus([0.1, 0.2, 0.3], [0, 1])

    def test_non_binary_response(self):
        with self.assertRaises(ValueError):
            auc([0.1, 0.2], [0, 2])


class TestAuc(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(31)
        self.y = rng.integers(0, 2, 300)
        self.scores = np.round(rng.random(300) + 0.3 * self.y, 1)

    def test_matches_pairwise_count_with_ties(self):
        self.assertAlmostEqual(auc(self.scores, self.y), _pairwise_auc(self.scores, self.y), places=12)

    def test_invariant_to_monotone_transforms(self):
        self.assertAlmostEqual(auc(np.exp(3 * self.scores), self.y), auc(self.scores, self.y), places=12)

    def test_extremes(self):
        y = np.array([0, 0, 1, 1])
        self.assertEqual(auc([0.1, 0.2, 0.3, 0.4], y), 1.0)
        self.assertEqual(auc([0.4, 0.3, 0.2, 0.1], y), 0.0)
        self.assertEqual(auc([0.5] * 4, y), 0.5)

    def test_tie_between_a_default_and_a_good(self):
        self.assertEqual(auc([0.9, 0.6, 0.6, 0.4], [1, 0, 1, 0]), 0.875)
        self.assertEqual(auc([0.9, 0.4, 0.6, 0.4], [1, 0, 1, 0]), 1.0)

    def test_complement_law(self):
        self.assertAlmostEqual(auc(-self.scores, self.y), 1 - auc(self.scores, self.y), places=12)

    def test_exhaustive_pairwise_oracle_on_small_samples(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = int(rng.integers(2, 51))
            y = rng.integers(0, 2, n)
            y[:2] = [0, 1]
            scores = rng.integers(0, 8, n) / 8
            self.assertAlmostEqual(auc(scores, y), _pairwise_auc(scores, y), delta=1e-12)

    def test_single_class(self):
        with self.assertRaises(SingleClassError):
            auc([0.1, 0.2], [1, 1])

    def test_report(self):
        report = evaluate(self.scores / 2, self.y)
        self.assertIsInstance(report, MetricsReport)
        self.assertEqual(report.n_defaults, int(self.y.sum()))
        self.assertEqual(report.n_total, 300)
        self.assertAlmostEqual(report.auc, auc(self.scores, self.y))


class TestComparison(unittest.TestCase):
    def setUp(self):
        self.reports = {
            ("woe", "logit"): MetricsReport(0.80, 0.66, 0.70, 40, 1000),
            ("woe", "bgeva"): MetricsReport(0.75, 0.60, 0.70, 40, 1000),
            ("impute", "gev"): MetricsReport(0.78, 0.58, 0.68, 40, 1000),
        }

    def test_best_values_are_flagged(self):
        table = compare_models(self.reports)
        self.assertEqual(table.index.names, ["method", "model"])
        self.assertEqual(table.loc[("woe", "bgeva"), "MAE+"], 0.75)
        self.assertEqual(table["best_MAE+"].tolist(), [False, True, False])
        self.assertEqual(table["best_MSE+"].tolist(), [False, False, True])
        self.assertEqual(table["best_AUC"].tolist(), [True, True, False])

    def test_plain_names(self):
        table = compare_models({"a": self.reports[("woe", "logit")], "b": self.reports[("woe", "bgeva")]})
        self.assertEqual(table.index.name, "model")
        self.assertEqual(list(table.index), ["a", "b"])

    def test_empty(self):
        with self.assertRaises(ValueError):
            compare_models({})

    def test_text_marks_the_best(self):
        text = format_comparison(compare_models(self.reports))
        self.assertIn("0.7500*", text)
        self.assertIn("0.8000 ", text)
        self.assertTrue(text.endswith("\n"))


def test_significant_terms_skip_the_intercept(logit_model):
    flags = significant_terms(summarize(logit_model))

    assert flags.name == "significant"
    assert list(flags.index) == ["x"]
    assert bool(flags["x"])


def test_significance_matrix_marks_unused_terms(logit_model, woe_model):
    model, _ = woe_model

    matrix = significance_matrix({"logit": summarize(logit_model), "gev-woe": summarize(model)})

    assert matrix.index.name == "term"
    assert list(matrix.columns) == ["logit", "gev-woe"]
    assert set(matrix.index) == {"x", "leverage", "liquidity", "size"}
    assert all(dtype == "boolean" for dtype in matrix.dtypes)
    assert pd.isna(matrix.loc["x", "gev-woe"])
    assert pd.isna(matrix.loc["leverage", "logit"])
    assert matrix.loc["x", "logit"]


@pytest.mark.parametrize("level", [0.0, 1.0 + 1e-9])
def test_significance_level_bounds(logit_model, level):
    flags = significant_terms(summarize(logit_model), level)

    assert flags.all() == (level > 1)
