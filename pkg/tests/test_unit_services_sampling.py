import math
import unittest

import numpy as np

from src.entity.models import (
    CovariateDistribution,
    Dataset,
    LinearEffect,
    LinkKind,
    MissingMechanism,
    SimSpec,
)
from src.services.errors import LinkSupportError, StratificationError
from src.services.links import make_link
from src.services.sampling import describe, simulate, stratified_split
from src.services.seeds import child_generators, derive_seed

from tests.samples import gev_portfolio


class TestStratifiedSplit(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(3)
        n = 501
        self.ds = Dataset(("row",), np.arange(n, dtype=float).reshape(-1, 1), (rng.random(n) < 0.1).astype(int))

    def test_class_shares(self):
        train, control = stratified_split(self.ds, 0.7, seed=1)
        for label in (0, 1):
            members = int((self.ds.y == label).sum())
            self.assertEqual(int((train.y == label).sum()), math.floor(0.7 * members + 0.5))
        self.assertEqual(train.n + control.n, self.ds.n)

    def test_parts_partition_the_rows_in_order(self):
        train, control = stratified_split(self.ds, 0.6, seed=2)
        rows = np.concatenate([train.column("row"), control.column("row")])
        np.testing.assert_array_equal(np.sort(rows), self.ds.column("row"))
        self.assertTrue(np.all(np.diff(train.column("row")) > 0))
        self.assertTrue(np.all(np.diff(control.column("row")) > 0))

    def test_seeded(self):
        self.assertEqual(stratified_split(self.ds, 0.7, 5), stratified_split(self.ds, 0.7, 5))
        self.assertNotEqual(stratified_split(self.ds, 0.7, 5)[0], stratified_split(self.ds, 0.7, 6)[0])

    def test_rare_class(self):
        y = np.zeros(20, dtype=int)
        y[0] = 1
        with self.assertRaises(StratificationError):
            stratified_split(Dataset(("x",), np.ones((20, 1)), y), 0.5, 0)

    def test_fraction_bounds(self):
        for fraction in (0.0, 1.0):
            with self.assertRaises(ValueError):
                stratified_split(self.ds, fraction, 0)


class TestSimulate(unittest.TestCase):
    def test_reproducible(self):
        self.assertEqual(gev_portfolio(n=300, seed=4), gev_portfolio(n=300, seed=4))
        self.assertNotEqual(gev_portfolio(n=300, seed=4), gev_portfolio(n=300, seed=5))

    def test_layout(self):
        ds = gev_portfolio(n=300)
        self.assertEqual(ds.feature_names, ("leverage", "liquidity", "size"))
        self.assertFalse(np.isnan(ds.column("leverage")).any())
        self.assertTrue(0 < ds.n_defaults < ds.n)

    def test_missingness_follows_the_driver(self):
        ds = gev_portfolio(n=6000, missing_rate=0.2, seed=8)
        missing = np.isnan(ds.column("liquidity"))
        self.assertAlmostEqual(missing.mean(), 0.2, delta=0.03)
        driver = ds.column("leverage")
        high = driver > np.median(driver)
        self.assertGreater(missing[high].mean(), missing[~high].mean() + 0.05)

    def test_missingness_leaves_the_response_alone(self):
        with_missing = gev_portfolio(missing_rate=0.3, seed=9)
        complete = gev_portfolio(missing_rate=0.0, seed=9)
        np.testing.assert_array_equal(with_missing.y, complete.y)
        observed = ~with_missing.missing
        np.testing.assert_array_equal(with_missing.x[observed], complete.x[observed])

    def test_support_violation_without_clamping(self):
        spec = SimSpec(
            n=200,
            intercept=0.0,
            link=make_link(LinkKind.gev, -0.5),
            linear_effects=(LinearEffect("x", 5.0, CovariateDistribution("uniform", 0.0, 1.0)),),
            clamp=False,
        )
        with self.assertRaises(LinkSupportError):
            simulate(spec)

    def test_driver_cannot_be_a_target(self):
        spec = SimSpec(
            n=50,
            intercept=0.0,
            link=make_link(LinkKind.logit),
            linear_effects=(LinearEffect("a", 1.0), LinearEffect("b", 1.0)),
            missing_rate=0.1,
            missing_mechanism=MissingMechanism(columns=("a", "b"), driver="a"),
        )
        with self.assertRaises(ValueError):
            simulate(spec)


class TestDescribe(unittest.TestCase):
    def test_statistics(self):
        x = np.array([[1.0, np.nan], [2.0, 4.0], [3.0, 6.0], [6.0, np.nan]])
        table = describe(Dataset(("a", "b"), x, [0, 1, 0, 1]))
        self.assertEqual(list(table.columns), ["mean", "std", "median", "min", "max", "missing_pct"])
        self.assertEqual(table.index.name, "feature")
        self.assertEqual(table.loc["a", "mean"], 3.0)
        self.assertEqual(table.loc["a", "median"], 2.5)
        self.assertEqual(table.loc["b", "mean"], 5.0)
        self.assertEqual(table.loc["b", "missing_pct"], 50.0)
        self.assertEqual(table.loc["a", "max"], 6.0)


class TestSeeds(unittest.TestCase):
    def test_derived_seeds_are_stable_and_distinct(self):
        self.assertEqual(derive_seed(42, "split"), derive_seed(42, "split"))
        self.assertNotEqual(derive_seed(42, "split"), derive_seed(42, "impute"))
        self.assertNotEqual(derive_seed(42, "split"), derive_seed(43, "split"))
        self.assertTrue(0 <= derive_seed(42, "split") < 2 ** 32)

    def test_child_generators(self):
        first = [g.random() for g in child_generators(7, 3)]
        second = [g.random() for g in child_generators(7, 3)]
        self.assertEqual(first, second)
        self.assertEqual(len(set(first)), 3)
