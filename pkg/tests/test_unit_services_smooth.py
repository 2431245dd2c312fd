import unittest

import numpy as np

from src.services.errors import BasisError, NotConvergedError
from src.services.smooth import (
    basis_matrix,
    build_basis,
    difference_penalty,
    effective_df,
    est_rank,
    greville,
    place_knots,
    raw_basis,
)


class TestBasis(unittest.TestCase):
    def setUp(self):
        self.x = np.random.default_rng(5).uniform(0, 1, 300)

    def test_knot_vector(self):
        knots = place_knots(np.linspace(0, 1, 101), 10)
        self.assertEqual(knots.size, 14)
        self.assertAlmostEqual(knots[3], 0.0)
        self.assertAlmostEqual(knots[-4], 1.0)
        np.testing.assert_allclose(np.diff(knots), 1 / 7, atol=1e-12)

    def test_partition_of_unity(self):
        knots = place_knots(self.x, 8)
        raw = raw_basis(self.x, knots)
        self.assertEqual(raw.shape, (300, 8))
        np.testing.assert_allclose(raw.sum(axis=1), 1.0, atol=1e-12)

    def test_centered_columns_sum_to_zero(self):
        block = build_basis(self.x, 10, "x")
        self.assertEqual(block.B.shape, (300, 9))
        self.assertEqual(block.dim, 9)
        np.testing.assert_allclose(block.B.sum(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(block.constraint.T @ block.constraint, np.eye(9), atol=1e-12)

    def test_penalty_is_symmetric_and_annihilates_lines(self):
        S = difference_penalty(10)
        np.testing.assert_allclose(S, S.T)
        np.testing.assert_allclose(S @ np.arange(10.0), 0.0, atol=1e-12)
        np.testing.assert_allclose(S @ np.ones(10), 0.0, atol=1e-12)
        self.assertGreaterEqual(np.linalg.eigvalsh(S).min(), -1e-12)

    def test_even_abscissae_give_plain_differences(self):
        np.testing.assert_allclose(difference_penalty(8, abscissae=0.3 * np.arange(8)), difference_penalty(8),
                                   atol=1e-12)

    def test_uneven_knots_keep_straight_lines_unpenalized(self):
        x = np.random.default_rng(8).normal(size=500)
        knots = place_knots(x, 10)
        xi = greville(knots)
        S = difference_penalty(10, abscissae=xi)

        self.assertFalse(np.allclose(np.diff(knots[3:-3], n=2), 0.0))
        np.testing.assert_allclose(raw_basis(x, knots) @ xi, x, atol=1e-10)
        np.testing.assert_allclose(S @ xi, 0.0, atol=1e-10)
        np.testing.assert_allclose(S @ np.ones(10), 0.0, atol=1e-10)
        self.assertGreater(np.abs(S @ np.arange(10.0)).max(), 1e-3)

    def test_centered_penalty_has_a_one_dimensional_null_space(self):
        block = build_basis(np.random.default_rng(8).lognormal(size=500), 10, "x")
        eigenvalues = np.linalg.eigvalsh(block.S)
        self.assertGreaterEqual(eigenvalues.min(), -1e-10)
        self.assertEqual(int(np.sum(eigenvalues < 1e-9 * eigenvalues.max())), 1)

    def test_abscissae_must_increase(self):
        with self.assertRaises(ValueError):
            difference_penalty(4, abscissae=[0.0, 1.0, 1.0, 2.0])

    def test_missing_rows_get_zero_design(self):
        x = self.x.copy()
        x[[3, 10]] = np.nan
        block = build_basis(x, 6, "x")
        np.testing.assert_array_equal(block.B[[3, 10]], 0.0)
        self.assertTrue(np.all(np.isfinite(block.B)))

    def test_new_values_are_clamped_to_training_range(self):
        block = build_basis(self.x, 6, "x")
        np.testing.assert_allclose(basis_matrix(block, [-5.0]), basis_matrix(block, [block.lower]))
        np.testing.assert_allclose(basis_matrix(block, [7.0]), basis_matrix(block, [block.upper]))
        np.testing.assert_allclose(basis_matrix(block, self.x), block.B, atol=1e-12)

    def test_basis_dimension_too_small(self):
        with self.assertRaises(BasisError):
            build_basis(self.x, 3, "x")

    def test_too_few_distinct_values(self):
        with self.assertRaises(BasisError):
            build_basis(np.repeat([1.0, 2.0, 3.0, 4.0, 5.0], 20), 10, "x")

    def test_est_rank(self):
        self.assertEqual(est_rank(build_basis(self.x, 10, "x")), 9)


class TestEffectiveDf(unittest.TestCase):
    def setUp(self):
        x = np.random.default_rng(2).uniform(size=100)
        self.blocks = [build_basis(x, 5, "a"), build_basis(x, 4, "b")]

    def test_sums_blocks(self):
        diag = np.concatenate([[1.0, 1.0], np.full(4, 0.5), np.full(3, 0.25)])
        np.testing.assert_allclose(effective_df(self.blocks, diag, offset=2), [2.0, 0.75])

    def test_not_converged(self):
        with self.assertRaises(NotConvergedError):
            effective_df(self.blocks, np.ones(8), converged=False)

    def test_layout_mismatch(self):
        with self.assertRaises(ValueError):
            effective_df(self.blocks, np.ones(5))


if __name__ == "__main__":
    unittest.main()
