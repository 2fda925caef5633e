import unittest

import numpy as np
from hypothesis import given, settings

from strategies import table_pairs, tables
from z3hardness.exceptions import CapacityError, ShapeError
from z3hardness.fourier import (
    alpha_profile,
    character_block_expectation,
    character_block_table,
    dec_quantity,
    efg_coloring_check,
    efgg_bound_check,
    egg_coloring_check,
    egg_expansion,
    even_dominates_empty,
    even_mass,
    folded_support_violation,
    ggg_expansion_and_bound,
    inverse_transform,
    prop_efg_check,
    psi_phi_terms,
    transform,
    triple_product_expansion,
)
from z3hardness.suites.fourier import dec_by_profiles
from z3hardness.ternary import BlockMap, TernaryString, constant_table, dictator

BLOCKS = BlockMap(2, 2)


class TestTransform(unittest.TestCase):
    """Tests for the radix-3 Fourier transform."""

    def test_constant(self):
        """Test that a constant-0 table has all mass on the empty character."""
        spec = transform(constant_table(2, 0))
        self.assertAlmostEqual(spec.empty_coefficient, 1.0)
        self.assertAlmostEqual(float(np.abs(spec.coefficients[1:]).max()), 0.0)

    def test_dictator(self):
        """Test that x -> x_1 is the character e_1."""
        spec = transform(dictator(2, 0))
        self.assertAlmostEqual(abs(spec[TernaryString((1, 0))] - 1), 0.0)
        self.assertAlmostEqual(float(spec.squared().sum()), 1.0)

    @given(tables(3))
    @settings(max_examples=50, deadline=None)
    def test_parseval_and_inverse(self, f):
        """Test Parseval and inversion on unfolded tables."""
        spec = transform(f)
        self.assertLess(spec.parseval_residual(), 1e-9)
        self.assertLess(float(np.abs(inverse_transform(spec) - f.omega()).max()), 1e-9)

    @given(tables(3, folded=True))
    @settings(max_examples=50, deadline=None)
    def test_folded_support(self, f):
        """Test that folded tables live on |alpha| = 1 (mod 3)."""
        spec = transform(f)
        self.assertLess(even_mass(spec), 1e-9)
        self.assertLess(folded_support_violation(spec), 1e-9)

    def test_even_mass(self):
        """Test Even on constants and dictators."""
        self.assertAlmostEqual(even_mass(transform(constant_table(2, 1))), 1.0)
        self.assertAlmostEqual(even_mass(transform(dictator(2, 1))), 0.0)

    @given(tables(3))
    @settings(max_examples=50, deadline=None)
    def test_even_dominates_empty(self, f):
        """Test that the empty coefficient is part of the even mass."""
        self.assertTrue(even_dominates_empty(transform(f)).holds)


class TestDec(unittest.TestCase):
    """Tests for the decodable mass."""

    def test_matching_dictators(self):
        """Test that matching dictators at K=1, d=2 give 1/2."""
        blocks = BlockMap(1, 2)
        dec = dec_quantity(transform(dictator(1, 0)), transform(dictator(2, 0)), blocks)
        self.assertAlmostEqual(dec, 0.5)

    @given(tables(2))
    @settings(max_examples=20, deadline=None)
    def test_constant_g(self, f):
        """Test that a constant g has no decodable mass."""
        g_spec = transform(constant_table(4, 2))
        self.assertAlmostEqual(dec_quantity(transform(f), g_spec, BLOCKS), 0.0)

    def test_dictators_against_profiles(self):
        """Test Dec against a character-by-character sum on dictators."""
        f, g = dictator(2, 0), dictator(4, 2)
        dec = dec_quantity(transform(f), transform(g), BLOCKS)
        self.assertAlmostEqual(dec, dec_by_profiles(f, g, BLOCKS))

    @given(table_pairs())
    @settings(max_examples=20, deadline=None)
    def test_against_profiles(self, pair):
        """Test Dec against a character-by-character sum over all 81 characters."""
        f, g = pair
        dec = dec_quantity(transform(f), transform(g), BLOCKS)
        self.assertAlmostEqual(dec, dec_by_profiles(f, g, BLOCKS))

    def test_shape_mismatch(self):
        """Test that spectra must fit the block map."""
        with self.assertRaises(ShapeError):
            dec_quantity(transform(dictator(2, 0)), transform(dictator(3, 0)), BLOCKS)

    def test_alpha_profile(self):
        """Test weight, support and projection of one character."""
        profile = alpha_profile(TernaryString((1, 2, 0, 2)), BLOCKS)
        self.assertEqual(profile.weight, 5)
        self.assertEqual(profile.support_count, 3)
        self.assertEqual(profile.projection.digits, (0, 2))


class TestColumnExpectations(unittest.TestCase):
    """Tests for the six-outcome column expectation."""

    def test_examples(self):
        """Test the hand-computed cases."""
        self.assertAlmostEqual(abs(character_block_expectation(0, 0, 2) - 1), 0.0)
        self.assertAlmostEqual(abs(character_block_expectation(1, 1, 0) + 0.5), 0.0)
        self.assertAlmostEqual(abs(character_block_expectation(1, 2, 1)), 0.0)

    def test_table(self):
        """Test all 27 cases against the closed form."""
        checks = character_block_table()
        self.assertEqual(len(checks), 27)
        self.assertTrue(all(c.holds for c in checks))


class TestExpansions(unittest.TestCase):
    """Tests for the enumerated expectations and their spectral forms."""

    def test_triple_product_constants(self):
        """Test that three constant-1 functions give 1 on both sides."""
        ones_k = np.ones(9, dtype=complex)
        ones_l = np.ones(81, dtype=complex)
        lhs, rhs, residual = triple_product_expansion(ones_k, ones_l, ones_l, BLOCKS)
        self.assertAlmostEqual(abs(lhs - 1), 0.0)
        self.assertAlmostEqual(abs(rhs - 1), 0.0)
        self.assertLess(residual, 1e-9)

    @given(table_pairs())
    @settings(max_examples=25, deadline=None)
    def test_triple_product(self, pair):
        """Test the expansion of E[f(x) g(y) g(z)]."""
        f, g = pair
        _, _, residual = triple_product_expansion(f, g, g, BLOCKS)
        self.assertLess(residual, 1e-9)

    @given(tables(4))
    @settings(max_examples=25, deadline=None)
    def test_triple_product_conjugate(self, g):
        """Test f = 1, g2 = conj(g) against the block-sum-zero expansion."""
        lhs, _, residual = triple_product_expansion(
            np.ones(9, dtype=complex), g.omega(), np.conj(g.omega()), BLOCKS
        )
        self.assertLess(residual, 1e-9)
        check = egg_expansion(g, BLOCKS)
        self.assertAlmostEqual(abs(check.lhs - lhs), 0.0)
        self.assertTrue(check.holds)

    @given(table_pairs(folded=True))
    @settings(max_examples=25, deadline=None)
    def test_folded_bound(self, pair):
        """Test the 4NAT bound on folded pairs."""
        f, g = pair
        self.assertTrue(efgg_bound_check(f, g, BLOCKS).holds)

    @given(table_pairs())
    @settings(max_examples=25, deadline=None)
    def test_coloring_bounds(self, pair):
        """Test the 3-Coloring bounds on arbitrary pairs."""
        f, g = pair
        self.assertTrue(prop_efg_check(f, g, BLOCKS).holds)
        self.assertTrue(egg_coloring_check(g, BLOCKS).holds)
        self.assertTrue(efg_coloring_check(f, g, BLOCKS).holds)

    def test_efgg_matching_dictators(self):
        """Test that matching dictators stay below Dec = 1/2."""
        check = efgg_bound_check(dictator(2, 0), dictator(4, 0), BLOCKS)
        self.assertTrue(check.holds)
        self.assertAlmostEqual(check.rhs, 0.5)


class TestCubicTerms(unittest.TestCase):
    """Tests for the expansion of E[g(y) g(z) g(w)]."""

    def test_constant(self):
        """Test the equality boundary on a constant table."""
        report = ggg_expansion_and_bound(constant_table(4, 0), BLOCKS)
        self.assertTrue(report.holds)
        self.assertEqual(report.frequencies, (1, 0, 0))
        self.assertAlmostEqual(report.bound.lhs, -1.0)
        self.assertAlmostEqual(report.bound.rhs, -1.0)
        self.assertAlmostEqual(report.zero_sum.rhs, 1.0)
        self.assertAlmostEqual(report.three_ones_residual, 0.0)

    def test_dictator(self):
        """Test that the bound reads 1/2 when the empty coefficient vanishes."""
        report = ggg_expansion_and_bound(dictator(4, 1), BLOCKS)
        self.assertTrue(report.holds)
        self.assertAlmostEqual(report.bound.rhs, 0.5)

    @given(tables(4))
    @settings(max_examples=30, deadline=None)
    def test_checks_hold(self, g):
        """Test the expansion, frequencies, zero-sum mass and bound."""
        report = ggg_expansion_and_bound(g, BLOCKS)
        self.assertTrue(report.holds)
        self.assertNotIn("three-ones", [c.name for c in report.checks])

    @given(tables(4))
    @settings(max_examples=30, deadline=None)
    def test_zero_sum_mass_matches_bound(self, g):
        """Test -Re E[g g g] = 1/2 - 3/2 Pr[g(y) + g(z) + g(w) = 0]."""
        report = ggg_expansion_and_bound(g, BLOCKS)
        self.assertAlmostEqual(report.bound.lhs, 0.5 - 1.5 * report.zero_sum.rhs)
        self.assertAlmostEqual(report.zero_sum.lhs, report.bound.rhs * -2 / 3 + 1 / 3)

    @given(tables(4), tables(4), tables(4))
    @settings(max_examples=15, deadline=None)
    def test_mixed_expansion(self, g1, g2, g3):
        """Test the expansion with three different tables."""
        report = ggg_expansion_and_bound(g1, BLOCKS, g2, g3)
        self.assertTrue(report.expansion.holds)

    def test_triple_sum_cap(self):
        """Test that the triple sum refuses large L."""
        with self.assertRaises(CapacityError):
            psi_phi_terms(BlockMap(5, 1))


if __name__ == "__main__":
    unittest.main()
