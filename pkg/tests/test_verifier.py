import os
import unittest
from unittest.mock import patch

import pandas as pd

from z3hardness import Verifier
from z3hardness.config import OUTPUT_DIR_ENV
from z3hardness.exceptions import CapacityError, ValidationError
from z3hardness.suites import GadgetSuite
from z3hardness.utils import Check


class TestVerifier(unittest.TestCase):
    """Tests for the Verifier class."""

    def setUp(self):
        """Set up test environment."""
        self.verifier = Verifier(seed=3, K=1, d=2, trials=1)

    def test_defaults(self):
        """Test initialization without arguments."""
        with patch.dict(os.environ, clear=True):
            verifier = Verifier()
        self.assertEqual((verifier.K, verifier.d, verifier.seed), (2, 2, 0))
        self.assertIsNone(verifier.output_dir)

    @patch.dict(os.environ, {OUTPUT_DIR_ENV: "/tmp/z3-reports"})
    def test_output_dir_from_env(self):
        """Test that the report directory falls back to the environment."""
        self.assertEqual(Verifier().output_dir, "/tmp/z3-reports")
        self.assertEqual(Verifier(output_dir="here").output_dir, "here")

    def test_invalid_parameters(self):
        """Test that nonsensical parameters are rejected."""
        with self.assertRaises(ValidationError):
            Verifier(K=0)
        with self.assertRaises(ValidationError):
            Verifier(trials=-1)
        with self.assertRaises(ValidationError):
            Verifier(tolerance=-1e-3)

    def test_suite_properties(self):
        """Test that suite groups are bound to the verifier."""
        self.assertIsInstance(self.verifier.gadgets, GadgetSuite)
        self.assertIs(self.verifier.gadgets._verifier, self.verifier)

    def test_suite_methods_return_dataframes(self):
        """Test the as_dataframe switch of suite methods."""
        df = self.verifier.gadgets.thresholds()
        self.assertIsInstance(df, pd.DataFrame)
        self.assertTrue(df["passed"].all())
        records = self.verifier.gadgets.thresholds(as_dataframe=False)
        self.assertEqual(len(records), len(df))

    def test_record_exact(self):
        """Test that tolerance 0 makes a record exact."""
        record = self.verifier.record(Check("x", 1.0, 1.0 + 1e-12), tolerance=0.0)
        self.assertFalse(record.passed)
        self.assertTrue(self.verifier.close("x", 1.0, 1.0 + 1e-12).passed)
        self.assertTrue(self.verifier.at_most("x", 0.5, 0.5).passed)

    def test_unknown_suite(self):
        """Test that unknown suite names raise ValidationError."""
        with self.assertRaises(ValidationError):
            self.verifier.run("everything")


class TestSuites(unittest.TestCase):
    """Tests for whole suite runs."""

    def test_gadgets(self):
        """Test the gadget suite passes and reports exact constants."""
        report = Verifier().run("gadgets")
        self.assertTrue(report.passed, report.failures())
        document = report.to_json()
        self.assertNotIn("wall_time", document)
        gamma = next(r for r in document["records"] if r["id"] == "gamma[4nat-2nlin]")
        self.assertEqual(gamma["observed"], "3/4")
        self.assertTrue(gamma["pass"])

    def test_fourier_without_trials(self):
        """Test that zero trials still runs the fixed cases."""
        report = Verifier(trials=0).run("fourier")
        self.assertTrue(report.passed, report.failures())
        self.assertGreater(len(report.records), 0)

    def test_transform_identities_cover_unfolded(self):
        """Test that Parseval and inversion run on unfolded and folded tables."""
        records = Verifier(K=1, d=2, trials=1).fourier.transform_identities(
            as_dataframe=False
        )
        ids = [r.id for r in records]
        for name in ("parseval[unfolded][0]", "inverse[unfolded][0]"):
            self.assertIn(name, ids)
        self.assertIn("parseval[folded][0]", ids)
        self.assertIn("folded-support[0]", ids)
        self.assertTrue(all(r.passed for r in records))

    def test_folding(self):
        """Test the folding-test records on constants, dictators and random tables."""
        records = Verifier(K=1, d=2, trials=2).fourier.folding(as_dataframe=False)
        self.assertEqual(len(records), 3 + 2 + 2)
        self.assertTrue(all(r.passed for r in records))

    def test_tests_small(self):
        """Test the dictatorship suite at K=1, d=2."""
        report = Verifier(K=1, d=2, trials=2).run("tests")
        self.assertTrue(report.passed, report.failures())
        self.assertIn("z-determines-x", report.info)

    def test_appendix_small(self):
        """Test the appendix suite reports the three-ones residual."""
        report = Verifier(K=2, d=2, trials=1).run("appendix")
        self.assertTrue(report.passed, report.failures())
        self.assertEqual(report.info["appendix-blocks"], {"K": 2, "d": 2})
        self.assertGreaterEqual(report.info["three-ones-residual"], 0.0)

    def test_capacity_refused(self):
        """Test that oversized block maps raise instead of shrinking."""
        with self.assertRaises(CapacityError):
            Verifier(K=3, d=2, trials=1).run("appendix")
        with self.assertRaises(CapacityError):
            Verifier(K=4, d=2, trials=1).run("pipeline")

    def test_csp_and_pipeline(self):
        """Test the CSP and pipeline suites with few trials."""
        for suite in ("csp", "pipeline"):
            report = Verifier(K=1, d=2, trials=1).run(suite)
            self.assertTrue(report.passed, report.failures())

    def test_seed_reproduces_report(self):
        """Test that one seed gives one report."""
        first = Verifier(seed=9, K=1, d=2, trials=2).run("csp").to_json()
        second = Verifier(seed=9, K=1, d=2, trials=2).run("csp").to_json()
        self.assertEqual(first, second)


if __name__ == "__main__":
    unittest.main()
