import os
import unittest

from z3hardness import Verifier

SLOW_ENV = "Z3HARDNESS_SLOW_TESTS"


def _failures(records):
    return [r.id for r in records if not r.passed]


@unittest.skipUnless(os.environ.get(SLOW_ENV), f"set {SLOW_ENV}=1 to run")
class TestAcceptanceCounts(unittest.TestCase):
    """Tests for the property suites at full trial counts, K=2, d=2."""

    def run_group(self, trials, group, *methods):
        verifier = Verifier(seed=0, K=2, d=2, trials=trials)
        records = []
        for method in methods:
            records += getattr(getattr(verifier, group), method)(as_dataframe=False)
        self.assertGreaterEqual(len(records), trials)
        self.assertEqual(_failures(records), [])
        return verifier

    def test_spectral_chain(self):
        """Test expansions and spectral bounds on 500 random tables."""
        self.run_group(500, "fourier", "transform_identities", "expansions")
        self.run_group(500, "fourier", "inequalities")

    def test_cubic_terms(self):
        """Test the expansion of E[g g g] and its bound on 500 random tables."""
        verifier = self.run_group(500, "appendix", "column_table", "cubic_terms")
        self.assertIn("three-ones-residual", verifier.info)

    def test_folding(self):
        """Test the folding-test identity on 500 random tables."""
        self.run_group(500, "fourier", "folding")

    def test_soundness_bounds(self):
        """Test both soundness bounds on 1000 random pairs."""
        self.run_group(1000, "tests", "soundness")

    def test_coupling(self):
        """Test the renaming identity and hidden gadget on 200 folded pairs."""
        self.run_group(200, "tests", "coupling")


if __name__ == "__main__":
    unittest.main()
