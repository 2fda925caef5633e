import unittest
from fractions import Fraction

import numpy as np

from z3hardness.csp import exact_optimum, instance_value
from z3hardness.exceptions import (
    CapacityError,
    FoldingError,
    ShapeError,
    ValidationError,
)
from z3hardness.fourier import transform
from z3hardness.longcode import (
    LabelCoverEdge,
    LabelCoverInstance,
    LongCodeAssignment,
    assignment_from_tables,
    build_4nat_instance,
    completeness_certificate,
    decode_spectrum,
    decoding_soundness_report,
    dictator_assignment,
    edge_pass_probabilities,
    expected_decoded_value,
    good_alpha_filter,
    labeling_value,
    orbit_variables,
    random_label_cover,
    reorder_permutation,
    reordered_table,
    sample_labeling,
)
from z3hardness.ternary import BlockMap, constant_table, dictator, random_table


def _random_tables(instance, rng):
    tables = {u: random_table(instance.K, rng, folded=True) for u in instance.U}
    tables.update({v: random_table(instance.L, rng, folded=True) for v in instance.V})
    return LongCodeAssignment(tables)


class TestLabelCover(unittest.TestCase):
    """Tests for Label Cover instances."""

    def setUp(self):
        """Set up test environment."""
        self.rng = np.random.default_rng(11)

    def test_random_instance_is_satisfiable(self):
        """Test that the hidden labeling satisfies every edge."""
        instance, labeling = random_label_cover(2, 2, self.rng)
        self.assertEqual(len(instance.edges), 4)
        self.assertEqual(labeling_value(instance, labeling), 1)
        optimum, _ = exact_optimum(instance.to_csp())
        self.assertEqual(optimum, 1)

    def test_not_d_to_one(self):
        """Test that projections must be exactly d-to-1."""
        edge = LabelCoverEdge("u", "v", Fraction(1), (0, 0, 0, 1))
        with self.assertRaises(ValidationError):
            LabelCoverInstance(2, 2, ("u",), ("v",), (edge,))

    def test_wrong_projection_length(self):
        """Test that a projection needs dK entries."""
        edge = LabelCoverEdge("u", "v", Fraction(1), (0, 1))
        with self.assertRaises(ShapeError):
            LabelCoverInstance(2, 2, ("u",), ("v",), (edge,))

    def test_overlapping_names(self):
        """Test that left and right vertices are distinct."""
        edge = LabelCoverEdge("u", "u", Fraction(1), (0, 0))
        with self.assertRaises(ValidationError):
            LabelCoverInstance(1, 2, ("u",), ("u",), (edge,))

    def test_reorder_permutation(self):
        """Test that block k of the reordered table holds the preimages of k."""
        edge = LabelCoverEdge("u", "v", Fraction(1), (1, 0, 0, 1))
        self.assertEqual(reorder_permutation(edge, 2, 2), (1, 2, 0, 3))


class TestReduction(unittest.TestCase):
    """Tests for the Label Cover to 4NAT reduction."""

    def setUp(self):
        """Set up test environment."""
        self.rng = np.random.default_rng(12)

    def test_orbit_variables(self):
        """Test one variable per folding orbit of every vertex."""
        instance, _ = random_label_cover(1, 2, self.rng)
        reduced = build_4nat_instance(instance)
        self.assertEqual(orbit_variables("u0", 1), ["u0@0"])
        self.assertEqual(len(orbit_variables("v0", 2)), 3)
        self.assertEqual(len(reduced.variables), 2 * 1 + 2 * 3)
        self.assertEqual(sum(c.weight for c in reduced.constraints), 1)

    def test_completeness(self):
        """Test that dictators of a satisfying labeling satisfy every constraint."""
        instance, labeling = random_label_cover(2, 2, self.rng)
        value, complete = completeness_certificate(instance, labeling)
        self.assertEqual(value, 1)
        self.assertTrue(complete)

    def test_completeness_with_violated_edge(self):
        """Test 1/2 + 1/2 * 2/3 when one of two edges sees nonmatching dictators."""
        pi = (0, 0, 1, 1)
        edges = (
            LabelCoverEdge("u0", "v0", Fraction(1, 2), pi),
            LabelCoverEdge("u1", "v1", Fraction(1, 2), pi),
        )
        instance = LabelCoverInstance(2, 2, ("u0", "u1"), ("v0", "v1"), edges)
        labeling = {"u0": 0, "v0": 1, "u1": 0, "v1": 2}
        self.assertEqual(labeling_value(instance, labeling), Fraction(1, 2))
        value, complete = completeness_certificate(instance, labeling)
        self.assertEqual(value, Fraction(5, 6))
        self.assertFalse(complete)

    def test_dictators_rotate_under_reordering(self):
        """Test that the reordered dictator of v sits on the left label's block."""
        instance, labeling = random_label_cover(2, 2, self.rng)
        for e in instance.edges:
            moved = reordered_table(instance, e, dictator(instance.L, labeling[e.v]))
            self.assertTrue(moved.folded)
        tables = dictator_assignment(instance, labeling)
        self.assertEqual(edge_pass_probabilities(instance, tables), [1] * 4)

    def test_edge_identity(self):
        """Test that the instance value is the weighted sum of per-edge pass rates."""
        for K, d in ((1, 2), (2, 2)):
            instance, _ = random_label_cover(K, d, self.rng)
            reduced = build_4nat_instance(instance)
            for _ in range(2):
                tables = _random_tables(instance, self.rng)
                assignment = assignment_from_tables(instance, tables)
                value = instance_value(reduced, assignment)
                per_edge = edge_pass_probabilities(instance, tables)
                expected = sum(e.weight * p for e, p in zip(instance.edges, per_edge))
                self.assertEqual(value, expected)

    def test_capacity(self):
        """Test that Long Codes longer than the cap are refused."""
        instance, _ = random_label_cover(1, 7, self.rng, n_left=1, n_right=1)
        with self.assertRaises(CapacityError):
            build_4nat_instance(instance)

    def test_tables_must_be_folded(self):
        """Test that unfolded tables are rejected."""
        instance, labeling = random_label_cover(1, 2, self.rng)
        tables = dictator_assignment(instance, labeling)
        tables.tables["v0"] = constant_table(2, 0)
        with self.assertRaises(FoldingError):
            assignment_from_tables(instance, tables)

    def test_missing_label(self):
        """Test that dictator Long Codes need a label for every vertex."""
        instance, labeling = random_label_cover(1, 2, self.rng)
        del labeling["u0"]
        with self.assertRaises(ValidationError):
            dictator_assignment(instance, labeling)


class TestDecoding(unittest.TestCase):
    """Tests for spectral decoding."""

    def setUp(self):
        """Set up test environment."""
        self.rng = np.random.default_rng(13)

    def test_dictator_decodes_to_its_coordinate(self):
        """Test that a dictator decodes to a point mass."""
        p = decode_spectrum(transform(dictator(3, 1)))
        np.testing.assert_allclose(p, [0.0, 1.0, 0.0], atol=1e-9)

    def test_distribution(self):
        """Test that a folded table decodes to a probability vector."""
        p = decode_spectrum(transform(random_table(3, self.rng, folded=True)))
        self.assertAlmostEqual(float(p.sum()), 1.0)
        self.assertTrue(np.all(p >= -1e-12))

    def test_unfolded(self):
        """Test that decoding an unfolded table raises FoldingError."""
        with self.assertRaises(FoldingError):
            decode_spectrum(transform(constant_table(2, 1)))

    def test_dictators_recover_labeling(self):
        """Test that decoding dictator Long Codes gives back the labeling."""
        instance, labeling = random_label_cover(2, 2, self.rng)
        tables = dictator_assignment(instance, labeling)
        self.assertAlmostEqual(expected_decoded_value(instance, tables), 1.0)
        self.assertEqual(sample_labeling(instance, tables, self.rng), labeling)

    def test_nonmatching_dictators_decode_to_zero(self):
        """Test that nonmatching dictators on one edge decode to value 0."""
        edge = LabelCoverEdge("u", "v", Fraction(1), (0, 0, 1, 1))
        instance = LabelCoverInstance(2, 2, ("u",), ("v",), (edge,))
        tables = dictator_assignment(instance, {"u": 0, "v": 2})
        self.assertAlmostEqual(expected_decoded_value(instance, tables), 0.0)

    def test_soundness_chain_on_dictators(self):
        """Test every implication fires and holds for matching dictators."""
        blocks = BlockMap(2, 2)
        report = decoding_soundness_report(dictator(2, 1), dictator(4, 3), blocks, 0.25)
        names = [c.name for c in report.checks]
        self.assertIn("decodable-mass", names)
        self.assertIn("decoded-success", names)
        self.assertEqual(report.pass_probability, 1)
        self.assertAlmostEqual(report.dec, 0.5)
        self.assertAlmostEqual(report.success, 1.0)
        self.assertTrue(report.holds)

    def test_soundness_chain_on_random_tables(self):
        """Test the decoding chain on random folded pairs."""
        blocks = BlockMap(1, 3)
        for eps in (0.1, 0.5):
            for _ in range(3):
                f = random_table(1, self.rng, folded=True)
                g = random_table(3, self.rng, folded=True)
                self.assertTrue(decoding_soundness_report(f, g, blocks, eps).holds)

    def test_eps_range(self):
        """Test that eps must lie strictly between 0 and 1."""
        spec = transform(dictator(2, 0))
        with self.assertRaises(ValidationError):
            good_alpha_filter(spec, transform(dictator(4, 0)), 1.5, BlockMap(2, 2))


if __name__ == "__main__":
    unittest.main()
