import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from z3hardness.exceptions import (
    CapacityError,
    FoldingError,
    ShapeError,
    ValidationError,
)
from z3hardness.ternary import (
    BlockMap,
    FunctionTable,
    TernaryString,
    constant_table,
    dictator,
    fold_extend,
    folding_orbits,
    index_of,
    is_folded,
    iter_strings,
    permute_coordinates,
    random_table,
    shift,
    string_of,
)


class TestTernaryString(unittest.TestCase):
    """Tests for ternary strings and the index codec."""

    def test_index_of_zero_string(self):
        """Test that the zero string has index 0."""
        self.assertEqual(index_of([0, 0]), 0)

    def test_index_is_little_endian(self):
        """Test that digit j contributes x_j * 3**j."""
        self.assertEqual(index_of(TernaryString((1, 2))), 7)
        self.assertEqual(string_of(7, 2).digits, (1, 2))

    def test_round_trip_all_strings(self):
        """Test the codec is a bijection on Z3^4."""
        indices = [index_of(string_of(i, 4)) for i in range(81)]
        self.assertEqual(indices, list(range(81)))

    def test_invalid_digit(self):
        """Test that digits outside Z3 are rejected."""
        with self.assertRaises(ValidationError):
            TernaryString((0, 3))

    def test_arity_cap(self):
        """Test that strings longer than the cap raise CapacityError."""
        with self.assertRaises(CapacityError):
            index_of([0] * 13)

    def test_shift(self):
        """Test adding a constant to every digit."""
        x = TernaryString((0, 1, 2))
        self.assertEqual(shift(x, 1).digits, (1, 2, 0))
        self.assertEqual(x.shift(0), x)
        self.assertEqual(str(x), "012")


class TestBlockMap(unittest.TestCase):
    """Tests for the block structure of Z3^{dK}."""

    def setUp(self):
        """Set up test environment."""
        self.blocks = BlockMap(2, 3)

    def test_projection(self):
        """Test the canonical d-to-1 projection."""
        self.assertEqual(self.blocks.L, 6)
        self.assertEqual(self.blocks.projection(), (0, 0, 0, 1, 1, 1))
        self.assertEqual(self.blocks.block_of(4), 1)

    def test_blocks_and_assemble(self):
        """Test splitting a string into blocks and joining it back."""
        y = TernaryString((0, 1, 2, 2, 1, 0))
        parts = self.blocks.blocks(y)
        self.assertEqual([p.digits for p in parts], [(0, 1, 2), (2, 1, 0)])
        self.assertEqual(self.blocks.assemble(parts), y)

    def test_wrong_length(self):
        """Test that strings of the wrong length are rejected."""
        with self.assertRaises(ShapeError):
            self.blocks.block(TernaryString((0, 1)), 0)

    def test_invalid_parameters(self):
        """Test that K and d must be positive."""
        with self.assertRaises(ValidationError):
            BlockMap(0, 2)


class TestFunctionTable(unittest.TestCase):
    """Tests for dense tables and folding."""

    def setUp(self):
        """Set up test environment."""
        self.rng = np.random.default_rng(0)

    def test_fold_extend_one_variable(self):
        """Test that one representative fixes the whole folded table."""
        self.assertEqual(fold_extend([0], 1).values.tolist(), [0, 1, 2])
        self.assertEqual(fold_extend([1], 1).values.tolist(), [1, 2, 0])

    def test_fold_extend_dictator(self):
        """Test that the representatives of a dictator extend to the dictator."""
        f = dictator(2, 0)
        extended = fold_extend(f.restrict(), 2)
        self.assertEqual(extended, f)
        self.assertTrue(is_folded(extended))

    @given(st.lists(st.integers(0, 2), min_size=9, max_size=9))
    @settings(max_examples=50, deadline=None)
    def test_fold_extend_is_folded(self, reps):
        """Test that fold_extend of any representatives passes the full scan."""
        f = fold_extend(reps, 3)
        self.assertTrue(is_folded(f))
        self.assertTrue(f.folded)

    def test_constant_is_not_folded(self):
        """Test that constants are never folded."""
        self.assertFalse(is_folded(constant_table(2, 0)))
        self.assertTrue(is_folded(dictator(3, 2)))

    def test_declared_fold_is_verified(self):
        """Test that claiming folded on a non-folded table fails."""
        with self.assertRaises(FoldingError):
            FunctionTable(1, [0, 0, 0], folded=True)

    def test_wrong_size(self):
        """Test that the table size must be 3**n."""
        with self.assertRaises(ShapeError):
            FunctionTable(2, [0, 1, 2])

    def test_immutable(self):
        """Test that tables cannot be changed in place."""
        f = dictator(2, 1)
        with self.assertRaises(AttributeError):
            f.n = 3
        with self.assertRaises(ValueError):
            f.values[0] = 1

    def test_folding_orbits(self):
        """Test that every string is its representative shifted by its first trit."""
        orbit, offset = folding_orbits(3)
        for x in iter_strings(3):
            rep = string_of(3 * int(orbit[x.index]), 3)
            self.assertEqual(rep[0], 0)
            self.assertEqual(rep.shift(int(offset[x.index])), x)

    def test_permute_coordinates(self):
        """Test that permuting coordinates moves a dictator."""
        f = dictator(3, 0)
        moved = permute_coordinates(f, (2, 0, 1))
        self.assertEqual(moved, dictator(3, 1))
        self.assertTrue(moved.folded)

    def test_random_table_shape(self):
        """Test random tables have the right size and trit values."""
        f = random_table(3, self.rng)
        self.assertEqual(f.values.shape, (27,))
        self.assertTrue(set(f.values.tolist()) <= {0, 1, 2})


if __name__ == "__main__":
    unittest.main()
