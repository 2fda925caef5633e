"""
Ternary strings, block maps and dense function tables over Z3^n.

Strings are indexed little-endian in base 3: digit ``j`` of ``x`` contributes
``x_j * 3**j``.  Tables store one trit per index.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import MAX_ARITY
from .exceptions import CapacityError, FoldingError, ShapeError, ValidationError
from .utils import validate_trits

OMEGA = np.exp(2j * np.pi / 3)

# omega ** t for t in Z3
ROOTS = np.array([1.0 + 0j, OMEGA, OMEGA**2])


def check_arity(n: int) -> None:
    """Raise CapacityError if ``n`` exceeds the dense-table cap."""
    if n < 0:
        raise ValidationError(f"Arity must be nonnegative, got {n}")
    if n > MAX_ARITY:
        raise CapacityError(f"Arity {n} exceeds the cap of {MAX_ARITY}")


@dataclass(frozen=True)
class TernaryString:
    """An element of Z3^n."""

    digits: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", validate_trits(self.digits))

    @property
    def n(self) -> int:
        return len(self.digits)

    @property
    def index(self) -> int:
        return index_of(self)

    @classmethod
    def from_index(cls, index: int, n: int) -> "TernaryString":
        return string_of(index, n)

    def shift(self, c: int) -> "TernaryString":
        return shift(self, c)

    def __getitem__(self, j: int) -> int:
        return self.digits[j]

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __str__(self) -> str:
        return "".join(str(v) for v in self.digits)


def index_of(x: Union[TernaryString, Sequence[int]]) -> int:
    """
    Encode a ternary string as its little-endian base-3 index.

    Args:
        x: String (or digit sequence) of length at most MAX_ARITY

    Returns:
        Index in [0, 3**n)
    """
    digits = x.digits if isinstance(x, TernaryString) else validate_trits(x)
    check_arity(len(digits))
    index = 0
    for j in reversed(range(len(digits))):
        index = 3 * index + digits[j]
    return index


def string_of(index: int, n: int) -> TernaryString:
    """
    Decode a little-endian base-3 index into a string of length ``n``.

    Args:
        index: Index in [0, 3**n)
        n: String length

    Returns:
        The decoded TernaryString
    """
    check_arity(n)
    if not 0 <= index < 3**n:
        raise ValidationError(f"Index {index} out of range for n={n}")
    digits = []
    for _ in range(n):
        index, r = divmod(index, 3)
        digits.append(r)
    return TernaryString(tuple(digits))


def shift(x: TernaryString, c: int) -> TernaryString:
    """Return ``x + c``, adding ``c`` to every digit mod 3."""
    return TernaryString(tuple((v + c) % 3 for v in x.digits))


@lru_cache(maxsize=None)
def digit_matrix(n: int) -> np.ndarray:
    """
    Digits of every string in Z3^n, row ``i`` holding ``string_of(i, n)``.

    The returned array is read-only and shared.
    """
    check_arity(n)
    idx = np.arange(3**n, dtype=np.int64)
    out = np.empty((3**n, n), dtype=np.int8)
    for j in range(n):
        out[:, j] = (idx // 3**j) % 3
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def powers_of_three(n: int) -> np.ndarray:
    out = 3 ** np.arange(n, dtype=np.int64)
    out.setflags(write=False)
    return out


def indices_of(digits: np.ndarray) -> np.ndarray:
    """Vectorised ``index_of`` over the last axis of a digit array."""
    digits = np.asarray(digits, dtype=np.int64)
    return digits @ powers_of_three(digits.shape[-1])


@lru_cache(maxsize=None)
def shift_index(n: int, c: int) -> np.ndarray:
    """Array mapping the index of ``x`` to the index of ``x + c``."""
    out = indices_of((digit_matrix(n).astype(np.int64) + c) % 3)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BlockMap:
    """
    The canonical d-to-1 projection from [dK] onto [K].

    Position ``j`` (0-based) lies in block ``j // d``, which is the 1-based
    ``pi(k) = ceil(k / d)`` shifted to 0-based indices.
    """

    K: int
    d: int

    def __post_init__(self):
        if self.K < 1 or self.d < 1:
            raise ValidationError(
                f"Block map needs K, d >= 1, got K={self.K}, d={self.d}"
            )

    @property
    def L(self) -> int:
        return self.K * self.d

    def block_of(self, j: int) -> int:
        if not 0 <= j < self.L:
            raise ShapeError(f"Position {j} outside [0, {self.L})")
        return j // self.d

    def projection(self) -> Tuple[int, ...]:
        return tuple(j // self.d for j in range(self.L))

    def block(self, y: TernaryString, i: int) -> TernaryString:
        """Return ``y[i]``, the d trits of block ``i``."""
        if y.n != self.L:
            raise ShapeError(f"String of length {y.n} does not fit L={self.L}")
        return TernaryString(y.digits[i * self.d : (i + 1) * self.d])

    def blocks(self, y: TernaryString) -> List[TernaryString]:
        return [self.block(y, i) for i in range(self.K)]

    def assemble(self, parts: Sequence[TernaryString]) -> TernaryString:
        """Concatenate blocks 0..K-1 back into a string of length L."""
        if len(parts) != self.K or any(p.n != self.d for p in parts):
            raise ShapeError("Blocks do not match the block map")
        return TernaryString(tuple(v for p in parts for v in p.digits))

    def check_pair(self, f: "FunctionTable", g: "FunctionTable") -> None:
        """Raise ShapeError unless ``f`` has arity K and ``g`` arity L."""
        if f.n != self.K or g.n != self.L:
            raise ShapeError(
                f"Expected arities (K={self.K}, L={self.L}), got ({f.n}, {g.n})"
            )


class FunctionTable:
    """
    A total function Z3^n -> Z3 stored as a dense trit table.

    The folded flag is computed by a full scan unless given; passing
    ``folded=True`` for a table that is not folded raises FoldingError.
    """

    __slots__ = ("n", "values", "folded")

    def __init__(
        self,
        n: int,
        values: Union[Sequence[int], np.ndarray],
        folded: Optional[bool] = None,
    ):
        check_arity(n)
        arr = np.array(values, dtype=np.int8).reshape(-1)
        if arr.shape[0] != 3**n:
            raise ShapeError(f"Table for n={n} needs {3**n} values, got {arr.shape[0]}")
        if arr.size and (arr.min() < 0 or arr.max() > 2):
            raise ValidationError("Table values must be trits")
        arr.setflags(write=False)
        actual = _scan_folded(n, arr)
        if folded and not actual:
            raise FoldingError("Table declared folded fails f(x+c) = f(x)+c")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "folded", actual if folded is None else bool(folded))

    def __setattr__(self, name, value):
        raise AttributeError("FunctionTable is immutable")

    def __call__(self, x: Union[TernaryString, int]) -> int:
        index = x if isinstance(x, (int, np.integer)) else index_of(x)
        return int(self.values[index])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.n, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"FunctionTable(n={self.n}, folded={self.folded})"

    def omega(self) -> np.ndarray:
        """The U3-valued function ``omega ** f`` as a complex array."""
        return ROOTS[self.values]

    def restrict(self) -> np.ndarray:
        """Values on the representatives (strings with first trit 0)."""
        if self.n < 1:
            raise ShapeError("Folding representatives need n >= 1")
        return self.values[::3].copy()

    def to_json(self) -> Dict[str, Any]:
        values = [int(v) for v in self.values]
        return {"n": self.n, "values": values, "folded": self.folded}


def _scan_folded(n: int, values: np.ndarray) -> bool:
    if n == 0:
        return False
    for c in (1, 2):
        if not np.array_equal(values[shift_index(n, c)], (values + c) % 3):
            return False
    return True


@lru_cache(maxsize=None)
def folding_orbits(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orbit number and offset of every string under ``x -> x + c``.

    String ``x`` equals representative ``3 * orbit[x]`` shifted by ``offset[x]``,
    its first trit.
    """
    check_arity(n)
    if n < 1:
        raise ShapeError("Folding needs n >= 1")
    digits = digit_matrix(n).astype(np.int64)
    offset = digits[:, 0].copy()
    orbit = indices_of((digits - offset[:, None]) % 3) // 3
    orbit.setflags(write=False)
    offset.setflags(write=False)
    return orbit, offset


def is_folded(f: FunctionTable) -> bool:
    """True iff ``f(x + c) = f(x) + c`` at every ``x`` and ``c``."""
    return _scan_folded(f.n, f.values)


def fold_extend(
    representatives: Union[Sequence[int], np.ndarray], n: int
) -> FunctionTable:
    """
    Extend values on the strings with first trit 0 to a folded table.

    Representative ``k`` is the string whose first trit is 0 and whose
    remaining digits are ``string_of(k, n - 1)``; that string has index ``3k``.

    Args:
        representatives: 3**(n-1) trits
        n: Arity, at least 1

    Returns:
        The unique folded table agreeing with the representatives
    """
    check_arity(n)
    if n < 1:
        raise ShapeError("Folding needs n >= 1")
    reps = np.array(representatives, dtype=np.int64).reshape(-1)
    if reps.shape[0] != 3 ** (n - 1):
        raise ShapeError(
            f"Expected {3 ** (n - 1)} representatives, got {reps.shape[0]}"
        )
    validate_trits(reps.tolist())
    orbit, c = folding_orbits(n)
    values = (reps[orbit] + c) % 3
    return FunctionTable(n, values, folded=True)


def dictator(n: int, i: int) -> FunctionTable:
    """The dictator ``x -> x_i`` (0-based coordinate)."""
    if not 0 <= i < n:
        raise ShapeError(f"Coordinate {i} outside [0, {n})")
    return FunctionTable(n, digit_matrix(n)[:, i])


def constant_table(n: int, c: int = 0) -> FunctionTable:
    return FunctionTable(n, np.full(3**n, c % 3, dtype=np.int8))


def random_table(
    n: int, rng: np.random.Generator, folded: bool = False
) -> FunctionTable:
    """Uniformly random table, or uniformly random folded table."""
    if folded:
        return fold_extend(rng.integers(0, 3, size=3 ** (n - 1)), n)
    return FunctionTable(n, rng.integers(0, 3, size=3**n))


def permute_coordinates(table: FunctionTable, perm: Sequence[int]) -> FunctionTable:
    """
    Reorder the coordinates of a table.

    Returns ``h`` with ``h(y) = table(y')`` where ``y'[perm[p]] = y[p]``, so
    position ``p`` of the new input feeds coordinate ``perm[p]`` of the old one.
    """
    n = table.n
    if sorted(perm) != list(range(n)):
        raise ShapeError(f"{list(perm)} is not a permutation of range({n})")
    src = digit_matrix(n)
    moved = np.empty_like(src)
    moved[:, list(perm)] = src
    return FunctionTable(n, table.values[indices_of(moved)])


def iter_strings(n: int) -> Iterable[TernaryString]:
    for i in range(3**n):
        yield string_of(i, n)
