"""
The 2-NLin, 3-Coloring and 4NAT dictatorship tests as enumerated outcome spaces.

Every test distribution is a product of independent columns given ``x``.  A
column is described by offsets from ``a = x_i`` for each drawn role and an
integer weight; the full space is the product over the L columns and the
3**K choices of ``x``.  Outcome weights are integer numerators over one common
denominator, so every probability below is an exact ``Fraction``.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import MAX_OUTCOMES, POINT_TOLERANCE, TOLERANCE
from .csp import four_nat_mask
from .exceptions import CapacityError, FoldingError, ShapeError, ValidationError
from .fourier import (
    dec_quantity,
    egg_expansion,
    even_mass,
    ggg_spectral,
    transform,
    triple_product_expansion,
)
from .ternary import (
    ROOTS,
    BlockMap,
    FunctionTable,
    TernaryString,
    digit_matrix,
    fold_extend,
    indices_of,
    shift_index,
    string_of,
)
from .utils import Check

logger = logging.getLogger(__name__)

# Column offsets from a = x_i.  2-NLin: (y_j, z_j), z uniform on Z3 \ {x_i, y_j}.
TWO_NLIN_COLUMN = (("y", "z"), ((0, 1), (0, 2), (1, 2), (2, 1)), (1, 1, 2, 2))

# 4NAT: (y_j, z_j, w_j) uniform over the six completions of TwoPair(x_i, ., ., .).
FOUR_NAT_COLUMN = (
    ("y", "z", "w"),
    ((0, 1, 1), (1, 0, 1), (1, 1, 0), (0, 2, 2), (2, 0, 2), (2, 2, 0)),
    (1, 1, 1, 1, 1, 1),
)

# 2-NLin column extended by (y'_j, y''_j); the fair coin is enumerated.
COUPLED_COLUMN = (
    ("y", "z", "y_prime", "y_double"),
    (
        (0, 1, 2, 2),
        (0, 2, 1, 1),
        (1, 2, 0, 1),
        (1, 2, 1, 0),
        (2, 1, 0, 2),
        (2, 1, 2, 0),
    ),
    (1, 1, 1, 1, 1, 1),
)

TWO_NLIN_BRANCHES = (("f!=h", Fraction(1, 4)), ("g!=h", Fraction(3, 4)))


@dataclass(frozen=True)
class TestOutcome:
    """One weighted outcome of a test distribution."""

    strings: Dict[str, TernaryString]
    branch: Optional[str]
    weight: Fraction

    __test__ = False


@dataclass(frozen=True, eq=False)
class OutcomeSpace:
    """
    A finite test distribution.

    ``roles`` maps a role name (``"x"``, ``"y"``, ...) to the index of that
    string in each outcome; outcome ``k`` has weight ``numerators[k] /
    denominator``.
    """

    test: str
    blocks: BlockMap
    roles: Dict[str, np.ndarray]
    numerators: np.ndarray
    denominator: int
    branches: Tuple[Tuple[str, Fraction], ...] = field(default=())

    def __getitem__(self, role: str) -> np.ndarray:
        try:
            return self.roles[role]
        except KeyError:
            raise ShapeError(f"The {self.test} space has no role {role!r}")

    def __len__(self) -> int:
        return int(self.numerators.shape[0])

    def total_weight(self) -> Fraction:
        return Fraction(int(self.numerators.sum()), self.denominator)

    def probability(self, mask: np.ndarray) -> Fraction:
        """Exact probability of the outcomes selected by ``mask``."""
        selected = self.numerators[np.asarray(mask, dtype=bool)]
        return Fraction(int(selected.sum()), self.denominator)

    def weighted_count(self, counts: np.ndarray, scale: int = 1) -> Fraction:
        """Exact expectation of an integer outcome statistic divided by ``scale``."""
        total = int((self.numerators * np.asarray(counts, dtype=np.int64)).sum())
        return Fraction(total, self.denominator * scale)

    def expectation(self, values: np.ndarray) -> complex:
        """Expectation of a complex outcome statistic in double precision."""
        weights = self.numerators / self.denominator
        return complex((weights * values).sum())

    def marginal(self, role: str) -> Dict[TernaryString, Fraction]:
        n = self.blocks.K if role == "x" else self.blocks.L
        sums = np.zeros(3**n, dtype=np.int64)
        np.add.at(sums, self[role], self.numerators)
        return {
            string_of(i, n): Fraction(int(s), self.denominator)
            for i, s in enumerate(sums)
            if s
        }

    def outcomes(self) -> Iterator[TestOutcome]:
        """Iterate outcomes, expanded by branch when the test has branches."""
        branches = self.branches or ((None, Fraction(1)),)
        K, L = self.blocks.K, self.blocks.L
        for k in range(len(self)):
            strings = {
                role: string_of(int(idx[k]), K if role == "x" else L)
                for role, idx in self.roles.items()
            }
            weight = Fraction(int(self.numerators[k]), self.denominator)
            for name, p in branches:
                yield TestOutcome(strings, name, weight * p)


def _enumerate(test: str, K: int, d: int, column, branches=()) -> OutcomeSpace:
    names, offsets, weights = column
    blocks = BlockMap(K, d)
    L, m = blocks.L, len(offsets)
    count = 3**K * m**L
    if count > MAX_OUTCOMES:
        raise CapacityError(
            f"The {test} space for K={K}, d={d} has {count} outcomes "
            f"(cap {MAX_OUTCOMES})"
        )
    offsets = np.array(offsets, dtype=np.int64)
    weights = np.array(weights, dtype=np.int64)

    idx = np.arange(m**L, dtype=np.int64)
    choice = np.stack([(idx // m**j) % m for j in range(L)], axis=1)
    column_num = np.prod(weights[choice], axis=1)

    xs = digit_matrix(K).astype(np.int64)
    a = xs[:, list(blocks.projection())]

    roles = {"x": np.repeat(np.arange(3**K, dtype=np.int64), m**L)}
    for r, name in enumerate(names):
        digits = (a[:, None, :] + offsets[choice, r][None, :, :]) % 3
        roles[name] = indices_of(digits.reshape(-1, L))
    numerators = np.tile(column_num, 3**K)
    denominator = 3**K * int(weights.sum()) ** L
    logger.debug("enumerated %s space K=%d d=%d: %d outcomes", test, K, d, count)
    for arr in roles.values():
        arr.setflags(write=False)
    numerators.setflags(write=False)
    return OutcomeSpace(test, blocks, roles, numerators, denominator, tuple(branches))


@lru_cache(maxsize=16)
def enumerate_2nlin_distribution(K: int, d: int) -> OutcomeSpace:
    """
    The 2-NLin test: ``x``, ``y`` uniform and independent, ``z_j`` uniform on
    ``Z3 \\ {x_i, y_j}`` (two choices when ``x_i = y_j``, forced otherwise).
    """
    return _enumerate("2nlin", K, d, TWO_NLIN_COLUMN, TWO_NLIN_BRANCHES)


@lru_cache(maxsize=16)
def enumerate_4nat_distribution(K: int, d: int) -> OutcomeSpace:
    """The 4NAT test: each column ``(y_j, z_j, w_j)`` completes TwoPair with ``x_i``."""
    return _enumerate("4nat", K, d, FOUR_NAT_COLUMN)


@lru_cache(maxsize=16)
def enumerate_coupled_distribution(K: int, d: int) -> OutcomeSpace:
    """The 2-NLin space extended by ``y'`` and ``y''`` (coin enumerated)."""
    return _enumerate("2nlin-coupled", K, d, COUPLED_COLUMN, TWO_NLIN_BRANCHES)


def coupling_y_prime(
    x: TernaryString,
    y: TernaryString,
    z: TernaryString,
    coins: Sequence[int],
    blocks: BlockMap,
) -> Tuple[TernaryString, TernaryString]:
    """
    Build ``(y', y'')`` from a 2-NLin outcome.

    Where ``x_i = y_j`` both get the element of Z3 missing from
    ``{x_i, z_j}``; otherwise coin 0 puts ``x_i`` in ``y'`` and ``y_j`` in
    ``y''``, coin 1 the reverse.
    """
    if x.n != blocks.K or y.n != blocks.L or z.n != blocks.L or len(coins) != blocks.L:
        raise ShapeError("Outcome does not fit the block map")
    yp, ypp = [], []
    for j in range(blocks.L):
        xi, yj, zj = x[blocks.block_of(j)], y[j], z[j]
        if zj in (xi, yj):
            raise ValidationError(f"Column {j} is not a 2-NLin outcome")
        if xi == yj:
            lone = (-xi - zj) % 3
            yp.append(lone)
            ypp.append(lone)
        elif coins[j] == 0:
            yp.append(xi)
            ypp.append(yj)
        else:
            yp.append(yj)
            ypp.append(xi)
    return TernaryString(tuple(yp)), TernaryString(tuple(ypp))


def blocks_for(f: FunctionTable, g: FunctionTable) -> BlockMap:
    """Infer the block map from the arities of ``f`` (K) and ``g`` (L = dK)."""
    if f.n < 1 or g.n < f.n or g.n % f.n:
        raise ShapeError(f"Arities ({f.n}, {g.n}) are not of the form (K, dK)")
    return BlockMap(f.n, g.n // f.n)


def _require_folded(**tables: FunctionTable) -> None:
    for name, table in tables.items():
        if not table.folded:
            raise FoldingError(f"{name} must be folded")


def _check_middle(h: FunctionTable, blocks: BlockMap) -> None:
    if h.n != blocks.L:
        raise ShapeError(f"h has arity {h.n}, expected L={blocks.L}")


def _two_nlin_pass(f: FunctionTable, g: FunctionTable, h: FunctionTable) -> Fraction:
    blocks = blocks_for(f, g)
    _check_middle(h, blocks)
    space = enumerate_2nlin_distribution(blocks.K, blocks.d)
    hz = h.values[space["z"]]
    counts = (f.values[space["x"]] != hz).astype(np.int64)
    counts += 3 * (g.values[space["y"]] != hz)
    return space.weighted_count(counts, scale=4)


def pass_probability_2nlin(
    f: FunctionTable, g: FunctionTable, h: FunctionTable
) -> Fraction:
    """
    Exact pass probability of the 2-NLin test on folded ``f``, ``g``, ``h``.

    With probability 1/4 the test checks ``f(x) != h(z)``, otherwise
    ``g(y) != h(z)``.
    """
    _require_folded(f=f, g=g, h=h)
    return _two_nlin_pass(f, g, h)


def folding_pass_probability(f: FunctionTable) -> Fraction:
    """``Pr[f(x) != f(x + 1)]`` by direct count."""
    moved = f.values[shift_index(f.n, 1)]
    return Fraction(int((f.values != moved).sum()), 3**f.n)


def pass_probability_3col(
    f: FunctionTable, g: FunctionTable, h: FunctionTable
) -> Fraction:
    """
    Exact pass probability of the 3-Coloring test (no folding assumed).

    ``1/17 p_f + 4/17 p_g + 12/17`` times the non-folded 2-NLin pass probability.
    """
    p_f = folding_pass_probability(f)
    p_g = folding_pass_probability(g)
    p_h = _two_nlin_pass(f, g, h)
    return Fraction(1, 17) * p_f + Fraction(4, 17) * p_g + Fraction(12, 17) * p_h


def four_nat_expectation(f: FunctionTable, g: FunctionTable) -> Fraction:
    """``E[4NAT(f(x), g(y), g(z), g(w))]`` under the 4NAT test, folded or not."""
    blocks = blocks_for(f, g)
    space = enumerate_4nat_distribution(blocks.K, blocks.d)
    gv = g.values
    sat = four_nat_mask(
        f.values[space["x"]], gv[space["y"]], gv[space["z"]], gv[space["w"]]
    )
    return space.probability(sat)


def pass_probability_4nat(f: FunctionTable, g: FunctionTable) -> Fraction:
    """Exact pass probability of the 4NAT test on folded ``f`` and ``g``."""
    _require_folded(f=f, g=g)
    return four_nat_expectation(f, g)


def best_middle_function(
    f: FunctionTable, g: FunctionTable, test: str = "2nlin"
) -> FunctionTable:
    """
    The ``h`` maximising the pass probability for fixed ``f`` and ``g``.

    For each ``z`` the value ``c`` minimising ``1/4 Pr[f(x) = c, z] + 3/4
    Pr[g(y) = c, z]`` is chosen, least ``c`` on ties.  The objective separates
    over ``z``, so the result is globally optimal.  For the 2-NLin test the
    choice is made on the representatives (first trit 0) and extended by
    folding; with folded ``f`` and ``g`` the objective is shift-equivariant,
    so the folded extension is still optimal at every point.
    """
    if test not in ("2nlin", "3col"):
        raise ValidationError(f"Unknown test {test!r}, expected '2nlin' or '3col'")
    if test == "2nlin":
        _require_folded(f=f, g=g)
    blocks = blocks_for(f, g)
    space = enumerate_2nlin_distribution(blocks.K, blocks.d)
    z = space["z"]
    agree = np.zeros((3**blocks.L, 3), dtype=np.int64)
    np.add.at(agree, (z, f.values[space["x"]].astype(np.int64)), space.numerators)
    np.add.at(agree, (z, g.values[space["y"]].astype(np.int64)), 3 * space.numerators)
    if test == "3col":
        return FunctionTable(blocks.L, np.argmin(agree, axis=1))
    return fold_extend(np.argmin(agree[::3], axis=1), blocks.L)


def coupled_four_nat_expectation(f: FunctionTable, g: FunctionTable) -> Fraction:
    """``E[4NAT(f(x), g(y), g(y'), g(y''))]`` on the coupled 2-NLin space."""
    blocks = blocks_for(f, g)
    space = enumerate_coupled_distribution(blocks.K, blocks.d)
    gv = g.values
    sat = four_nat_mask(
        f.values[space["x"]],
        gv[space["y"]],
        gv[space["y_prime"]],
        gv[space["y_double"]],
    )
    return space.probability(sat)


def hidden_gadget_inequality(
    f: FunctionTable, g: FunctionTable, h: FunctionTable
) -> Tuple[Fraction, Fraction, bool]:
    """
    2-NLin pass probability against ``3/4 + 1/4 E[4NAT(f(x), g(y), g(y'), g(y''))]``.

    Returns:
        (lhs, rhs, lhs <= rhs), compared exactly
    """
    lhs = pass_probability_2nlin(f, g, h)
    rhs = Fraction(3, 4) + Fraction(1, 4) * coupled_four_nat_expectation(f, g)
    return lhs, rhs, lhs <= rhs


def folding_test_probability(f: FunctionTable) -> Tuple[Fraction, float, float]:
    """
    ``Pr[f(x) != f(x+1)]`` by count, ``Even(f)``, and ``|Pr - (1 - Even(f))|``.
    """
    probability = folding_pass_probability(f)
    even = even_mass(transform(f))
    return probability, even, abs(float(probability) - (1.0 - even))


@dataclass
class TestReport:
    """Outcome of one soundness check."""

    pass_probability: Fraction
    dec: float
    even_f: float
    even_g: float
    p_f: Fraction
    p_g: Fraction
    bound_rhs: float
    intermediates: List[Check] = field(default_factory=list)
    tolerance: float = TOLERANCE

    __test__ = False

    @property
    def bound_satisfied(self) -> bool:
        return float(self.pass_probability) <= self.bound_rhs + self.tolerance

    @property
    def holds(self) -> bool:
        return self.bound_satisfied and all(c.holds for c in self.intermediates)


def soundness_bound_4nat(
    f: FunctionTable, g: FunctionTable, tolerance: float = TOLERANCE
) -> TestReport:
    """
    ``Pr[pass 4NAT] <= 2/3 + 2/3 Dec(f, g)`` for folded ``f`` and ``g``.

    Also checks that folding forces ``E[f(x) conj(g(y))] = 0`` and
    ``E[g(y) conj(g(z))] = 0``.
    """
    _require_folded(f=f, g=g)
    blocks = blocks_for(f, g)
    space = enumerate_4nat_distribution(blocks.K, blocks.d)
    f_spec, g_spec = transform(f), transform(g)
    dec = dec_quantity(f_spec, g_spec, blocks)
    F, G = f.omega(), g.omega()
    efg = space.expectation(F[space["x"]] * np.conj(G[space["y"]]))
    egg = space.expectation(G[space["y"]] * np.conj(G[space["z"]]))
    return TestReport(
        pass_probability=pass_probability_4nat(f, g),
        dec=dec,
        even_f=even_mass(f_spec),
        even_g=even_mass(g_spec),
        p_f=folding_pass_probability(f),
        p_g=folding_pass_probability(g),
        bound_rhs=2 / 3 + 2 / 3 * dec,
        intermediates=[
            Check("efg-vanishes", abs(efg), 0.0, tolerance=tolerance),
            Check("egg-vanishes", abs(egg), 0.0, tolerance=tolerance),
        ],
        tolerance=tolerance,
    )


def soundness_bound_3col(
    f: FunctionTable,
    g: FunctionTable,
    h: Optional[FunctionTable] = None,
    tolerance: float = TOLERANCE,
) -> TestReport:
    """
    ``Pr[pass 3-Coloring] <= 16/17 + 2/17 Dec(f, g)`` with every step of the chain.

    ``h`` defaults to ``best_middle_function(f, g, "3col")``.  The chain is:
    the combined upper bound on ``E[4NAT]``, the mixture bound through the
    hidden 4NAT test, the substitution of ``p_f = 1 - Even(f)`` and
    ``p_g = 1 - Even(g)``, the replacement of ``Even`` by ``|f^(0)|^2`` and
    ``|g^(0)|^2``, and the final bound.
    """
    blocks = blocks_for(f, g)
    if h is None:
        h = best_middle_function(f, g, "3col")
    f_spec, g_spec = transform(f), transform(g)
    dec = dec_quantity(f_spec, g_spec, blocks)
    even_f, even_g = even_mass(f_spec), even_mass(g_spec)
    f0, g0 = abs(f_spec.empty_coefficient), abs(g_spec.empty_coefficient)
    p_f, p_g = folding_pass_probability(f), folding_pass_probability(g)

    e4nat = float(four_nat_expectation(f, g))
    nat_bound = (
        2 / 3
        + 2 / 3 * dec
        + f0**2 / 3
        + 0.5 * f0 * g0**2
        + even_g * (2 / 3 + f0 / 6)
    )
    passed = pass_probability_3col(f, g, h)
    mixture = float(p_f) / 17 + 4 * float(p_g) / 17 + 12 / 17 * (0.75 + 0.25 * e4nat)
    substituted_mixture = (1 - even_f) / 17 + 4 * (1 - even_g) / 17 + 12 / 17 * (
        0.75 + 0.25 * nat_bound
    )
    expanded = (
        -even_f / 17
        - even_g * (2 / 17 - f0 / 34)
        + f0**2 / 17
        + 3 / 34 * f0 * g0**2
        + 2 / 17 * dec
        + 16 / 17
    )
    collapsed = 2 / 17 * (f0 * g0**2 - g0**2) + 2 / 17 * dec + 16 / 17
    final = 16 / 17 + 2 / 17 * dec
    return TestReport(
        pass_probability=passed,
        dec=dec,
        even_f=even_f,
        even_g=even_g,
        p_f=p_f,
        p_g=p_g,
        bound_rhs=final,
        intermediates=[
            Check("4nat-combined-bound", e4nat, nat_bound, "<=", tolerance),
            Check("3col-mixture-bound", float(passed), mixture, "<=", tolerance),
            Check("mixture-after-4nat", mixture, substituted_mixture, "<=", tolerance),
            Check("mixture-expanded", substituted_mixture, expanded, "==", tolerance),
            Check("even-to-empty", expanded, collapsed, "<=", tolerance),
            Check("empty-terms-nonpositive", collapsed, final, "<=", tolerance),
        ],
        tolerance=tolerance,
    )


def _arithmetized(a: Sequence[int]) -> Tuple[complex, float]:
    u = ROOTS[np.asarray(a) % 3]
    pairs = sum(u[i] * np.conj(u[j]) for i in range(4) for j in range(4) if i != j)
    triples = list(itertools.combinations(range(4), 3))
    cubic = sum(u[i] * u[j] * u[k] for i, j, k in triples)
    first = 5 / 9 + pairs / 9 - cubic / 9 - np.conj(cubic) / 9
    real_pairs = sum(
        (u[i] * np.conj(u[j])).real for i, j in itertools.combinations(range(4), 2)
    )
    second = 5 / 9 + 2 / 9 * real_pairs - 2 / 9 * cubic.real
    return complex(first), float(second)


def arithmetization_checks() -> List[Check]:
    """Both arithmetized forms of 4NAT against the predicate on all 81 tuples."""
    checks = []
    for index in range(81):
        a = string_of(index, 4).digits
        truth = int(four_nat_mask(*(np.array([v]) for v in a))[0])
        first, second = _arithmetized(a)
        checks.append(
            Check(f"4nat-sum-form[{a}]", first, truth, tolerance=POINT_TOLERANCE)
        )
        checks.append(
            Check(f"4nat-real-form[{a}]", second, truth, tolerance=POINT_TOLERANCE)
        )
    return checks


def arithmetization_check() -> bool:
    return all(c.holds for c in arithmetization_checks())


def expansion_4nat(f: FunctionTable, g: FunctionTable) -> Tuple[Fraction, float]:
    """
    ``E[4NAT(f(x), g(y), g(z), g(w))]`` by enumeration and by its expansion

    ``5/9 + 2/3 Re E[f conj g] + 2/3 Re E[g(y) conj g(z)] - 2/3 Re E[f g g]
    - 2/9 Re E[g g g]`` with every term evaluated spectrally.
    """
    blocks = blocks_for(f, g)
    f_spec, g_spec = transform(f), transform(g)
    efg = f_spec.empty_coefficient * np.conj(g_spec.empty_coefficient)
    egg = egg_expansion(g, blocks).rhs
    _, efgg, _ = triple_product_expansion(f, g, g, blocks)
    eggg = ggg_spectral(g, g, g, blocks)
    spectral = (
        5 / 9
        + 2 / 3 * efg.real
        + 2 / 3 * egg.real
        - 2 / 3 * efgg.real
        - 2 / 9 * eggg.real
    )
    return four_nat_expectation(f, g), float(spectral)


def sample_2nlin_pass(
    f: FunctionTable,
    g: FunctionTable,
    h: FunctionTable,
    samples: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate of the 2-NLin pass probability from raw draws."""
    blocks = blocks_for(f, g)
    _check_middle(h, blocks)
    K, L = blocks.K, blocks.L
    x = rng.integers(0, 3, size=(samples, K))
    y = rng.integers(0, 3, size=(samples, L))
    xi = x[:, list(blocks.projection())]
    step = rng.integers(1, 3, size=(samples, L))
    z = np.where(xi == y, (xi + step) % 3, (-xi - y) % 3)
    hz = h.values[indices_of(z)]
    first = rng.random(samples) < 0.25
    ok = np.where(first, f.values[indices_of(x)] != hz, g.values[indices_of(y)] != hz)
    return float(ok.mean())


def z_determines_x_probability(K: int, d: int) -> Fraction:
    """Probability that every block of ``z`` holds two distinct values, pinning x."""
    space = enumerate_2nlin_distribution(K, d)
    blocks = space.blocks
    z = digit_matrix(blocks.L)[space["z"]].reshape(-1, K, d)
    distinct = (z != z[:, :, :1]).any(axis=2).all(axis=1)
    return space.probability(distinct)
