"""
Fourier analysis over Z3^n.

A table ``f`` is identified with the U3-valued function ``omega ** f``;
coefficients are ``f^(alpha) = E[omega**f(x) * conj(chi_alpha(x))]`` and are
computed with a radix-3 transform (``numpy.fft.fftn`` over a ``(3,)*n`` view).
Expectations under the 4NAT test coupling come from the enumerated outcome
spaces in :mod:`z3hardness.dictatorship`.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Optional, Tuple, Union

import numpy as np

from .config import MAX_TRIPLE_SUM_L, POINT_TOLERANCE, TOLERANCE
from .exceptions import CapacityError, ShapeError
from .ternary import (
    ROOTS,
    BlockMap,
    FunctionTable,
    TernaryString,
    check_arity,
    digit_matrix,
    index_of,
    indices_of,
)
from .utils import Check

logger = logging.getLogger(__name__)

TableLike = Union[FunctionTable, np.ndarray]


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Dense Fourier coefficients of a function on Z3^n."""

    n: int
    coefficients: np.ndarray
    source_is_folded: bool = False

    def __getitem__(self, alpha: Union[int, TernaryString]) -> complex:
        index = alpha if isinstance(alpha, (int, np.integer)) else index_of(alpha)
        return complex(self.coefficients[index])

    @property
    def empty_coefficient(self) -> complex:
        return complex(self.coefficients[0])

    def squared(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    def parseval_residual(self) -> float:
        return float(abs(self.squared().sum() - 1.0))

    def to_json(self) -> List[Tuple[int, float, float]]:
        """Coefficients as (alpha-index, re, im) triples."""
        return [
            (i, float(c.real), float(c.imag)) for i, c in enumerate(self.coefficients)
        ]


@dataclass(frozen=True)
class AlphaProfile:
    alpha: TernaryString
    weight: int
    support_count: int
    projection: TernaryString


def alpha_profile(alpha: TernaryString, blocks: BlockMap) -> AlphaProfile:
    """Weight ``|alpha|``, support ``#alpha`` and ``pi_3(alpha)`` of one character."""
    if alpha.n != blocks.L:
        raise ShapeError(f"alpha has length {alpha.n}, expected L={blocks.L}")
    proj = tuple(sum(p.digits) % 3 for p in blocks.blocks(alpha))
    return AlphaProfile(
        alpha=alpha,
        weight=sum(alpha.digits),
        support_count=sum(1 for v in alpha.digits if v),
        projection=TernaryString(proj),
    )


def as_function(f: TableLike) -> np.ndarray:
    """Complex values of a table, or the array itself for complex/real functions."""
    if isinstance(f, FunctionTable):
        return f.omega()
    return np.asarray(f, dtype=complex)


def _arity(values: np.ndarray) -> int:
    n = int(round(np.log(values.shape[0]) / np.log(3))) if values.shape[0] > 1 else 0
    if 3**n != values.shape[0]:
        raise ShapeError(f"{values.shape[0]} is not a power of 3")
    return n


def transform(f: TableLike) -> FourierSpectrum:
    """
    Fourier transform of ``omega ** f`` (or of a complex function on Z3^n).

    Args:
        f: FunctionTable or complex array of length 3**n

    Returns:
        FourierSpectrum indexed like the table
    """
    values = as_function(f)
    n = _arity(values)
    check_arity(n)
    if n == 0:
        coefficients = values.copy()
    else:
        # C-order reshape puts coordinate j on axis n-1-j; fftn treats every
        # axis alike, so the raveled output keeps the little-endian indexing.
        cube = values.reshape((3,) * n)
        coefficients = np.fft.fftn(cube).reshape(-1) / 3**n
    coefficients.setflags(write=False)
    folded = f.folded if isinstance(f, FunctionTable) else False
    return FourierSpectrum(n=n, coefficients=coefficients, source_is_folded=folded)


def inverse_transform(spec: FourierSpectrum) -> np.ndarray:
    """Reconstruct the function values from a spectrum."""
    if spec.n == 0:
        return spec.coefficients.copy()
    cube = spec.coefficients.reshape((3,) * spec.n) * 3**spec.n
    return np.fft.ifftn(cube).reshape(-1)


@lru_cache(maxsize=None)
def weights_mod3(n: int) -> np.ndarray:
    out = digit_matrix(n).astype(np.int64).sum(axis=1) % 3
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def support_counts(n: int) -> np.ndarray:
    out = (digit_matrix(n) != 0).sum(axis=1)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def negation_index(n: int) -> np.ndarray:
    """Index of ``-alpha`` for each ``alpha``."""
    out = indices_of((-digit_matrix(n).astype(np.int64)) % 3)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def projection_digits(blocks: BlockMap) -> np.ndarray:
    """``pi_3(alpha)`` digits, shape (3**L, K)."""
    digits = digit_matrix(blocks.L).astype(np.int64)
    out = digits.reshape(-1, blocks.K, blocks.d).sum(axis=2) % 3
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def projection_index(blocks: BlockMap) -> np.ndarray:
    """Index of ``pi_3(alpha)`` in Z3^K for each ``alpha`` in Z3^L."""
    out = indices_of(projection_digits(blocks))
    out.setflags(write=False)
    return out


def _check_spectra(f_spec: FourierSpectrum, g_spec: FourierSpectrum, blocks: BlockMap):
    if f_spec.n != blocks.K or g_spec.n != blocks.L:
        raise ShapeError(
            f"Spectra of arity ({f_spec.n}, {g_spec.n}) "
            f"do not fit K={blocks.K}, d={blocks.d}"
        )


def dec_quantity(
    f_spec: FourierSpectrum, g_spec: FourierSpectrum, blocks: BlockMap
) -> float:
    """
    The decodable mass of ``f`` and ``g``.

    ``Dec(f, g) = sum over alpha with pi_3(alpha) != 0 of
    |f^(pi_3(alpha))| * |g^(alpha)|^2 * (1/2)^#alpha``.
    """
    _check_spectra(f_spec, g_spec, blocks)
    proj = projection_index(blocks)
    mask = proj != 0
    terms = (
        np.abs(f_spec.coefficients[proj])
        * g_spec.squared()
        * 0.5 ** support_counts(blocks.L)
    )
    return float(terms[mask].sum())


def empty_projection_mass(g_spec: FourierSpectrum, blocks: BlockMap) -> float:
    """``sum over pi_3(alpha) = 0 of |g^(alpha)|^2 (1/2)^#alpha``."""
    mask = projection_index(blocks) == 0
    terms = g_spec.squared() * 0.5 ** support_counts(g_spec.n)
    return float(terms[mask].sum())


def even_mass(f_spec: FourierSpectrum) -> float:
    """``Even(f)``: squared mass on characters with ``|alpha| = 0 (mod 3)``."""
    return float(f_spec.squared()[weights_mod3(f_spec.n) == 0].sum())


def folded_support_violation(f_spec: FourierSpectrum) -> float:
    """Largest coefficient magnitude outside ``|alpha| = 1 (mod 3)``."""
    off = weights_mod3(f_spec.n) != 1
    if not off.any():
        return 0.0
    return float(np.abs(f_spec.coefficients[off]).max())


# Column law of (y_j, z_j) given x_i = a under the 4NAT coupling, as offsets from a
_PAIR_OFFSETS = ((0, 1), (0, 2), (1, 0), (1, 1), (2, 0), (2, 2))


def character_block_expectation(beta_j: int, gamma_j: int, a: int) -> complex:
    """
    ``E[omega**(beta_j y_j + gamma_j z_j) | x_i = a]`` over the six column outcomes.

    Args:
        beta_j: Character coordinate for y
        gamma_j: Character coordinate for z
        a: Conditioning value of x_i

    Returns:
        The exact average of the six roots of unity
    """
    total = 0j
    for dy, dz in _PAIR_OFFSETS:
        y, z = (a + dy) % 3, (a + dz) % 3
        total += ROOTS[(beta_j * y + gamma_j * z) % 3]
    return total / 6


def character_block_formula(beta_j: int, gamma_j: int, a: int) -> complex:
    """Closed form: ``(-1/2)**#beta_j * omega**(2 a beta_j)`` if equal, else 0."""
    if beta_j % 3 != gamma_j % 3:
        return 0j
    support = 1 if beta_j % 3 else 0
    return (-0.5) ** support * ROOTS[(2 * a * beta_j) % 3]


def character_block_table() -> List[Check]:
    """All 27 ``(beta_j, gamma_j, a)`` cases against the closed form."""
    checks = []
    for beta_j in range(3):
        for gamma_j in range(3):
            for a in range(3):
                checks.append(
                    Check(
                        name=f"column-expectation[b={beta_j},g={gamma_j},a={a}]",
                        lhs=character_block_expectation(beta_j, gamma_j, a),
                        rhs=character_block_formula(beta_j, gamma_j, a),
                        tolerance=POINT_TOLERANCE,
                    )
                )
    return checks


def _default_space(blocks: BlockMap):
    from .dictatorship import enumerate_4nat_distribution

    return enumerate_4nat_distribution(blocks.K, blocks.d)


def triple_product_expansion(
    f1: TableLike,
    g1: TableLike,
    g2: TableLike,
    blocks: BlockMap,
    coupling: Optional[Any] = None,
) -> Tuple[complex, complex, float]:
    """
    ``E[f1(x) g1(y) g2(z)]`` by enumeration and by its spectral expansion.

    The right-hand side is ``sum_alpha f1^(pi_3(alpha)) g1^(alpha) g2^(alpha)
    (-1/2)^#alpha``.

    Args:
        f1: Function on Z3^K (table or complex array)
        g1: Function on Z3^L
        g2: Function on Z3^L
        blocks: Block map with L = dK
        coupling: 4NAT-test outcome space; enumerated for ``blocks`` if omitted

    Returns:
        (lhs, rhs, residual)
    """
    F1, G1, G2 = as_function(f1), as_function(g1), as_function(g2)
    if F1.shape[0] != 3**blocks.K or G1.shape[0] != 3**blocks.L or G2.shape != G1.shape:
        raise ShapeError("Function sizes do not match the block map")
    space = coupling if coupling is not None else _default_space(blocks)
    lhs = space.expectation(F1[space["x"]] * G1[space["y"]] * G2[space["z"]])
    f_spec, g1_spec, g2_spec = transform(F1), transform(G1), transform(G2)
    proj = projection_index(blocks)
    rhs = complex(
        (
            f_spec.coefficients[proj]
            * g1_spec.coefficients
            * g2_spec.coefficients
            * (-0.5) ** support_counts(blocks.L)
        ).sum()
    )
    return lhs, rhs, abs(lhs - rhs)


def egg_expansion(
    g: TableLike, blocks: BlockMap, coupling: Optional[Any] = None
) -> Check:
    """
    ``E[g(y) conj(g(z))]`` against the sum over ``alpha`` with every block sum 0
    of ``g^(alpha) conj(g^(-alpha)) (-1/2)^#alpha``.
    """
    G = as_function(g)
    space = coupling if coupling is not None else _default_space(blocks)
    lhs = space.expectation(G[space["y"]] * np.conj(G[space["z"]]))
    spec = transform(G)
    mask = projection_index(blocks) == 0
    terms = (
        spec.coefficients
        * np.conj(spec.coefficients[negation_index(blocks.L)])
        * (-0.5) ** support_counts(blocks.L)
    )
    rhs = complex(terms[mask].sum())
    return Check("egg-expansion", lhs, rhs)


def efgg_bound_check(
    f: FunctionTable, g: FunctionTable, blocks: BlockMap, coupling: Optional[Any] = None
) -> Check:
    """
    ``-Re E[f(x) g(y) g(z)] <= Dec(f, g) + |f^(0)| * (empty-projection mass of g)``.
    """
    blocks.check_pair(f, g)
    space = coupling if coupling is not None else _default_space(blocks)
    F, G = f.omega(), g.omega()
    lhs = -space.expectation(F[space["x"]] * G[space["y"]] * G[space["z"]]).real
    f_spec, g_spec = transform(f), transform(g)
    rhs = dec_quantity(f_spec, g_spec, blocks) + abs(
        f_spec.empty_coefficient
    ) * empty_projection_mass(g_spec, blocks)
    return Check("efgg-bound", lhs, rhs, relation="<=")


def prop_efg_check(f: FunctionTable, g: FunctionTable, blocks: BlockMap) -> Check:
    """``Re E[f(x) conj(g(y))] <= (|f^(0)|^2 + |g^(0)|^2) / 2`` for independent x, y."""
    blocks.check_pair(f, g)
    lhs = (f.omega().mean() * np.conj(g.omega().mean())).real
    f0 = abs(transform(f).empty_coefficient)
    g0 = abs(transform(g).empty_coefficient)
    rhs = 0.5 * (f0**2 + g0**2)
    return Check("efg-independent-bound", float(lhs), rhs, relation="<=")


def egg_coloring_check(
    g: FunctionTable, blocks: BlockMap, coupling: Optional[Any] = None
) -> Check:
    """``Re E[g(y) conj(g(z))] <= Even(g)``."""
    G = g.omega()
    space = coupling if coupling is not None else _default_space(blocks)
    lhs = space.expectation(G[space["y"]] * np.conj(G[space["z"]])).real
    return Check("egg-even-bound", lhs, even_mass(transform(g)), relation="<=")


def efg_coloring_check(
    f: FunctionTable, g: FunctionTable, blocks: BlockMap, coupling: Optional[Any] = None
) -> Check:
    """
    ``-Re E[f g g] <= |f^(0)| (3/4 |g^(0)|^2 + 1/4 Even(g)) + Dec(f, g)``.
    """
    blocks.check_pair(f, g)
    space = coupling if coupling is not None else _default_space(blocks)
    F, G = f.omega(), g.omega()
    lhs = -space.expectation(F[space["x"]] * G[space["y"]] * G[space["z"]]).real
    f_spec, g_spec = transform(f), transform(g)
    g0 = abs(g_spec.empty_coefficient)
    rhs = abs(f_spec.empty_coefficient) * (
        0.75 * g0**2 + 0.25 * even_mass(g_spec)
    ) + dec_quantity(f_spec, g_spec, blocks)
    return Check("efgg-coloring-bound", lhs, rhs, relation="<=")


def even_dominates_empty(f_spec: FourierSpectrum) -> Check:
    """``|f^(0)|^2 <= Even(f)``, since ``alpha = 0`` has weight 0."""
    return Check(
        "empty-below-even", abs(f_spec.empty_coefficient) ** 2, even_mass(f_spec), "<="
    )


@lru_cache(maxsize=8)
def psi_phi_terms(
    blocks: BlockMap,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Triples ``(alpha, beta, gamma)`` passing psi, with their Phi weights.

    psi requires ``|alpha[i]| + |beta[i]| + |gamma[i]| = 0 (mod 3)`` for every
    block; Phi is the product over coordinates of
    ``1 - (#rho_j + #sigma_j + #tau_j) / 2`` with ``rho = alpha + beta``,
    ``sigma = beta + gamma`` and ``tau = alpha + gamma``.  Only gamma with the
    forced block projection are enumerated.
    """
    L, K = blocks.L, blocks.K
    if L > MAX_TRIPLE_SUM_L:
        raise CapacityError(f"Triple sums are capped at L={MAX_TRIPLE_SUM_L}, got {L}")
    size = 3**L
    proj_digits = projection_digits(blocks)
    proj = projection_index(blocks)
    by_proj = np.argsort(proj, kind="stable").reshape(3**K, -1)

    a = np.repeat(np.arange(size), size)
    b = np.tile(np.arange(size), size)
    target = indices_of((-proj_digits[a] - proj_digits[b]) % 3)
    per_target = by_proj.shape[1]
    a = np.repeat(a, per_target)
    b = np.repeat(b, per_target)
    slot = np.tile(np.arange(per_target), size * size)
    c = by_proj[np.repeat(target, per_target), slot]

    digits = digit_matrix(L).astype(np.int64)
    da, db, dc = digits[a], digits[b], digits[c]
    nonzero = (
        ((da + db) % 3 != 0).astype(np.int64)
        + ((db + dc) % 3 != 0)
        + ((da + dc) % 3 != 0)
    )
    phi = np.prod(1.0 - 0.5 * nonzero, axis=1)
    keep = phi != 0
    logger.debug(
        "psi-restricted triples for L=%d: %d (%d nonzero)", L, phi.size, keep.sum()
    )
    return a[keep], b[keep], c[keep], phi[keep]


def ggg_spectral(
    g1: TableLike, g2: TableLike, g3: TableLike, blocks: BlockMap
) -> complex:
    """``sum over psi(alpha, beta, gamma) of g1^(alpha) g2^(beta) g3^(gamma) Phi``."""
    a, b, c, phi = psi_phi_terms(blocks)
    s1, s2, s3 = transform(g1), transform(g2), transform(g3)
    return complex(
        (s1.coefficients[a] * s2.coefficients[b] * s3.coefficients[c] * phi).sum()
    )


@dataclass
class GggReport:
    """Appendix checks for one table ``g`` on Z3^L."""

    expansion: Check
    empty_coefficient: Check
    zero_sum: Check
    bound: Check
    frequencies: Tuple[Fraction, Fraction, Fraction]
    three_ones_residual: float

    @property
    def checks(self) -> List[Check]:
        return [self.expansion, self.empty_coefficient, self.zero_sum, self.bound]

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)


def ggg_expansion_and_bound(
    g: FunctionTable,
    blocks: BlockMap,
    g2: Optional[FunctionTable] = None,
    g3: Optional[FunctionTable] = None,
    coupling: Optional[Any] = None,
    tolerance: float = TOLERANCE,
) -> GggReport:
    """
    The expansion of ``E[g(y) g(z) g(w)]`` and the bound built on it.

    Checks (a) the psi/Phi expansion of ``E[g1(y) g2(z) g3(w)]`` (``g2`` and
    ``g3`` default to ``g``), (b) ``|g^(0)|^2 = p^3 + q^3 + r^3 - 3pqr``,
    (c) ``Pr[g(y) + g(z) + g(w) = 0 (mod 3)] >= |g^(0)|^2`` and
    (d) ``-Re E[g g g] <= 1/2 - 3/2 |g^(0)|^2``.  As
    ``Re E[g g g] = 3/2 Pr[sum = 0] - 1/2``, (c) and (d) agree.

    The three-ones identity ``sum_a Pr[g(y) = g(z) = g(w) = a] =
    3 Pr[g(y)=0, g(z)=1, g(w)=2] + |g^(0)|^2`` holds on constants but not
    for general ``g``; its residual is reported in ``three_ones_residual``
    and never asserted.
    """
    if g.n != blocks.L:
        raise ShapeError(f"g has arity {g.n}, expected L={blocks.L}")
    g2 = g if g2 is None else g2
    g3 = g if g3 is None else g3
    space = coupling if coupling is not None else _default_space(blocks)

    y, z, w = space["y"], space["z"], space["w"]
    lhs = space.expectation(g.omega()[y] * g2.omega()[z] * g3.omega()[w])
    expansion = Check(
        "ggg-expansion", lhs, ggg_spectral(g, g2, g3, blocks), tolerance=tolerance
    )

    counts = np.bincount(g.values, minlength=3)
    p, q, r = (Fraction(int(k), 3**g.n) for k in counts)
    g0_sq = abs(transform(g).empty_coefficient) ** 2
    empty = Check(
        "empty-coefficient-frequencies",
        g0_sq,
        float(p**3 + q**3 + r**3 - 3 * p * q * r),
        tolerance=tolerance,
    )

    gy, gz, gw = g.values[y], g.values[z], g.values[w]
    same = space.probability((gy == gz) & (gz == gw))
    rainbow = space.probability((gy == 0) & (gz == 1) & (gw == 2))
    residual = float(same) - 3 * float(rainbow) - g0_sq
    zero_mass = space.probability((gy + gz + gw) % 3 == 0)
    zero_sum = Check("zero-sum-mass", g0_sq, float(zero_mass), "<=", tolerance)

    G = g.omega()
    neg_re = -space.expectation(G[y] * G[z] * G[w]).real
    bound = Check("ggg-bound", neg_re, 0.5 - 1.5 * g0_sq, "<=", tolerance)
    return GggReport(expansion, empty, zero_sum, bound, (p, q, r), residual)
