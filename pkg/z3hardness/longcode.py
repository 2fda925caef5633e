"""
From d-to-1 Label Cover to 4NAT through folded Long Codes, and back by decoding.

Every vertex is replaced by a folded table: ``f_u`` on Z3^K for left vertices
and ``g_v`` on Z3^{dK} for right vertices.  Folding is structural: one CSP
variable per orbit ``{x, x+1, x+2}``, read through a constant shift.  Each
edge contributes one shifted 4NAT constraint per outcome of the 4NAT test run
on ``f_u`` and ``g_v`` reordered so block ``k`` holds ``pi_e^-1(k)``.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Tuple

import numpy as np

from .config import MAX_LONGCODE_L, TOLERANCE
from .csp import Assignment, Constraint, CspInstance, Predicate, instance_value
from .dictatorship import enumerate_4nat_distribution, pass_probability_4nat
from .exceptions import CapacityError, FoldingError, ShapeError, ValidationError
from .fourier import (
    FourierSpectrum,
    dec_quantity,
    projection_index,
    support_counts,
    transform,
)
from .ternary import (
    BlockMap,
    FunctionTable,
    digit_matrix,
    dictator,
    folding_orbits,
    indices_of,
    permute_coordinates,
    string_of,
)
from .utils import Check, validate_probability_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabelCoverEdge:
    """Edge ``(u, v)`` with ``pi[j]`` the left label of right label ``j``."""

    u: str
    v: str
    weight: Fraction
    pi: Tuple[int, ...]

    def preimages(self, K: int) -> List[List[int]]:
        return [[j for j, i in enumerate(self.pi) if i == k] for k in range(K)]


@dataclass(frozen=True)
class LabelCoverInstance:
    """
    Bipartite d-to-1 Label Cover.

    Left vertices take labels in [K], right vertices labels in [dK]; every
    ``pi_e`` maps exactly d right labels to each left label.
    """

    K: int
    d: int
    U: Tuple[str, ...]
    V: Tuple[str, ...]
    edges: Tuple[LabelCoverEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "U", tuple(self.U))
        object.__setattr__(self, "V", tuple(self.V))
        object.__setattr__(self, "edges", tuple(self.edges))
        blocks = BlockMap(self.K, self.d)
        if set(self.U) & set(self.V):
            raise ValidationError("Left and right vertex names overlap")
        if not self.edges:
            raise ValidationError("Label Cover instance has no edges")
        validate_probability_weights([e.weight for e in self.edges])
        for e in self.edges:
            if e.u not in self.U or e.v not in self.V:
                raise ValidationError(f"Edge ({e.u}, {e.v}) does not join U to V")
            if len(e.pi) != blocks.L:
                raise ShapeError(
                    f"pi on edge ({e.u}, {e.v}) has {len(e.pi)} entries, "
                    f"expected {blocks.L}"
                )
            sizes = [len(p) for p in e.preimages(self.K)]
            if sizes != [self.d] * self.K or max(e.pi) >= self.K:
                raise ValidationError(f"pi on edge ({e.u}, {e.v}) is not {self.d}-to-1")

    @property
    def L(self) -> int:
        return self.K * self.d

    @property
    def blocks(self) -> BlockMap:
        return BlockMap(self.K, self.d)

    def to_csp(self) -> CspInstance:
        """The instance as d-to-1 constraints ``pi_e(label(v)) = label(u)``."""
        domains = {**{u: self.K for u in self.U}, **{v: self.L for v in self.V}}
        constraints = [
            Constraint(Predicate.d_to_one(e.pi), (e.u, e.v), e.weight)
            for e in self.edges
        ]
        return CspInstance(self.U + self.V, tuple(constraints), domains)


def labeling_value(
    instance: LabelCoverInstance, labeling: Mapping[str, int]
) -> Fraction:
    """Weight of edges with ``pi_e(F(v)) = F(u)``."""
    return instance_value(instance.to_csp(), labeling)


@dataclass
class LongCodeAssignment:
    """Folded tables ``f_u`` on Z3^K and ``g_v`` on Z3^{dK}."""

    tables: Dict[str, FunctionTable] = field(default_factory=dict)

    def __getitem__(self, vertex: str) -> FunctionTable:
        return self.tables[vertex]

    def validate(self, instance: LabelCoverInstance) -> None:
        for vertices, n in ((instance.U, instance.K), (instance.V, instance.L)):
            for name in vertices:
                if name not in self.tables:
                    raise ShapeError(f"No table for vertex {name!r}")
                table = self.tables[name]
                if table.n != n:
                    raise ShapeError(
                        f"Table of {name!r} has arity {table.n}, expected {n}"
                    )
                if not table.folded:
                    raise FoldingError(f"Table of {name!r} is not folded")


def _check_capacity(instance: LabelCoverInstance) -> None:
    if instance.L > MAX_LONGCODE_L:
        raise CapacityError(
            f"dK = {instance.L} exceeds the Long Code cap of {MAX_LONGCODE_L}"
        )


def reorder_permutation(edge: LabelCoverEdge, K: int, d: int) -> Tuple[int, ...]:
    """
    Test position ``k*d + j`` takes the ``j``-th smallest label of ``pi_e^-1(k)``.

    Feeding the result to ``permute_coordinates`` gives the table the 4NAT test reads.
    """
    return tuple(j for group in edge.preimages(K) for j in sorted(group))


def reordered_table(
    instance: LabelCoverInstance, edge: LabelCoverEdge, g: FunctionTable
) -> FunctionTable:
    return permute_coordinates(g, reorder_permutation(edge, instance.K, instance.d))


def orbit_variable(vertex: str, n: int, orbit: int) -> str:
    """Name of the orbit variable whose representative has index ``3 * orbit``."""
    return f"{vertex}@{string_of(3 * orbit, n)}"


def orbit_variables(vertex: str, n: int) -> List[str]:
    return [orbit_variable(vertex, n, k) for k in range(3 ** (n - 1))]


def build_4nat_instance(instance: LabelCoverInstance) -> CspInstance:
    """
    The 4NAT instance on orbit variables of all Long Codes.

    Args:
        instance: Label Cover instance with dK <= MAX_LONGCODE_L

    Returns:
        CspInstance of shifted 4NAT constraints, one per edge and test outcome,
        weighted by edge weight times outcome probability
    """
    _check_capacity(instance)
    K, L = instance.K, instance.L
    space = enumerate_4nat_distribution(K, instance.d)
    f_orbit, f_shift = folding_orbits(K)
    g_orbit, g_shift = folding_orbits(L)

    variables = [name for u in instance.U for name in orbit_variables(u, K)]
    variables += [name for v in instance.V for name in orbit_variables(v, L)]
    constraints = []
    x = space["x"]
    for e in instance.edges:
        u_names = orbit_variables(e.u, K)
        v_names = orbit_variables(e.v, L)
        moved = np.empty_like(digit_matrix(L))
        moved[:, list(reorder_permutation(e, K, instance.d))] = digit_matrix(L)
        original = indices_of(moved)
        ys = [original[space[role]] for role in ("y", "z", "w")]
        for k in range(len(space)):
            names = [u_names[f_orbit[x[k]]]] + [v_names[g_orbit[y[k]]] for y in ys]
            shifts = [f_shift[x[k]]] + [g_shift[y[k]] for y in ys]
            weight = e.weight * Fraction(int(space.numerators[k]), space.denominator)
            constraints.append(
                Constraint(Predicate.four_nat(shifts), tuple(names), weight)
            )
    logger.info(
        "built 4NAT instance: %d edges, %d variables, %d constraints",
        len(instance.edges),
        len(variables),
        len(constraints),
    )
    return CspInstance(tuple(variables), tuple(constraints))


def assignment_from_tables(
    instance: LabelCoverInstance, tables: LongCodeAssignment
) -> Assignment:
    """Orbit-variable labels read off the representatives of folded tables."""
    tables.validate(instance)
    out: Assignment = {}
    for vertices, n in ((instance.U, instance.K), (instance.V, instance.L)):
        for vertex in vertices:
            for k, label in enumerate(tables[vertex].restrict()):
                out[orbit_variable(vertex, n, k)] = int(label)
    return out


def dictator_assignment(
    instance: LabelCoverInstance, labeling: Mapping[str, int]
) -> LongCodeAssignment:
    """Long Code of a labeling: the dictator on each vertex's label."""
    tables = {}
    for vertices, n in ((instance.U, instance.K), (instance.V, instance.L)):
        for vertex in vertices:
            if vertex not in labeling:
                raise ValidationError(f"Labeling is missing vertex {vertex!r}")
            tables[vertex] = dictator(n, int(labeling[vertex]))
    return LongCodeAssignment(tables)


def completeness_certificate(
    instance: LabelCoverInstance, labeling: Mapping[str, int]
) -> Tuple[Fraction, bool]:
    """
    Value of the dictator Long Codes of ``labeling`` on the built 4NAT instance.

    Returns:
        (value, value == 1); a non-satisfying labeling just gives value < 1
    """
    reduced = build_4nat_instance(instance)
    tables = dictator_assignment(instance, labeling)
    value = instance_value(reduced, assignment_from_tables(instance, tables))
    return value, value == 1


def edge_pass_probabilities(
    instance: LabelCoverInstance, tables: LongCodeAssignment
) -> List[Fraction]:
    """Exact 4NAT pass probability of every edge on its reordered tables."""
    _check_capacity(instance)
    tables.validate(instance)
    return [
        pass_probability_4nat(tables[e.u], reordered_table(instance, e, tables[e.v]))
        for e in instance.edges
    ]


def decode_spectrum(g_spec: FourierSpectrum) -> np.ndarray:
    """
    Coordinate distribution of the spectral decoder.

    Draw ``alpha`` with probability ``|g^(alpha)|^2``, then one of its nonzero
    coordinates uniformly: ``P(j) = sum over alpha_j != 0 of |g^(alpha)|^2 / #alpha``.
    """
    if not g_spec.source_is_folded:
        raise FoldingError("The decoder needs the spectrum of a folded table")
    counts = support_counts(g_spec.n)
    per_alpha = np.where(counts > 0, g_spec.squared() / np.maximum(counts, 1), 0.0)
    return (digit_matrix(g_spec.n) != 0).T.astype(float) @ per_alpha


def _decoded(
    instance: LabelCoverInstance, tables: LongCodeAssignment
) -> Dict[str, np.ndarray]:
    _check_capacity(instance)
    tables.validate(instance)
    return {name: decode_spectrum(transform(t)) for name, t in tables.tables.items()}


def expected_decoded_value(
    instance: LabelCoverInstance, tables: LongCodeAssignment
) -> float:
    """Exact expected Label Cover value of independent per-vertex decodings."""
    decoded = _decoded(instance, tables)
    total = 0.0
    for e in instance.edges:
        p_u, p_v = decoded[e.u], decoded[e.v]
        total += float(e.weight) * float((p_v * p_u[list(e.pi)]).sum())
    return total


def sample_labeling(
    instance: LabelCoverInstance, tables: LongCodeAssignment, rng: np.random.Generator
) -> Dict[str, int]:
    """One draw of the decoder per vertex, U then V in instance order."""
    decoded = _decoded(instance, tables)
    labeling = {}
    for vertex in instance.U + instance.V:
        p = decoded[vertex]
        labeling[vertex] = int(rng.choice(p.shape[0], p=p / p.sum()))
    return labeling


def good_alpha_filter(
    f_spec: FourierSpectrum, g_spec: FourierSpectrum, eps: float, blocks: BlockMap
) -> FrozenSet[int]:
    """
    Indices of the good characters of ``g`` for ``f``.

    ``alpha`` is good when it carries mass in ``g`` and
    ``|f^(pi_3(alpha))| (1/2)^#alpha [pi_3(alpha) != 0] >= 3 eps / 8``.
    """
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    proj = projection_index(blocks)
    score = np.abs(f_spec.coefficients[proj]) * 0.5 ** support_counts(blocks.L)
    good = (proj != 0) & (score >= 3 * eps / 8) & (g_spec.squared() > TOLERANCE)
    return frozenset(int(i) for i in np.flatnonzero(good))


def good_alpha_checks(
    f_spec: FourierSpectrum, g_spec: FourierSpectrum, eps: float, blocks: BlockMap
) -> List[Check]:
    """The consequences every good character must satisfy."""
    proj = projection_index(blocks)
    counts = support_counts(blocks.L)
    checks = []
    for a in sorted(good_alpha_filter(f_spec, g_spec, eps, blocks)):
        label = str(string_of(a, blocks.L))
        checks.append(
            Check(
                f"good[{label}]-coefficient",
                9 * eps**2 / 64,
                abs(f_spec.coefficients[proj[a]]) ** 2,
                "<=",
            )
        )
        checks.append(
            Check(
                f"good[{label}]-support",
                int(counts[a]),
                math.log2(8 / (3 * eps)),
                "<=",
            )
        )
        checks.append(Check(f"good[{label}]-nonempty", 1, int(counts[a]), "<=", 0.0))
    return checks


@dataclass
class DecodingReport:
    """One edge's soundness chain from pass probability to decoded success."""

    eps: float
    pass_probability: Fraction
    dec: float
    good_mass: float
    success: float
    success_bound: float
    checks: List[Check] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)


def decoding_soundness_report(
    f: FunctionTable, g: FunctionTable, blocks: BlockMap, eps: float
) -> DecodingReport:
    """
    The decoding chain for one edge whose tables are already reordered.

    When the 4NAT pass probability is at least ``2/3 + eps/2`` the decodable
    mass is at least ``3 eps / 4``; then the good characters carry mass at
    least ``3 eps / 8`` and the decoded labels match with probability at
    least ``27 eps^3 / (512 log2(8 / 3 eps))``.  Only the implications whose
    premise holds are added as checks.
    """
    blocks.check_pair(f, g)
    passed = pass_probability_4nat(f, g)
    f_spec, g_spec = transform(f), transform(g)
    dec = dec_quantity(f_spec, g_spec, blocks)
    good = sorted(good_alpha_filter(f_spec, g_spec, eps, blocks))
    good_mass = float(g_spec.squared()[good].sum()) if good else 0.0
    p_f, p_g = decode_spectrum(f_spec), decode_spectrum(g_spec)
    success = float((p_g * p_f[list(blocks.projection())]).sum())
    bound = 27 * eps**3 / (512 * math.log2(8 / (3 * eps)))

    checks = good_alpha_checks(f_spec, g_spec, eps, blocks)
    if passed >= Fraction(2, 3) + Fraction(eps) / 2:
        checks.append(Check("decodable-mass", 3 * eps / 4, dec, "<="))
    if dec >= 3 * eps / 4:
        checks.append(Check("good-mass", 3 * eps / 8, good_mass, "<="))
        checks.append(Check("decoded-success", bound, success, "<="))
    return DecodingReport(eps, passed, dec, good_mass, success, bound, checks)


def random_label_cover(
    K: int,
    d: int,
    rng: np.random.Generator,
    n_left: int = 2,
    n_right: int = 2,
) -> Tuple[LabelCoverInstance, Dict[str, int]]:
    """
    A satisfiable instance on the complete bipartite graph with equal edge weights.

    A hidden labeling is drawn first; every ``pi_e`` is a random d-to-1 map
    relabelled so that it sends the right label to the left label.

    Returns:
        (instance, satisfying labeling)
    """
    L = K * d
    U = tuple(f"u{i}" for i in range(n_left))
    V = tuple(f"v{j}" for j in range(n_right))
    labeling = {u: int(rng.integers(0, K)) for u in U}
    labeling.update({v: int(rng.integers(0, L)) for v in V})
    weight = Fraction(1, n_left * n_right)
    edges = []
    for u in U:
        for v in V:
            pi = [int(j) // d for j in rng.permutation(L)]
            hit = pi[labeling[v]]
            swap = {hit: labeling[u], labeling[u]: hit}
            pi = [swap.get(i, i) for i in pi]
            edges.append(LabelCoverEdge(u, v, weight, tuple(pi)))
    return LabelCoverInstance(K, d, U, V, tuple(edges)), labeling
