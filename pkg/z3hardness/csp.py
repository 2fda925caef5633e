"""
Predicates over small domains, weighted CSP instances, exact values and optima.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import MAX_ASSIGNMENTS
from .exceptions import CapacityError, KindMismatchError, ShapeError, ValidationError
from .utils import validate_probability_weights

logger = logging.getLogger(__name__)

Assignment = Dict[str, int]


def four_nat_mask(a, b, c, d) -> np.ndarray:
    """Vectorised 4NAT: true where some element of Z3 is absent among the inputs."""
    cols = [np.asarray(v) % 3 for v in (a, b, c, d)]
    present = [reduce(np.logical_or, [col == t for col in cols]) for t in range(3)]
    return ~(present[0] & present[1] & present[2])


def two_pair_mask(a, b, c, d) -> np.ndarray:
    """Vectorised TwoPair: true where the inputs are two distinct values, each twice."""
    cols = [np.asarray(v) % 3 for v in (a, b, c, d)]
    counts = [sum((col == t).astype(np.int64) for col in cols) for t in range(3)]
    pairs = sum((k == 2).astype(np.int64) for k in counts)
    return pairs == 2


class PredicateKind(str, Enum):
    THREE_COLORING = "3col"
    TWO_NLIN = "2nlin"
    FOUR_NAT = "4nat"
    TWO_PAIR = "twopair"
    D_TO_ONE = "dto1"


_ARITY = {
    PredicateKind.THREE_COLORING: 2,
    PredicateKind.TWO_NLIN: 2,
    PredicateKind.FOUR_NAT: 4,
    PredicateKind.TWO_PAIR: 4,
    PredicateKind.D_TO_ONE: 2,
}


@dataclass(frozen=True)
class Predicate:
    """
    A predicate kind with its parameters.

    ``params`` holds the shifts ``k_i`` of a shifted 4NAT/TwoPair constraint
    (``P(v_1 + k_1, ..., v_4 + k_4)``), the right-hand side ``a`` of a 2-NLin
    constraint ``v_1 - v_2 != a``, or the projection table of a d-to-1
    constraint on ``(u, v)``, satisfied iff ``params[label(v)] == label(u)``.
    """

    kind: PredicateKind
    params: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", PredicateKind(self.kind))
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))
        kind, params = self.kind, self.params
        if kind in (PredicateKind.FOUR_NAT, PredicateKind.TWO_PAIR):
            if not params:
                object.__setattr__(self, "params", (0, 0, 0, 0))
            elif len(params) != 4:
                raise ValidationError(f"{kind.value} takes 4 shifts, got {params}")
        elif kind == PredicateKind.TWO_NLIN:
            if len(params) != 1:
                raise ValidationError(f"2nlin takes one right-hand side, got {params}")
        elif kind == PredicateKind.THREE_COLORING:
            if params:
                raise ValidationError("3col takes no parameters")
        else:
            _check_projection(params)
        if kind != PredicateKind.D_TO_ONE:
            object.__setattr__(self, "params", tuple(p % 3 for p in self.params))

    @classmethod
    def four_nat(cls, shifts: Sequence[int] = (0, 0, 0, 0)) -> "Predicate":
        return cls(PredicateKind.FOUR_NAT, tuple(shifts))

    @classmethod
    def two_pair(cls, shifts: Sequence[int] = (0, 0, 0, 0)) -> "Predicate":
        return cls(PredicateKind.TWO_PAIR, tuple(shifts))

    @classmethod
    def two_nlin(cls, a: int) -> "Predicate":
        return cls(PredicateKind.TWO_NLIN, (a,))

    @classmethod
    def three_coloring(cls) -> "Predicate":
        return cls(PredicateKind.THREE_COLORING)

    @classmethod
    def d_to_one(cls, projection: Sequence[int]) -> "Predicate":
        return cls(PredicateKind.D_TO_ONE, tuple(projection))

    @property
    def arity(self) -> int:
        return _ARITY[self.kind]

    @property
    def domains(self) -> Tuple[int, ...]:
        """Domain size of each argument position."""
        if self.kind == PredicateKind.D_TO_ONE:
            return (max(self.params) + 1, len(self.params))
        return (3,) * self.arity

    def truth_table(self) -> np.ndarray:
        """Boolean array of shape ``domains`` holding the predicate."""
        return _truth_table(self)

    def __call__(self, *labels: int) -> int:
        return eval_predicate(self, labels)


def _check_projection(projection: Sequence[int]) -> None:
    if not projection:
        raise ValidationError("Projection table is empty")
    if min(projection) < 0:
        raise ValidationError(f"Negative label in projection {list(projection)}")
    counts = np.bincount(np.asarray(projection, dtype=np.int64))
    if counts.min() == 0 or counts.min() != counts.max():
        raise ValidationError(f"Projection {list(projection)} is not d-to-1")


@lru_cache(maxsize=None)
def _truth_table(p: Predicate) -> np.ndarray:
    grids = np.indices(p.domains)
    kind = p.kind
    if kind == PredicateKind.FOUR_NAT:
        table = four_nat_mask(*(grids[i] + p.params[i] for i in range(4)))
    elif kind == PredicateKind.TWO_PAIR:
        table = two_pair_mask(*(grids[i] + p.params[i] for i in range(4)))
    elif kind == PredicateKind.TWO_NLIN:
        table = (grids[0] - grids[1]) % 3 != p.params[0]
    elif kind == PredicateKind.THREE_COLORING:
        table = grids[0] != grids[1]
    else:
        table = np.asarray(p.params)[grids[1]] == grids[0]
    table = np.asarray(table, dtype=bool)
    table.setflags(write=False)
    return table


def eval_predicate(p: Predicate, labels: Sequence[int]) -> int:
    """
    Evaluate a predicate on concrete labels.

    Args:
        p: Predicate
        labels: One label per argument position

    Returns:
        1 if satisfied, else 0
    """
    labels = tuple(int(v) for v in labels)
    if len(labels) != p.arity:
        raise ShapeError(
            f"{p.kind.value} has arity {p.arity}, got {len(labels)} labels"
        )
    for v, size in zip(labels, p.domains):
        if not 0 <= v < size:
            raise ValidationError(f"Label {v} outside domain of size {size}")
    return int(p.truth_table()[labels])


@dataclass(frozen=True)
class Constraint:
    predicate: Predicate
    variables: Tuple[str, ...]
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "weight", Fraction(self.weight))
        if len(self.variables) != self.predicate.arity:
            raise ShapeError(
                f"{self.predicate.kind.value} needs {self.predicate.arity} variables, "
                f"got {len(self.variables)}"
            )


@dataclass(frozen=True)
class CspInstance:
    """
    Weighted constraints over named variables.

    ``domains`` maps each variable to its domain size (3 for Z3 variables);
    variables missing from it default to 3.  Weights are exact and sum to 1.
    """

    variables: Tuple[str, ...]
    constraints: Tuple[Constraint, ...]
    domains: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(set(self.variables)) != len(self.variables):
            raise ValidationError("Duplicate variable names")
        domains = {v: int(self.domains.get(v, 3)) for v in self.variables}
        unknown = set(self.domains) - set(self.variables)
        if unknown:
            raise ValidationError(
                f"Domains given for unknown variables {sorted(unknown)}"
            )
        object.__setattr__(self, "domains", domains)
        if not self.constraints:
            raise ValidationError("Instance has no constraints")
        validate_probability_weights([c.weight for c in self.constraints])
        for c in self.constraints:
            for v, size in zip(c.variables, c.predicate.domains):
                if v not in domains:
                    raise ValidationError(f"Constraint mentions unknown variable {v!r}")
                if domains[v] != size:
                    raise ShapeError(
                        f"Variable {v!r} has domain {domains[v]}, "
                        f"{c.predicate.kind.value} expects {size}"
                    )

    @property
    def kinds(self) -> Tuple[PredicateKind, ...]:
        kinds = {c.predicate.kind for c in self.constraints}
        return tuple(sorted(kinds, key=lambda k: k.value))

    def kind(self) -> PredicateKind:
        """The single predicate kind of the instance."""
        kinds = self.kinds
        if len(kinds) != 1:
            raise KindMismatchError(f"Instance mixes kinds {[k.value for k in kinds]}")
        return kinds[0]

    def assignment_count(self) -> int:
        return int(np.prod([self.domains[v] for v in self.variables], dtype=object))

    def common_denominator(self) -> int:
        dens = (c.weight.denominator for c in self.constraints)
        return reduce(lambda a, b: a * b // gcd(a, b), dens, 1)

    def value(self, assignment: Mapping[str, int]) -> Fraction:
        return instance_value(self, assignment)


def uniform_instance(
    predicates: Sequence[Tuple[Predicate, Sequence[str]]],
    domains: Optional[Dict[str, int]] = None,
) -> CspInstance:
    """Equal-weight instance over the variables in order of first appearance."""
    variables: List[str] = []
    for _, vs in predicates:
        for v in vs:
            if v not in variables:
                variables.append(v)
    w = Fraction(1, len(predicates))
    constraints = [Constraint(p, tuple(vs), w) for p, vs in predicates]
    return CspInstance(tuple(variables), tuple(constraints), dict(domains or {}))


def _check_assignment(instance: CspInstance, assignment: Mapping[str, int]) -> None:
    for v in instance.variables:
        if v not in assignment:
            raise ValidationError(f"Assignment is missing variable {v!r}")
        if not 0 <= int(assignment[v]) < instance.domains[v]:
            raise ValidationError(
                f"Label {assignment[v]} of {v!r} outside domain {instance.domains[v]}"
            )


def instance_value(instance: CspInstance, assignment: Mapping[str, int]) -> Fraction:
    """
    Weighted fraction of satisfied constraints.

    Args:
        instance: CSP instance
        assignment: Label for every variable

    Returns:
        Exact value in [0, 1]
    """
    _check_assignment(instance, assignment)
    total = Fraction(0)
    for c in instance.constraints:
        if c.predicate.truth_table()[tuple(int(assignment[v]) for v in c.variables)]:
            total += c.weight
    return total


def _local_table(
    c: Constraint, domains: Mapping[str, int]
) -> Tuple[Tuple[str, ...], np.ndarray]:
    """The constraint as a table over its distinct variables (repeats collapse)."""
    distinct = tuple(dict.fromkeys(c.variables))
    grids = np.indices([domains[v] for v in distinct])
    args = tuple(grids[distinct.index(v)] for v in c.variables)
    return distinct, c.predicate.truth_table()[args]


def assignment_scores(instance: CspInstance) -> Tuple[np.ndarray, int]:
    """
    Value numerators of every assignment over one common denominator.

    Assignment ``k`` gives variable ``i`` the mixed-radix digit
    ``(k // prod(domains[:i])) % domains[i]``, so the first variable varies fastest.

    Returns:
        (scores, denominator) with ``value = scores[k] / denominator``
    """
    total = instance.assignment_count()
    if total > MAX_ASSIGNMENTS:
        raise CapacityError(
            f"{total} assignments exceed the brute-force cap of {MAX_ASSIGNMENTS}"
        )
    sizes = [instance.domains[v] for v in instance.variables]
    radix = np.cumprod([1] + sizes[:-1]).astype(np.int64)
    position = {v: i for i, v in enumerate(instance.variables)}
    idx = np.arange(total, dtype=np.int64)
    den = instance.common_denominator()
    scores = np.zeros(total, dtype=np.int64)
    for c in instance.constraints:
        distinct, table = _local_table(c, instance.domains)
        digits = tuple(
            (idx // radix[position[v]]) % sizes[position[v]] for v in distinct
        )
        num = c.weight.numerator * (den // c.weight.denominator)
        scores += num * table[digits]
    logger.debug(
        "scored %d assignments over %d constraints", total, len(instance.constraints)
    )
    return scores, den


def decode_assignment(instance: CspInstance, k: int) -> Assignment:
    out = {}
    k = int(k)
    for v in instance.variables:
        k, out[v] = divmod(k, instance.domains[v])
    return out


def exact_optimum(instance: CspInstance) -> Tuple[Fraction, Assignment]:
    """
    Brute-force optimum with the lowest-index optimal assignment as witness.

    Raises:
        CapacityError: if the assignment space exceeds MAX_ASSIGNMENTS
    """
    scores, den = assignment_scores(instance)
    best = int(np.argmax(scores))
    return Fraction(int(scores[best]), den), decode_assignment(instance, best)


def random_assignment_expectation(instance: CspInstance) -> Fraction:
    """Exact expected value of a uniformly random assignment."""
    total = Fraction(0)
    for c in instance.constraints:
        _, table = _local_table(c, instance.domains)
        total += c.weight * Fraction(int(table.sum()), table.size)
    return total


def _conditional_value(instance: CspInstance, fixed: Mapping[str, int]) -> Fraction:
    total = Fraction(0)
    for c in instance.constraints:
        distinct, table = _local_table(c, instance.domains)
        index = tuple(fixed[v] if v in fixed else slice(None) for v in distinct)
        part = table[index]
        total += c.weight * Fraction(int(np.sum(part)), int(np.size(part)))
    return total


def conditional_expectation_assignment(
    instance: CspInstance,
) -> Tuple[Assignment, Fraction]:
    """
    Derandomise the uniform assignment by the method of conditional expectations.

    Variables are fixed in order, each to the least label maximising the exact
    conditional expectation, so the final value is at least the random expectation.
    """
    fixed: Assignment = {}
    for v in instance.variables:
        best_label, best_value = 0, Fraction(-1)
        for label in range(instance.domains[v]):
            value = _conditional_value(instance, {**fixed, v: label})
            if value > best_value:
                best_label, best_value = label, value
        fixed[v] = best_label
    return fixed, instance_value(instance, fixed)


def local_search_optimum(
    instance: CspInstance,
    rng: np.random.Generator,
    restarts: Optional[int] = None,
) -> Tuple[Fraction, Assignment]:
    """
    Best-improvement local search over single-variable moves with random restarts.

    Restarts visit distinct starting assignments in shuffled order; with
    ``restarts=None`` every assignment is a start, so the search runs to
    exhaustion and returns the optimum.
    """
    total = instance.assignment_count()
    if total > MAX_ASSIGNMENTS:
        raise CapacityError(f"{total} starting points exceed {MAX_ASSIGNMENTS}")
    starts = rng.permutation(total)
    if restarts is not None:
        starts = starts[:restarts]
    best_value, best = Fraction(-1), None
    for k in starts:
        current = decode_assignment(instance, int(k))
        value = instance_value(instance, current)
        improved = True
        while improved:
            improved = False
            for v in instance.variables:
                for label in range(instance.domains[v]):
                    if label == current[v]:
                        continue
                    candidate = {**current, v: label}
                    cv = instance_value(instance, candidate)
                    if cv > value:
                        current, value, improved = candidate, cv, True
        if value > best_value:
            best_value, best = value, current
        if best_value == 1:
            break
    return best_value, best


@dataclass(frozen=True)
class TwoPairFacts:
    """Counting facts about the uniform distribution on TwoPair tuples."""

    two_pair_count: int
    four_nat_count: int
    implies_four_nat: bool
    uniform_marginals: bool
    pairwise_independent: bool


def twopair_distribution_facts() -> TwoPairFacts:
    """
    Count TwoPair and 4NAT tuples and check the marginals of the uniform law on TwoPair.

    Each single coordinate must be uniform on Z3 and each pair of coordinates
    uniform on Z3^2, both by exact counting.
    """
    tuples = np.array(list(itertools.product(range(3), repeat=4)))
    tp = two_pair_mask(*tuples.T)
    nat = four_nat_mask(*tuples.T)
    support = tuples[tp]
    marginals = all(
        len(set(np.bincount(support[:, i], minlength=3))) == 1 for i in range(4)
    )
    pairwise = all(
        len(set(np.bincount(3 * support[:, i] + support[:, j], minlength=9))) == 1
        for i, j in itertools.combinations(range(4), 2)
    )
    return TwoPairFacts(
        two_pair_count=int(tp.sum()),
        four_nat_count=int(nat.sum()),
        implies_four_nat=bool(np.all(nat[tp])),
        uniform_marginals=marginals,
        pairwise_independent=pairwise,
    )


def random_instance(
    kind: PredicateKind,
    n_vars: int,
    n_constraints: int,
    rng: np.random.Generator,
) -> CspInstance:
    """
    Random instance of one kind over ``v0 .. v{n_vars-1}``.

    Variables within a constraint are distinct, parameters uniform, and
    weights random small integers normalised to sum to 1.
    """
    kind = PredicateKind(kind)
    if kind == PredicateKind.D_TO_ONE:
        raise ValidationError("Random d-to-1 instances come from random_label_cover")
    arity = _ARITY[kind]
    if n_vars < arity:
        raise ValidationError(f"{kind.value} needs at least {arity} variables")
    names = [f"v{i}" for i in range(n_vars)]
    raw = rng.integers(1, 5, size=n_constraints)
    total = int(raw.sum())
    constraints = []
    for k in range(n_constraints):
        chosen = tuple(names[i] for i in rng.choice(n_vars, size=arity, replace=False))
        if kind in (PredicateKind.FOUR_NAT, PredicateKind.TWO_PAIR):
            params = tuple(int(s) for s in rng.integers(0, 3, size=4))
        elif kind == PredicateKind.TWO_NLIN:
            params = (int(rng.integers(0, 3)),)
        else:
            params = ()
        constraints.append(
            Constraint(Predicate(kind, params), chosen, Fraction(int(raw[k]), total))
        )
    return CspInstance(tuple(names), tuple(constraints))
