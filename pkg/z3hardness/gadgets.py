"""
Gadget reductions between predicate families and the threshold rule they induce.

A gamma-gadget replaces each source constraint by weighted target constraints
over the source variables and fresh auxiliaries.  Satisfying source
assignments extend to target value 1; every other source assignment has
best extension value exactly gamma.
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .csp import (
    Constraint,
    CspInstance,
    Predicate,
    PredicateKind,
    assignment_scores,
    decode_assignment,
)
from .exceptions import KindMismatchError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GadgetOutput:
    """Auxiliaries (name -> domain size) and target constraints of one source."""

    source: Constraint
    auxiliaries: Dict[str, int]
    constraints: Tuple[Constraint, ...]


Constructor = Callable[[Constraint, str], GadgetOutput]


def _require_kind(constraint: Constraint, *kinds: PredicateKind) -> None:
    if constraint.predicate.kind not in kinds:
        raise KindMismatchError(
            f"Gadget expects {[k.value for k in kinds]}, "
            f"got {constraint.predicate.kind.value}"
        )


def gadget_4nat_to_2nlin(constraint: Constraint, aux: str = "y") -> GadgetOutput:
    """
    Replace ``4NAT(v_1 + k_1, ..., v_4 + k_4)`` by the four equations
    ``v_i + k_i != y`` with one auxiliary ``y``, weight 1/4 each.
    """
    _require_kind(constraint, PredicateKind.FOUR_NAT)
    shifts = constraint.predicate.params
    equations = tuple(
        # v + k != y  is  v - y != -k
        Constraint(Predicate.two_nlin(-k), (v, aux), Fraction(1, 4))
        for v, k in zip(constraint.variables, shifts)
    )
    return GadgetOutput(constraint, {aux: 3}, equations)


def satisfying_labels(a: int) -> List[Tuple[int, int]]:
    """The six pairs ``(b_1, b_2)`` with ``b_1 - b_2 != a``, lexicographic."""
    return [(b1, b2) for b1 in range(3) for b2 in range(3) if (b1 - b2) % 3 != a % 3]


def gadget_2nlin_to_labelcover(constraint: Constraint, aux: str = "y") -> GadgetOutput:
    """
    Replace ``v_1 - v_2 != a`` by a label-cover auxiliary ``y`` over its six
    satisfying partial assignments and the 2-to-1 constraints
    ``y(v_1) = v_1`` and ``y(v_2) = v_2``, weight 1/2 each.

    A 3-Coloring constraint is the case ``a = 0``.
    """
    _require_kind(constraint, PredicateKind.TWO_NLIN, PredicateKind.THREE_COLORING)
    v1, v2 = constraint.variables
    if v1 == v2:
        raise ValidationError(f"2-NLin constraint on a single variable {v1!r}")
    p = constraint.predicate
    a = p.params[0] if p.kind == PredicateKind.TWO_NLIN else 0
    labels = satisfying_labels(a)
    half = Fraction(1, 2)
    constraints = (
        Constraint(Predicate.d_to_one([b1 for b1, _ in labels]), (v1, aux), half),
        Constraint(Predicate.d_to_one([b2 for _, b2 in labels]), (v2, aux), half),
    )
    return GadgetOutput(constraint, {aux: len(labels)}, constraints)


def _canonical_4nat() -> Constraint:
    return Constraint(Predicate.four_nat(), ("v1", "v2", "v3", "v4"), Fraction(1))


def _canonical_2nlin() -> Constraint:
    return Constraint(Predicate.two_nlin(0), ("v1", "v2"), Fraction(1))


@dataclass(frozen=True)
class GadgetSpec:
    """A gamma-gadget between two predicate kinds."""

    name: str
    source: PredicateKind
    target: PredicateKind
    gamma: Fraction
    constructor: Constructor = field(repr=False, compare=False)
    sample_source: Callable[[], Constraint] = field(repr=False, compare=False)
    accepts: Tuple[PredicateKind, ...] = ()

    def __post_init__(self):
        if not self.accepts:
            object.__setattr__(self, "accepts", (self.source,))

    def build(self, constraint: Constraint, aux: str) -> GadgetOutput:
        return self.constructor(constraint, aux)

    def compose(self, other: "GadgetSpec") -> "GadgetSpec":
        """Apply ``self`` then ``other`` to every produced constraint."""
        if self.target not in other.accepts:
            raise KindMismatchError(
                f"Cannot compose {self.name} ({self.target.value}) "
                f"with {other.name} ({other.source.value})"
            )

        def constructor(constraint: Constraint, aux: str) -> GadgetOutput:
            first = self.build(constraint, aux)
            auxiliaries = dict(first.auxiliaries)
            out = []
            for k, inner in enumerate(first.constraints):
                second = other.build(inner, f"{aux}.{k}")
                auxiliaries.update(second.auxiliaries)
                out.extend(
                    Constraint(c.predicate, c.variables, c.weight * inner.weight)
                    for c in second.constraints
                )
            return GadgetOutput(constraint, auxiliaries, tuple(out))

        return GadgetSpec(
            name=f"{self.name}+{other.name}",
            source=self.source,
            target=other.target,
            gamma=1 - (1 - self.gamma) * (1 - other.gamma),
            constructor=constructor,
            sample_source=self.sample_source,
            accepts=self.accepts,
        )


FOUR_NAT_TO_TWO_NLIN = GadgetSpec(
    name="4nat-2nlin",
    source=PredicateKind.FOUR_NAT,
    target=PredicateKind.TWO_NLIN,
    gamma=Fraction(3, 4),
    constructor=gadget_4nat_to_2nlin,
    sample_source=_canonical_4nat,
)

TWO_NLIN_TO_LABEL_COVER = GadgetSpec(
    name="2nlin-labelcover",
    source=PredicateKind.TWO_NLIN,
    target=PredicateKind.D_TO_ONE,
    gamma=Fraction(1, 2),
    constructor=gadget_2nlin_to_labelcover,
    sample_source=_canonical_2nlin,
    accepts=(PredicateKind.TWO_NLIN, PredicateKind.THREE_COLORING),
)

FOUR_NAT_TO_LABEL_COVER = replace(
    FOUR_NAT_TO_TWO_NLIN.compose(TWO_NLIN_TO_LABEL_COVER), name="4nat-labelcover"
)

GADGETS: Dict[str, GadgetSpec] = {
    spec.name: spec
    for spec in (FOUR_NAT_TO_TWO_NLIN, TWO_NLIN_TO_LABEL_COVER, FOUR_NAT_TO_LABEL_COVER)
}


@dataclass(frozen=True)
class GammaReport:
    """Result of enumerating every source assignment against every aux labeling."""

    gadget: str
    gamma_expected: Fraction
    gamma_observed: Fraction
    gamma_max: Fraction
    complete: bool
    source_assignments: int

    @property
    def passed(self) -> bool:
        return (
            self.complete
            and self.gamma_observed == self.gamma_expected
            and self.gamma_max == self.gamma_expected
        )

    def to_json(self) -> Dict[str, object]:
        return {
            "gadget": self.gadget,
            "gamma_expected": str(self.gamma_expected),
            "gamma_observed_num": self.gamma_observed.numerator,
            "gamma_observed_den": self.gamma_observed.denominator,
            "pass": self.passed,
        }


def gadget_instance(
    spec: GadgetSpec, source: Constraint, aux: str = "aux"
) -> CspInstance:
    """One source constraint's gadget as an instance, source variables first."""
    out = spec.build(source, aux)
    variables = tuple(dict.fromkeys(source.variables)) + tuple(out.auxiliaries)
    return CspInstance(variables, out.constraints, dict(out.auxiliaries))


def verify_gamma(spec: GadgetSpec, source: Optional[Constraint] = None) -> GammaReport:
    """
    Enumerate all source assignments and auxiliary labelings of one gadget.

    Args:
        spec: The gadget
        source: Source constraint; the spec's canonical one if omitted

    Returns:
        GammaReport; ``passed`` requires completeness and the same optimum
        ``gamma`` for every non-satisfying source assignment
    """
    source = source if source is not None else spec.sample_source()
    instance = gadget_instance(spec, source)
    scores, den = assignment_scores(instance)
    source_vars = tuple(dict.fromkeys(source.variables))
    n_src = int(np.prod([instance.domains[v] for v in source_vars]))
    best = scores.reshape(-1, n_src).max(axis=0)

    table = source.predicate.truth_table()
    satisfied = np.array(
        [
            bool(table[tuple(a[v] for v in source.variables)])
            for a in (decode_assignment(instance, k) for k in range(n_src))
        ]
    )
    complete = bool(np.all(best[satisfied] == den))
    unsat = best[~satisfied]
    if unsat.size:
        observed = Fraction(int(unsat.min()), den)
        highest = Fraction(int(unsat.max()), den)
    else:
        observed = highest = Fraction(1)
    logger.debug(
        "%s: gamma in [%s, %s], complete=%s", spec.name, observed, highest, complete
    )
    return GammaReport(spec.name, spec.gamma, observed, highest, complete, n_src)


@dataclass(frozen=True)
class DecisionThresholds:
    """Completeness ``c`` and soundness ``s`` with ``0 <= s < c <= 1``."""

    c: Fraction
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "s", Fraction(self.s))
        if not 0 <= self.s < self.c <= 1:
            raise ValidationError(f"Need 0 <= s < c <= 1, got c={self.c}, s={self.s}")

    def to_json(self) -> Dict[str, str]:
        return {"c": str(self.c), "s": str(self.s)}


def compose_thresholds(t: DecisionThresholds, gamma: Fraction) -> DecisionThresholds:
    """``(c + (1 - c) gamma, s + (1 - s) gamma)``, exactly."""
    gamma = Fraction(gamma)
    if not 0 <= gamma < 1:
        raise ValidationError(f"gamma must lie in [0, 1), got {gamma}")
    return DecisionThresholds(t.c + (1 - t.c) * gamma, t.s + (1 - t.s) * gamma)


def apply_gadget_to_instance(
    instance: CspInstance, spec: GadgetSpec, prefix: str = "aux"
) -> CspInstance:
    """
    Apply a gadget to every constraint with fresh auxiliaries per constraint.

    Target weights are the source weight times the gadget's internal weight,
    so they still sum to 1.  Auxiliaries of constraint ``i`` are named
    ``{prefix}{i}`` (composed gadgets append ``.k``).
    """
    for c in instance.constraints:
        if c.predicate.kind not in spec.accepts:
            raise KindMismatchError(
                f"{spec.name} cannot reduce a {c.predicate.kind.value} constraint"
            )
    domains = dict(instance.domains)
    variables = list(instance.variables)
    constraints = []
    for i, c in enumerate(instance.constraints):
        out = spec.build(c, f"{prefix}{i}")
        for name, size in out.auxiliaries.items():
            if name in domains:
                raise ValidationError(
                    f"Auxiliary {name!r} collides with a source variable"
                )
            domains[name] = size
            variables.append(name)
        constraints.extend(
            Constraint(t.predicate, t.variables, t.weight * c.weight)
            for t in out.constraints
        )
    logger.info(
        "%s: %d constraints -> %d constraints, %d auxiliaries",
        spec.name,
        len(instance.constraints),
        len(constraints),
        len(variables) - len(instance.variables),
    )
    return CspInstance(tuple(variables), tuple(constraints), domains)
