"""
z3hardness: exact verification of hardness-of-approximation reductions over Z3
==============================================================================

Gadget reductions between 4NAT, 2-NLin, 3-Coloring and 2-to-1 Label Cover,
dictatorship tests over folded tables, Fourier analysis on Z3^n and the
Long Code reduction from d-to-1 Label Cover to 4NAT, each checked by exact
enumeration.

Example:
    >>> import z3hardness
    >>> verifier = z3hardness.Verifier(seed=0, K=2, d=2, trials=20)
    >>> report = verifier.run("gadgets")
    >>> report.passed
    True
    >>> verifier.tests.dictators()  # pandas DataFrame of check records

    # Work with the objects directly
    >>> f, g = z3hardness.dictator(2, 0), z3hardness.dictator(4, 0)
    >>> z3hardness.pass_probability_4nat(f, g)
    Fraction(1, 1)
"""

import logging

__version__ = "0.1.0"

from .csp import (
    Constraint,
    CspInstance,
    Predicate,
    PredicateKind,
    eval_predicate,
    exact_optimum,
    instance_value,
    random_assignment_expectation,
)
from .dictatorship import (
    best_middle_function,
    pass_probability_2nlin,
    pass_probability_3col,
    pass_probability_4nat,
    soundness_bound_3col,
    soundness_bound_4nat,
)
from .exceptions import (
    CapacityError,
    FoldingError,
    KindMismatchError,
    ParseError,
    ShapeError,
    ValidationError,
    Z3HardnessError,
)
from .fourier import FourierSpectrum, dec_quantity, even_mass, transform
from .gadgets import GADGETS, DecisionThresholds, compose_thresholds, verify_gamma
from .longcode import (
    LabelCoverEdge,
    LabelCoverInstance,
    LongCodeAssignment,
    build_4nat_instance,
    completeness_certificate,
    decode_spectrum,
)
from .ternary import (
    BlockMap,
    FunctionTable,
    TernaryString,
    dictator,
    fold_extend,
    is_folded,
)
from .verifier import SuiteReport, Verifier

logging.getLogger(__name__).addHandler(logging.NullHandler())

# Short alias
Z3Verifier = Verifier

__all__ = [
    "BlockMap",
    "CapacityError",
    "Constraint",
    "CspInstance",
    "DecisionThresholds",
    "FoldingError",
    "FourierSpectrum",
    "FunctionTable",
    "GADGETS",
    "KindMismatchError",
    "LabelCoverEdge",
    "LabelCoverInstance",
    "LongCodeAssignment",
    "ParseError",
    "Predicate",
    "PredicateKind",
    "ShapeError",
    "SuiteReport",
    "TernaryString",
    "ValidationError",
    "Verifier",
    "Z3HardnessError",
    "Z3Verifier",
    "best_middle_function",
    "build_4nat_instance",
    "completeness_certificate",
    "compose_thresholds",
    "dec_quantity",
    "decode_spectrum",
    "dictator",
    "eval_predicate",
    "even_mass",
    "exact_optimum",
    "fold_extend",
    "instance_value",
    "is_folded",
    "pass_probability_2nlin",
    "pass_probability_3col",
    "pass_probability_4nat",
    "random_assignment_expectation",
    "soundness_bound_3col",
    "soundness_bound_4nat",
    "transform",
    "verify_gamma",
]
