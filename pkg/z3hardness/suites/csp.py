from fractions import Fraction
from typing import List, Union

import pandas as pd

from ..csp import (
    Predicate,
    PredicateKind,
    conditional_expectation_assignment,
    decode_assignment,
    eval_predicate,
    exact_optimum,
    instance_value,
    local_search_optimum,
    random_assignment_expectation,
    random_instance,
    twopair_distribution_facts,
)

# Random instances per kind for the optimum and derandomisation checks
INSTANCES_PER_KIND = 4


class CspSuite:
    """Predicate counts, exact optima and the two lower-bound algorithms."""

    def __init__(self, verifier):
        """
        Initialize the CSP suite.

        Args:
            verifier: The Verifier instance
        """
        self._verifier = verifier

    def predicates(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Hand-checked evaluations and the counting facts about 4NAT and TwoPair.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        nat, pair = Predicate.four_nat(), Predicate.two_pair()
        facts = twopair_distribution_facts()
        records = [
            v.exact("eval[4nat(0,1,2,0)]", eval_predicate(nat, (0, 1, 2, 0)), 0),
            v.exact("eval[4nat(0,0,0,0)]", eval_predicate(nat, (0, 0, 0, 0)), 1),
            v.exact("eval[twopair(0,0,1,1)]", eval_predicate(pair, (0, 0, 1, 1)), 1),
            v.exact("eval[twopair(0,0,0,1)]", eval_predicate(pair, (0, 0, 0, 1)), 0),
            v.exact("count[4nat]", facts.four_nat_count, 45),
            v.exact("count[twopair]", facts.two_pair_count, 18),
            v.exact("twopair-implies-4nat", facts.implies_four_nat, True),
            v.exact("twopair-uniform-marginals", facts.uniform_marginals, True),
            v.exact("twopair-pairwise-independent", facts.pairwise_independent, True),
        ]
        return v.output(records, as_dataframe)

    def random_expectations(
        self, as_dataframe: bool = True
    ) -> Union[List, pd.DataFrame]:
        """Exact expected value of a uniform assignment on pure instances."""
        v = self._verifier
        expected = {
            PredicateKind.FOUR_NAT: Fraction(5, 9),
            PredicateKind.TWO_NLIN: Fraction(2, 3),
            PredicateKind.THREE_COLORING: Fraction(2, 3),
        }
        records = []
        for kind, value in expected.items():
            instance = random_instance(kind, 5, 4, v.rng)
            observed = random_assignment_expectation(instance)
            name = f"random-expectation[{kind.value}]"
            records.append(v.exact(name, observed, value))
        return v.output(records, as_dataframe)

    def optima(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        The optimum dominates random assignments; the conditional-expectation
        assignment dominates the random expectation; local search run to
        exhaustion finds the optimum.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        records = []
        kinds = (
            PredicateKind.FOUR_NAT,
            PredicateKind.TWO_PAIR,
            PredicateKind.TWO_NLIN,
            PredicateKind.THREE_COLORING,
        )
        for kind in kinds:
            for k in range(INSTANCES_PER_KIND):
                tag = f"{kind.value}][{k}"
                instance = random_instance(kind, 6, 5, v.rng)
                optimum, witness = exact_optimum(instance)
                value = instance_value(instance, witness)
                records.append(v.exact(f"witness[{tag}]", value, optimum))
                for t in range(v.trials):
                    pick = int(v.rng.integers(0, instance.assignment_count()))
                    value = instance_value(instance, decode_assignment(instance, pick))
                    name = f"optimum-dominates[{tag}][{t}]"
                    records.append(v.at_most(name, value, optimum))
                _, greedy = conditional_expectation_assignment(instance)
                records.append(
                    v.at_most(
                        f"conditional-expectation[{tag}]",
                        random_assignment_expectation(instance),
                        greedy,
                    )
                )
        instance = random_instance(PredicateKind.TWO_NLIN, 5, 6, v.rng)
        optimum, _ = exact_optimum(instance)
        searched, _ = local_search_optimum(instance, v.rng)
        records.append(v.exact("local-search[2nlin]", searched, optimum))
        return v.output(records, as_dataframe)

    def run(self) -> List:
        return (
            self.predicates(as_dataframe=False)
            + self.random_expectations(as_dataframe=False)
            + self.optima(as_dataframe=False)
        )
