from fractions import Fraction
from typing import List, Union

import pandas as pd

from ..csp import PredicateKind, exact_optimum, random_instance
from ..gadgets import (
    FOUR_NAT_TO_LABEL_COVER,
    FOUR_NAT_TO_TWO_NLIN,
    GADGETS,
    TWO_NLIN_TO_LABEL_COVER,
    DecisionThresholds,
    apply_gadget_to_instance,
    compose_thresholds,
    verify_gamma,
)


class GadgetSuite:
    """Gadget constants, threshold composition and instance-level identities."""

    def __init__(self, verifier):
        """
        Initialize the gadget suite.

        Args:
            verifier: The Verifier instance
        """
        self._verifier = verifier

    def gamma(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Enumerate every shipped gadget and compare gamma exactly.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        records = []
        for name, spec in GADGETS.items():
            report = verify_gamma(spec)
            records.append(v.exact(f"gamma[{name}]", report.gamma_observed, spec.gamma))
            records.append(v.exact(f"gamma-max[{name}]", report.gamma_max, spec.gamma))
            records.append(v.exact(f"complete[{name}]", report.complete, True))
        return v.output(records, as_dataframe)

    def thresholds(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Compose (c, s) thresholds along the gadget chain.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        start = DecisionThresholds(Fraction(1), Fraction(2, 3))
        to_2nlin = compose_thresholds(start, FOUR_NAT_TO_TWO_NLIN.gamma)
        to_2to1 = compose_thresholds(to_2nlin, TWO_NLIN_TO_LABEL_COVER.gamma)
        direct = compose_thresholds(start, FOUR_NAT_TO_LABEL_COVER.gamma)
        records = [
            v.exact("thresholds[4nat-2nlin].c", to_2nlin.c, Fraction(1)),
            v.exact("thresholds[4nat-2nlin].s", to_2nlin.s, Fraction(11, 12)),
            v.exact("thresholds[2nlin-labelcover].s", to_2to1.s, Fraction(23, 24)),
            v.exact("thresholds[4nat-labelcover].s", direct.s, Fraction(23, 24)),
            v.exact("thresholds[composition-agrees]", direct == to_2to1, True),
        ]
        return v.output(records, as_dataframe)

    def instance_identity(
        self, instances: int = 3, as_dataframe: bool = True
    ) -> Union[List, pd.DataFrame]:
        """
        ``opt(target) = opt(source) + (1 - opt(source)) gamma`` on random instances.

        The composed gadget is checked on single-constraint instances only.

        Args:
            instances: Random source instances per gadget
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        cases = [
            (FOUR_NAT_TO_TWO_NLIN, PredicateKind.FOUR_NAT, 4, 3),
            (TWO_NLIN_TO_LABEL_COVER, PredicateKind.TWO_NLIN, 3, 3),
            (FOUR_NAT_TO_LABEL_COVER, PredicateKind.FOUR_NAT, 4, 1),
        ]
        records = []
        for spec, kind, n_vars, n_constraints in cases:
            for k in range(instances):
                source = random_instance(kind, n_vars, n_constraints, v.rng)
                target = apply_gadget_to_instance(source, spec)
                src_opt, _ = exact_optimum(source)
                tgt_opt, _ = exact_optimum(target)
                expected = src_opt + (1 - src_opt) * spec.gamma
                name = f"optimum-identity[{spec.name}][{k}]"
                records.append(v.exact(name, tgt_opt, expected))
        return v.output(records, as_dataframe)

    def run(self) -> List:
        return (
            self.gamma(as_dataframe=False)
            + self.thresholds(as_dataframe=False)
            + self.instance_identity(as_dataframe=False)
        )
