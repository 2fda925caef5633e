import math
from fractions import Fraction
from typing import List, Union

import pandas as pd

from ..dictatorship import (
    arithmetization_checks,
    best_middle_function,
    coupled_four_nat_expectation,
    enumerate_2nlin_distribution,
    enumerate_4nat_distribution,
    expansion_4nat,
    hidden_gadget_inequality,
    pass_probability_2nlin,
    pass_probability_3col,
    pass_probability_4nat,
    sample_2nlin_pass,
    soundness_bound_3col,
    soundness_bound_4nat,
    z_determines_x_probability,
)
from ..ternary import BlockMap, constant_table, dictator, random_table
from ..utils import Check

MONTE_CARLO_SAMPLES = 10**6

# Acceptance band of the Monte-Carlo cross-check, in standard deviations
MONTE_CARLO_SIGMAS = 3


class DictatorshipSuite:
    """Dictator pass probabilities, soundness bounds and coupling identities."""

    def __init__(self, verifier):
        """
        Initialize the dictatorship test suite.

        Args:
            verifier: The Verifier instance
        """
        self._verifier = verifier

    @property
    def blocks(self) -> BlockMap:
        return BlockMap(self._verifier.K, self._verifier.d)

    def distributions(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Outcome-space weights sum to 1 and the reported z-determines-x probability.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        K, d = v.K, v.d
        two_nlin = enumerate_2nlin_distribution(K, d)
        four_nat = enumerate_4nat_distribution(K, d)
        records = [
            v.exact("weights[2nlin]", two_nlin.total_weight(), 1),
            v.exact("weights[4nat]", four_nat.total_weight(), 1),
        ]
        v.info["z-determines-x"] = str(z_determines_x_probability(K, d))
        return v.output(records, as_dataframe)

    def dictators(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Matching dictators pass every test with probability 1; nonmatching
        dictators (needs K >= 2) pass 2-NLin at 11/12, 3-Coloring at 16/17
        and 4NAT at 2/3.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        blocks = self.blocks
        K, L = blocks.K, blocks.L
        f, g = dictator(K, 0), dictator(L, 0)
        h = dictator(L, 0)
        records = [
            v.exact("matching[2nlin]", pass_probability_2nlin(f, g, h), 1),
            v.exact("matching[3col]", pass_probability_3col(f, g, h), 1),
            v.exact("matching[4nat]", pass_probability_4nat(f, g), 1),
            v.exact(
                "matching[best-h]",
                pass_probability_2nlin(f, g, best_middle_function(f, g, "2nlin")),
                1,
            ),
        ]
        if K >= 2:
            g = dictator(L, blocks.d)
            h2 = best_middle_function(f, g, "2nlin")
            h3 = best_middle_function(f, g, "3col")
            records += [
                v.exact(
                    "nonmatching[2nlin]",
                    pass_probability_2nlin(f, g, h2),
                    Fraction(11, 12),
                ),
                v.exact(
                    "nonmatching[3col]",
                    pass_probability_3col(f, g, h3),
                    Fraction(16, 17),
                ),
                v.exact(
                    "nonmatching[4nat]", pass_probability_4nat(f, g), Fraction(2, 3)
                ),
            ]
        constants = constant_table(K, 0), constant_table(L, 0), constant_table(L, 1)
        passed = pass_probability_3col(*constants)
        records.append(v.exact("constants[3col]", passed, Fraction(12, 17)))
        return v.output(records, as_dataframe)

    def arithmetization(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """Both arithmetized forms of 4NAT on all 81 tuples."""
        v = self._verifier
        return v.output([v.record(c) for c in arithmetization_checks()], as_dataframe)

    def soundness(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Soundness bounds on dictators and on random pairs, with every
        intermediate step of the 3-Coloring chain.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        K, L = self.blocks.K, self.blocks.L
        f, g = dictator(K, 0), dictator(L, 0)
        records = []
        report = soundness_bound_4nat(f, g, v.tolerance)
        records.append(_tight(v, "tight[4nat]", report))
        report = soundness_bound_3col(f, g, tolerance=v.tolerance)
        records.append(_tight(v, "tight[3col]", report))
        for t in range(v.trials):
            f, g = _folded_pair(K, L, v.rng)
            report = soundness_bound_4nat(f, g, v.tolerance)
            records.append(_bounded(v, f"bound[4nat][{t}]", report))
            records += [v.record(c.tagged(f"[{t}]")) for c in report.intermediates]
            f, g = random_table(K, v.rng), random_table(L, v.rng)
            report = soundness_bound_3col(f, g, tolerance=v.tolerance)
            records.append(_bounded(v, f"bound[3col][{t}]", report))
            records += [v.record(c.tagged(f"[{t}]")) for c in report.intermediates]
        return v.output(records, as_dataframe)

    def coupling(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        The y'/y'' renaming identity, the hidden-gadget inequality and the
        spectral expansion of the 4NAT pass probability on random folded pairs.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        K, L = self.blocks.K, self.blocks.L
        records = []
        for t in range(v.trials):
            f, g = _folded_pair(K, L, v.rng)
            records.append(
                v.exact(
                    f"renaming[{t}]",
                    coupled_four_nat_expectation(f, g),
                    pass_probability_4nat(f, g),
                )
            )
            for label, h in (
                ("best", best_middle_function(f, g, "2nlin")),
                ("random", random_table(L, v.rng, folded=True)),
            ):
                lhs, rhs, _ = hidden_gadget_inequality(f, g, h)
                records.append(v.record(_le(f"hidden-gadget[{label}][{t}]", lhs, rhs)))
            exact, spectral = expansion_4nat(f, g)
            records.append(v.close(f"expansion[4nat][{t}]", float(exact), spectral))
        return v.output(records, as_dataframe)

    def middle_function(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        The returned h beats random folded h, and a raw simulation agrees with
        the exact pass probability.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        K, L = self.blocks.K, self.blocks.L
        records = []
        for t in range(v.trials):
            f, g = _folded_pair(K, L, v.rng)
            best = pass_probability_2nlin(f, g, best_middle_function(f, g, "2nlin"))
            other = pass_probability_2nlin(f, g, random_table(L, v.rng, folded=True))
            records.append(v.record(_le(f"best-h-dominates[{t}]", other, best)))
        if v.trials:
            f, g = dictator(K, 0), dictator(L, 0)
            h = random_table(L, v.rng, folded=True)
            exact = float(pass_probability_2nlin(f, g, h))
            estimate = sample_2nlin_pass(f, g, h, MONTE_CARLO_SAMPLES, v.rng)
            sigma = math.sqrt(exact * (1 - exact) / MONTE_CARLO_SAMPLES)
            band = MONTE_CARLO_SIGMAS * sigma
            error = abs(estimate - exact)
            records.append(v.record(_le("monte-carlo[2nlin]", error, band)))
        return v.output(records, as_dataframe)

    def run(self) -> List:
        return (
            self.distributions(as_dataframe=False)
            + self.dictators(as_dataframe=False)
            + self.arithmetization(as_dataframe=False)
            + self.soundness(as_dataframe=False)
            + self.coupling(as_dataframe=False)
            + self.middle_function(as_dataframe=False)
        )


def _le(name: str, lhs, rhs) -> Check:
    return Check(name, lhs, rhs, "<=", 0.0)


def _folded_pair(K: int, L: int, rng):
    return random_table(K, rng, folded=True), random_table(L, rng, folded=True)


def _tight(v, name: str, report):
    return v.close(name, float(report.pass_probability), report.bound_rhs)


def _bounded(v, name: str, report):
    return v.at_most(name, float(report.pass_probability), report.bound_rhs)
