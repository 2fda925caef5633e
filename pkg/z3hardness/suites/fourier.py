from typing import List, Union

import numpy as np
import pandas as pd

from ..dictatorship import folding_test_probability
from ..fourier import (
    alpha_profile,
    dec_quantity,
    efg_coloring_check,
    efgg_bound_check,
    egg_coloring_check,
    egg_expansion,
    even_dominates_empty,
    folded_support_violation,
    inverse_transform,
    prop_efg_check,
    transform,
    triple_product_expansion,
)
from ..ternary import (
    BlockMap,
    FunctionTable,
    constant_table,
    dictator,
    iter_strings,
    random_table,
)


def dec_by_profiles(f: FunctionTable, g: FunctionTable, blocks: BlockMap) -> float:
    """Decodable mass summed character by character from ``alpha_profile``."""
    f_spec, g_spec = transform(f), transform(g)
    total = 0.0
    for alpha in iter_strings(blocks.L):
        profile = alpha_profile(alpha, blocks)
        if not any(profile.projection.digits):
            continue
        total += (
            abs(f_spec[profile.projection])
            * abs(g_spec[alpha]) ** 2
            * 0.5**profile.support_count
        )
    return total


class FourierSuite:
    """Transform identities and the spectral inequalities behind soundness."""

    def __init__(self, verifier):
        self._verifier = verifier

    def transform_identities(
        self, as_dataframe: bool = True
    ) -> Union[List, pd.DataFrame]:
        """
        Parseval and inversion on random unfolded and folded tables, and the
        support condition on the folded ones.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        L = v.K * v.d
        records = []
        for t in range(v.trials):
            for kind, folded in (("unfolded", False), ("folded", True)):
                g = random_table(L, v.rng, folded=folded)
                spec = transform(g)
                tag = f"[{kind}][{t}]"
                residual = spec.parseval_residual()
                records.append(v.close(f"parseval{tag}", residual, 0.0))
                error = float(np.abs(inverse_transform(spec) - g.omega()).max())
                records.append(v.close(f"inverse{tag}", error, 0.0))
            violation = folded_support_violation(spec)
            records.append(v.close(f"folded-support[{t}]", violation, 0.0))
        return v.output(records, as_dataframe)

    def expansions(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Enumerated test expectations against their spectral expansions, and
        Dec against a character-by-character sum and on matching dictators.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        blocks = BlockMap(v.K, v.d)
        f_spec = transform(dictator(blocks.K, 0))
        g_spec = transform(dictator(blocks.L, 0))
        matching = dec_quantity(f_spec, g_spec, blocks)
        records = [v.close("dec[matching-dictators]", matching, 0.5)]
        for t in range(v.trials):
            f = random_table(blocks.K, v.rng)
            g = random_table(blocks.L, v.rng)
            check = egg_expansion(g, blocks)
            records.append(v.close(f"egg-expansion[{t}]", check.lhs, check.rhs))
            lhs, rhs, _ = triple_product_expansion(f, g, g, blocks)
            records.append(v.close(f"triple-product[{t}]", lhs, rhs))
            dec = dec_quantity(transform(f), transform(g), blocks)
            oracle = dec_by_profiles(f, g, blocks)
            records.append(v.close(f"dec-by-profiles[{t}]", dec, oracle))
        return v.output(records, as_dataframe)

    def inequalities(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        The spectral bounds on folded pairs (4NAT) and arbitrary pairs (3-Coloring).

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        blocks = BlockMap(v.K, v.d)
        records = []
        for t in range(v.trials):
            f = random_table(blocks.K, v.rng, folded=True)
            g = random_table(blocks.L, v.rng, folded=True)
            checks = [("", efgg_bound_check(f, g, blocks))]
            f, g = random_table(blocks.K, v.rng), random_table(blocks.L, v.rng)
            checks += [
                ("", prop_efg_check(f, g, blocks)),
                ("", egg_coloring_check(g, blocks)),
                ("", efg_coloring_check(f, g, blocks)),
                ("[f]", even_dominates_empty(transform(f))),
                ("[g]", even_dominates_empty(transform(g))),
            ]
            for tag, check in checks:
                name = f"{check.name}{tag}[{t}]"
                records.append(v.at_most(name, check.lhs, check.rhs))
        return v.output(records, as_dataframe)

    def folding(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        ``Pr[f(x) != f(x+1)] = 1 - Even(f)``: exactly 0 on constants, exactly 1
        on dictators and within tolerance on random tables.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        L = v.K * v.d
        records = []
        for c in range(3):
            prob, _, _ = folding_test_probability(constant_table(L, c))
            records.append(v.exact(f"folding[constant-{c}]", prob, 0))
        for j in range(L):
            prob, _, _ = folding_test_probability(dictator(L, j))
            records.append(v.exact(f"folding[dictator-{j}]", prob, 1))
        for t in range(v.trials):
            _, _, residual = folding_test_probability(random_table(L, v.rng))
            records.append(v.close(f"folding[{t}]", residual, 0.0))
        return v.output(records, as_dataframe)

    def run(self) -> List:
        return (
            self.transform_identities(as_dataframe=False)
            + self.expansions(as_dataframe=False)
            + self.inequalities(as_dataframe=False)
            + self.folding(as_dataframe=False)
        )
