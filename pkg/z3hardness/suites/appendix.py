import logging
from typing import List, Union

import pandas as pd

from ..config import MAX_TRIPLE_SUM_L
from ..exceptions import CapacityError
from ..fourier import character_block_table, ggg_expansion_and_bound
from ..ternary import BlockMap, constant_table, dictator, random_table

logger = logging.getLogger(__name__)


class AppendixSuite:
    """Column expectations and the cubic-term expansion of the 4NAT test."""

    def __init__(self, verifier):
        self._verifier = verifier

    @property
    def blocks(self) -> BlockMap:
        """The verifier's block map; CapacityError past the triple-sum cap."""
        v = self._verifier
        if v.K * v.d > MAX_TRIPLE_SUM_L:
            raise CapacityError(
                f"Triple sums are capped at L={MAX_TRIPLE_SUM_L}, got L={v.K * v.d}"
            )
        return BlockMap(v.K, v.d)

    def column_table(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """All 27 column expectations against the closed form."""
        v = self._verifier
        return v.output([v.record(c) for c in character_block_table()], as_dataframe)

    def cubic_terms(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Expansion and bound of ``E[g(y) g(z) g(w)]`` on constants, dictators
        and random tables.

        The largest three-ones residual seen is stored in
        ``info["three-ones-residual"]``; it is reported, not checked.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        blocks = self.blocks
        L = blocks.L
        v.info["appendix-blocks"] = {"K": blocks.K, "d": blocks.d}
        cases = [(f"constant-{c}", constant_table(L, c), None, None) for c in range(3)]
        cases += [(f"dictator-{j}", dictator(L, j), None, None) for j in range(L)]
        for t in range(v.trials):
            cases.append((f"random-{t}", random_table(L, v.rng), None, None))
        for t in range(v.trials):
            g1, g2, g3 = (random_table(L, v.rng) for _ in range(3))
            cases.append((f"mixed-{t}", g1, g2, g3))
        records = []
        residual = 0.0
        for label, g, g2, g3 in cases:
            report = ggg_expansion_and_bound(g, blocks, g2, g3, tolerance=v.tolerance)
            if g2 is None:
                checks = report.checks
                residual = max(residual, abs(report.three_ones_residual))
            else:
                checks = [report.expansion]
            records += [v.record(c.tagged(f"[{label}]")) for c in checks]
        v.info["three-ones-residual"] = residual
        logger.debug("largest three-ones residual: %.3g", residual)
        return v.output(records, as_dataframe)

    def run(self) -> List:
        return (
            self.column_table(as_dataframe=False)
            + self.cubic_terms(as_dataframe=False)
        )
