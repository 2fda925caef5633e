import logging
from typing import List, Union

import pandas as pd

from ..config import MAX_LONGCODE_L
from ..csp import instance_value
from ..exceptions import CapacityError
from ..longcode import (
    LabelCoverInstance,
    LongCodeAssignment,
    assignment_from_tables,
    build_4nat_instance,
    completeness_certificate,
    decoding_soundness_report,
    dictator_assignment,
    edge_pass_probabilities,
    expected_decoded_value,
    labeling_value,
    random_label_cover,
    reordered_table,
    sample_labeling,
)
from ..ternary import random_table

logger = logging.getLogger(__name__)

# Label Cover instances built per run; each one is enumerated edge by edge
PIPELINE_INSTANCES = 2

# Random folded assignments evaluated per instance
TABLES_PER_INSTANCE = 3

DECODING_EPS = (0.1, 0.25, 0.5)


class PipelineSuite:
    """Label Cover to 4NAT through Long Codes, then back by decoding."""

    def __init__(self, verifier):
        self._verifier = verifier

    def _shape(self):
        v = self._verifier
        if v.K * v.d > MAX_LONGCODE_L:
            raise CapacityError(
                f"Long Codes of length dK={v.K * v.d} exceed the cap of "
                f"{MAX_LONGCODE_L}"
            )
        logger.debug("pipeline Long Codes at K=%d, d=%d", v.K, v.d)
        return v.K, v.d

    def _random_tables(self, instance: LabelCoverInstance) -> LongCodeAssignment:
        rng = self._verifier.rng
        tables = {u: random_table(instance.K, rng, folded=True) for u in instance.U}
        tables.update(
            {w: random_table(instance.L, rng, folded=True) for w in instance.V}
        )
        return LongCodeAssignment(tables)

    def reduction(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Completeness of dictator Long Codes and the per-edge value identity.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        K, d = self._shape()
        records = []
        for k in range(PIPELINE_INSTANCES):
            instance, labeling = random_label_cover(K, d, v.rng)
            satisfied = labeling_value(instance, labeling)
            records.append(v.exact(f"labeling-satisfies[{k}]", satisfied, 1))
            value, _ = completeness_certificate(instance, labeling)
            records.append(v.exact(f"completeness[{k}]", value, 1))

            reduced = build_4nat_instance(instance)
            assignments = [("dictators", dictator_assignment(instance, labeling))]
            for t in range(min(v.trials, TABLES_PER_INSTANCE)):
                assignments.append((f"random-{t}", self._random_tables(instance)))
            for label, tables in assignments:
                assignment = assignment_from_tables(instance, tables)
                observed = instance_value(reduced, assignment)
                passes = edge_pass_probabilities(instance, tables)
                expected = sum(e.weight * p for e, p in zip(instance.edges, passes))
                name = f"edge-identity[{k}][{label}]"
                records.append(v.exact(name, observed, expected))
        return v.output(records, as_dataframe)

    def decoding(self, as_dataframe: bool = True) -> Union[List, pd.DataFrame]:
        """
        Decoding recovers the labeling behind dictator Long Codes, and the
        soundness chain holds edge by edge on random folded tables.

        Args:
            as_dataframe: Return results as a pandas DataFrame if True

        Returns:
            Check records or DataFrame if as_dataframe=True
        """
        v = self._verifier
        K, d = self._shape()
        records = []
        for k in range(PIPELINE_INSTANCES):
            instance, labeling = random_label_cover(K, d, v.rng)
            longcodes = dictator_assignment(instance, labeling)
            value = expected_decoded_value(instance, longcodes)
            records.append(v.close(f"decoded-value[{k}]", value, 1.0))
            decoded = sample_labeling(instance, longcodes, v.rng)
            records.append(v.exact(f"decoded-labeling[{k}]", decoded == labeling, True))

            for label, tables in (
                ("dictators", longcodes),
                ("random", self._random_tables(instance)),
            ):
                for i, e in enumerate(instance.edges):
                    g = reordered_table(instance, e, tables[e.v])
                    for eps in DECODING_EPS:
                        report = decoding_soundness_report(
                            tables[e.u], g, instance.blocks, eps
                        )
                        tag = f"[{k}][{label}][edge={i}][eps={eps}]"
                        records += [v.record(c.tagged(tag)) for c in report.checks]
        return v.output(records, as_dataframe)

    def run(self) -> List:
        return self.reduction(as_dataframe=False) + self.decoding(as_dataframe=False)
