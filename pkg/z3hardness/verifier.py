import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .config import (
    DEFAULT_D,
    DEFAULT_K,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    OUTPUT_DIR_ENV,
    SUITES,
    TOLERANCE,
)
from .exceptions import ValidationError
from .suites import (
    AppendixSuite,
    CspSuite,
    DictatorshipSuite,
    FourierSuite,
    GadgetSuite,
    PipelineSuite,
)
from .utils import Check, format_value, records_to_df

logger = logging.getLogger(__name__)


@dataclass
class CheckRecord:
    """One line of a suite report."""

    id: str
    relation: str
    expected: Any
    observed: Any
    tolerance: float
    passed: bool

    def to_json(self) -> Dict[str, Any]:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


@dataclass
class SuiteReport:
    """
    Records of one verification run.

    ``info`` carries quantities that are reported but not asserted.
    ``wall_time`` is only set when timing was requested.
    """

    suite: str
    seed: int
    params: Dict[str, Any]
    records: List[CheckRecord] = field(default_factory=list)
    info: Dict[str, Any] = field(default_factory=dict)
    wall_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dataframe(self) -> pd.DataFrame:
        return records_to_df(self.records)

    def to_json(self) -> Dict[str, Any]:
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "params": self.params,
            "pass": self.passed,
            "checks": len(self.records),
            "records": [r.to_json() for r in self.records],
            "info": self.info,
        }
        if self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return out


class Verifier:
    """
    Entry point for the verification suites.

    One seeded numpy generator feeds every random trial of a run, so a fixed
    seed reproduces the report exactly.
    """

    def __init__(
        self,
        seed: Optional[int] = None,
        tolerance: Optional[float] = None,
        K: Optional[int] = None,
        d: Optional[int] = None,
        trials: Optional[int] = None,
        output_dir: Optional[str] = None,
    ):
        """
        Initialize the verifier.

        Args:
            seed: Seed of the random stream (DEFAULT_SEED if omitted)
            tolerance: Tolerance for floating-point identities (TOLERANCE if omitted)
            K: Block count of the dictatorship tests
            d: Block width of the dictatorship tests
            trials: Random trials per property
            output_dir: Report directory. If not provided, the verifier looks for
                    an environment variable called Z3HARDNESS_OUTPUT_DIR.
        """
        self.seed = DEFAULT_SEED if seed is None else int(seed)
        self.tolerance = TOLERANCE if tolerance is None else float(tolerance)
        self.K = DEFAULT_K if K is None else int(K)
        self.d = DEFAULT_D if d is None else int(d)
        self.trials = DEFAULT_TRIALS if trials is None else int(trials)
        if self.K < 1 or self.d < 1:
            raise ValidationError(
                f"K and d must be positive, got K={self.K}, d={self.d}"
            )
        if self.trials < 0:
            raise ValidationError(f"trials must be nonnegative, got {self.trials}")
        if self.tolerance < 0:
            raise ValidationError(
                f"tolerance must be nonnegative, got {self.tolerance}"
            )
        self.output_dir = output_dir or os.environ.get(OUTPUT_DIR_ENV)
        self.rng = np.random.default_rng(self.seed)
        self.info: Dict[str, Any] = {}

    @property
    def params(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "d": self.d,
            "trials": self.trials,
            "tolerance": self.tolerance,
        }

    def record(self, check: Check, tolerance: Optional[float] = None) -> CheckRecord:
        """
        Turn a Check into a report record.

        Args:
            check: The claim
            tolerance: Overrides the check's tolerance (0 makes the comparison exact)

        Returns:
            The record, with values rendered for JSON
        """
        if tolerance is not None:
            check = Check(check.name, check.lhs, check.rhs, check.relation, tolerance)
        return CheckRecord(
            id=check.name,
            relation=check.relation,
            expected=format_value(check.rhs),
            observed=format_value(check.lhs),
            tolerance=check.tolerance,
            passed=check.holds,
        )

    def exact(self, name: str, observed: Any, expected: Any) -> CheckRecord:
        return self.record(Check(name, observed, expected, "==", 0.0))

    def at_most(self, name: str, observed: Any, bound: Any) -> CheckRecord:
        return self.record(Check(name, observed, bound, "<=", self.tolerance))

    def close(self, name: str, observed: Any, expected: Any) -> CheckRecord:
        return self.record(Check(name, observed, expected, "==", self.tolerance))

    def output(
        self, records: List[CheckRecord], as_dataframe: bool
    ) -> Union[List[CheckRecord], pd.DataFrame]:
        if as_dataframe:
            return records_to_df(records)
        return records

    def run(self, suite: str) -> SuiteReport:
        """
        Run one suite, or every suite in order for ``"all"``.

        Args:
            suite: One of SUITES or "all"

        Returns:
            SuiteReport with the records of the run
        """
        names = SUITES if suite == "all" else (suite,)
        for name in names:
            if name not in SUITES:
                raise ValidationError(
                    f"Unknown suite {name!r}; choose from {SUITES} or 'all'"
                )
        self.info = {}
        records: List[CheckRecord] = []
        for name in names:
            group = getattr(self, name)
            suite_records = group.run()
            if suite == "all":
                for r in suite_records:
                    r.id = f"{name}:{r.id}"
            logger.info(
                "suite %s: %d checks, %d failed",
                name,
                len(suite_records),
                sum(not r.passed for r in suite_records),
            )
            records.extend(suite_records)
        return SuiteReport(suite, self.seed, self.params, records, dict(self.info))

    @property
    def gadgets(self) -> GadgetSuite:
        """
        Get the gadget suite.

        Returns:
            The gadget suite
        """
        return GadgetSuite(self)

    @property
    def tests(self) -> DictatorshipSuite:
        """
        Get the dictatorship test suite.

        Returns:
            The dictatorship test suite
        """
        return DictatorshipSuite(self)

    @property
    def fourier(self) -> FourierSuite:
        return FourierSuite(self)

    @property
    def appendix(self) -> AppendixSuite:
        return AppendixSuite(self)

    @property
    def csp(self) -> CspSuite:
        return CspSuite(self)

    @property
    def pipeline(self) -> PipelineSuite:
        return PipelineSuite(self)
