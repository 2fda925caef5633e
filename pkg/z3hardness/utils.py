from dataclasses import asdict, dataclass, is_dataclass, replace
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np
import pandas as pd

from .config import TOLERANCE
from .exceptions import ParseError, ValidationError


def validate_trits(digits: Iterable[int]) -> tuple:
    """
    Validate that every digit is a trit.

    Args:
        digits: Candidate digits

    Returns:
        The digits as a tuple of ints
    """
    out = tuple(int(v) for v in digits)
    for v in out:
        if v not in (0, 1, 2):
            raise ValidationError(f"Digit {v} is not in Z3")
    return out


def validate_probability_weights(weights: Sequence[Fraction]) -> None:
    """
    Check that weights are nonnegative and sum to exactly 1.

    Args:
        weights: Exact rational weights
    """
    for w in weights:
        if w < 0:
            raise ValidationError(f"Negative weight {w}")
    total = sum(weights, Fraction(0))
    if total != 1:
        raise ValidationError(f"Weights sum to {total}, expected 1")


def fraction_to_json(value: Fraction) -> Dict[str, int]:
    """Encode a rational as {"num": int, "den": int}."""
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator}


def fraction_from_json(obj: Any) -> Fraction:
    """
    Decode a rational from {"num", "den"}, an int, or a "p/q" string.

    Args:
        obj: Encoded rational

    Returns:
        The decoded Fraction
    """
    try:
        if isinstance(obj, dict):
            return Fraction(int(obj["num"]), int(obj["den"]))
        if isinstance(obj, (int, str)):
            return Fraction(obj)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as e:
        raise ParseError(f"Invalid rational {obj!r}: {e}")
    raise ParseError(f"Invalid rational {obj!r}")


def format_value(value: Any) -> Union[str, float, int, bool, None]:
    """
    Render a check value for a JSON report.

    Fractions become "p/q" strings so exact constants survive serialization;
    numpy scalars become plain Python numbers.
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j"
    return value


def records_to_df(records: Union[Dict[str, Any], List[Any]]) -> pd.DataFrame:
    """
    Convert check records (dataclasses or dicts) to a pandas DataFrame.

    Args:
        records: A single record or a list of records

    Returns:
        pandas DataFrame with one row per record
    """
    if isinstance(records, dict) or is_dataclass(records):
        records = [records]
    if isinstance(records, list):
        if not records:
            return pd.DataFrame()
        rows = [asdict(r) if is_dataclass(r) else dict(r) for r in records]
        return pd.DataFrame(rows)
    raise TypeError("Records must be a dataclass, a dictionary or a list of them")


@dataclass(frozen=True)
class Check:
    """
    One numerical or exact claim: ``lhs == rhs`` or ``lhs <= rhs``.

    Fractions compared with tolerance 0 are compared exactly.
    """

    name: str
    lhs: Any
    rhs: Any
    relation: str = "=="
    tolerance: float = TOLERANCE

    @property
    def residual(self) -> Any:
        if self.relation == "==":
            return abs(self.lhs - self.rhs)
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        if self.relation not in ("==", "<="):
            raise ValidationError(f"Unknown relation {self.relation!r}")
        return bool(self.residual <= self.tolerance)

    def tagged(self, suffix: str) -> "Check":
        return replace(self, name=f"{self.name}{suffix}")
