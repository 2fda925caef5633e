"""
JSON codecs for function tables, spectra, CSP instances and Label Cover instances.
"""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, TypeVar, Union

from .csp import Constraint, CspInstance, Predicate
from .exceptions import FoldingError, ParseError, ShapeError, ValidationError
from .fourier import FourierSpectrum
from .longcode import LabelCoverEdge, LabelCoverInstance, LongCodeAssignment
from .ternary import FunctionTable
from .utils import fraction_from_json, fraction_to_json

logger = logging.getLogger(__name__)

T = TypeVar("T")

PathLike = Union[str, Path]


def _decoding(kind: str, decode: Callable[[Any], T], obj: Any) -> T:
    try:
        return decode(obj)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ParseError(f"Malformed {kind}: {e!r}")
    except (ValidationError, ShapeError, FoldingError) as e:
        raise ParseError(f"Invalid {kind}: {e}")


def table_to_json(table: FunctionTable) -> Dict[str, Any]:
    return table.to_json()


def table_from_json(obj: Any) -> FunctionTable:
    """Decode ``{"n", "values", "folded"}``; a stated fold is verified."""

    def decode(o):
        folded = o.get("folded")
        return FunctionTable(int(o["n"]), list(o["values"]), folded=folded or None)

    return _decoding("function table", decode, obj)


def spectrum_to_json(spec: FourierSpectrum) -> Dict[str, Any]:
    return {
        "n": spec.n,
        "folded": spec.source_is_folded,
        "coefficients": [list(t) for t in spec.to_json()],
    }


def instance_to_json(instance: CspInstance) -> Dict[str, Any]:
    """
    Encode a CSP instance.

    Variables whose domain is not Z3 are listed under ``"domains"``.
    """
    out: Dict[str, Any] = {"domain": 3, "vars": list(instance.variables)}
    other = {v: n for v, n in instance.domains.items() if n != 3}
    if other:
        out["domains"] = other
    out["constraints"] = [
        {
            "kind": c.predicate.kind.value,
            "params": list(c.predicate.params),
            "vars": list(c.variables),
            "weight": fraction_to_json(c.weight),
        }
        for c in instance.constraints
    ]
    return out


def instance_from_json(obj: Any) -> CspInstance:
    def decode(o):
        if int(o.get("domain", 3)) != 3:
            raise ParseError(f"Unsupported default domain {o['domain']}")
        constraints = tuple(
            Constraint(
                Predicate(c["kind"], tuple(c.get("params", ()))),
                tuple(c["vars"]),
                fraction_from_json(c["weight"]),
            )
            for c in o["constraints"]
        )
        domains = {str(v): int(n) for v, n in o.get("domains", {}).items()}
        return CspInstance(tuple(o["vars"]), constraints, domains)

    return _decoding("CSP instance", decode, obj)


def labelcover_to_json(instance: LabelCoverInstance) -> Dict[str, Any]:
    return {
        "K": instance.K,
        "d": instance.d,
        "U": list(instance.U),
        "V": list(instance.V),
        "edges": [
            {
                "u": e.u,
                "v": e.v,
                "weight": fraction_to_json(e.weight),
                "pi": e.preimages(instance.K),
            }
            for e in instance.edges
        ],
    }


def labelcover_from_json(obj: Any) -> LabelCoverInstance:
    """Decode a Label Cover instance; ``pi`` lists the preimages of each left label."""

    def decode(o):
        K, d = int(o["K"]), int(o["d"])
        edges = []
        for e in o["edges"]:
            pi = [-1] * (K * d)
            for k, group in enumerate(e["pi"]):
                for j in group:
                    if not 0 <= int(j) < K * d or pi[int(j)] != -1:
                        raise ValidationError(
                            f"pi lists right label {j} out of range or twice"
                        )
                    pi[int(j)] = k
            if len(e["pi"]) != K or -1 in pi:
                raise ValidationError(f"pi on edge ({e['u']}, {e['v']}) is not total")
            edges.append(
                LabelCoverEdge(
                    str(e["u"]), str(e["v"]), fraction_from_json(e["weight"]), tuple(pi)
                )
            )
        return LabelCoverInstance(K, d, tuple(o["U"]), tuple(o["V"]), tuple(edges))

    return _decoding("Label Cover instance", decode, obj)


def tables_to_json(tables: LongCodeAssignment) -> Dict[str, Any]:
    return {"tables": {name: t.to_json() for name, t in tables.tables.items()}}


def tables_from_json(obj: Any) -> LongCodeAssignment:
    def decode(o):
        return LongCodeAssignment(
            {str(name): table_from_json(t) for name, t in o["tables"].items()}
        )

    return _decoding("Long Code tables", decode, obj)


def read_json(path: PathLike) -> Any:
    """Load a JSON document, raising ParseError on unreadable or invalid files."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"Cannot read {path}: {e}")


def dumps(obj: Any, pretty: bool = False) -> str:
    """Deterministic JSON text: sorted keys, fixed separators."""
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=True)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_json(obj: Any, path: PathLike, pretty: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj, pretty) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path
