"""
Command-line entry point.

    z3hardness verify --suite gadgets
    z3hardness verify --suite tests --K 2 --d 2 --trials 200 --seed 7
    z3hardness reduce --in lc.json --chain longcode-4nat,4nat-2nlin --out 2nlin.json
    z3hardness demo-decode --labelcover lc.json --tables tables.json --seed 3

Reports go to stdout as JSON; logs go to stderr.  Exit codes: 0 pass,
1 suite failure, 2 parse or usage error, 3 capacity exceeded, 4 contract mismatch,
5 internal error.
"""

import argparse
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .config import (
    DEFAULT_D,
    DEFAULT_K,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EXIT_CAPACITY,
    EXIT_CONTRACT,
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_SUITE_FAILURE,
    EXIT_USAGE,
    LOG_LEVEL_ENV,
    MAX_ASSIGNMENTS,
    OUTPUT_DIR_ENV,
    SUITES,
    TOLERANCE,
)
from .csp import CspInstance, exact_optimum
from .exceptions import (
    CapacityError,
    FoldingError,
    KindMismatchError,
    ParseError,
    ShapeError,
    ValidationError,
)
from .formats import (
    dumps,
    instance_from_json,
    instance_to_json,
    labelcover_from_json,
    read_json,
    tables_from_json,
    write_json,
)
from .gadgets import (
    GADGETS,
    DecisionThresholds,
    apply_gadget_to_instance,
    compose_thresholds,
)
from .longcode import (
    LabelCoverInstance,
    build_4nat_instance,
    expected_decoded_value,
    labeling_value,
    sample_labeling,
)
from .utils import fraction_from_json
from .verifier import Verifier

logger = logging.getLogger(__name__)

LONGCODE_STEP = "longcode-4nat"

CHAIN_STEPS = (LONGCODE_STEP,) + tuple(GADGETS)

# Soundness of the Long Code step before the eps slack
LONGCODE_SOUNDNESS = Fraction(2, 3)

Stage = Union[CspInstance, LabelCoverInstance]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="z3hardness",
        description=(
            "Verify gadget constants, dictatorship tests "
            "and Long Code reductions over Z3."
        ),
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="count",
        default=0,
        help="Log INFO (-v) or DEBUG (-vv) to stderr",
    )
    parser.add_argument("--pretty", action="store_true", help="Indent the JSON output")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="Run a verification suite")
    verify.add_argument("--suite", choices=SUITES + ("all",), default="all")
    verify.add_argument("--K", type=int, default=DEFAULT_K, help="Left label count")
    verify.add_argument("--d", type=int, default=DEFAULT_D, help="Projection degree")
    verify.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--tolerance", type=float, default=TOLERANCE)
    verify.add_argument(
        "--out",
        default=None,
        help=f"Report directory (default: ${OUTPUT_DIR_ENV}, else stdout only)",
    )
    verify.add_argument(
        "--timing", action="store_true", help="Add wall time to the report"
    )
    verify.set_defaults(handler=cmd_verify)

    reduce = commands.add_parser(
        "reduce", help="Apply a chain of reductions to an instance"
    )
    reduce.add_argument(
        "--in", dest="input", required=True, help="CSP or Label Cover JSON"
    )
    reduce.add_argument(
        "--chain",
        required=True,
        help=f"Comma-separated steps from {', '.join(CHAIN_STEPS)}",
    )
    reduce.add_argument(
        "--out",
        default=None,
        help=f"Reduced instance path (default: ${OUTPUT_DIR_ENV}/reduced.json)",
    )
    reduce.add_argument("--c", default=None, help="Source completeness, e.g. 1")
    reduce.add_argument("--s", default=None, help="Source soundness, e.g. 2/3")
    reduce.set_defaults(handler=cmd_reduce)

    decode = commands.add_parser(
        "demo-decode", help="Decode Long Code tables into a labeling"
    )
    decode.add_argument("--labelcover", required=True, help="Label Cover JSON")
    decode.add_argument("--tables", required=True, help="Folded tables JSON")
    decode.add_argument("--seed", type=int, default=DEFAULT_SEED)
    decode.set_defaults(handler=cmd_demo_decode)
    return parser


def configure_logging(verbose: int) -> None:
    """Log to stderr at a level from ``-v`` flags or the environment."""
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        name = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
        level = getattr(logging, name, logging.WARNING)
    logging.basicConfig(
        level=level,
        format="[%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _emit(obj: Any, pretty: bool) -> None:
    sys.stdout.write(dumps(obj, pretty) + "\n")


def cmd_verify(args: argparse.Namespace) -> int:
    """Run a suite and print its report; exit 1 when any record fails."""
    verifier = Verifier(
        seed=args.seed,
        tolerance=args.tolerance,
        K=args.K,
        d=args.d,
        trials=args.trials,
        output_dir=args.out,
    )
    start = time.perf_counter()
    report = verifier.run(args.suite)
    if args.timing:
        report.wall_time = time.perf_counter() - start
    document = report.to_json()
    _emit(document, args.pretty)
    if verifier.output_dir:
        path = Path(verifier.output_dir) / f"{args.suite}-report.json"
        write_json(document, path, args.pretty)
    for record in report.failures():
        logger.warning(
            "failed: %s (observed %s, expected %s)",
            record.id,
            record.observed,
            record.expected,
        )
    return EXIT_OK if report.passed else EXIT_SUITE_FAILURE


def load_stage(path: str) -> Stage:
    """A Label Cover instance if the document has edges, else a CSP instance."""
    document = read_json(path)
    if isinstance(document, dict) and "edges" in document:
        return labelcover_from_json(document)
    return instance_from_json(document)


def parse_chain(chain: str) -> List[str]:
    steps = [s.strip() for s in chain.split(",") if s.strip()]
    if not steps:
        raise ValidationError("Empty reduction chain")
    for step in steps:
        if step not in CHAIN_STEPS:
            raise ValidationError(
                f"Unknown chain step {step!r}; choose from {CHAIN_STEPS}"
            )
    return steps


def apply_step(stage: Stage, step: str, position: int) -> CspInstance:
    """
    Apply one chain step.

    Raises:
        KindMismatchError: if the step does not accept the current stage
    """
    if step == LONGCODE_STEP:
        if not isinstance(stage, LabelCoverInstance):
            raise KindMismatchError(f"{LONGCODE_STEP} needs a Label Cover instance")
        return build_4nat_instance(stage)
    if isinstance(stage, LabelCoverInstance):
        raise KindMismatchError(
            f"{step} needs a CSP instance; start the chain with {LONGCODE_STEP}"
        )
    return apply_gadget_to_instance(stage, GADGETS[step], prefix=f"aux{position}_")


def step_thresholds(t: DecisionThresholds, step: str) -> DecisionThresholds:
    """The (c, s) a step guarantees for its output."""
    if step == LONGCODE_STEP:
        return DecisionThresholds(t.c, LONGCODE_SOUNDNESS)
    return compose_thresholds(t, GADGETS[step].gamma)


def describe(stage: Stage) -> Dict[str, Any]:
    """Kinds, size and (within the brute-force cap) the exact optimum."""
    instance = stage.to_csp() if isinstance(stage, LabelCoverInstance) else stage
    out: Dict[str, Any] = {
        "kinds": [k.value for k in instance.kinds],
        "variables": len(instance.variables),
        "constraints": len(instance.constraints),
        "optimum": None,
    }
    if instance.assignment_count() <= MAX_ASSIGNMENTS:
        optimum, _ = exact_optimum(instance)
        out["optimum"] = str(optimum)
    else:
        logger.info("optimum skipped: %d assignments", instance.assignment_count())
    return out


def _output_path(out: Optional[str]) -> Path:
    if out:
        return Path(out)
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if not directory:
        raise ValidationError(f"Pass --out or set {OUTPUT_DIR_ENV}")
    return Path(directory) / "reduced.json"


def cmd_reduce(args: argparse.Namespace) -> int:
    """Reduce an instance along a chain, write it, and report optima and thresholds."""
    steps = parse_chain(args.chain)
    path = _output_path(args.out)
    thresholds = None
    if (args.c is None) != (args.s is None):
        raise ValidationError("--c and --s must be given together")
    if args.c is not None:
        start = DecisionThresholds(
            fraction_from_json(args.c), fraction_from_json(args.s)
        )
        thresholds = [start]

    source = load_stage(args.input)
    stage: Stage = source
    for position, step in enumerate(steps):
        stage = apply_step(stage, step, position)
        if thresholds is not None:
            thresholds.append(step_thresholds(thresholds[-1], step))
    write_json(instance_to_json(stage), path)

    summary: Dict[str, Any] = {
        "chain": steps,
        "out": str(path),
        "source": describe(source),
        "target": describe(stage),
    }
    if thresholds is not None:
        summary["thresholds"] = [t.to_json() for t in thresholds]
    _emit(summary, args.pretty)
    return EXIT_OK


def cmd_demo_decode(args: argparse.Namespace) -> int:
    """Print the exact expected decoded value and one seeded decoded labeling."""
    instance = labelcover_from_json(read_json(args.labelcover))
    tables = tables_from_json(read_json(args.tables))
    expected = expected_decoded_value(instance, tables)
    labeling = sample_labeling(instance, tables, np.random.default_rng(args.seed))
    _emit(
        {
            "seed": args.seed,
            "expected_value": expected,
            "labeling": labeling,
            "labeling_value": str(labeling_value(instance, labeling)),
        },
        args.pretty,
    )
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI.

    Args:
        argv: Arguments without the program name (sys.argv[1:] if omitted)

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except CapacityError as e:
        logger.error("capacity exceeded: %s", e)
        return EXIT_CAPACITY
    except (KindMismatchError, ShapeError, FoldingError) as e:
        logger.error("contract mismatch: %s", e)
        return EXIT_CONTRACT
    except (ParseError, ValidationError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
