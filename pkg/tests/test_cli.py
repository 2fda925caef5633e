import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stdout
from unittest.mock import patch

import numpy as np

from z3hardness.cli import main, parse_chain
from z3hardness.config import OUTPUT_DIR_ENV
from z3hardness.csp import Predicate, uniform_instance
from z3hardness.exceptions import ValidationError
from z3hardness.formats import (
    instance_from_json,
    instance_to_json,
    labelcover_to_json,
    read_json,
    tables_to_json,
    write_json,
)
from z3hardness.longcode import dictator_assignment, random_label_cover


def run_cli(*argv):
    """Run main and return (exit code, parsed stdout)."""
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(list(argv))
    text = out.getvalue()
    return code, json.loads(text) if text.strip() else None


@patch.dict(os.environ, clear=True)
class TestVerifyCommand(unittest.TestCase):
    """Tests for the verify command."""

    def setUp(self):
        """Set up test environment."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_gadgets_pass(self):
        """Test that the gadget suite exits 0 without wall time."""
        code, report = run_cli("verify", "--suite", "gadgets")
        self.assertEqual(code, 0)
        self.assertTrue(report["pass"])
        self.assertNotIn("wall_time", report)

    def test_deterministic_output(self):
        """Test that a fixed seed prints the same report twice."""
        argv = ("verify", "--suite", "csp", "--K", "1", "--trials", "1", "--seed", "4")
        self.assertEqual(run_cli(*argv), run_cli(*argv))

    def test_report_file_and_timing(self):
        """Test that --out writes the report and --timing adds wall time."""
        code, report = run_cli(
            "verify", "--suite", "gadgets", "--out", self.tmp.name, "--timing"
        )
        self.assertEqual(code, 0)
        self.assertIn("wall_time", report)
        saved = read_json(os.path.join(self.tmp.name, "gadgets-report.json"))
        self.assertEqual(saved["checks"], report["checks"])

    def test_report_dir_from_env(self):
        """Test that the report directory can come from the environment."""
        with patch.dict(os.environ, {OUTPUT_DIR_ENV: self.tmp.name}):
            code, _ = run_cli("verify", "--suite", "gadgets")
        self.assertEqual(code, 0)
        report = os.path.join(self.tmp.name, "gadgets-report.json")
        self.assertTrue(os.path.exists(report))

    def test_invalid_parameters(self):
        """Test that K = 0 is a usage error."""
        code, _ = run_cli("verify", "--suite", "tests", "--K", "0")
        self.assertEqual(code, 2)

    def test_capacity_exit(self):
        """Test exit code 3 when the triple sums would be too large."""
        code, report = run_cli("verify", "--suite", "appendix", "--K", "3", "--d", "2")
        self.assertEqual(code, 3)
        self.assertIsNone(report)

    @patch("z3hardness.cli.Verifier.run", side_effect=RuntimeError("boom"))
    def test_internal_error_exit(self, _run):
        """Test that an unexpected exception maps to exit code 5."""
        with self.assertLogs("z3hardness.cli", level="ERROR"):
            code, _ = run_cli("verify", "--suite", "gadgets")
        self.assertEqual(code, 5)

    def test_unknown_suite(self):
        """Test that argparse refuses unknown suites."""
        with self.assertRaises(SystemExit) as ctx:
            run_cli("verify", "--suite", "everything")
        self.assertEqual(ctx.exception.code, 2)


@patch.dict(os.environ, clear=True)
class TestReduceCommand(unittest.TestCase):
    """Tests for the reduce command."""

    def setUp(self):
        """Set up test environment."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.rng = np.random.default_rng(31)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write_4nat(self):
        instance = uniform_instance([(Predicate.four_nat(), ("a", "b", "c", "d"))])
        return str(write_json(instance_to_json(instance), self.path("4nat.json")))

    def write_labelcover(self, K, d):
        instance, labeling = random_label_cover(K, d, self.rng, n_left=1, n_right=1)
        write_json(labelcover_to_json(instance), self.path("lc.json"))
        return instance, labeling

    def test_gadget_chain(self):
        """Test 4NAT to 2-NLin to Label Cover with fresh auxiliaries per step."""
        source = self.write_4nat()
        out = self.path("target.json")
        code, summary = run_cli(
            "reduce",
            "--in",
            source,
            "--chain",
            "4nat-2nlin,2nlin-labelcover",
            "--out",
            out,
        )
        self.assertEqual(code, 0)
        self.assertEqual(summary["source"]["optimum"], "1")
        self.assertEqual(summary["target"]["optimum"], "1")
        self.assertEqual(summary["target"]["kinds"], ["dto1"])
        target = instance_from_json(read_json(out))
        self.assertIn("aux0_0", target.variables)
        self.assertIn("aux1_0", target.variables)

    def test_longcode_chain_thresholds(self):
        """Test (1, 1/2) -> (1, 2/3) -> (1, 11/12) along longcode-4nat, 4nat-2nlin."""
        self.write_labelcover(1, 2)
        code, summary = run_cli(
            "reduce",
            "--in",
            self.path("lc.json"),
            "--chain",
            "longcode-4nat,4nat-2nlin",
            "--out",
            self.path("out.json"),
            "--c",
            "1",
            "--s",
            "1/2",
        )
        self.assertEqual(code, 0)
        soundness = [t["s"] for t in summary["thresholds"]]
        self.assertEqual(soundness, ["1/2", "2/3", "11/12"])
        self.assertEqual(summary["source"]["optimum"], "1")
        self.assertEqual(summary["target"]["kinds"], ["2nlin"])

    def test_default_output_from_env(self):
        """Test that the reduced instance defaults to the output directory."""
        source = self.write_4nat()
        with patch.dict(os.environ, {OUTPUT_DIR_ENV: self.tmp.name}):
            code, summary = run_cli("reduce", "--in", source, "--chain", "4nat-2nlin")
        self.assertEqual(code, 0)
        self.assertEqual(summary["out"], self.path("reduced.json"))

    def test_missing_output(self):
        """Test that reduce needs --out or the environment variable."""
        code, _ = run_cli("reduce", "--in", self.write_4nat(), "--chain", "4nat-2nlin")
        self.assertEqual(code, 2)

    def test_capacity_exit(self):
        """Test exit code 3 when the Long Codes are too long."""
        self.write_labelcover(1, 7)
        code, _ = run_cli(
            "reduce",
            "--in",
            self.path("lc.json"),
            "--chain",
            "longcode-4nat",
            "--out",
            self.path("out.json"),
        )
        self.assertEqual(code, 3)

    def test_kind_mismatch_exit(self):
        """Test exit code 4 when a step does not accept its input."""
        source = self.write_4nat()
        for chain in ("2nlin-labelcover", "longcode-4nat"):
            code, _ = run_cli(
                "reduce", "--in", source, "--chain", chain, "--out", self.path("o.json")
            )
            self.assertEqual(code, 4)

    def test_parse_errors(self):
        """Test exit code 2 on malformed input and unknown steps."""
        bad = self.path("bad.json")
        with open(bad, "w", encoding="utf-8") as fh:
            fh.write("[1, 2")
        code, _ = run_cli("reduce", "--in", bad, "--chain", "4nat-2nlin", "--out", bad)
        self.assertEqual(code, 2)
        with self.assertRaises(ValidationError):
            parse_chain("4nat-2nlin,5nat")
        with self.assertRaises(ValidationError):
            parse_chain(" , ")


@patch.dict(os.environ, clear=True)
class TestDemoDecodeCommand(unittest.TestCase):
    """Tests for the demo-decode command."""

    def test_dictators(self):
        """Test that dictator Long Codes decode to their labeling."""
        with tempfile.TemporaryDirectory() as tmp:
            instance, labeling = random_label_cover(2, 2, np.random.default_rng(32))
            lc = write_json(labelcover_to_json(instance), os.path.join(tmp, "lc.json"))
            tables = write_json(
                tables_to_json(dictator_assignment(instance, labeling)),
                os.path.join(tmp, "tables.json"),
            )
            code, result = run_cli(
                "demo-decode",
                "--labelcover",
                str(lc),
                "--tables",
                str(tables),
                "--seed",
                "5",
            )
        self.assertEqual(code, 0)
        self.assertEqual(result["labeling"], labeling)
        self.assertEqual(result["labeling_value"], "1")
        self.assertAlmostEqual(result["expected_value"], 1.0)


if __name__ == "__main__":
    unittest.main()
