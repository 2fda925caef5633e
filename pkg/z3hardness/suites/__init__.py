"""
Verification suites.

Each module holds one group of checks, reached through a property of
:class:`z3hardness.verifier.Verifier`.
"""

from .appendix import AppendixSuite
from .csp import CspSuite
from .fourier import FourierSuite
from .gadgets import GadgetSuite
from .pipeline import PipelineSuite
from .tests import DictatorshipSuite

__all__ = [
    "AppendixSuite",
    "CspSuite",
    "DictatorshipSuite",
    "FourierSuite",
    "GadgetSuite",
    "PipelineSuite",
]
