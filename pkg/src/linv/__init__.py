"""Computation of p-adic L-invariants of Artin motives from explicit
finite data: group, representation, and p-adically embedded unit module.
"""

from .errors import (
    LinvError,
    PrecisionError,
    AmbiguousRankError,
    SingularRefinementError,
    OMinusSingularError,
    FixtureError,
)
from .padic import (
    LocalField,
    FieldElement,
    make_field,
    valuation,
    teichmuller,
    iwasawa_log,
    trace_to_base,
    norm_to_base,
    frobenius,
    embed,
)
from .linalg import PMatrix
from .galois import FiniteGroup, Representation
from .fixtures import GaloisProblem, load_fixture, validate_arithmetic
from .engine import Pipeline, Refinement, LInvariantReport, l_invariant

__version__ = "0.1.0"
