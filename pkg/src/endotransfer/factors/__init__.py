"""Symbolic algebra of transfer factors with a numerical cross-check."""

from .atoms import (Atom, Context, ContextError, ExpressionError, FactorExpression, ONE, atom,
                    parse_expression)
from .definitions import FACTOR_NAMES, define_factor, parse
from .rules import (RULE_NAMES, PairingRewrite, Proof, normalize, normalize_with_trace,
                    pairing_rewrite, prove_equal)
from .sampler import Instantiation, instantiate_batch, instantiate_random
from .theorems import (CONTEXTS, Fixture, FixtureResult, IdentityFailure, SuiteReport, check_fixture,
                       load_fixtures, theorem_suite)

__all__ = [
    "Atom", "CONTEXTS", "Context", "ContextError", "ExpressionError", "FACTOR_NAMES", "FactorExpression",
    "Fixture", "FixtureResult", "IdentityFailure", "Instantiation", "ONE", "PairingRewrite", "Proof",
    "RULE_NAMES", "SuiteReport", "atom", "check_fixture", "define_factor", "instantiate_batch",
    "instantiate_random", "load_fixtures", "normalize", "normalize_with_trace", "pairing_rewrite", "parse",
    "parse_expression", "prove_equal", "theorem_suite",
]
