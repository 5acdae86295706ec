"""Abduction and satisfiability for a two-layer probability logic.

Events are classical formulas under Pr; the outer layer uses Łukasiewicz
connectives.  The package decides satisfiability and entailment exactly,
recognizes and searches for abductive solutions, runs the polynomial
fragment procedures and translates classical probabilistic abduction.
"""

from .abduce import (
    SolutionReport,
    exists_concise_full,
    exists_sufficient,
    recognize_cem,
    recognize_full,
    recognize_minimal,
    recognize_sufficient,
    solve_concise_full,
    solve_sufficient,
)
from .decide import fp_entails, fp_sat, luk_entails, luk_sat
from .formulas import PIL, PIT, AbductionProblem, PrAP, TheoryQuery, classify, parse_outer, parse_pit, parse_problem, render
from .limits import ResourceLimit, budget
from .semantics import ProbModel, entropy, eval_fp, measure_of

__version__ = "0.1.0"

__all__ = [
    "PIL",
    "PIT",
    "AbductionProblem",
    "PrAP",
    "ProbModel",
    "ResourceLimit",
    "SolutionReport",
    "TheoryQuery",
    "budget",
    "classify",
    "entropy",
    "eval_fp",
    "exists_concise_full",
    "exists_sufficient",
    "fp_entails",
    "fp_sat",
    "luk_entails",
    "luk_sat",
    "measure_of",
    "parse_outer",
    "parse_pit",
    "parse_problem",
    "recognize_cem",
    "recognize_full",
    "recognize_minimal",
    "recognize_sufficient",
    "render",
    "solve_concise_full",
    "solve_sufficient",
]
