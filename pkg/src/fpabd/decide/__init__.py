"""Decision procedures for FP and Łukasiewicz formulas over exact LPs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..formulas import Delta, Formula, Neg
from ..limits import ResourceLimit
from ..semantics import ProbModel
from . import fourier_motzkin, simplex
from .compile import DecisionResult, Stats, fp_sat, luk_sat
from .linear import LinConstraint, LinSystem, LPResult

__all__ = [
    "DecisionResult",
    "Entailment",
    "LinConstraint",
    "LinSystem",
    "LPResult",
    "ResourceLimit",
    "Stats",
    "fp_entails",
    "fp_sat",
    "lp_feasible",
    "luk_entails",
    "luk_sat",
]


def lp_feasible(system: LinSystem, engine: str = "simplex") -> LPResult:
    if engine == "simplex":
        res = simplex.feasible(system)
    elif engine == "fourier_motzkin":
        res = fourier_motzkin.feasible(system)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if res.feasible and not system.check(res.point):
        raise AssertionError(f"{engine} returned a point violating the system")
    return res


@dataclass
class Entailment:
    holds: bool
    countermodel: ProbModel | None = None
    consistent: bool | None = None
    witness: ProbModel | None = None  # a model of the premises, when checked

    def __bool__(self) -> bool:
        return self.holds


def fp_entails(
    gamma: Iterable[Formula],
    delta: Formula,
    mode: str = "plain",
    varset: Sequence[str] | None = None,
) -> Entailment:
    """Γ ⊨ δ via unsatisfiability of Γ ∪ {¬Δδ}; ``consistent`` also needs Γ satisfiable."""
    if mode not in ("plain", "consistent"):
        raise ValueError(f"unknown mode {mode!r}")
    gamma = list(gamma)
    if varset is not None:
        varset = list(varset)
    counter = fp_sat(gamma + [Neg(Delta(delta))], varset)
    if counter.sat:
        return Entailment(False, counter.witness)
    if mode == "plain":
        return Entailment(True)
    base = fp_sat(gamma, varset)
    return Entailment(base.sat, None, base.sat, base.witness)


def luk_entails(phi: Iterable[Formula], chi: Formula) -> bool:
    return not luk_sat(list(phi) + [Neg(Delta(chi))]).sat
