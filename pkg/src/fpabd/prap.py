"""Classical probabilistic abduction (PrAP) and its translation into FP.

A solution is a term τ over the hypotheses with φ ∧ τ ⊨ χ classically and
some measure coherent with the assignment giving φ ∧ τ positive mass.  Two
routes are provided: a direct one (truth tables and an LP over world
masses) and one through FP (Ξ_p plus ``decide``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .decide import fp_entails, fp_sat, lp_feasible
from .decide.linear import LinConstraint, LinSystem
from .formulas import (
    And,
    Delta,
    Formula,
    Impl,
    Inner,
    Neg,
    Not,
    Pr,
    PrAP,
    Var,
    and_all,
    approx,
    inner_vars,
    term_literals,
)
from .limits import check_budget
from .semantics import ProbModel, conditional_probability, cpl_entails, truth_vector

__all__ = [
    "Coherence",
    "candidate_terms",
    "coherent_witness",
    "conditional_probability",
    "is_coherent",
    "is_distribution",
    "prap_exists",
    "prap_preferred",
    "prap_preferred_all",
    "prap_preferred_fp",
    "prap_recognize",
    "prap_recognize_fp",
    "prap_solutions",
    "to_fp_counterpart",
]

ONE = Fraction(1)


@dataclass
class Coherence:
    coherent: bool
    witness: ProbModel | None = None

    def __bool__(self) -> bool:
        return self.coherent


def _mass_rows(assignment: Sequence[tuple[Inner, Fraction]], varset: Sequence[str]) -> list[LinConstraint]:
    worlds = 1 << len(varset)
    rows = [LinConstraint.make({("m", w): ONE for w in range(worlds)}, -1, "=")]
    for e, c in assignment:
        tv = truth_vector(e, varset)
        rows.append(LinConstraint.make({("m", int(w)): ONE for w in np.flatnonzero(tv)}, -Fraction(c), "="))
    return rows


def _event_row(e: Inner, varset: Sequence[str], sign: int = 1) -> dict:
    return {("m", int(w)): Fraction(sign) for w in np.flatnonzero(truth_vector(e, varset))}


def _solve(rows: list, varset: Sequence[str]) -> ProbModel | None:
    check_budget()
    worlds = 1 << len(varset)
    res = lp_feasible(LinSystem(rows, {("m", w) for w in range(worlds)}))
    if not res.feasible:
        return None
    weights = {w: Fraction(res.point.get(("m", w), 0)) for w in range(worlds)}
    return ProbModel.from_weights(varset, weights)


def is_coherent(assignment: Sequence[tuple[Inner, Fraction]] | Mapping, varset: Sequence[str] | None = None) -> Coherence:
    """Whether some measure gives every assigned event exactly its value."""
    items = list(assignment.items()) if isinstance(assignment, Mapping) else list(assignment)
    if varset is None:
        names: set[str] = set()
        for e, _ in items:
            names |= inner_vars(e)
        varset = sorted(names)
    model = _solve(_mass_rows(items, varset), varset)
    return Coherence(model is not None, model)


def to_fp_counterpart(assignment: Sequence[tuple[Inner, Fraction]] | Mapping) -> list[Formula]:
    """Ξ_p: Pr(e) ≈ p(e) for each assigned event."""
    items = list(assignment.items()) if isinstance(assignment, Mapping) else list(assignment)
    return [approx(e, Fraction(c)) for e, c in items]


def is_distribution(P: PrAP) -> bool:
    """Assigned events are distinct full terms over Var[P] with values summing to 1."""
    vs = set(P.varset)
    seen = set()
    for e, _ in P.assignment:
        lits = term_literals(e)
        if lits is None or len(lits) != len(vs) or {v for v, _ in lits} != vs:
            return False
        key = frozenset(lits)
        if key in seen:
            return False
        seen.add(key)
    return sum((c for _, c in P.assignment), Fraction(0)) == 1


def _literal_ok(P: PrAP, tau: Inner) -> bool:
    lits = term_literals(tau)
    if lits is None:
        return False
    hyps = set()
    for h in P.hypotheses:
        hl = term_literals(h)
        if hl is None or len(hl) != 1:
            return False
        hyps.add(hl[0])
    return all(l in hyps for l in lits)


def _check_term(P: PrAP, tau: Inner) -> None:
    if not _literal_ok(P, tau):
        raise ValueError("term uses literals outside the hypotheses")


def prap_recognize(P: PrAP, tau: Inner, route: str = "auto") -> bool:
    """Direct check: φ ∧ τ ⊨ χ and a coherent measure with μ(φ ∧ τ) > 0.

    ``route`` is "auto" (distribution fast path when it applies), "lp" or
    "distribution".
    """
    _check_term(P, tau)
    vs = P.varset
    body = And((P.phi, tau))
    if not cpl_entails(body, P.observation, vs):
        return False
    fast = route == "distribution" or (route == "auto" and is_distribution(P))
    if fast:
        if not is_distribution(P):
            raise ValueError("assignment is not a full-term distribution")
        return any(c > 0 and cpl_entails(e, body, vs) for e, c in P.assignment)
    rows = _mass_rows(P.assignment, vs)
    rows.append(LinConstraint.make(_event_row(body, vs), 0, ">"))
    return _solve(rows, vs) is not None


def prap_recognize_fp(P: PrAP, tau: Inner) -> bool:
    """Recognition through FP: Ξ_p, ¬Δ¬Pr(φ∧τ) satisfiable and ⊨ Pr(φ∧τ) → Pr(χ)."""
    _check_term(P, tau)
    vs = list(P.varset)
    body = And((P.phi, tau))
    xi = to_fp_counterpart(P.assignment)
    if not fp_sat(xi + [Neg(Delta(Neg(Pr(body))))], vs).sat:
        return False
    return fp_entails([], Impl(Pr(body), Pr(P.observation)), varset=vs).holds


def candidate_terms(P: PrAP) -> Iterator[Inner]:
    """Terms over H by size, then in hypothesis order; no repeated or clashing literals."""
    lits = []
    for h in P.hypotheses:
        for l in term_literals(h) or []:
            if l not in lits:
                lits.append(l)
    for k in range(1, len(lits) + 1):
        for combo in itertools.combinations(lits, k):
            names = [v for v, _ in combo]
            if len(set(names)) != len(names):
                continue
            # keep the hypothesis order rather than the declaration order
            yield and_all([Var(v) if pos else Not(Var(v)) for v, pos in combo])


def prap_solutions(P: PrAP) -> list[Inner]:
    out = []
    for tau in candidate_terms(P):
        check_budget()
        if prap_recognize(P, tau):
            out.append(tau)
    return out


def prap_exists(P: PrAP) -> Inner | None:
    for tau in candidate_terms(P):
        check_budget()
        if prap_recognize(P, tau):
            return tau
    return None


def _at_least_as_likely(P: PrAP, tau: Inner, sigma: Inner) -> bool:
    vs = P.varset
    rows = _mass_rows(P.assignment, vs)
    diff = _event_row(tau, vs)
    for k, v in _event_row(sigma, vs).items():
        diff[k] = diff.get(k, 0) - v
    rows.append(LinConstraint.make(diff, 0, ">="))
    return _solve(rows, vs) is not None


def prap_preferred(P: PrAP, tau: Inner, solutions: Sequence[Inner] | None = None) -> bool:
    """τ is a solution and, for every other solution σ, some coherent μ has μ(τ) ≥ μ(σ)."""
    if not prap_recognize(P, tau):
        return False
    sols = prap_solutions(P) if solutions is None else solutions
    key = frozenset(term_literals(tau))
    for sigma in sols:
        if frozenset(term_literals(sigma)) == key:
            continue
        if not _at_least_as_likely(P, tau, sigma):
            return False
    return True


def prap_preferred_all(P: PrAP) -> list[Inner]:
    """Every preferred solution; the preference relation need not single one out."""
    sols = prap_solutions(P)
    return [t for t in sols if prap_preferred(P, t, sols)]


def prap_preferred_fp(P: PrAP, tau: Inner, solutions: Sequence[Inner] | None = None) -> bool:
    """Preference through FP: Ξ_p, Pr(σ) → Pr(τ) satisfiable for every other solution σ."""
    if not prap_recognize_fp(P, tau):
        return False
    sols = prap_solutions(P) if solutions is None else solutions
    xi = to_fp_counterpart(P.assignment)
    key = frozenset(term_literals(tau))
    for sigma in sols:
        if frozenset(term_literals(sigma)) == key:
            continue
        if not fp_sat(xi + [Impl(Pr(sigma), Pr(tau))], list(P.varset)).sat:
            return False
    return True


def coherent_witness(P: PrAP, tau: Inner) -> ProbModel | None:
    """A coherent model with μ(φ ∧ τ) > 0, for the conditional characterization."""
    vs = P.varset
    rows = _mass_rows(P.assignment, vs)
    rows.append(LinConstraint.make(_event_row(And((P.phi, tau)), vs), 0, ">"))
    return _solve(rows, vs)
