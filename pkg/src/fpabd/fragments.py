"""Polynomial machinery for the chained inner-positive fragments.

Events here are conjunctions or disjunctions of variables.  A set of such
events is chained positive when every group of events linked by shared
variables is totally ordered by classical entailment.  Over such sets a
theory can be translated to plain Łukasiewicz logic (one fresh variable per
event plus entailment edges), and sufficient-solution existence for the
short cover-free clause fragment reduces to Horn abduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .formulas import (
    NEGATED_OP,
    PIL,
    PIT,
    AbductionProblem,
    Delta,
    Formula,
    Impl,
    Inner,
    LCmp,
    LVar,
    Neg,
    Odot,
    Pr,
    PrCmp,
    Var,
    atoms,
    events_of,
    inner_vars,
    positive_entails,
    positive_shape,
    render,
)
from .semantics import ProbModel, eval_fp, measure_of

ONE = Fraction(1)
ZERO = Fraction(0)


class FragmentError(ValueError):
    """Input lies outside the fragment an operation requires."""


# ---------------------------------------------------------------- events


@lru_cache(maxsize=None)
def event_shape(e: Inner) -> tuple[str, frozenset]:
    shape = positive_shape(e)
    if shape is None:
        raise FragmentError(f"event {render(e)} is not a conjunction or disjunction of variables")
    return shape


@lru_cache(maxsize=None)
def event_entails(a: Inner, b: Inner) -> bool:
    """Classical entailment between conjunctions/disjunctions of variables."""
    return positive_entails(event_shape(a), event_shape(b))


def _components(events: Sequence[Inner]) -> list[list[Inner]]:
    """Groups of events connected through shared variables."""
    parent = list(range(len(events)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, e in enumerate(events):
        for v in sorted(inner_vars(e)):
            if v in owner:
                parent[find(i)] = find(owner[v])
            else:
                owner[v] = i
    groups: dict[int, list] = {}
    for i, e in enumerate(events):
        groups.setdefault(find(i), []).append(e)
    return list(groups.values())


def is_chained_positive(events: Iterable[Inner]) -> bool:
    """Every event is positive and each variable-linked group is an entailment chain."""
    evs = list(dict.fromkeys(events))
    if any(positive_shape(e) is None for e in evs):
        return False
    for comp in _components(evs):
        for i, a in enumerate(comp):
            for b in comp[i + 1 :]:
                if not (event_entails(a, b) or event_entails(b, a)):
                    return False
    return True


def chains(events: Iterable[Inner]) -> list[list[list[Inner]]]:
    """Chains of a CP event set, strongest first; equivalent events share a slot."""
    evs = list(dict.fromkeys(events))
    if not is_chained_positive(evs):
        raise FragmentError("events are not chained positive")
    out = []
    for comp in _components(evs):
        slots: list[list[Inner]] = []
        for e in comp:
            for s in slots:
                if event_entails(e, s[0]) and event_entails(s[0], e):
                    s.append(e)
                    break
            else:
                slots.append([e])
        # list.sort hides the list's contents from the key, so rank a copy
        ranked = list(slots)
        slots.sort(key=lambda s: sum(1 for t in ranked if event_entails(t[0], s[0])))
        out.append(slots)
    return out


# ---------------------------------------------------------------- Łukasiewicz translations


def lift_luk_formula(phi: Formula) -> Formula:
    """Replace every Łukasiewicz variable p by Pr(p), keeping connectives."""
    if isinstance(phi, LVar):
        return Pr(Var(phi.name))
    if isinstance(phi, LCmp):
        return PrCmp(Var(phi.name), phi.op, phi.bound)
    if isinstance(phi, (Pr, PrCmp)):
        raise FragmentError("formula already contains probabilistic atoms")
    if isinstance(phi, (Neg, Delta)):
        return type(phi)(lift_luk_formula(phi.arg))
    return type(phi)(lift_luk_formula(phi.left), lift_luk_formula(phi.right))


def _fresh_name(e: Inner, taken: set) -> str:
    shape = positive_shape(e)
    if shape is not None:
        kind, names = shape
        # variable names may contain '-', so '__' cannot occur inside a name part
        base = "p_" + ("" if kind == "var" else kind + "__") + "__".join(sorted(names))
    else:
        base = "p_e"
    name, k = base, 1
    while name in taken:
        k += 1
        name = f"{base}_{k}"
    return name


def outer_counterpart(alpha: Formula, atom_map: dict | None = None) -> tuple[Formula, dict]:
    """Replace Pr(φ) by a fresh variable p_φ, one per distinct event.

    ``atom_map`` (event -> name) is extended in place when given.
    """
    amap = {} if atom_map is None else atom_map

    def name(e):
        if e not in amap:
            amap[e] = _fresh_name(e, set(amap.values()))
        return amap[e]

    def go(f):
        if isinstance(f, Pr):
            return LVar(name(f.event))
        if isinstance(f, PrCmp):
            return LCmp(name(f.event), f.op, f.bound)
        if isinstance(f, (LVar, LCmp)):
            raise FragmentError("formula already contains Łukasiewicz variables")
        if isinstance(f, (Neg, Delta)):
            return type(f)(go(f.arg))
        return type(f)(go(f.left), go(f.right))

    return go(alpha), amap


@dataclass(frozen=True)
class LukTheory:
    formulas: tuple
    atom_map: Mapping  # event -> variable name
    edges: tuple = ()  # (stronger event, weaker event) pairs

    def event_of(self, name: str) -> Inner:
        for e, n in self.atom_map.items():
            if n == name:
                return e
        raise KeyError(name)


def entailment_edges(events: Sequence[Inner]) -> list[tuple[Inner, Inner]]:
    evs = list(dict.fromkeys(events))
    return [(a, b) for a in evs for b in evs if a != b and event_entails(a, b)]


def build_psi_gamma(gamma: Iterable[Formula], extra_events: Iterable[Inner] = ()) -> LukTheory:
    """α↑ for every α in Γ plus p_φ → p_χ for every entailment φ ⊨ χ between events."""
    gamma = list(gamma)
    events = list(dict.fromkeys(events_of(gamma) + list(extra_events)))
    if not is_chained_positive(events):
        raise FragmentError("theory is not chained inner-positive")
    amap: dict = {}
    for e in events:
        outer_counterpart(Pr(e), amap)
    out = [outer_counterpart(g, amap)[0] for g in gamma]
    edges = entailment_edges(events)
    out += [Impl(LVar(amap[a]), LVar(amap[b])) for a, b in edges]
    return LukTheory(tuple(out), dict(amap), tuple(edges))


# ---------------------------------------------------------------- monotone assignments


@dataclass(frozen=True)
class MonotoneAssignment:
    values: tuple  # ((event, value), ...)

    @staticmethod
    def of(values: Mapping[Inner, Fraction]) -> "MonotoneAssignment":
        return MonotoneAssignment(tuple((e, Fraction(v)) for e, v in values.items()))

    def as_dict(self) -> dict:
        return dict(self.values)


def _world_for_suffix(slots: list[list[Inner]], j: int) -> frozenset:
    """Variables true in a world satisfying exactly the slots j, j+1, ... of a chain."""
    if j >= len(slots):
        return frozenset()
    kind, names = event_shape(slots[j][0])
    if kind in ("var", "conj"):
        return names
    if j == 0:
        return frozenset([min(names)])
    pk, pnames = event_shape(slots[j - 1][0])
    if pk == "disj":
        return frozenset([min(names - pnames)])
    if pk == "conj":
        return frozenset([min(names)])
    return frozenset([min(names - pnames)])  # stronger slot is a single variable


def build_monotone_model(f: MonotoneAssignment | Mapping[Inner, Fraction], varset: Sequence[str] | None = None) -> ProbModel:
    """A measure with μ(‖π‖) = f(π) on a chained positive domain.

    Values are sorted into rank classes v1 < v2 < ...; the class step
    v_i − v_{i−1} goes to a world satisfying exactly the events with value at
    least v_i, and the rest of the mass goes to the all-false world.
    """
    vals = f.as_dict() if isinstance(f, MonotoneAssignment) else {e: Fraction(v) for e, v in f.items()}
    for e, v in vals.items():
        if not 0 <= v <= 1:
            raise ValueError(f"value of {render(e)} outside [0,1]")
    events = list(vals)
    if not is_chained_positive(events):
        raise FragmentError("domain is not chained positive")
    for a, b in entailment_edges(events):
        if vals[a] > vals[b]:
            raise ValueError(f"assignment is not monotone: {render(a)} entails {render(b)} but has a larger value")
    if varset is None:
        names: set[str] = set()
        for e in events:
            names |= inner_vars(e)
        varset = sorted(names)
    chain_list = chains(events)
    levels = sorted({v for v in vals.values() if v > 0})
    weights: dict[frozenset, Fraction] = {}
    prev = ZERO
    for t in levels:
        world: frozenset = frozenset()
        for slots in chain_list:
            j = next((i for i, s in enumerate(slots) if vals[s[0]] >= t), len(slots))
            world |= _world_for_suffix(slots, j)
        weights[world] = weights.get(world, ZERO) + (t - prev)
        prev = t
    if prev < 1:
        weights[frozenset()] = weights.get(frozenset(), ZERO) + (1 - prev)
    model = ProbModel.from_sets(varset, weights)
    for e, v in vals.items():
        if measure_of(model, e) != v:
            raise AssertionError(f"monotone model misses {render(e)}")
    return model


# ---------------------------------------------------------------- fast PIL logic


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    lo_closed: bool
    hi: Fraction
    hi_closed: bool

    @property
    def empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    @property
    def full(self) -> bool:
        return self.lo == 0 and self.lo_closed and self.hi == 1 and self.hi_closed

    def meet(self, other: "Interval") -> "Interval":
        if (self.lo, not self.lo_closed) >= (other.lo, not other.lo_closed):
            lo, lc = self.lo, self.lo_closed
        else:
            lo, lc = other.lo, other.lo_closed
        if (self.hi, self.hi_closed) <= (other.hi, other.hi_closed):
            hi, hc = self.hi, self.hi_closed
        else:
            hi, hc = other.hi, other.hi_closed
        return Interval(lo, lc, hi, hc)

    def subset(self, other: "Interval") -> bool:
        if self.empty:
            return True
        return self.meet(other) == self

    def contains(self, x: Fraction) -> bool:
        above = x > self.lo or (x == self.lo and self.lo_closed)
        below = x < self.hi or (x == self.hi and self.hi_closed)
        return above and below


FULL = Interval(ZERO, True, ONE, True)


@lru_cache(maxsize=None)
def permitted(op: str, c: Fraction) -> Interval:
    """Values x in [0,1] with x op c."""
    if op == ">=":
        return Interval(c, True, ONE, True)
    if op == ">":
        return Interval(c, False, ONE, True)
    if op == "<=":
        return Interval(ZERO, True, c, True)
    return Interval(ZERO, True, c, False)


def flip(lam: PIL) -> PIL:
    """The complement ¬λ as a PIL."""
    return PIL(lam.event, NEGATED_OP[lam.op], lam.bound)


@lru_cache(maxsize=None)
def pil_validity_fast(lam: PIL) -> str:
    """'valid', 'unsat' or 'contingent', without any LP."""
    event_shape(lam.event)
    iv = permitted(lam.op, lam.bound)
    if iv.empty:
        return "unsat"
    if iv.full:
        return "valid"
    # a positive event is neither a tautology nor a contradiction
    return "contingent"


@lru_cache(maxsize=None)
def pil_entailment_fast(l1: PIL, l2: PIL) -> bool:
    a, b = pil_validity_fast(l1), pil_validity_fast(l2)
    if a == "unsat" or b == "valid":
        return True
    if b == "unsat" or a == "valid":
        return False
    v1, v2 = permitted(l1.op, l1.bound), permitted(l2.op, l2.bound)
    fwd = event_entails(l1.event, l2.event)
    back = event_entails(l2.event, l1.event)
    if fwd and back:
        return v1.subset(v2)
    if fwd:
        return l1.is_lower and l2.is_lower and v1.subset(v2)
    if back:
        return not l1.is_lower and not l2.is_lower and v1.subset(v2)
    return False


def pil_incompatible_fast(l1: PIL, l2: PIL) -> bool:
    """λ1, λ2 ⊨ ⊥, i.e. λ1 ⊨ ¬λ2."""
    return pil_entailment_fast(l1, flip(l2))


def pil_cover_fast(l1: PIL, l2: PIL) -> bool:
    """FP ⊨ λ1 ⊕ λ2, i.e. ¬λ1 ⊨ λ2."""
    return pil_entailment_fast(flip(l1), l2)


# ---------------------------------------------------------------- PSC recognition


def _psc_problem_check(P: AbductionProblem, eta: PIT) -> None:
    from .formulas import classify

    if not classify(P).is_PSC_AP:
        raise FragmentError("not a PSC abduction problem")
    if not is_chained_positive(list(P.events()) + eta.events()):
        raise FragmentError("PIT events break the chained positive condition")


def psc_recognize(P: AbductionProblem, eta: PIT, stats: dict | None = None) -> bool:
    """Sufficient-solution check through the Łukasiewicz translation.

    One LP for consistency of Γ↑, η↑ and one for Γ↑, η↑, (¬Δδ)↑; ``stats``
    receives the LP and split counts of both calls.
    """
    from .abduce import hypothesis_check
    from .decide import luk_sat

    _psc_problem_check(P, eta)
    stats = {} if stats is None else stats
    stats.update(lp_calls=0, splits=0, reason="")
    bad = hypothesis_check(P, eta)
    if bad:
        stats["reason"] = bad
        return False
    pils = [lam.to_formula() for lam in eta.literals]
    events = list(P.events()) + eta.events()
    psi = build_psi_gamma(list(P.theory) + pils, events)
    amap = dict(psi.atom_map)
    base = list(psi.formulas)
    neg_obs = outer_counterpart(Neg(Delta(P.observation)), amap)[0]
    first = luk_sat(base)
    stats["lp_calls"] += first.stats.lp_calls
    stats["splits"] += first.stats.splits
    if not first.sat:
        stats["reason"] = "theory and PIT are inconsistent"
        return False
    second = luk_sat(base + [neg_obs])
    stats["lp_calls"] += second.stats.lp_calls
    stats["splits"] += second.stats.splits
    if second.sat:
        stats["reason"] = "observation not entailed"
        return False
    return True


def psc_minimal_recognize(P: AbductionProblem, eta: PIT) -> bool:
    from .abduce import next_weakenings

    if not psc_recognize(P, eta):
        return False
    for cand in next_weakenings(eta, P.hypotheses, P.granularity):
        if is_chained_positive(list(P.events()) + cand.events()) and psc_recognize(P, cand):
            return False
    return True


# ---------------------------------------------------------------- SPCF and Horn abduction


@dataclass(frozen=True)
class Clause:
    kind: str  # unit, negunit, implication, bigneg
    body: tuple  # variable names

    def render(self) -> str:
        if self.kind == "unit":
            return self.body[0]
        if self.kind == "negunit":
            return f"~{self.body[0]}"
        if self.kind == "implication":
            return f"{self.body[0]} -> {self.body[1]}"
        return " & ".join(self.body) + " -> F"


@dataclass
class IhsbProblem:
    clauses: tuple
    observation: str
    hypotheses: tuple
    back_map: dict = field(default_factory=dict)  # variable -> PIL

    def var_of(self, lam: PIL) -> str:
        for k, v in self.back_map.items():
            if v == lam:
                return k
        raise KeyError(lam)


def _pil_of(f: Formula) -> PIL | None:
    return PIL(f.event, f.op, f.bound) if isinstance(f, PrCmp) else None


def spcf_clause_shape(g: Formula) -> tuple[str, list[PIL]] | None:
    """("unit" | "binary" | "empty-head", PILs) for the accepted clause shapes.

    Accepted: λ; (neg λ) and (neg (odot λ1 ... λn)) for empty heads;
    (impl λ λ′) for binary clauses.
    """
    if isinstance(g, PrCmp):
        return "unit", [_pil_of(g)]
    if isinstance(g, Impl):
        a, b = _pil_of(g.left), _pil_of(g.right)
        if a is not None and b is not None:
            return "binary", [a, b]
        return None
    if isinstance(g, Neg):
        body, stack = [], [g.arg]
        while stack:
            h = stack.pop()
            if isinstance(h, Odot):
                stack += [h.right, h.left]
            elif isinstance(h, PrCmp):
                body.append(_pil_of(h))
            else:
                return None
        return "empty-head", body
    return None


def is_spcf_theory(gamma: Sequence[Formula]) -> bool:
    gamma = list(gamma)
    if not is_chained_positive(events_of(gamma)):
        return False
    lams: list[PIL] = []
    for g in gamma:
        shape = spcf_clause_shape(g)
        if shape is None:
            return False
        lams += shape[1]
    lams = list(dict.fromkeys(lams))
    # pairs include λ with itself
    for i, a in enumerate(lams):
        for b in lams[i:]:
            if pil_cover_fast(a, b):
                return False
    return True


def _require_spcf(P: AbductionProblem) -> None:
    from .formulas import classify

    if not classify(P).is_SPCF_AP:
        raise FragmentError("not an SPCF abduction problem")


def hypothesis_pils(P: AbductionProblem) -> list[PIL]:
    out = []
    for op in (">=", ">", "<=", "<"):
        for h in P.hypotheses:
            for c in P.values:
                if op == ">" and c == 1:
                    continue
                out.append(PIL(h, op, c))
    return out


def spcf_to_ihsb(P: AbductionProblem) -> IhsbProblem:
    _require_spcf(P)
    universe: list[PIL] = []
    for g in list(P.theory) + [P.observation]:
        universe += [PIL(a.event, a.op, a.bound) for a in atoms(g)]
    hyps = hypothesis_pils(P)
    universe = list(dict.fromkeys(universe + hyps))
    names = {lam: f"r{i}" for i, lam in enumerate(universe)}
    clauses: list[Clause] = []
    for g in P.theory:
        kind, lams = spcf_clause_shape(g)
        rs = tuple(names[l] for l in lams)
        if kind == "unit":
            clauses.append(Clause("unit", rs))
        elif kind == "binary":
            clauses.append(Clause("implication", rs))
        elif len(rs) == 1:
            clauses.append(Clause("negunit", rs))
        else:
            clauses.append(Clause("bigneg", rs))
    for i, a in enumerate(universe):
        va = pil_validity_fast(a)
        if va == "unsat":
            clauses.append(Clause("negunit", (names[a],)))
        elif va == "valid":
            clauses.append(Clause("unit", (names[a],)))
        for b in universe[i + 1 :]:
            if pil_incompatible_fast(a, b):
                clauses.append(Clause("bigneg", (names[a], names[b])))
    for a in universe:
        for b in universe:
            if a != b and pil_entailment_fast(a, b):
                clauses.append(Clause("implication", (names[a], names[b])))
    obs = _pil_of(P.observation)
    return IhsbProblem(
        tuple(dict.fromkeys(clauses)),
        names[obs],
        tuple(names[l] for l in hyps),
        {v: k for k, v in names.items()},
    )


def _horn_index(clauses: Sequence[Clause]) -> tuple[set, dict, list]:
    units = {c.body[0] for c in clauses if c.kind == "unit"}
    succ: dict[str, list[str]] = {}
    for c in clauses:
        if c.kind == "implication":
            succ.setdefault(c.body[0], []).append(c.body[1])
    negs = [c.body for c in clauses if c.kind in ("negunit", "bigneg")]
    return units, succ, negs


def horn_closure(clauses: Sequence[Clause], assumed: Iterable[str], index=None) -> tuple[set, bool]:
    """Least model of the definite part plus ``assumed``; flag is False on a violated negative clause."""
    units, succ, negs = index or _horn_index(clauses)
    true = set(assumed) | units
    todo = list(true)
    while todo:
        x = todo.pop()
        for y in succ.get(x, ()):
            if y not in true:
                true.add(y)
                todo.append(y)
    for body in negs:
        if all(x in true for x in body):
            return true, False
    return true, True


def ihsb_abduce(PH: IhsbProblem) -> frozenset | None:
    """First hypothesis h with Γ_H ∪ {h} consistent and entailing the observation."""
    index = _horn_index(PH.clauses)
    for h in PH.hypotheses:
        closure, ok = horn_closure(PH.clauses, [h], index)
        if ok and PH.observation in closure:
            return frozenset([h])
    return None


def spcf_exists_sufficient(P: AbductionProblem) -> PIT | None:
    PH = spcf_to_ihsb(P)
    sol = ihsb_abduce(PH)
    if sol is None:
        return None
    return PIT(tuple(PH.back_map[v] for v in sorted(sol)))


def _choose_chain(slots: list, ivs: list[Interval]) -> list[Fraction] | None:
    """Nondecreasing values along a chain (strongest first) inside the intervals."""
    lows = []
    lo, strict = ZERO, False
    for iv in ivs:
        if (iv.lo, not iv.lo_closed) > (lo, strict):
            lo, strict = iv.lo, not iv.lo_closed
        cand = Interval(lo, not strict, iv.hi, iv.hi_closed)
        if cand.empty:
            return None
        lows.append(cand)
    out: list[Fraction] = [ZERO] * len(ivs)
    cap, cap_closed = ONE, True
    for i in range(len(ivs) - 1, -1, -1):
        iv = lows[i].meet(Interval(ZERO, True, cap, cap_closed))
        if iv.empty:
            return None
        x = iv.lo if iv.lo_closed else (iv.lo + iv.hi) / 2
        out[i] = x
        cap, cap_closed = x, True
    return out


def ihsb_witness_to_model(v: Mapping[str, bool] | Iterable[str], P: AbductionProblem, PH: IhsbProblem | None = None) -> ProbModel:
    """An FP model of Γ and of every PIL whose variable ``v`` makes true."""
    PH = PH or spcf_to_ihsb(P)
    true = {k for k, b in v.items() if b} if isinstance(v, Mapping) else set(v)
    theory_lams = set()
    for g in P.theory:
        theory_lams |= {PIL(a.event, a.op, a.bound) for a in atoms(g)}
    events = list(dict.fromkeys(P.events()))

    def intervals(with_false: bool) -> dict:
        out = {e: FULL for e in events}
        for name, lam in PH.back_map.items():
            if name in true:
                out[lam.event] = out[lam.event].meet(permitted(lam.op, lam.bound))
            elif with_false and lam in theory_lams:
                f = flip(lam)
                out[lam.event] = out[lam.event].meet(permitted(f.op, f.bound))
        return out

    values = None
    for with_false in (True, False):
        ivs = intervals(with_false)
        values = {}
        for slots in chains(events):
            slot_ivs = []
            for s in slots:
                iv = FULL
                for e in s:
                    iv = iv.meet(ivs[e])
                slot_ivs.append(iv)
            picked = _choose_chain(slots, slot_ivs)
            if picked is None:
                values = None
                break
            for s, x in zip(slots, picked):
                for e in s:
                    values[e] = x
        if values is not None:
            model = build_monotone_model(values, P.variables)
            if _witness_ok(model, P, PH, true):
                return model
    raise FragmentError("witness construction failed: no monotone model realizes the valuation")


def _witness_ok(model: ProbModel, P: AbductionProblem, PH: IhsbProblem, true: set) -> bool:
    if any(eval_fp(model, g) != 1 for g in P.theory):
        return False
    return all(eval_fp(model, PH.back_map[x].to_formula()) == 1 for x in true if x in PH.back_map)
