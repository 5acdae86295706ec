"""Goal-directed compilation of outer and Łukasiewicz formulas into LPs.

A goal is either a symbolic row ``sum(k * val(f)) + c >= 0`` (or ``> 0``)
over subformula values, or a crisp goal fixing a 0/1-valued subformula.
Rows are rewritten until only atoms remain, using

    max(0, u) = odot,  min(1, u) = oplus and impl,   1 - a = neg,

so that a row which is monotone in the rewritten term becomes a conjunction
and the other polarity becomes a two-way disjunction.  Crisp subformulas
(comparison atoms and delta) split on their truth value.  The search is a
DFS over disjunctions with exact LP pruning at every split.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ..formulas import (
    Delta,
    Formula,
    Impl,
    LCmp,
    LVar,
    Neg,
    Odot,
    Oplus,
    Pr,
    PrCmp,
    events_of,
    formula_vars,
)
from ..limits import check_budget, check_vars
from ..semantics import ProbModel, eval_fp, eval_luk, truth_vector
from . import simplex
from .linear import LinConstraint, LinSystem

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Row:
    terms: tuple  # ((formula, coeff), ...), coeff != 0
    const: Fraction
    strict: bool


@dataclass(frozen=True)
class Crisp:
    formula: Formula
    truth: bool


@dataclass(frozen=True)
class Alts:
    """A disjunction that was already expanded once; expands back to itself."""

    alts: tuple


def make_row(terms: dict, const, strict: bool) -> Row:
    return Row(tuple((f, k) for f, k in terms.items() if k != 0), Fraction(const), strict)


def value_row(f: Formula) -> Row:
    """The goal val(f) = 1."""
    return make_row({f: ONE}, -1, False)


def _is_atom(f: Formula) -> bool:
    return isinstance(f, (Pr, LVar))


def _crisp(f: Formula) -> bool:
    return isinstance(f, (PrCmp, LCmp, Delta))


def _static(row: Row) -> bool | None:
    """Decide a row from the fact that all values lie in [0, 1]."""
    lo = row.const + sum((k for _, k in row.terms if k < 0), ZERO)
    hi = row.const + sum((k for _, k in row.terms if k > 0), ZERO)
    if row.strict:
        if hi <= 0:
            return False
        if lo > 0:
            return True
    else:
        if hi < 0:
            return False
        if lo >= 0:
            return True
    return None


def _cmp_row(atom: Formula, op: str, c: Fraction) -> Row:
    if op == ">=":
        return make_row({atom: ONE}, -c, False)
    if op == ">":
        return make_row({atom: ONE}, -c, True)
    if op == "<=":
        return make_row({atom: -ONE}, c, False)
    return make_row({atom: -ONE}, c, True)


_NEG_OP = {">=": "<", ">": "<=", "<=": ">", "<": ">="}


def expand(goal) -> tuple:
    """One rewriting step.

    Returns ("true",), ("false",), ("atomic", row), ("and", goals) or
    ("or", [goals, goals]).
    """
    if isinstance(goal, Alts):
        return ("or", [list(a) for a in goal.alts])
    if isinstance(goal, Crisp):
        f = goal.formula
        if isinstance(f, PrCmp):
            op = f.op if goal.truth else _NEG_OP[f.op]
            return ("and", [_cmp_row(Pr(f.event), op, f.bound)])
        if isinstance(f, LCmp):
            op = f.op if goal.truth else _NEG_OP[f.op]
            return ("and", [_cmp_row(LVar(f.name), op, f.bound)])
        # delta
        if goal.truth:
            return ("and", [make_row({f.arg: ONE}, -1, False)])
        return ("and", [make_row({f.arg: -ONE}, 1, True)])

    row = goal
    s = _static(row)
    if s is not None:
        return ("true",) if s else ("false",)
    pick = next((i for i, (f, _) in enumerate(row.terms) if not _is_atom(f)), None)
    if pick is None:
        return ("atomic", row)
    f, k = row.terms[pick]
    rest = {g: c for i, (g, c) in enumerate(row.terms) if i != pick}

    def with_terms(extra: list, dconst) -> Row:
        d = dict(rest)
        for g, c in extra:
            d[g] = d.get(g, ZERO) + c
        return make_row(d, row.const + dconst, row.strict)

    if isinstance(f, Neg):
        return ("and", [with_terms([(f.arg, -k)], k)])
    if _crisp(f):
        return _disjunction([[Crisp(f, True), with_terms([], k)], [Crisp(f, False), with_terms([], 0)]])
    if isinstance(f, Odot):
        # max(0, a + b - 1)
        cap = with_terms([], 0)
        lin = with_terms([(f.left, k), (f.right, k)], -k)
        kind = "and" if k < 0 else "or"
    elif isinstance(f, Oplus):
        # min(1, a + b)
        cap = with_terms([], k)
        lin = with_terms([(f.left, k), (f.right, k)], 0)
        kind = "and" if k > 0 else "or"
    elif isinstance(f, Impl):
        # min(1, 1 - a + b)
        cap = with_terms([], k)
        lin = with_terms([(f.left, -k), (f.right, k)], k)
        kind = "and" if k > 0 else "or"
    else:
        raise TypeError(f"unexpected node {type(f).__name__}")
    if kind == "and":
        return ("and", [cap, lin])
    return _disjunction([[cap], [lin]])


def _disjunction(alts: list) -> tuple:
    live = [a for a in alts if not any(isinstance(g, Row) and _static(g) is False for g in a)]
    if not live:
        return ("false",)
    if len(live) == 1:
        return ("and", live[0])
    return ("or", live)


@dataclass
class Stats:
    lp_calls: int = 0
    splits: int = 0
    leaves: int = 0


class Encoder:
    """Maps atoms to linear expressions over the LP variables."""

    base: list
    nonneg: set

    def atom(self, f: Formula) -> dict:
        raise NotImplementedError

    def row(self, r: Row) -> LinConstraint:
        d: dict = {}
        for f, k in r.terms:
            for v, a in self.atom(f).items():
                d[v] = d.get(v, ZERO) + k * a
        return LinConstraint.make(d, r.const, ">" if r.strict else ">=")


class ProfileEncoder(Encoder):
    """World masses quotiented by event profile: one variable per realizable profile."""

    def __init__(self, varset: Sequence[str], events: Sequence):
        check_vars(len(varset))
        self.varset = tuple(varset)
        self.events = list(events)
        nworlds = 1 << len(self.varset)
        if self.events:
            table = np.stack([truth_vector(e, self.varset) for e in self.events])
            cols, first = np.unique(table.T, axis=0, return_index=True)
        else:
            cols = np.zeros((1, 0), dtype=bool)
            first = np.array([0])
        order = np.argsort(first, kind="stable")
        self.profiles = cols[order]
        self.reps = [int(w) for w in first[order]]
        self.keys = [("m", i) for i in range(len(self.reps))]
        self.event_index = {e: i for i, e in enumerate(self.events)}
        self.nonneg = set(self.keys)
        self.base = [LinConstraint.make({k: ONE for k in self.keys}, -1, "=")]
        self._cache: dict = {}
        assert nworlds >= len(self.reps)

    def atom(self, f: Formula) -> dict:
        if not isinstance(f, Pr):
            raise TypeError("only Pr atoms are allowed in FP formulas")
        e = f.event
        if e not in self._cache:
            i = self.event_index[e]
            self._cache[e] = {self.keys[j]: ONE for j in range(len(self.keys)) if self.profiles[j][i]}
        return self._cache[e]

    def model(self, point: dict) -> ProbModel:
        weights = {}
        for k, w in zip(self.keys, self.reps):
            m = point.get(k, ZERO)
            if m:
                weights[w] = m
        return ProbModel.from_weights(self.varset, weights)


class ValuationEncoder(Encoder):
    def __init__(self, names: Sequence[str]):
        self.names = list(names)
        self.nonneg = {("x", n) for n in self.names}
        self.base = [LinConstraint.make({("x", n): -ONE}, 1, ">=") for n in self.names]

    def atom(self, f: Formula) -> dict:
        if not isinstance(f, LVar):
            raise TypeError("only variables are allowed in Łukasiewicz formulas")
        return {("x", f.name): ONE}

    def valuation(self, point: dict) -> dict:
        return {n: point.get(("x", n), ZERO) for n in self.names}


class Search:
    def __init__(self, encoder: Encoder, lp: Callable[[LinSystem], object] = simplex.feasible):
        self.enc = encoder
        self.lp = lp
        self.stats = Stats()
        self._cache: dict = {}

    def check(self, rows: list) -> dict | None:
        key = frozenset(rows)
        if key in self._cache:
            return self._cache[key]
        self.stats.lp_calls += 1
        res = self.lp(LinSystem(list(self.enc.base) + list(rows), set(self.enc.nonneg)))
        point = res.point if res.feasible else None
        self._cache[key] = point
        return point

    def run(self, goals: Sequence) -> tuple[dict, list] | None:
        """A feasible point and the leaf rows, or None."""
        return next(self._dfs([], list(goals)), None)

    def leaves(self, goals: Sequence):
        """All feasible leaves as (point, rows), in deterministic DFS order."""
        return self._dfs([], list(goals))

    def _dfs(self, rows: list, goals: list):
        check_budget()
        rows = list(rows)
        seen = set(rows)
        pending = []
        stack = list(reversed(goals))
        while stack:
            g = stack.pop()
            out = expand(g)
            tag = out[0]
            if tag == "true":
                continue
            if tag == "false":
                return
            if tag == "atomic":
                c = self.enc.row(out[1])
                t = c.trivial()
                if t is False:
                    return
                if t is None and c not in seen:
                    seen.add(c)
                    rows.append(c)
            elif tag == "and":
                stack.extend(reversed(out[1]))
            else:
                pending.append(out[1])
        point = self.check(rows)
        if point is None:
            return
        if not pending:
            self.stats.leaves += 1
            yield point, rows
            return
        self.stats.splits += 1
        first, others = pending[0], pending[1:]
        tail = [Alts(tuple(tuple(x) for x in a)) for a in others]
        for alt in first:
            yield from self._dfs(rows, list(alt) + tail)


def minimize_support(search: Search, rows: list, point: dict) -> dict:
    """Greedily zero world-class masses while the leaf stays feasible."""
    enc = search.enc
    rows = list(rows)
    for k in getattr(enc, "keys", []):
        if point.get(k, ZERO) == 0:
            continue
        trial = rows + [LinConstraint.make({k: -ONE}, 0, ">=")]
        p = search.check(trial)
        if p is not None:
            rows, point = trial, p
    return point


# ---------------------------------------------------------------- front ends


@dataclass
class DecisionResult:
    sat: bool
    witness: object = None
    stats: Stats = field(default_factory=Stats)

    @property
    def verdict(self) -> str:
        return "SAT" if self.sat else "UNSAT"


def ordered_vars(formulas: Iterable[Formula], varset: Sequence[str] | None) -> tuple:
    used = formula_vars(list(formulas))
    if varset is None:
        return tuple(sorted(used))
    missing = used - set(varset)
    if missing:
        raise ValueError(f"variables {sorted(missing)} missing from the variable list")
    return tuple(varset)


def fp_sat(
    gamma: Iterable[Formula],
    varset: Sequence[str] | None = None,
    minimize: bool = False,
    support_limit: bool = False,
) -> DecisionResult:
    gamma = list(gamma)
    for g in gamma:
        if any(isinstance(a, (LVar, LCmp)) for a in _atoms(g)):
            raise TypeError("fp_sat expects outer formulas")
    vs = ordered_vars(gamma, varset)
    enc = ProfileEncoder(vs, events_of(gamma))
    search = Search(enc)
    res = search.run([value_row(g) for g in gamma])
    if res is None:
        return DecisionResult(False, None, search.stats)
    point, rows = res
    if minimize or support_limit:
        point = minimize_support(search, rows, point)
    model = enc.model(point)
    for g in gamma:
        if eval_fp(model, g) != 1:
            raise AssertionError("decision witness does not satisfy the theory")
    return DecisionResult(True, model, search.stats)


def luk_sat(phi: Iterable[Formula]) -> DecisionResult:
    phi = list(phi)
    for f in phi:
        if any(isinstance(a, (Pr, PrCmp)) for a in _atoms(f)):
            raise TypeError("luk_sat expects Łukasiewicz formulas")
    names = sorted(formula_vars(phi))
    enc = ValuationEncoder(names)
    search = Search(enc)
    res = search.run([value_row(f) for f in phi])
    if res is None:
        return DecisionResult(False, None, search.stats)
    v = enc.valuation(res[0])
    for f in phi:
        if eval_luk(v, f) != 1:
            raise AssertionError("decision witness does not satisfy the theory")
    return DecisionResult(True, v, search.stats)


def _atoms(f):
    from ..formulas import atoms

    return atoms(f)
