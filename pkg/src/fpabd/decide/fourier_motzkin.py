"""Fourier–Motzkin elimination over exact rationals with strictness flags.

Used as the independent oracle for the simplex engine and as a projection
tool.  Equalities are eliminated by substitution first; redundant rows are
kept in check with Chernikov's history rule and dominance pruning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from ..limits import ResourceLimit, check_budget
from .linear import LinConstraint, LinSystem, LPResult

MAX_FM_VARS = 14
MAX_ROWS = 20000


@dataclass(frozen=True)
class Ineq:
    """sum(coeffs) + const >= 0, or > 0 when strict."""

    coeffs: tuple  # index-aligned with the variable list
    const: Fraction
    strict: bool
    history: frozenset

    def normalized(self) -> "Ineq":
        scale = max((abs(a) for a in self.coeffs), default=Fraction(0))
        if scale == 0 or scale == 1:
            return self
        return Ineq(tuple(a / scale for a in self.coeffs), self.const / scale, self.strict, self.history)


def _dominates(r: Ineq, d: Ineq) -> bool:
    """r is at least as tight as the parallel row d and has no larger history."""
    tighter = r.const < d.const or (r.const == d.const and (r.strict or not d.strict))
    return tighter and r.history <= d.history


def _dedup(rows: list[Ineq]) -> list[Ineq]:
    """Drop parallel rows dominated in tightness and history.

    Dropping a row only when its replacement's history is a subset keeps the
    Chernikov history test sound: every elementary combination stays
    represented by a present row at least as tight with no larger history.
    """
    groups: dict[tuple, list[Ineq]] = {}
    for r in rows:
        r = r.normalized()
        kept = groups.setdefault(r.coeffs, [])
        if any(_dominates(k, r) for k in kept):
            continue
        kept[:] = [k for k in kept if not _dominates(r, k)]
        kept.append(r)
    return [r for g in groups.values() for r in g]


def _combine(p: Ineq, n: Ineq, j: int) -> Ineq:
    a, b = p.coeffs[j], -n.coeffs[j]  # both positive
    coeffs = tuple(b * x + a * y for x, y in zip(p.coeffs, n.coeffs))
    return Ineq(coeffs, b * p.const + a * n.const, p.strict or n.strict, p.history | n.history)


class Projection:
    """Eliminate variables from a system of inequalities, keeping back-substitution data."""

    def __init__(self, nvars: int, rows: Iterable[Ineq], max_rows: int = MAX_ROWS):
        self.nvars = nvars
        self.rows = _dedup(list(rows))
        self.steps: list[tuple[int, list[Ineq]]] = []
        self.max_rows = max_rows
        self.eliminated = 0

    def eliminate(self, j: int) -> None:
        check_budget()
        pos = [r for r in self.rows if r.coeffs[j] > 0]
        neg = [r for r in self.rows if r.coeffs[j] < 0]
        zero = [r for r in self.rows if r.coeffs[j] == 0]
        self.steps.append((j, pos + neg))
        self.eliminated += 1
        limit = self.eliminated + 1
        new = []
        for p in pos:
            for n in neg:
                c = _combine(p, n, j)
                if len(c.history) > limit:
                    continue  # Chernikov: implied by rows with smaller history
                new.append(c)
        self.rows = _dedup(zero + new)
        if len(self.rows) > self.max_rows:
            raise ResourceLimit("Fourier–Motzkin row limit exceeded")

    def pick(self, remaining: Sequence[int]) -> int:
        def cost(j):
            p = sum(1 for r in self.rows if r.coeffs[j] > 0)
            n = sum(1 for r in self.rows if r.coeffs[j] < 0)
            return (p * n - p - n, j)

        return min(remaining, key=cost)

    def consistent(self) -> bool:
        """Whether the remaining rows (all eliminated vars gone) hold."""
        for r in self.rows:
            if any(r.coeffs[j] != 0 for j in self.remaining_vars()):
                continue
            if r.strict and r.const <= 0:
                return False
            if not r.strict and r.const < 0:
                return False
        return True

    def remaining_vars(self) -> list[int]:
        gone = {j for j, _ in self.steps}
        return [j for j in range(self.nvars) if j not in gone]

    def back_substitute(self, point: list[Fraction]) -> list[Fraction]:
        """Extend values of the surviving variables to all eliminated ones."""
        x = list(point)
        for j, rows in reversed(self.steps):
            lo, lo_strict, hi, hi_strict = None, False, None, False
            for r in rows:
                a = r.coeffs[j]
                rest = r.const + sum(c * x[k] for k, c in enumerate(r.coeffs) if k != j and c)
                bound = -rest / a
                if a > 0:  # x_j >= bound
                    if lo is None or bound > lo or (bound == lo and r.strict):
                        lo, lo_strict = bound, r.strict
                else:  # x_j <= bound
                    if hi is None or bound < hi or (bound == hi and r.strict):
                        hi, hi_strict = bound, r.strict
            x[j] = _choose(lo, lo_strict, hi, hi_strict)
        return x


def _choose(lo, lo_strict, hi, hi_strict) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1 if hi_strict else hi
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo_strict or hi_strict:
        return (lo + hi) / 2
    return lo


def _to_ineqs(system: LinSystem, variables: list) -> tuple[list[Ineq], list]:
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    rows = []
    eqs = []
    for k, c in enumerate(system.constraints):
        vec = [Fraction(0)] * n
        for v, a in c.coeffs:
            vec[index[v]] = a
        if c.rel == "=":
            eqs.append((vec, c.const))
        else:
            rows.append(Ineq(tuple(vec), c.const, c.strict, frozenset([k])))
    base = len(system.constraints)
    for v in variables:
        if v in system.nonneg:
            vec = [Fraction(0)] * n
            vec[index[v]] = Fraction(1)
            rows.append(Ineq(tuple(vec), Fraction(0), False, frozenset([base + index[v]])))
    return rows, eqs


def feasible(system: LinSystem, max_vars: int = MAX_FM_VARS) -> LPResult:
    """Decide feasibility; returns an exact point when feasible."""
    variables = system.variables()
    rows, eqs = _to_ineqs(system, variables)
    n = len(variables)

    # substitute equalities away: x_j = -(rest + const) / a
    subs: list[tuple[int, list[Fraction], Fraction]] = []
    for vec, const in eqs:
        vec, const = _apply_subs(vec, const, subs)
        j = next((k for k, a in enumerate(vec) if a != 0), None)
        if j is None:
            if const != 0:
                return LPResult(False)
            continue
        a = vec[j]
        expr = [-x / a for x in vec]
        expr[j] = Fraction(0)
        subs.append((j, expr, -const / a))
    rows = [_subst_row(r, subs) for r in rows]

    free = sorted({j for r in rows for j, a in enumerate(r.coeffs) if a != 0})
    if len(free) > max_vars:
        raise ResourceLimit(f"Fourier–Motzkin limited to {max_vars} variables, got {len(free)}")
    proj = Projection(n, rows)
    remaining = list(free)
    while remaining:
        j = proj.pick(remaining)
        proj.eliminate(j)
        remaining.remove(j)
        if not proj.consistent():
            return LPResult(False)
    if not proj.consistent():
        return LPResult(False)
    x = proj.back_substitute([Fraction(0)] * n)
    for j, expr, const in reversed(subs):
        x[j] = const + sum(c * x[k] for k, c in enumerate(expr) if c)
    point = {v: x[i] for i, v in enumerate(variables)}
    if not system.check(point):
        raise AssertionError("Fourier–Motzkin produced a point violating the system")
    return LPResult(True, point)


def _apply_subs(vec, const, subs):
    vec = list(vec)
    for j, expr, c in subs:
        a = vec[j]
        if a:
            vec[j] = Fraction(0)
            for k, e in enumerate(expr):
                if e:
                    vec[k] += a * e
            const += a * c
    return vec, const


def _subst_row(r: Ineq, subs) -> Ineq:
    vec, const = _apply_subs(r.coeffs, r.const, subs)
    return Ineq(tuple(vec), const, r.strict, r.history)


def project(system: LinSystem, keep: Sequence[Hashable], max_rows: int = MAX_ROWS) -> list[LinConstraint]:
    """Constraints describing the projection of the system onto ``keep``.

    Returns an empty-coefficient false row when the system is infeasible.
    """
    variables = system.variables()
    for k in keep:
        if k not in variables:
            variables.append(k)
    rows, eqs = _to_ineqs(system, variables)
    keep_idx = {variables.index(k) for k in keep}
    subs = []
    kept_eqs = []
    for vec, const in eqs:
        vec, const = _apply_subs(vec, const, subs)
        j = next((k for k, a in enumerate(vec) if a != 0 and k not in keep_idx), None)
        if j is None:
            if all(a == 0 for a in vec):
                if const != 0:
                    return [LinConstraint.make({}, -1, ">=")]
                continue
            kept_eqs.append((vec, const))
            continue
        a = vec[j]
        expr = [-x / a for x in vec]
        expr[j] = Fraction(0)
        subs.append((j, expr, -const / a))
    rows = [_subst_row(r, subs) for r in rows]
    hist = len(system.constraints) + len(variables)
    for vec, const in kept_eqs:
        vec, const = _apply_subs(vec, const, subs)
        rows.append(Ineq(tuple(vec), const, False, frozenset([hist])))
        rows.append(Ineq(tuple(-a for a in vec), -const, False, frozenset([hist + 1])))
        hist += 2
    proj = Projection(len(variables), rows, max_rows)
    remaining = [j for j in range(len(variables)) if j not in keep_idx and any(r.coeffs[j] for r in proj.rows)]
    while remaining:
        j = proj.pick(remaining)
        proj.eliminate(j)
        remaining.remove(j)
    out = []
    for r in proj.rows:
        d = {variables[j]: a for j, a in enumerate(r.coeffs) if a}
        c = LinConstraint.make(d, r.const, ">" if r.strict else ">=")
        t = c.trivial()
        if t is True:
            continue
        if t is False:
            return [LinConstraint.make({}, -1, ">=")]
        out.append(c)
    return out
