"""Two-phase primal simplex over exact rationals with Bland's rule.

Strict rows are handled by one shared slack ``t``: each ``a.x + c > 0``
becomes ``a.x + c - t >= 0`` with ``0 <= t <= 1``, and the system is
feasible iff the maximum of ``t`` is positive.
"""

from __future__ import annotations

from fractions import Fraction

from ..limits import check_budget
from .linear import LinConstraint, LinSystem, LPResult

ZERO = Fraction(0)
ONE = Fraction(1)


class Tableau:
    """Max c.x subject to A x = b, x >= 0, with b >= 0."""

    def __init__(self, A: list[list[Fraction]], b: list[Fraction]):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        # artificial columns n .. n+m-1, rhs last
        self.rows = []
        for i, (row, bi) in enumerate(zip(A, b)):
            art = [ZERO] * self.m
            art[i] = ONE
            self.rows.append(list(row) + art + [bi])
        self.basis = [self.n + i for i in range(self.m)]
        self.width = self.n + self.m

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        p = row[c]
        if p != 1:
            inv = 1 / p
            row = [x * inv if x else x for x in row]
            self.rows[r] = row
        nz = [j for j, x in enumerate(row) if x]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[c]
                if f:
                    for j in nz:
                        other[j] -= f * row[j]
        if self.obj is not None:
            f = self.obj[c]
            if f:
                for j in nz:
                    self.obj[j] -= f * row[j]
        self.basis[r] = c

    obj: list | None = None

    def set_objective(self, c: list[Fraction], allowed: int) -> None:
        """Objective row for maximizing ``c`` over columns below ``allowed``."""
        obj = [-x for x in c] + [ZERO] * (self.width + 1 - len(c))
        for i, bi in enumerate(self.basis):
            f = obj[bi]
            if f:
                row = self.rows[i]
                for j, x in enumerate(row):
                    if x:
                        obj[j] -= f * x
        self.obj = obj
        self.allowed = allowed

    def run(self) -> str:
        while True:
            check_budget()
            obj = self.obj
            enter = next((j for j in range(self.allowed) if obj[j] < 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and self.basis[i] < self.basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], enter)

    def value(self) -> Fraction:
        return self.obj[-1]

    def solution(self) -> list[Fraction]:
        x = [ZERO] * self.width
        for i, bi in enumerate(self.basis):
            x[bi] = self.rows[i][-1]
        return x[: self.n]


def solve_standard(A, b, c) -> tuple[str, list[Fraction] | None, Fraction | None]:
    """Max c.x s.t. A x = b, x >= 0.  Returns (status, x, value)."""
    m = len(A)
    n = len(c)
    A = [list(r) for r in A]
    b = list(b)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-x for x in A[i]]
            b[i] = -b[i]
    if m == 0:
        if any(x > 0 for x in c):
            return "unbounded", None, None
        return "optimal", [ZERO] * n, ZERO
    t = Tableau(A, b)
    # phase 1: maximize -(sum of artificials)
    t.set_objective([ZERO] * n + [-ONE] * m, t.width)
    t.run()
    if t.value() < 0:
        return "infeasible", None, None
    # drive remaining artificials out of the basis
    keep = []
    for i in range(t.m):
        if t.basis[i] >= n:
            col = next((j for j in range(n) if t.rows[i][j] != 0), None)
            if col is None:
                continue  # redundant row
            t.pivot(i, col)
        keep.append(i)
    t.rows = [t.rows[i] for i in keep]
    t.basis = [t.basis[i] for i in keep]
    t.m = len(keep)
    t.set_objective(list(c), n)
    status = t.run()
    if status == "unbounded":
        return "unbounded", t.solution(), None
    return "optimal", t.solution(), t.value()


def _columns(system: LinSystem):
    """Column layout: nonnegative vars once, free vars split into +/- parts."""
    cols = []
    for v in system.variables():
        if v in system.nonneg:
            cols.append((v, ONE))
        else:
            cols.append((v, ONE))
            cols.append((v, -ONE))
    return cols


def maximize(system: LinSystem, objective: dict, extra_strict_slack: bool = False):
    """Maximize a linear objective over non-strict constraints (strict rows are closed)."""
    cols = _columns(system)
    colidx: dict = {}
    for j, (v, s) in enumerate(cols):
        colidx.setdefault(v, []).append((j, s))
    A, b = [], []
    nslack = sum(1 for c in system.constraints if c.rel != "=")
    width = len(cols) + nslack
    k = len(cols)
    for c in system.constraints:
        row = [ZERO] * width
        for v, a in c.coeffs:
            for j, s in colidx[v]:
                row[j] += a * s
        if c.rel != "=":
            row[k] = -ONE
            k += 1
        A.append(row)
        b.append(-c.const)
    cvec = [ZERO] * width
    for v, a in objective.items():
        for j, s in colidx.get(v, []):
            cvec[j] += Fraction(a) * s
    status, x, val = solve_standard(A, b, cvec)
    if x is None:
        return status, None, None
    point = {}
    for j, (v, s) in enumerate(cols):
        point[v] = point.get(v, ZERO) + s * x[j]
    return status, point, val


SLACK = ("__strict_slack__",)


def feasible(system: LinSystem) -> LPResult:
    strict = [c for c in system.constraints if c.rel == ">"]
    if not strict:
        status, point, _ = maximize(system, {})
        if status == "infeasible":
            return LPResult(False)
        return LPResult(True, point)
    rows = []
    for c in system.constraints:
        if c.rel == ">":
            d = dict(c.coeffs)
            d[SLACK] = -ONE
            rows.append(LinConstraint.make(d, c.const, ">="))
        else:
            rows.append(c)
    rows.append(LinConstraint.make({SLACK: -ONE}, ONE, ">="))
    aug = LinSystem(rows, set(system.nonneg) | {SLACK})
    status, point, val = maximize(aug, {SLACK: ONE})
    if status == "infeasible":
        return LPResult(False)
    if point[SLACK] <= 0:
        return LPResult(False)
    point.pop(SLACK)
    return LPResult(True, point)
