"""Independent exhaustive decision pipeline used as a test oracle.

It shares nothing with the main route beyond the AST: every distinct
subformula gets its own value variable, every connective is split into its
two linear cases, all 2^n worlds get a mass variable (no profile quotient),
and feasibility is decided by Fourier–Motzkin elimination.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from ..formulas import Delta, Formula, Impl, LCmp, LVar, Neg, Odot, Oplus, Pr, PrCmp, formula_vars
from ..semantics import ProbModel, eval_fp, holds
from . import fourier_motzkin
from .linear import LinConstraint, LinSystem

ONE = Fraction(1)


def _subformulas(formulas: Iterable[Formula]) -> list[Formula]:
    out: dict[Formula, None] = {}

    def walk(f):
        if isinstance(f, (Neg, Delta)):
            walk(f.arg)
        elif isinstance(f, (Odot, Oplus, Impl)):
            walk(f.left)
            walk(f.right)
        out.setdefault(f, None)

    for f in formulas:
        walk(f)
    return list(out)


def _val(f, ids):
    return ("v", ids[f])


def _cases(f: Formula, ids: dict, atom_expr) -> list[list[LinConstraint]]:
    """Linear cases defining the value variable of ``f`` from its children."""
    v = _val(f, ids)
    mk = LinConstraint.make
    if isinstance(f, (Pr, LVar)):
        d = {k: -c for k, c in atom_expr(f).items()}
        d[v] = ONE
        return [[mk(d, 0, "=")]]
    if isinstance(f, (PrCmp, LCmp)):
        target = atom_expr(Pr(f.event) if isinstance(f, PrCmp) else LVar(f.name))
        c = f.bound

        def cmp(op):
            sign = ONE if op in (">=", ">") else -ONE
            d = {k: sign * a for k, a in target.items()}
            return mk(d, -sign * c, ">" if op in (">", "<") else ">=")

        neg = {">=": "<", ">": "<=", "<=": ">", "<": ">="}
        return [[mk({v: ONE}, -1, "="), cmp(f.op)], [mk({v: ONE}, 0, "="), cmp(neg[f.op])]]
    if isinstance(f, Neg):
        a = _val(f.arg, ids)
        return [[mk({v: ONE, a: ONE}, -1, "=")]]
    if isinstance(f, Delta):
        a = _val(f.arg, ids)
        return [[mk({v: ONE}, -1, "="), mk({a: ONE}, -1, ">=")], [mk({v: ONE}, 0, "="), mk({a: -ONE}, 1, ">")]]
    a, b = _val(f.left, ids), _val(f.right, ids)
    if a == b:
        pair = {a: 2 * ONE}
        diff: dict = {}
    else:
        pair = {a: ONE, b: ONE}
        diff = {a: ONE, b: -ONE}
    if isinstance(f, Odot):
        return [
            [_eq_sum(v, pair, -1), mk(pair, -1, ">=")],
            [mk({v: ONE}, 0, "="), mk({k: -c for k, c in pair.items()}, 1, ">=")],
        ]
    if isinstance(f, Oplus):
        return [
            [_eq_sum(v, pair, 0), mk({k: -c for k, c in pair.items()}, 1, ">=")],
            [mk({v: ONE}, -1, "="), mk(pair, -1, ">=")],
        ]
    # impl: 1 if a <= b, else 1 - a + b
    rev = {k: -c for k, c in diff.items()}
    return [
        [mk({v: ONE}, -1, "="), mk(rev, 0, ">=")],
        [_eq_sum(v, rev, 1), mk(diff, 0, ">=")],
    ]


def _eq_sum(v, terms: dict, const) -> LinConstraint:
    """v = sum(terms) + const."""
    d = {k: -c for k, c in terms.items()}
    d[v] = d.get(v, 0) + ONE
    return LinConstraint.make(d, -const, "=")


def _search(formulas: list[Formula], atom_expr, base: list, nonneg: set):
    subs = _subformulas(formulas)
    ids = {f: i for i, f in enumerate(subs)}
    roots = [LinConstraint.make({_val(f, ids): ONE}, -1, "=") for f in formulas]
    case_lists = [_cases(f, ids, atom_expr) for f in subs]

    def feasible(rows):
        return fourier_motzkin.feasible(LinSystem(base + roots + rows, set(nonneg)))

    def dfs(i, rows):
        res = feasible(rows)
        if not res.feasible:
            return None
        if i == len(case_lists):
            return res.point
        for case in case_lists[i]:
            p = dfs(i + 1, rows + case)
            if p is not None:
                return p
        return None

    return dfs(0, [])


def fp_sat_exhaustive(gamma: Iterable[Formula], varset: Sequence[str] | None = None) -> tuple[bool, ProbModel | None]:
    gamma = list(gamma)
    vs = tuple(varset) if varset is not None else tuple(sorted(formula_vars(gamma)))
    index = {v: i for i, v in enumerate(vs)}
    worlds = list(range(1 << len(vs)))
    keys = [("w", w) for w in worlds]

    def atom_expr(f):
        return {("w", w): ONE for w in worlds if holds(f.event, w, index)}

    base = [LinConstraint.make({k: ONE for k in keys}, -1, "=")]
    point = _search(gamma, atom_expr, base, set(keys))
    if point is None:
        return False, None
    model = ProbModel.from_weights(vs, {w: point.get(("w", w), 0) for w in worlds})
    if any(eval_fp(model, g) != 1 for g in gamma):
        raise AssertionError("oracle witness does not satisfy the theory")
    return True, model


def luk_sat_exhaustive(phi: Iterable[Formula]) -> tuple[bool, dict | None]:
    from ..semantics import eval_luk

    phi = list(phi)
    names = sorted(formula_vars(phi))
    keys = [("x", n) for n in names]

    def atom_expr(f):
        return {("x", f.name): ONE}

    base = [LinConstraint.make({k: -ONE}, 1, ">=") for k in keys]
    point = _search(phi, atom_expr, base, set(keys))
    if point is None:
        return False, None
    v = {n: point.get(("x", n), Fraction(0)) for n in names}
    if any(eval_luk(v, f) != 1 for f in phi):
        raise AssertionError("oracle witness does not satisfy the theory")
    return True, v
