"""Abduction over FP theories: recognizing and finding PIT solutions.

A problem is ``AbductionProblem(theory, observation, hypotheses, n)``.
Solutions are PITs over the hypothesis terms with bounds in V = {k/n}.
Recognition of sufficient solutions goes through ``decide``; recognition of
full solutions evaluates the single model a complete PIT pins down.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .decide import fp_sat, polyhedra
from .decide.compile import ProfileEncoder, Search, value_row
from .decide.linear import LinConstraint
from .formulas import (
    PIL,
    PIT,
    AbductionProblem,
    Delta,
    FormulaError,
    Inner,
    Neg,
    Pr,
    atoms,
    canonical_pit,
    events_of,
    normalize_term,
    render,
    sort_pils,
    term_literals,
)
from .limits import ResourceLimit, check_budget
from .semantics import (
    ProbModel,
    check_complete,
    entropy,
    entropy_of_weights,
    eval_fp,
    model_to_pit,
    truth_vector,
)

ONE = Fraction(1)
ZERO = Fraction(0)
CEM_TOLERANCE = 1e-9


@dataclass
class SolutionReport:
    kind: str
    verdict: bool
    reason: str = ""
    solution: PIT | None = None
    evidence: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.verdict


def _theory(P: AbductionProblem) -> list:
    return list(P.theory)


def _pils(pit: PIT) -> list:
    return [lam.to_formula() for lam in pit.literals]


def _negated_obs(P: AbductionProblem):
    return Neg(Delta(P.observation))


# ---------------------------------------------------------------- recognition


def hypothesis_check(P: AbductionProblem, eta: PIT) -> str:
    """Empty string when every event is a hypothesis and every bound is in V."""
    hyps = set(P.hypotheses)
    for lam in eta.literals:
        lits = term_literals(lam.event)
        if lits is None or normalize_term(lam.event, P.order) not in hyps:
            return f"event {render(lam.event)} is not a hypothesis"
        if not P.in_values(lam.bound):
            return f"bound {lam.bound} is not in V"
    return ""


def recognize_sufficient(P: AbductionProblem, eta: PIT) -> SolutionReport:
    rep = SolutionReport("sufficient", False)
    bad = hypothesis_check(P, eta)
    if bad:
        rep.reason = bad
        return rep
    gamma = _theory(P) + _pils(eta)
    vs = P.varset
    cons = fp_sat(gamma, vs)
    rep.trace.append({"call": "fp_sat", "goal": "theory+pit", "verdict": cons.verdict, "lp_calls": cons.stats.lp_calls})
    if not cons.sat:
        rep.reason = "theory and PIT are inconsistent"
        return rep
    rep.evidence["model"] = cons.witness
    counter = fp_sat(gamma + [_negated_obs(P)], vs)
    rep.trace.append(
        {"call": "fp_sat", "goal": "theory+pit+not-delta-obs", "verdict": counter.verdict, "lp_calls": counter.stats.lp_calls}
    )
    if counter.sat:
        rep.reason = "observation not entailed"
        rep.evidence["countermodel"] = counter.witness
        return rep
    rep.verdict = True
    rep.solution = eta
    return rep


def recognize_full(P: AbductionProblem, theta: PIT) -> SolutionReport:
    """Evaluate the model pinned by a complete PIT; no decide calls."""
    rep = SolutionReport("full", False)
    # the hypothesis restriction is not applied: full solutions pin full terms
    comp = check_complete(theta, P.varset, P.granularity)
    if not comp.ok:
        rep.reason = f"not complete: {comp.reason}"
        return rep
    model = ProbModel.from_weights(P.varset, comp.weights)
    rep.evidence["model"] = model
    for i, g in enumerate(P.theory):
        if eval_fp(model, g) != 1:
            rep.reason = f"theory formula {i} evaluates to {eval_fp(model, g)}"
            return rep
    v = eval_fp(model, P.observation)
    if v != 1:
        rep.reason = f"observation evaluates to {v}"
        return rep
    rep.verdict = True
    rep.solution = theta
    return rep


def concise_limit(P: AbductionProblem) -> int:
    """Largest support of a concise full solution: |E[P]| + 1 worlds."""
    return len(P.events()) + 1


def syntactic_atom_count(P: AbductionProblem) -> int:
    return sum(1 for f in list(P.theory) + [P.observation] for _ in atoms(f))


# ---------------------------------------------------------------- weakenings


def _litset(t: Inner) -> frozenset:
    lits = term_literals(t)
    if lits is None:
        raise FormulaError("not a term")
    return frozenset(lits)


def next_terms(H: Sequence[Inner], sigma: Inner) -> tuple[list, list]:
    """(next weakest, next strongest) terms of ``sigma`` within ``H``."""
    sets = {h: _litset(h) for h in H}
    s = _litset(sigma)
    if all(v != s for v in sets.values()):
        raise ValueError("sigma is not a member of H")
    weaker = [h for h, v in sets.items() if v < s]
    stronger = [h for h, v in sets.items() if v > s]
    weakest = [t for t in weaker if not any(sets[t] < sets[u] for u in weaker)]
    strongest = [t for t in stronger if not any(sets[u] < sets[t] for u in stronger)]
    return weakest, strongest


def relax_value(lam: PIL, n: int) -> PIL | None:
    """One V-step relaxation of a PIL, or None at the boundary."""
    k = lam.bound * n
    if k.denominator != 1:
        return None
    k = int(k)
    if lam.op == ">=":
        return PIL(lam.event, ">", Fraction(k - 1, n)) if k >= 1 else None
    if lam.op == ">":
        return PIL(lam.event, ">=", lam.bound)
    if lam.op == "<=":
        return PIL(lam.event, "<", Fraction(k + 1, n)) if k <= n - 1 else None
    return PIL(lam.event, "<=", lam.bound)


def next_weakenings(eta: PIT, H: Sequence[Inner], n: int) -> list[PIT]:
    out: list[PIT] = []
    lits = list(eta.literals)
    for i, lam in enumerate(lits):
        replacements = []
        r = relax_value(lam, n)
        if r is not None:
            replacements.append(r)
        member = next((h for h in H if _litset(h) == _litset(lam.event)), None)
        if member is not None:
            weakest, strongest = next_terms(H, member)
            for t in weakest if lam.is_lower else strongest:
                replacements.append(PIL(t, lam.op, lam.bound))
        for rep in replacements:
            out.append(PIT(tuple(lits[:i] + [rep] + lits[i + 1 :])))
    return out


def recognize_minimal(P: AbductionProblem, eta: PIT) -> SolutionReport:
    rep = SolutionReport("minimal", False)
    base = recognize_sufficient(P, eta)
    rep.trace.extend(base.trace)
    if not base.verdict:
        rep.reason = f"not a sufficient solution: {base.reason}"
        rep.evidence = dict(base.evidence)
        return rep
    cands = next_weakenings(eta, P.hypotheses, P.granularity)
    rep.evidence["candidates"] = len(cands)
    for cand in cands:
        r = recognize_sufficient(P, cand)
        rep.trace.append({"call": "recognize_sufficient", "candidate": render(cand), "verdict": r.verdict})
        if r.verdict:
            rep.reason = "a strictly weaker PIT is also a solution"
            rep.evidence["defeater"] = cand
            return rep
    rep.verdict = True
    rep.solution = eta
    return rep


# ---------------------------------------------------------------- sufficient existence


def _encoder(P: AbductionProblem, extra: Sequence[Inner] = ()) -> ProfileEncoder:
    evs = dict.fromkeys(events_of(_theory(P) + [P.observation]))
    for e in extra:
        evs.setdefault(e, None)
    return ProfileEncoder(P.varset, list(evs))


def _hyp_rows(enc: ProfileEncoder, hyps: Sequence[Inner]) -> list:
    rows = []
    for j, h in enumerate(hyps):
        d = {k: -a for k, a in enc.atom(Pr(h)).items()}
        d[("y", j)] = ONE
        rows.append(LinConstraint.make(d, 0, "="))
    return rows


def _project_leaves(enc, goals, hyps) -> list[list]:
    keep = [("y", j) for j in range(len(hyps))]
    defs = _hyp_rows(enc, hyps)
    out = []
    for _, rows in Search(enc).leaves(goals):
        proj = polyhedra.project(enc.base + rows + defs, enc.nonneg, keep)
        proj = polyhedra.remove_redundant(proj)
        if not polyhedra.is_empty(proj):
            out.append(proj)
    return out


def _box_rows(ranges: Sequence[tuple[int, int]], n: int) -> list:
    """Rows of a box of grid cells; cell 2k is the point k/n, cell 2k+1 the gap after it."""
    rows = []
    for j, (a, b) in enumerate(ranges):
        key = ("y", j)
        if a % 2 == 0:
            rows.append(LinConstraint.make({key: ONE}, -Fraction(a // 2, n), ">="))
        else:
            rows.append(LinConstraint.make({key: ONE}, -Fraction(a // 2, n), ">"))
        if b % 2 == 0:
            rows.append(LinConstraint.make({key: -ONE}, Fraction(b // 2, n), ">="))
        else:
            rows.append(LinConstraint.make({key: -ONE}, Fraction(b // 2 + 1, n), ">"))
    return rows


def _box_pit(ranges, hyps, n: int) -> PIT:
    lits = []
    for (a, b), h in zip(ranges, hyps):
        if a % 2 == 0:
            if a > 0:
                lits.append(PIL(h, ">=", Fraction(a // 2, n)))
        else:
            lits.append(PIL(h, ">", Fraction(a // 2, n)))
        if b % 2 == 0:
            if b < 2 * n:
                lits.append(PIL(h, "<=", Fraction(b // 2, n)))
        else:
            lits.append(PIL(h, "<", Fraction(b // 2 + 1, n)))
    if not lits:
        lits.append(PIL(hyps[0], ">=", ZERO))
    return PIT(tuple(lits))


def _split(ranges):
    j = max(range(len(ranges)), key=lambda i: ranges[i][1] - ranges[i][0])
    a, b = ranges[j]
    mid = (a + b) // 2
    lo = list(ranges)
    hi = list(ranges)
    lo[j] = (a, mid)
    hi[j] = (mid + 1, b)
    return lo, hi


def _box_search(ranges, meets_target, misses_bad, stats) -> list | None:
    check_budget()
    stats["boxes"] = stats.get("boxes", 0) + 1
    if not meets_target(ranges):
        return None
    if misses_bad(ranges):
        return ranges
    if all(a == b for a, b in ranges):
        return None
    lo, hi = _split(ranges)
    return _box_search(lo, meets_target, misses_bad, stats) or _box_search(hi, meets_target, misses_bad, stats)


def _polyhedral_search(P: AbductionProblem, hyps, stats) -> tuple[bool, list | None, dict]:
    """Cell search using projections onto the hypothesis measures."""
    n = P.granularity
    enc = _encoder(P, hyps)
    good = _project_leaves(enc, [value_row(g) for g in _theory(P)], hyps)
    stats["theory_pieces"] = len(good)
    if not good:
        return True, None, {}
    bad = _project_leaves(enc, [value_row(g) for g in _theory(P) + [_negated_obs(P)]], hyps)
    stats["countermodel_pieces"] = len(bad)
    diff = []
    for a in good:
        diff.extend(polyhedra.difference(a, bad))
    stats["difference_pieces"] = len(diff)
    if not diff:
        return True, None, {}

    def meets_target(r):
        box = _box_rows(r, n)
        return any(not polyhedra.is_empty(d + box) for d in diff)

    def misses_bad(r):
        box = _box_rows(r, n)
        return all(polyhedra.is_empty(b + box) for b in bad)

    top = [(0, 2 * n)] * len(hyps)
    found = _box_search(top, meets_target, misses_bad, stats)
    return True, found, {"good": good, "bad": bad}


def _decide_search(P: AbductionProblem, hyps, stats) -> list | None:
    """Budgeted cell search that asks decide directly (no projections)."""
    n = P.granularity

    def box_pit(r):
        return _box_pit(r, hyps, n)

    def meets_target(r):
        stats["decide_calls"] = stats.get("decide_calls", 0) + 1
        return fp_sat(_theory(P) + _pils(box_pit(r)), P.varset).sat

    def misses_bad(r):
        stats["decide_calls"] = stats.get("decide_calls", 0) + 1
        return not fp_sat(_theory(P) + _pils(box_pit(r)) + [_negated_obs(P)], P.varset).sat

    return _box_search([(0, 2 * n)] * len(hyps), meets_target, misses_bad, stats)


def exists_sufficient(P: AbductionProblem) -> PIT | None:
    """A sufficient solution in canonical form, or None if there is none."""
    return solve_sufficient(P).solution


def solve_sufficient(P: AbductionProblem) -> SolutionReport:
    rep = SolutionReport("sufficient", False)
    hyps = list(P.hypotheses)
    if not hyps:
        rep.reason = "no hypotheses"
        return rep
    stats: dict = {}
    rep.evidence["stats"] = stats
    try:
        _, found, _ = _polyhedral_search(P, hyps, stats)
        rep.trace.append({"route": "projection"})
    except ResourceLimit as exc:
        if "time budget" in str(exc):
            raise
        rep.trace.append({"route": "decide", "why": str(exc)})
        found = _decide_search(P, hyps, stats)
    if found is None:
        rep.reason = "no PIT over the hypotheses consistently entails the observation"
        return rep
    eta = _box_pit(found, hyps, P.granularity)
    eta = _drop_literals(P, eta)
    check = recognize_sufficient(P, eta)
    rep.trace.extend(check.trace)
    if not check.verdict:
        raise AssertionError(f"cell search produced a non-solution: {check.reason}")
    rep.verdict = True
    rep.solution = canonical_pit(eta, P.order)
    return rep


def _drop_literals(P: AbductionProblem, eta: PIT) -> PIT:
    """Greedily remove literals while the PIT stays a sufficient solution."""
    lits = list(eta.literals)
    i = 0
    while i < len(lits) and len(lits) > 1:
        trial = PIT(tuple(lits[:i] + lits[i + 1 :]))
        if recognize_sufficient(P, trial).verdict:
            lits = list(trial.literals)
        else:
            i += 1
    return PIT(tuple(lits))


def candidate_pits(P: AbductionProblem) -> Iterator[PIT]:
    """Every canonical PIT over the hypotheses (for exhaustive checks on tiny problems)."""
    vals = P.values
    per_event = []
    for h in P.hypotheses:
        lowers = [None] + [PIL(h, op, c) for op in (">=", ">") for c in vals if not (op == ">" and c == 1)]
        uppers = [None] + [PIL(h, op, c) for op in ("<=", "<") for c in vals if not (op == "<" and c == 0)]
        per_event.append([(lo, up) for lo in lowers for up in uppers])
    for combo in itertools.product(*per_event):
        lits = [x for pair in combo for x in pair if x is not None]
        if lits:
            yield PIT(tuple(sort_pils(lits, P.order)))


# ---------------------------------------------------------------- concise full solutions


def _int_units(x: Fraction, n: int) -> int | None:
    v = x * n
    return int(v) if v.denominator == 1 else None


def _integer_rows(rows: list, keys: list, n: int):
    """Rows over unit counts u_k = n * m_k with integer coefficients.

    On integer points a strict row ``L(u) > 0`` with integer data is the same as
    ``L(u) >= 1``, so the translation is exact.
    """
    idx = {k: i for i, k in enumerate(keys)}
    out = []
    for r in rows:
        c = r.const * n
        denoms = [a.denominator for _, a in r.coeffs] + [c.denominator]
        d = math.lcm(*denoms)
        vec = np.zeros(len(keys))
        for k, a in r.coeffs:
            vec[idx[k]] = float(a * d)
        const = int(c * d)
        if r.rel == "=":
            out.append((vec, -const, -const))
        elif r.rel == ">=":
            out.append((vec, -const, np.inf))
        else:
            out.append((vec, -const + 1, np.inf))
    return out


def _ilp_point(rows: list, keys: list, n: int, limit: int, stats: dict) -> dict | None:
    """Masses in multiples of 1/n satisfying ``rows`` with at most ``limit`` positive worlds.

    Integer programming (HiGHS) over unit counts plus support indicators; the
    returned point is re-checked exactly by the caller.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    check_budget()
    m = len(keys)
    A, lo, hi = [], [], []
    for vec, l, h in _integer_rows(rows, keys, n):
        A.append(np.concatenate([vec, np.zeros(m)]))
        lo.append(l)
        hi.append(h)
    A.append(np.concatenate([np.ones(m), np.zeros(m)]))  # total mass
    lo.append(n)
    hi.append(n)
    for i in range(m):  # u_i <= n * z_i
        vec = np.zeros(2 * m)
        vec[i] = 1
        vec[m + i] = -n
        A.append(vec)
        lo.append(-np.inf)
        hi.append(0)
    A.append(np.concatenate([np.zeros(m), np.ones(m)]))  # support
    lo.append(0)
    hi.append(limit)
    ub = np.concatenate([np.full(m, n), np.ones(m)])
    stats["ilp_calls"] = stats.get("ilp_calls", 0) + 1
    res = milp(
        c=np.concatenate([np.zeros(m), np.ones(m)]),
        constraints=LinearConstraint(np.array(A), np.array(lo), np.array(hi)),
        integrality=np.ones(2 * m),
        bounds=Bounds(np.zeros(2 * m), ub),
    )
    if res.x is None:
        return None
    units = [int(round(x)) for x in res.x[:m]]
    point = {k: Fraction(u, n) for k, u in zip(keys, units)}
    if sum(units) != n or not all(r.holds(point) for r in rows):
        stats["rounding_failures"] = stats.get("rounding_failures", 0) + 1
        return None
    return point


def exists_concise_full(P: AbductionProblem) -> PIT | None:
    return solve_concise_full(P).solution


def solve_concise_full(P: AbductionProblem) -> SolutionReport:
    rep = SolutionReport("full", False)
    n = P.granularity
    limit = concise_limit(P)
    enc = _encoder(P)
    search = Search(enc)
    stats: dict = {"leaves": 0}
    rep.evidence["stats"] = stats
    goals = [value_row(g) for g in _theory(P) + [P.observation]]
    for _, rows in search.leaves(goals):
        stats["leaves"] += 1
        point = _ilp_point(rows, enc.keys, n, limit, stats)
        if point is None:
            continue
        theta = model_to_pit(enc.model(point))
        check = recognize_full(P, theta)
        if not check.verdict:
            raise AssertionError(f"integer search produced a non-solution: {check.reason}")
        rep.verdict = True
        rep.solution = theta
        return rep
    rep.reason = "no concise full solution"
    return rep


# ---------------------------------------------------------------- CEM


def _split_entropy(units: int, parts: int, g: int) -> float:
    """Entropy of ``units``/g split as evenly as possible into ``parts`` worlds."""
    q, r = divmod(units, parts)
    ws = [q + 1] * r + [q] * (parts - r)
    return entropy_of_weights(Fraction(w, g) for w in ws if w)


def _best_split(units: dict, sizes: dict, budget_: int, g: int):
    """Max entropy over splitting class units across worlds, within the support budget.

    Returns (entropy, {class: parts}) or None if the support does not fit.
    """
    cls = [c for c, u in units.items() if u > 0]
    if len(cls) > budget_:
        return None
    # dp over classes: best[b] = (value, choice list) using extra budget b
    spare = budget_ - len(cls)
    best = {0: (0.0, [])}
    for c in cls:
        nxt: dict = {}
        cap = min(sizes[c], units[c])
        for used, (val, ch) in best.items():
            for t in range(1, cap + 1):
                u = used + t - 1
                if u > spare:
                    break
                cand = val + _split_entropy(units[c], t, g)
                if u not in nxt or cand > nxt[u][0] + 1e-15:
                    nxt[u] = (cand, ch + [t])
        best = nxt
    val, ch = max(best.values(), key=lambda x: x[0])
    return val, dict(zip(cls, ch))


def _violation(rows: list, point: dict, g: int) -> Fraction:
    tot = ZERO
    for r in rows:
        v = r.value(point)
        if r.rel == "=":
            tot += abs(v)
        elif v < 0 or (r.rel == ">" and v == 0):
            tot += -v + Fraction(1, 1000 * g)
    return tot


def _max_entropy_masses(rows: list, keys: list, sizes: dict, start: dict) -> np.ndarray:
    """Continuous max-entropy class masses on one leaf (heuristic, floating point)."""
    from scipy.optimize import minimize

    m = len(keys)
    idx = {k: i for i, k in enumerate(keys)}
    A, b, eqA, eqb = [], [], [], []
    for r in rows:
        vec = np.zeros(m)
        for k, a in r.coeffs:
            vec[idx[k]] = float(a)
        (eqA if r.rel == "=" else A).append(vec)
        (eqb if r.rel == "=" else b).append(float(r.const))
    logs = np.log(np.array([sizes[k] for k in keys], dtype=float))

    def obj(x):
        x = np.clip(x, 1e-12, 1)
        return float(np.sum(x * np.log(x) - x * logs))

    def grad(x):
        x = np.clip(x, 1e-12, 1)
        return np.log(x) + 1 - logs

    cons = [{"type": "eq", "fun": lambda x: np.sum(x) - 1, "jac": lambda x: np.ones(m)}]
    if A:
        Am, bm = np.array(A), np.array(b)
        cons.append({"type": "ineq", "fun": lambda x: Am @ x + bm, "jac": lambda x: Am})
    if eqA:
        Em, em = np.array(eqA), np.array(eqb)
        cons.append({"type": "eq", "fun": lambda x: Em @ x + em, "jac": lambda x: Em})
    x0 = np.array([float(start.get(k, 0)) for k in keys])
    res = minimize(obj, x0, jac=grad, bounds=[(0, 1)] * m, constraints=cons, method="SLSQP", options={"maxiter": 300})
    return res.x if res.success else x0


def _round(x: np.ndarray, g: int) -> list[int]:
    raw = np.maximum(x, 0) * g
    base = np.floor(raw).astype(int)
    short = g - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    for i in order[: max(short, 0)]:
        base[i] += 1
    return [int(v) for v in base]


def _local_search(rows, keys, sizes, units, g, limit, stats):
    """Hill-climb unit moves: first to feasibility, then to higher entropy."""

    def score(u):
        pt = {k: Fraction(v, g) for k, v in zip(keys, u) if v}
        viol = _violation(rows, pt, g)
        split = _best_split(dict(zip(keys, u)), sizes, limit, g)
        over = sum(1 for v in u if v) - limit
        if split is None:
            return (viol, max(over, 0), 0.0), None
        return (viol, 0, -split[0]), split

    cur = list(units)
    cur_s, cur_split = score(cur)
    m = len(keys)
    while True:
        check_budget()
        best = None
        for i in range(m):
            if cur[i] == 0:
                continue
            for j in range(m):
                if i == j:
                    continue
                cand = list(cur)
                cand[i] -= 1
                cand[j] += 1
                s, sp = score(cand)
                stats["moves"] = stats.get("moves", 0) + 1
                if s < cur_s and (best is None or s < best[0]):
                    best = (s, cand, sp)
        if best is None:
            return cur, cur_s, cur_split
        cur_s, cur, cur_split = best


def _class_worlds(enc: ProfileEncoder) -> dict:
    nworlds = 1 << len(enc.varset)
    if enc.events:
        table = np.stack([truth_vector(e, enc.varset) for e in enc.events]).T
    else:
        table = np.zeros((nworlds, 0), dtype=bool)
    out: dict = {k: [] for k in enc.keys}
    lookup = {tuple(p): k for k, p in zip(enc.keys, enc.profiles.tolist())}
    for w in range(nworlds):
        out[lookup[tuple(table[w].tolist())]].append(w)
    return out


def _model_from_split(varset, worlds, units, split, g):
    weights = {}
    for k, parts in split.items():
        q, r = divmod(units[k], parts)
        for i, w in enumerate(worlds[k][:parts]):
            weights[w] = Fraction(q + (1 if i < r else 0), g)
    return ProbModel.from_weights(varset, weights)


def hunt_defeater(P: AbductionProblem, target: float, granularity: int | None = None, stats: dict | None = None) -> PIT | None:
    """Look for a concise full solution with entropy above ``target`` (heuristic)."""
    stats = {} if stats is None else stats
    g = granularity or P.granularity
    if P.granularity % g:
        g = P.granularity
    limit = concise_limit(P)
    enc = _encoder(P)
    worlds = _class_worlds(enc)
    sizes = {k: len(v) for k, v in worlds.items()}
    search = Search(enc)
    best: tuple[float, PIT] | None = None
    goals = [value_row(f) for f in _theory(P) + [P.observation]]
    for point, rows in search.leaves(goals):
        stats["leaves"] = stats.get("leaves", 0) + 1
        x = _max_entropy_masses(rows, enc.keys, sizes, point)
        starts = [_round(x, g), _round(np.array([float(point.get(k, 0)) for k in enc.keys]), g)]
        for units in starts:
            u, s, split = _local_search(rows, enc.keys, sizes, units, g, limit, stats)
            if s[0] != 0 or split is None:
                continue
            h = -s[2]
            if h <= target + CEM_TOLERANCE or (best is not None and h <= best[0]):
                continue
            model = _model_from_split(P.varset, worlds, dict(zip(enc.keys, u)), split[1], g)
            theta = model_to_pit(model)
            if recognize_full(P, theta).verdict:
                best = (entropy(theta), theta)
    return None if best is None else best[1]


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    for cuts in itertools.combinations(range(1, total), parts - 1):
        edges = (0,) + cuts + (total,)
        yield tuple(edges[i + 1] - edges[i] for i in range(parts))


def concise_space_size(P: AbductionProblem) -> int:
    nw = 1 << len(P.varset)
    n = P.granularity
    return sum(math.comb(nw, t) * math.comb(n - 1, t - 1) for t in range(1, min(concise_limit(P), nw, n) + 1))


def enumerate_concise_full(P: AbductionProblem, max_candidates: int = 200_000) -> Iterator[PIT]:
    """All concise full solutions by brute force (tiny problems only)."""
    if concise_space_size(P) > max_candidates:
        raise ResourceLimit("concise candidate space too large for enumeration")
    vs = P.varset
    nw = 1 << len(vs)
    n = P.granularity
    for t in range(1, min(concise_limit(P), nw, n) + 1):
        for support in itertools.combinations(range(nw), t):
            for comp in _compositions(n, t):
                check_budget()
                m = ProbModel.from_weights(vs, {w: Fraction(c, n) for w, c in zip(support, comp)})
                if all(eval_fp(m, f) == 1 for f in list(P.theory) + [P.observation]):
                    yield model_to_pit(m)


def recognize_cem(
    P: AbductionProblem,
    theta: PIT,
    hunt_granularity: int | None = None,
    max_candidates: int = 200_000,
) -> SolutionReport:
    rep = SolutionReport("cem", False)
    k = len(P.events())
    rep.evidence["atoms"] = k
    rep.evidence["syntactic_atoms"] = syntactic_atom_count(P)
    comp = check_complete(theta, P.varset, P.granularity)
    if not comp.ok:
        rep.reason = f"not complete: {comp.reason}"
        return rep
    h = entropy(theta)
    rep.evidence["entropy"] = h
    full = recognize_full(P, theta)
    support = sum(1 for c in comp.weights.values() if c > 0)
    stats: dict = {}
    rep.evidence["stats"] = stats
    defeater = hunt_defeater(P, h, hunt_granularity, stats)
    rep.trace.append({"step": "defeater hunt", "found": defeater is not None})
    if defeater is not None:
        rep.evidence["defeater"] = defeater
        rep.evidence["defeater_entropy"] = entropy(defeater)
    if not full.verdict:
        rep.reason = f"not a full solution: {full.reason}"
        return rep
    if support > concise_limit(P):
        rep.reason = "not concise"
        return rep
    if defeater is not None:
        rep.reason = "a concise full solution has higher entropy"
        return rep
    if concise_space_size(P) > max_candidates:
        raise ResourceLimit("no defeater found and the concise space is too large to exhaust")
    for cand in enumerate_concise_full(P, max_candidates):
        if entropy(cand) > h + CEM_TOLERANCE:
            rep.reason = "a concise full solution has higher entropy"
            rep.evidence["defeater"] = cand
            rep.evidence["defeater_entropy"] = entropy(cand)
            return rep
    rep.trace.append({"step": "exhaustive enumeration", "candidates": concise_space_size(P)})
    rep.verdict = True
    rep.solution = theta
    return rep
