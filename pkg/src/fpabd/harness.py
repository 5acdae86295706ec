"""Random instance generators, the Łukasiewicz lifting, and cross-check drivers.

Every generator is a pure function of its seed.  ``crosscheck`` runs one
suite over seeded instances and compares two independent routes; each
disagreement is saved as a self-contained ``.fp`` reproduction.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import abduce, fragments, prap
from .decide import fourier_motzkin, fp_entails, fp_sat, luk_entails, luk_sat, simplex
from .decide.linear import LinConstraint, LinSystem
from .decide.oracle import fp_sat_exhaustive, luk_sat_exhaustive
from .formulas import (
    OPS,
    PIL,
    PIT,
    AbductionProblem,
    And,
    Delta,
    Formula,
    Impl,
    Inner,
    LCmp,
    LVar,
    Neg,
    Not,
    Odot,
    Oplus,
    Or,
    Pr,
    PrAP,
    PrCmp,
    TheoryQuery,
    Var,
    and_all,
    classify,
    formula_vars,
    inner_vars,
    normalize_term,
    or_all,
    render,
    render_problem,
)
from .semantics import ProbModel, conditional_probability, eval_fp, eval_luk, measure_of, world_members

FRAGMENTS = ("none", "CIP", "PSC", "SPCF", "PrAP", "PrAP-distribution")
EVENT_CLASSES = ("atomic", "CP", "general")
SUITES = (
    "decide-vs-fm",
    "sat-vs-exhaustive",
    "fullrec-vs-decide",
    "psi-gamma",
    "pil-fast",
    "spcf-vs-generic",
    "psc-vs-generic",
    "prap-routes",
    "lift-luk",
)
DEFAULT_COUNTS = {
    "decide-vs-fm": 500,
    "sat-vs-exhaustive": 500,
    "fullrec-vs-decide": 300,
    "psi-gamma": 100,
    "pil-fast": 1,
    "spcf-vs-generic": 100,
    "psc-vs-generic": 100,
    "prap-routes": 100,
    "lift-luk": 200,
}


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n_vars: int = 3
    event_class: str = "general"
    depth: int = 2
    theory_size: int = 2
    granularity: int = 4
    fragment: str = "none"
    sat_tries: int = 25

    def __post_init__(self):
        if self.fragment not in FRAGMENTS:
            raise ValueError(f"unknown fragment {self.fragment!r}")
        if self.event_class not in EVENT_CLASSES:
            raise ValueError(f"unknown event class {self.event_class!r}")
        if not 1 <= self.n_vars <= 8:
            raise ValueError("n_vars must lie in 1..8")
        if self.granularity < 1:
            raise ValueError("granularity must be positive")


@dataclass
class GenStats:
    attempts: int = 0
    accepted: int = 0

    @property
    def ratio(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


# ---------------------------------------------------------------- random pieces


def var_names(n: int) -> list[str]:
    return [chr(ord("p") + i) if i < 10 else f"v{i}" for i in range(n)]


def rand_value(rng: random.Random, g: int) -> Fraction:
    return Fraction(rng.randint(0, g), g)


def rand_inner(rng: random.Random, names: Sequence[str], depth: int) -> Inner:
    if depth <= 0 or rng.random() < 0.35:
        v = Var(rng.choice(names))
        return Not(v) if rng.random() < 0.3 else v
    left = rand_inner(rng, names, depth - 1)
    right = rand_inner(rng, names, depth - 1)
    if left == right:
        return left
    return And((left, right)) if rng.random() < 0.5 else Or((left, right))


def cp_pool(rng: random.Random, names: Sequence[str]) -> list[Inner]:
    """A chained positive event set: one chain per block of variables."""
    names = list(names)
    rng.shuffle(names)
    pool: list[Inner] = []
    while names:
        k = rng.randint(1, min(3, len(names)))
        block, names = names[:k], names[k:]
        chain: list[Inner] = [and_all([Var(v) for v in block[:j]]) for j in range(len(block), 0, -1)]
        chain += [or_all([Var(v) for v in block[:j]]) for j in range(2, len(block) + 1)]
        pool += [e for e in chain if rng.random() < 0.8] or chain[:1]
    return pool


def event_pool(rng: random.Random, cfg: GenConfig, names: Sequence[str]) -> list[Inner]:
    if cfg.event_class == "atomic":
        return [Var(v) for v in names]
    if cfg.event_class == "CP":
        return cp_pool(rng, names)
    out = [rand_inner(rng, names, cfg.depth) for _ in range(cfg.n_vars + 1)]
    return list(dict.fromkeys(out))


def rand_atom(rng: random.Random, events: Sequence[Inner], g: int, cmp_rate: float = 0.5) -> Formula:
    e = rng.choice(events)
    if rng.random() < cmp_rate:
        op = rng.choice(OPS)
        c = rand_value(rng, g)
        if op == ">" and c == 1:
            op = ">="
        return PrCmp(e, op, c)
    return Pr(e)


def rand_outer(rng: random.Random, events: Sequence[Inner], depth: int, g: int) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        return rand_atom(rng, events, g)
    k = rng.randrange(5)
    if k == 0:
        return Neg(rand_outer(rng, events, depth - 1, g))
    if k == 1:
        return Delta(rand_outer(rng, events, depth - 1, g))
    cls = (Odot, Oplus, Impl)[k - 2]
    return cls(rand_outer(rng, events, depth - 1, g), rand_outer(rng, events, depth - 1, g))


def rand_luk(rng: random.Random, names: Sequence[str], depth: int, g: int) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        v = rng.choice(names)
        if rng.random() < 0.4:
            op = rng.choice(OPS)
            c = rand_value(rng, g)
            if op == ">" and c == 1:
                op = ">="
            return LCmp(v, op, c)
        return LVar(v)
    k = rng.randrange(5)
    if k == 0:
        return Neg(rand_luk(rng, names, depth - 1, g))
    if k == 1:
        return Delta(rand_luk(rng, names, depth - 1, g))
    cls = (Odot, Oplus, Impl)[k - 2]
    return cls(rand_luk(rng, names, depth - 1, g), rand_luk(rng, names, depth - 1, g))


def rand_distribution(rng: random.Random, worlds: int, g: int, support: int | None = None) -> dict[int, Fraction]:
    """World weights in multiples of 1/g."""
    pool = list(range(worlds))
    if support is not None:
        pool = rng.sample(pool, min(support, worlds))
    units: dict[int, int] = {}
    for _ in range(g):
        w = rng.choice(pool)
        units[w] = units.get(w, 0) + 1
    return {w: Fraction(k, g) for w, k in units.items()}


def _terms(pool: Sequence[Inner]) -> list[Inner]:
    from .formulas import term_literals

    return [e for e in pool if term_literals(e) is not None]


# ---------------------------------------------------------------- problem generators


def _problem(names, theory, obs, hyps, g) -> AbductionProblem:
    order = {v: i for i, v in enumerate(names)}
    used = formula_vars(list(theory) + [obs])
    # hypotheses may only mention variables of the theory and observation
    hyps = [normalize_term(h, order) for h in hyps if inner_vars(h) <= used]
    if not hyps:
        hyps = [Var(min(used, key=order.get))]
    return AbductionProblem(tuple(names), tuple(theory), obs, tuple(dict.fromkeys(hyps)), g)


def _hyps_from(rng, pool, names, k) -> list[Inner]:
    terms = _terms(pool)
    if not terms:
        terms = [Var(v) for v in names]
    return rng.sample(terms, min(k, len(terms)))


def _gen_general(rng: random.Random, cfg: GenConfig, names) -> AbductionProblem:
    pool = event_pool(rng, cfg, names)
    theory = [rand_outer(rng, pool, cfg.depth, cfg.granularity) for _ in range(cfg.theory_size)]
    obs = rand_atom(rng, pool, cfg.granularity, cmp_rate=0.7)
    hyps = [rand_inner(rng, names, 1) for _ in range(rng.randint(1, 2))]
    hyps = [h if _terms([h]) else Var(rng.choice(names)) for h in hyps]
    return _problem(names, theory, obs, hyps, cfg.granularity)


def _gen_cip(rng: random.Random, cfg: GenConfig, names) -> AbductionProblem:
    pool = cp_pool(rng, names)
    theory = [rand_outer(rng, pool, cfg.depth, cfg.granularity) for _ in range(cfg.theory_size)]
    obs = rand_atom(rng, pool, cfg.granularity, cmp_rate=0.7)
    return _problem(names, theory, obs, _hyps_from(rng, pool, names, rng.randint(1, 2)), cfg.granularity)


def _psc_clause(rng: random.Random, pool, g) -> Formula:
    if rng.random() < 0.25:
        return rand_atom(rng, pool, g, cmp_rate=1.0)
    items = []
    for _ in range(rng.randint(1, 3)):
        a = Pr(rng.choice(pool))
        items.append(Neg(a) if rng.random() < 0.5 else a)
    out = items[0]
    for x in items[1:]:
        out = Oplus(out, x)
    return out


def _gen_psc(rng: random.Random, cfg: GenConfig, names) -> AbductionProblem:
    pool = cp_pool(rng, names)
    theory = [_psc_clause(rng, pool, cfg.granularity) for _ in range(cfg.theory_size)]
    e = rng.choice(pool)
    obs = PrCmp(e, rng.choice((">=", ">")), Fraction(rng.randint(0, cfg.granularity - 1), cfg.granularity))
    return _problem(names, theory, obs, _hyps_from(rng, pool, names, rng.randint(1, 2)), cfg.granularity)


def _spcf_pil(rng: random.Random, pool, g) -> PrCmp:
    e = rng.choice(pool)
    if rng.random() < 0.85:
        return PrCmp(e, rng.choice((">=", ">")), Fraction(rng.randint(1, g - 1 if g > 1 else 1), g))
    return PrCmp(e, rng.choice(("<=", "<")), Fraction(rng.randint(1, g), g))


def _gen_spcf(rng: random.Random, cfg: GenConfig, names) -> AbductionProblem:
    pool = cp_pool(rng, names)
    g = cfg.granularity
    theory = []
    for _ in range(cfg.theory_size):
        k = rng.random()
        if k < 0.6:
            theory.append(Impl(_spcf_pil(rng, pool, g), _spcf_pil(rng, pool, g)))
        elif k < 0.75:
            theory.append(_spcf_pil(rng, pool, g))
        elif k < 0.9:
            theory.append(Neg(_spcf_pil(rng, pool, g)))
        else:
            theory.append(Neg(Odot(_spcf_pil(rng, pool, g), _spcf_pil(rng, pool, g))))
    obs = _spcf_pil(rng, pool, g)
    vars_pool = [e for e in pool if isinstance(e, Var)] or [Var(v) for v in names]
    hyps = rng.sample(vars_pool, min(len(vars_pool), rng.randint(1, 2)))
    return _problem(names, theory, obs, hyps, g)


def _gen_prap(rng: random.Random, cfg: GenConfig, names, distribution: bool) -> PrAP:
    if len(names) < 2:
        raise ValueError("PrAP generation needs at least two variables")
    obs_name = names[-1]
    others = list(names[:-1])
    theory = []
    for _ in range(max(1, cfg.theory_size)):
        k = rng.randint(1, min(2, len(others)))
        body = rng.sample(others, k)
        lits = [Var(v) if rng.random() < 0.8 else Not(Var(v)) for v in body]
        # body -> obs written as a clause, sometimes with an extra disjunct
        disj = [Not(and_all(lits)), Var(obs_name)]
        if rng.random() < 0.2:
            disj.append(Var(rng.choice(others)))
        theory.append(or_all(disj))
    hyps = []
    for v in others:
        if rng.random() < 0.8:
            hyps.append(Var(v))
        if rng.random() < 0.15:
            hyps.append(Not(Var(v)))
    if not hyps:
        hyps = [Var(others[0])]
    g = cfg.granularity
    n = len(names)
    if distribution:
        weights = rand_distribution(rng, 1 << n, g)
        assignment = []
        for w in range(1 << n):
            members = world_members(names, w)
            term = and_all([Var(v) if v in members else Not(Var(v)) for v in names])
            assignment.append((term, weights.get(w, Fraction(0))))
    else:
        model = ProbModel.from_weights(names, rand_distribution(rng, 1 << n, g))
        assignment = []
        for _ in range(rng.randint(1, 3)):
            e = rand_inner(rng, names, 1)
            value = measure_of(model, e) if rng.random() < 0.8 else rand_value(rng, g)
            assignment.append((e, value))
        assignment = list(dict((e, c) for e, c in assignment).items())
    return PrAP(tuple(names), tuple(theory), Var(obs_name), tuple(dict.fromkeys(hyps)), tuple(assignment))


_TARGET_FLAG = {"CIP": "is_CIP", "PSC": "is_PSC_AP", "SPCF": "is_SPCF_AP"}


def gen_problem_with_stats(cfg: GenConfig) -> tuple[AbductionProblem | PrAP, GenStats]:
    """Generate from the seed, rejecting candidates outside the target fragment.

    Abduction problems are also biased toward a satisfiable theory: up to
    ``sat_tries`` candidates are drawn until one passes fp_sat; the last
    candidate is returned if none does.
    """
    rng = random.Random(cfg.seed)
    names = var_names(cfg.n_vars)
    stats = GenStats()
    if cfg.fragment in ("PrAP", "PrAP-distribution"):
        stats.attempts = stats.accepted = 1
        return _gen_prap(rng, cfg, names, cfg.fragment == "PrAP-distribution"), stats
    make: Callable = {"none": _gen_general, "CIP": _gen_cip, "PSC": _gen_psc, "SPCF": _gen_spcf}[cfg.fragment]
    flag = _TARGET_FLAG.get(cfg.fragment)
    fallback = None
    for _ in range(cfg.sat_tries):
        P = make(rng, cfg, names)
        stats.attempts += 1
        if flag and not getattr(classify(P), flag):
            continue
        fallback = P
        if fp_sat(list(P.theory), P.varset).sat:
            stats.accepted += 1
            return P, stats
    if fallback is None:
        raise RuntimeError(f"no {cfg.fragment} instance after {cfg.sat_tries} tries (seed {cfg.seed})")
    return fallback, stats


def gen_problem(cfg: GenConfig) -> AbductionProblem | PrAP:
    return gen_problem_with_stats(cfg)[0]


def gen_theory(cfg: GenConfig) -> TheoryQuery:
    """A bare random theory (no rejection), for satisfiability suites."""
    rng = random.Random(cfg.seed)
    names = var_names(cfg.n_vars)
    if cfg.event_class == "CP" or cfg.fragment == "CIP":
        pool = cp_pool(rng, names)
    else:
        pool = event_pool(rng, cfg, names)
    theory = [rand_outer(rng, pool, cfg.depth, cfg.granularity) for _ in range(cfg.theory_size)]
    return TheoryQuery(tuple(names), tuple(theory))


def rand_complete_pit(rng: random.Random, varset: Sequence[str], g: int, corrupt: float = 0.15) -> PIT:
    """A complete PIT over ``varset``; with probability ``corrupt`` a broken one."""
    n = len(varset)
    weights = rand_distribution(rng, 1 << n, g, support=rng.randint(1, 1 << n))
    lits = []
    for w, c in sorted(weights.items()):
        members = world_members(varset, w)
        term = and_all([Var(v) if v in members else Not(Var(v)) for v in varset])
        lits += [PIL(term, ">=", c), PIL(term, "<=", c)]
    if rng.random() < corrupt and lits:
        k = rng.randrange(3)
        if k == 0 and len(lits) > 2:
            lits = lits[2:]  # mass no longer sums to 1
        elif k == 1:
            lam = lits[0]
            lits[0] = PIL(lam.event, ">", lam.bound) if lam.bound < 1 else PIL(lam.event, "<", lam.bound)
        else:
            lam = lits[0]
            lits[1] = PIL(lam.event, "<=", min(Fraction(1), lam.bound + Fraction(1, g)))
    return PIT(tuple(lits))


def rand_pit(rng: random.Random, P: AbductionProblem, max_lits: int = 2) -> PIT:
    lits = []
    for _ in range(rng.randint(1, max_lits)):
        h = rng.choice(P.hypotheses)
        op = rng.choice(OPS)
        c = rng.choice(P.values)
        if op == ">" and c == 1:
            op = ">="
        lits.append(PIL(h, op, c))
    return PIT(tuple(dict.fromkeys(lits)))


def rand_lp(rng: random.Random) -> LinSystem:
    n = rng.randint(1, 4)
    keys = [("x", i) for i in range(n)]
    rows = []
    for _ in range(rng.randint(1, 6)):
        coeffs = {k: Fraction(rng.randint(-3, 3)) for k in keys if rng.random() < 0.7}
        rel = rng.choice((">=", ">=", ">", "="))
        rows.append(LinConstraint.make(coeffs, Fraction(rng.randint(-4, 4), rng.randint(1, 2)), rel))
    nonneg = {k for k in keys if rng.random() < 0.5}
    return LinSystem(rows, nonneg)


# ---------------------------------------------------------------- Łukasiewicz lifting


def lift_luk_ap(phi: Sequence[Formula], chi: Formula, hyps: Sequence[LCmp], variables: Sequence[str] | None = None) -> AbductionProblem:
    """FP problem ⟨Φ^Pr, χ^Pr, Var[H], {0,1}⟩ of a Łukasiewicz abduction problem."""
    theory = [fragments.lift_luk_formula(f) for f in phi]
    obs = fragments.lift_luk_formula(chi)
    hvars = list(dict.fromkeys(h.name for h in hyps))
    if variables is None:
        used = formula_vars(list(phi) + [chi]) | set(hvars)
        variables = sorted(used)
    return AbductionProblem(tuple(variables), tuple(theory), obs, tuple(Var(v) for v in hvars), 1)


def lift_luk_solution(tau: Sequence[LCmp]) -> PIT:
    return PIT(tuple(PIL(Var(h.name), h.op, h.bound) for h in tau))


def luk_recognize(phi: Sequence[Formula], chi: Formula, tau: Sequence[LCmp]) -> bool:
    """τ is an Ł-solution: Φ ∪ τ satisfiable and Φ ∪ τ ⊨ χ."""
    base = list(phi) + list(tau)
    return luk_sat(base).sat and luk_entails(base, chi)


# ---------------------------------------------------------------- cross-checking


@dataclass
class Disagreement:
    seed: int
    detail: str
    repro: str = ""


@dataclass
class Summary:
    suite: str
    instances: int = 0
    agreements: int = 0
    disagreements: list = field(default_factory=list)
    witness_checks: int = 0
    witness_failures: int = 0
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.disagreements and self.witness_failures == 0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        d["seconds"] = round(self.seconds, 3)
        return d


class _Run:
    def __init__(self, suite: str, out_dir: Path | None):
        self.summary = Summary(suite)
        self.out_dir = out_dir
        self.attempts = 0
        self.accepted = 0

    def agree(self, same: bool, seed: int, detail: str, repro_text: str, positive: bool | None = None) -> None:
        self.summary.instances += 1
        if positive:
            # how many instances had a positive verdict, so vacuous suites show up
            self.summary.extra["positive"] = self.summary.extra.get("positive", 0) + 1
        if same:
            self.summary.agreements += 1
            return
        path = ""
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            p = self.out_dir / f"{self.summary.suite}-{seed}.fp"
            p.write_text(f"# {self.summary.suite} disagreement, seed {seed}\n# {detail}\n" + repro_text)
            path = str(p)
        self.summary.disagreements.append(Disagreement(seed, detail, path))

    def witness(self, ok: bool) -> None:
        self.summary.witness_checks += 1
        if not ok:
            self.summary.witness_failures += 1

    def gen(self, cfg: GenConfig):
        P, st = gen_problem_with_stats(cfg)
        self.attempts += st.attempts
        self.accepted += st.accepted
        return P


def _lp_text(system: LinSystem) -> str:
    lines = ["# LP rows (sum of coefficient*variable + constant REL 0):"]
    for r in system.constraints:
        terms = " + ".join(f"{a}*x{k[1]}" for k, a in r.coeffs) or "0"
        lines.append(f"#   {terms} + {r.const} {r.rel} 0")
    lines.append("# nonneg: " + " ".join(f"x{k[1]}" for k in sorted(system.nonneg)))
    lines.append("vars: x;")
    lines.append("theory {")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _suite_decide_vs_fm(run: _Run, seed: int, n: int) -> None:
    for i in range(n):
        s = seed + i
        system = rand_lp(random.Random(s))
        a = simplex.feasible(system)
        b = fourier_motzkin.feasible(system)
        for res in (a, b):
            if res.feasible:
                run.witness(system.check(res.point))
        run.agree(a.feasible == b.feasible, s, f"simplex={a.feasible} fm={b.feasible}", _lp_text(system), a.feasible)


def _suite_sat_vs_exhaustive(run: _Run, seed: int, n: int) -> None:
    for i in range(n):
        s = seed + i
        rng = random.Random(s)
        cfg = GenConfig(seed=s, n_vars=rng.randint(1, 2), depth=2, theory_size=rng.randint(1, 2), granularity=4)
        T = gen_theory(cfg)
        a = fp_sat(T.theory, T.variables)
        b, model = fp_sat_exhaustive(T.theory, T.variables)
        if a.sat:
            run.witness(all(eval_fp(a.witness, g) == 1 for g in T.theory))
        if b:
            run.witness(all(eval_fp(model, g) == 1 for g in T.theory))
        run.agree(a.sat == b, s, f"fp_sat={a.sat} exhaustive={b}", render_problem(T), a.sat)


def _suite_fullrec(run: _Run, seed: int, n: int) -> None:
    from .semantics import check_complete

    for i in range(n):
        s = seed + i
        rng = random.Random(s)
        cfg = GenConfig(seed=s, n_vars=rng.randint(1, 3), depth=2, theory_size=rng.randint(1, 2), granularity=rng.choice((2, 4, 5)))
        P = run.gen(cfg)
        theta = rand_complete_pit(rng, P.varset, P.granularity)
        fast = abduce.recognize_full(P, theta).verdict
        if check_complete(theta, P.varset, P.granularity).ok:
            pils = [lam.to_formula() for lam in theta.literals]
            ent = fp_entails(list(P.theory) + pils, P.observation, mode="consistent", varset=P.varset)
            slow = ent.holds
            run.witness(fp_sat(pils, P.varset).sat)  # complete PITs are always satisfiable
        else:
            slow = False
        text = render_problem(P) + f"# theta: {render(theta)}\n"
        run.agree(fast == slow, s, f"recognize_full={fast} decide={slow}", text, fast)


def _suite_psi_gamma(run: _Run, seed: int, n: int) -> None:
    for i in range(n):
        s = seed + i
        rng = random.Random(s)
        cfg = GenConfig(seed=s, n_vars=rng.randint(2, 4), depth=2, theory_size=rng.randint(1, 3), granularity=4, fragment="CIP")
        T = gen_theory(cfg)
        psi = fragments.build_psi_gamma(T.theory)
        a = luk_sat(psi.formulas)
        b = fp_sat(T.theory, T.variables)
        if a.sat:
            values = {e: a.witness.get(name, Fraction(0)) for e, name in psi.atom_map.items()}
            try:
                model = fragments.build_monotone_model(values, T.variables)
                run.witness(all(eval_fp(model, g) == 1 for g in T.theory))
            except (ValueError, AssertionError):
                run.witness(False)
        run.agree(a.sat == b.sat, s, f"luk(psi)={a.sat} fp_sat={b.sat}", render_problem(T), b.sat)


def pil_grid() -> list[PIL]:
    p, q = Var("p"), Var("q")
    events = [p, q, And((p, q)), Or((p, q))]
    bounds = [Fraction(k, 4) for k in range(5)]
    return [PIL(e, op, c) for e in events for c in bounds for op in OPS if not (op == ">" and c == 1)]


def _suite_pil_fast(run: _Run, seed: int, n: int) -> None:
    grid = pil_grid()
    vs = ["p", "q"]
    valid = {}
    for lam in grid:
        f = lam.to_formula()
        v = "unsat" if not fp_sat([f], vs).sat else "valid" if fp_entails([], f, varset=vs).holds else "contingent"
        valid[lam] = v
        fast = fragments.pil_validity_fast(lam)
        run.agree(fast == v, 0, f"validity {render(f)}: fast={fast} decide={v}", f"vars: p q;\ntheory {{\n  {render(f)}\n}}\n")
    for a in grid:
        for b in grid:
            ent = fp_entails([a.to_formula()], b.to_formula(), varset=vs).holds
            fast = fragments.pil_entailment_fast(a, b)
            text = f"vars: p q;\ntheory {{\n  {render(a.to_formula())}\n}}\nobs: {render(b.to_formula())};\n"
            run.agree(fast == ent, 0, f"entailment: fast={fast} decide={ent}", text)
            inc = not fp_sat([a.to_formula(), b.to_formula()], vs).sat
            fast_inc = fragments.pil_incompatible_fast(a, b)
            run.agree(fast_inc == inc, 0, f"incompatible: fast={fast_inc} decide={inc}", text)


def _suite_spcf(run: _Run, seed: int, n: int) -> None:
    for i in range(n):
        s = seed + i
        rng = random.Random(s)
        cfg = GenConfig(seed=s, n_vars=rng.randint(2, 3), theory_size=rng.randint(1, 3), granularity=rng.choice((2, 3, 4)), fragment="SPCF")
        P = run.gen(cfg)
        fast = fragments.spcf_exists_sufficient(P)
        slow = abduce.exists_sufficient(P)
        if fast is not None:
            run.witness(abduce.recognize_sufficient(P, fast).verdict)
            PH = fragments.spcf_to_ihsb(P)
            closure, _ = fragments.horn_closure(PH.clauses, [PH.var_of(lam) for lam in fast.literals])
            try:
                model = fragments.ihsb_witness_to_model(closure, P, PH)
                run.witness(all(eval_fp(model, g) == 1 for g in P.theory))
            except fragments.FragmentError:
                run.witness(False)
        if slow is not None:
            run.witness(abduce.recognize_sufficient(P, slow).verdict)
        text = render_problem(P)
        run.agree((fast is None) == (slow is None), s, f"spcf={fast and render(fast)} generic={slow and render(slow)}", text, slow is not None)


def _suite_psc(run: _Run, seed: int, n: int) -> None:
    splits = 0
    for i in range(n):
        s = seed + i
        rng = random.Random(s)
        cfg = GenConfig(seed=s, n_vars=rng.randint(2, 4), theory_size=rng.randint(1, 3), granularity=rng.choice((2, 4, 5)), fragment="PSC")
        P = run.gen(cfg)
        eta = rand_pit(rng, P)
        stats: dict = {}
        fast = fragments.psc_recognize(P, eta, stats)
        splits += stats["splits"]
        rep = abduce.recognize_sufficient(P, eta)
        if rep.verdict:
            run.witness(all(eval_fp(rep.evidence["model"], g) == 1 for g in P.theory))
        text = render_problem(P) + f"# eta: {render(eta)}\n"
        run.agree(fast == rep.verdict, s, f"psc={fast} generic={rep.verdict}", text, rep.verdict)
    run.summary.extra["case_splits"] = splits


def _suite_prap(run: _Run, seed: int, n: int) -> None:
    for i in range(n):
        s = seed + i
        rng = random.Random(s)
        frag = "PrAP-distribution" if rng.random() < 0.3 else "PrAP"
        cfg = GenConfig(seed=s, n_vars=rng.randint(2, 4), theory_size=rng.randint(1, 2), granularity=rng.choice((2, 4, 5)), fragment=frag)
        P = run.gen(cfg)
        text = render_problem(P)
        agree, detail = True, ""
        for tau in prap.candidate_terms(P):
            a = prap.prap_recognize(P, tau, route="lp")
            b = prap.prap_recognize_fp(P, tau)
            c = prap.prap_recognize(P, tau, route="distribution") if prap.is_distribution(P) else a
            if a:
                m = prap.coherent_witness(P, tau)
                body = And((P.phi, tau))
                ok = m is not None and conditional_probability(m, P.observation, body) == 1
                run.witness(ok and measure_of(m, body) <= measure_of(m, P.observation))
            if not a == b == c:
                agree, detail = False, f"term {render(tau)}: lp={a} fp={b} distribution={c}"
                break
        run.agree(agree, s, detail, text, bool(prap.prap_exists(P)))


def _suite_lift(run: _Run, seed: int, n: int) -> None:
    """Ł-entailment of random Φ, χ against FP-entailment of their lifts."""
    for i in range(n):
        s = seed + i
        rng = random.Random(s)
        names = var_names(rng.randint(1, 3))
        phi = [rand_luk(rng, names, rng.randint(1, 2), 4) for _ in range(rng.randint(0, 2))]
        chi = rand_luk(rng, names, rng.randint(1, 2), 4)
        lifted = [fragments.lift_luk_formula(f) for f in phi]
        lchi = fragments.lift_luk_formula(chi)
        a = luk_entails(phi, chi)
        b = fp_entails(lifted, lchi, varset=names)
        if b.countermodel is not None:
            run.witness(all(eval_fp(b.countermodel, g) == 1 for g in lifted) and eval_fp(b.countermodel, lchi) != 1)
        sat_l = luk_sat(phi + [chi])
        sat_f = fp_sat(lifted + [lchi], names)
        if sat_l.sat:
            run.witness(all(eval_luk(sat_l.witness, f) == 1 for f in phi + [chi]))
        exact, _ = luk_sat_exhaustive(phi + [chi]) if i % 4 == 0 else (sat_l.sat, None)
        body = "".join(f"  {render(f)}\n" for f in lifted)
        text = f"vars: {' '.join(names)};\ntheory {{\n{body}}}\nobs: {render(lchi)};\n"
        same = a == b.holds and sat_l.sat == sat_f.sat == exact
        detail = f"luk_entails={a} fp_entails(lift)={b.holds} luk_sat={sat_l.sat} fp_sat(lift)={sat_f.sat} exhaustive={exact}"
        run.agree(same, s, detail, text, a)


_SUITES = {
    "decide-vs-fm": _suite_decide_vs_fm,
    "sat-vs-exhaustive": _suite_sat_vs_exhaustive,
    "fullrec-vs-decide": _suite_fullrec,
    "psi-gamma": _suite_psi_gamma,
    "pil-fast": _suite_pil_fast,
    "spcf-vs-generic": _suite_spcf,
    "psc-vs-generic": _suite_psc,
    "prap-routes": _suite_prap,
    "lift-luk": _suite_lift,
}


def crosscheck(suite: str, n: int | None = None, seed: int = 0, out_dir: str | Path | None = None) -> Summary:
    """Run one suite over ``n`` seeded instances (seeds seed, seed+1, ...)."""
    if suite not in _SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    n = DEFAULT_COUNTS[suite] if n is None else n
    run = _Run(suite, Path(out_dir) if out_dir is not None else None)
    t0 = time.perf_counter()
    _SUITES[suite](run, seed, n)
    run.summary.seconds = time.perf_counter() - t0
    if run.attempts:
        run.summary.extra["generator_attempts"] = run.attempts
        run.summary.extra["generator_sat_accepted"] = run.accepted
        run.summary.extra["bias_ratio"] = round(run.accepted / run.attempts, 3)
    return run.summary


__all__ = [
    "FRAGMENTS",
    "SUITES",
    "GenConfig",
    "GenStats",
    "Summary",
    "crosscheck",
    "gen_problem",
    "gen_problem_with_stats",
    "gen_theory",
    "lift_luk_ap",
    "lift_luk_solution",
    "luk_recognize",
    "pil_grid",
    "rand_complete_pit",
]
