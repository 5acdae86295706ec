import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load, load_pit
from fpabd import harness
from fpabd.decide import fp_entails
from fpabd.formulas import (
    PIL,
    PIT,
    AbductionProblem,
    And,
    FormulaError,
    Or,
    Pr,
    PrAP,
    TheoryQuery,
    Var,
    canonical_formula,
    canonical_pit,
    classify,
    events_of,
    normalize_negated_events,
    parse_inner,
    parse_luk,
    parse_outer,
    parse_pit,
    parse_problem,
    render,
    render_problem,
)

p, q, r, s, w = (Var(n) for n in "pqrsw")


class TestParse:
    def test_rain_problem(self, rain):
        assert isinstance(rain, AbductionProblem)
        assert len(rain.theory) == 6
        assert rain.granularity == 100
        assert render(rain.observation) == "(>= (pr (and c r)) 1/5)"
        assert rain.hypotheses == (s, w, And((s, w)))

    def test_declaration_order_kept(self, rain):
        assert rain.variables == ("c", "r", "s", "w", "x")

    def test_empty_theory_is_query(self):
        q_ = parse_problem("vars: p; theory {} obs: (pr p);")
        assert isinstance(q_, TheoryQuery)
        assert q_.theory == ()
        assert q_.observation == Pr(p)

    def test_prap_file(self, pqr):
        assert isinstance(pqr, PrAP)
        assert [c for _, c in pqr.assignment] == [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)]
        assert pqr.observation == s

    def test_constant_out_of_range(self):
        with pytest.raises(FormulaError, match="constant outside"):
            parse_problem("vars: q; theory { (>= (pr q) 3/2) }")

    def test_undeclared_variable(self):
        with pytest.raises(FormulaError, match="undeclared"):
            parse_problem("vars: p; theory { (pr z) }")

    def test_hypothesis_outside_theory_vars(self):
        with pytest.raises(FormulaError, match="hypothesis"):
            parse_problem("vars: p q; granularity: 2; theory { (pr p) } obs: (pr p); hyps: q;")

    def test_error_position(self):
        with pytest.raises(FormulaError) as exc:
            parse_problem("vars: p;\ntheory { (pr p ")
        assert exc.value.line == 2

    def test_comments_ignored(self):
        text = "# header\nvars: p; # trailing\ntheory { (pr p) }\n"
        assert parse_problem(text).theory == (Pr(p),)

    def test_approx_is_expanded(self):
        f = parse_outer("(approx (pr p) 1/2)", ["p"])
        pit = parse_pit("(approx (pr p) 1/2)", ["p"])
        assert "approx" not in repr(f)
        assert pit.literals == (PIL(p, ">=", Fraction(1, 2)), PIL(p, "<=", Fraction(1, 2)))

    def test_luk_comparison(self):
        f = parse_luk("(impl (>= p 1/2) (neg q))", ["p", "q"])
        assert render(f) == "(impl (>= p 1/2) (neg q))"


class TestRender:
    def test_theta_rain_round_trip(self, rain):
        theta = load_pit("theta_rain.fp", rain)
        text = render(theta)
        assert parse_pit(text, rain.variables) == theta
        # canonical form: rendering is a fixpoint
        assert render(parse_pit(text, rain.variables)) == text

    def test_problem_round_trip(self, rain):
        assert parse_problem(render_problem(rain)) == rain

    @pytest.mark.parametrize(
        "text",
        [
            "(pr p)",
            "(neg (delta (impl (pr r) (pr s))))",
            "(oplus (pr (and p q)) (< (pr (or p (not q))) 1/3))",
            "(odot (>= (pr q) 0) (<= (pr q) 1))",
        ],
    )
    def test_fixpoint(self, text):
        f = parse_outer(text, ["p", "q", "r", "s"])
        assert render(parse_outer(render(f), ["p", "q", "r", "s"])) == render(f)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10**6))
    def test_random_outer_round_trip(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(3)
        events = [harness.rand_inner(rng, names, 2) for _ in range(3)]
        f = harness.rand_outer(rng, events, 3, 6)
        # structural equality sorts commutative children by variable order
        order = {v: k for k, v in enumerate(names)}
        back = parse_outer(render(f), names)
        assert back == canonical_formula(f, order)
        assert render(back) == render(canonical_formula(f, order))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_random_luk_round_trip(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(3)
        f = harness.rand_luk(rng, names, 3, 5)
        back = parse_luk(render(f), names)
        assert back == f
        assert render(back) == render(f)


class TestEventsOf:
    def test_no_subformula_closure(self):
        f = parse_outer("(impl (pr (and p q)) (pr r))", ["p", "q", "r"])
        assert events_of(f) == [And((p, q)), r]

    def test_single(self):
        assert events_of(Pr(p)) == [p]

    def test_rain_with_observation(self, rain):
        evs = events_of(list(rain.theory) + [rain.observation])
        # hand walk over the six formulas and the observation
        expected = ["(and s w)", "w", "r", "s", "(or c r)", "x", "c", "(and c r)"]
        assert [render(e) for e in evs] == expected

    def test_deduplicated(self):
        f = parse_outer("(odot (pr p) (>= (pr p) 1/2))", ["p"])
        assert events_of(f) == [p]


class TestNormalizeNegated:
    def test_psc_rewrite(self):
        f = parse_outer("(impl (pr (and (not r) (not s))) (pr r))", ["r", "s"])
        assert render(normalize_negated_events(f)) == "(oplus (pr (or r s)) (pr r))"

    def test_fixpoint(self):
        assert normalize_negated_events(Pr(p)) == Pr(p)

    def test_double_negation(self):
        f = parse_outer("(pr (not (not p)))", ["p"])
        assert normalize_negated_events(f) == Pr(p)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10**6))
    def test_preserves_equivalence(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(rng.randint(1, 3))
        events = [harness.rand_inner(rng, names, 2) for _ in range(2)]
        f = harness.rand_outer(rng, events, 2, 4)
        g = normalize_negated_events(f)
        assert fp_entails([f], g, varset=names).holds
        assert fp_entails([g], f, varset=names).holds


class TestClassify:
    def test_rain_not_cip(self, rain):
        assert not classify(rain).is_CIP

    def test_rain_prime_cip(self, rain_prime):
        rep = classify(rain_prime)
        assert rep.is_CIP
        # the hypotheses s and w share no chain, so the problem's events are not CP
        assert not rep.is_CP_events

    def test_theta_rain_complete(self, rain):
        theta = load_pit("theta_rain.fp", rain)
        rep = classify(theta, rain.varset, rain.granularity)
        assert rep.is_PIT
        assert rep.is_complete_PIT

    def test_eta_rain_not_complete(self, rain):
        eta = load_pit("eta_rain.fp", rain)
        assert not classify(eta, rain.varset, rain.granularity).is_complete_PIT

    def test_single_pil(self):
        assert classify(parse_outer("(>= (pr p) 1/2)", ["p"])).is_PIL

    def test_traffic_spcf(self, traffic):
        rep = classify(traffic)
        assert rep.is_SPCF_theory
        assert rep.is_SPCF_AP
        assert rep.is_PIC_theory

    def test_psc_fixture(self):
        rep = classify(load("precipitation_psc.fp"))
        assert rep.is_PSC_theory and rep.is_PSC_AP

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6))
    def test_complete_pit_is_distribution(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(rng.randint(1, 3))
        pit = harness.rand_complete_pit(rng, names, 4)
        if not classify(pit, names, 4).is_complete_PIT:
            return
        values = {}
        for lam in pit.literals:
            values.setdefault(lam.event, lam.bound)
        assert sum(values.values()) == 1
        evs = list(values)
        for i, a in enumerate(evs):
            for b in evs[i + 1:]:
                # two distinct full terms over the same variables clash on a literal
                la = {x for x in a.args} if isinstance(a, And) else {a}
                lb = {x for x in b.args} if isinstance(b, And) else {b}
                assert la != lb


def test_canonical_pit_merges_bounds():
    pit = PIT((PIL(p, ">=", Fraction(1, 4)), PIL(p, ">", Fraction(1, 2)), PIL(p, "<=", Fraction(1))))
    merged = canonical_pit(pit, {"p": 0})
    assert merged.literals == (PIL(p, ">", Fraction(1, 2)), PIL(p, "<=", Fraction(1)))


def test_inner_or_parse():
    assert parse_inner("(or p (not q))", ["p", "q"]) == Or((p, parse_inner("(not q)", ["q"])))
