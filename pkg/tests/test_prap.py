from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpabd import harness
from fpabd.formulas import And, PrAP, Var, parse_inner, parse_problem, render
from fpabd.prap import (
    candidate_terms,
    coherent_witness,
    is_coherent,
    is_distribution,
    prap_exists,
    prap_preferred,
    prap_preferred_all,
    prap_preferred_fp,
    prap_recognize,
    prap_recognize_fp,
    prap_solutions,
    to_fp_counterpart,
)
from fpabd.semantics import conditional_probability, measure_of

F = Fraction


def term(P: PrAP, text: str):
    return parse_inner(text, list(P.variables))


class TestRecognize:
    @pytest.mark.parametrize("text, expected", [("p", True), ("(and q r)", True), ("q", False), ("r", False)])
    def test_pqr(self, pqr, text, expected):
        tau = term(pqr, text)
        assert prap_recognize(pqr, tau) is expected
        assert prap_recognize_fp(pqr, tau) is expected

    def test_literal_outside_hypotheses(self, pqr):
        with pytest.raises(ValueError):
            prap_recognize(pqr, term(pqr, "s"))

    def test_zero_mass_rejected(self):
        P = parse_problem("vars: p s; cpl-theory { (or (not p) s) } events { p = 0 } obs: s; hyps: p;")
        assert not prap_recognize(P, Var("p"))
        assert not prap_recognize_fp(P, Var("p"))


class TestPreferred:
    def test_p_preferred(self, pqr):
        assert prap_preferred(pqr, term(pqr, "p"))
        assert prap_preferred_fp(pqr, term(pqr, "p"))

    def test_conjunction_not_preferred(self, pqr):
        # μ(q∧r) ≤ 1/4 < 1/2 = μ(p) in every coherent measure
        assert not prap_preferred(pqr, term(pqr, "(and q r)"))
        assert not prap_preferred_fp(pqr, term(pqr, "(and q r)"))

    def test_solution_list(self, pqr):
        assert [render(t) for t in prap_solutions(pqr)] == ["p", "(and p q)", "(and p r)", "(and q r)", "(and p q r)"]
        assert [render(t) for t in prap_preferred_all(pqr)] == ["p"]
        assert render(prap_exists(pqr)) == "p"


class TestCounterpart:
    def test_pqr(self, pqr):
        assert [render(f) for f in to_fp_counterpart(pqr.assignment)] == [
            "(approx (pr p) 1/2)",
            "(approx (pr q) 1/3)",
            "(approx (pr r) 1/4)",
        ]

    def test_empty(self):
        assert to_fp_counterpart([]) == []
        assert to_fp_counterpart({}) == []


class TestCoherence:
    def test_pqr(self, pqr):
        res = is_coherent(pqr.assignment)
        assert res
        for e, c in pqr.assignment:
            assert measure_of(res.witness, e) == c

    def test_conjunction_above_conjunct(self):
        p, q = Var("p"), Var("q")
        res = is_coherent({And((p, q)): F(3, 5), p: F(1, 2)})
        assert not res
        assert res.witness is None

    def test_full_term_distribution(self):
        P = parse_problem(
            "vars: p q; cpl-theory { (or p q) } events { (and p q) = 1/4 (and p (not q)) = 1/4 "
            "(and (not p) q) = 1/4 (and (not p) (not q)) = 1/4 } obs: q; hyps: q (not p);"
        )
        assert is_distribution(P)
        assert is_coherent(P.assignment)

    def test_partial_not_distribution(self, pqr):
        assert not is_distribution(pqr)


class TestConditional:
    def test_witness_conditions_to_one(self, pqr):
        for tau in prap_solutions(pqr):
            m = coherent_witness(pqr, tau)
            body = And((pqr.phi, tau))
            assert measure_of(m, body) > 0
            assert conditional_probability(m, pqr.observation, body) == 1

    def test_no_witness_for_zero_mass(self):
        P = parse_problem("vars: p s; cpl-theory { (or p s) } events { p = 0 } obs: s; hyps: p;")
        assert coherent_witness(P, Var("p")) is None


class TestExists:
    def test_no_hypotheses(self):
        P = parse_problem("vars: p s; cpl-theory { (or (not p) s) } events { p = 1/2 } obs: s;")
        assert list(candidate_terms(P)) == []
        assert prap_exists(P) is None

    def test_theory_cannot_reach_observation(self):
        P = parse_problem("vars: p s; cpl-theory { (or p s) } events { p = 1/2 } obs: s; hyps: p;")
        assert prap_exists(P) is None

    def test_distribution_fast_path(self):
        P = parse_problem(
            "vars: p q; cpl-theory { (or p q) } events { (and p q) = 1/2 (and p (not q)) = 0 "
            "(and (not p) q) = 1/2 (and (not p) (not q)) = 0 } obs: q; hyps: q (not p);"
        )
        for tau in candidate_terms(P):
            assert prap_recognize(P, tau, route="distribution") == prap_recognize(P, tau, route="lp")

    def test_distribution_route_needs_distribution(self, pqr):
        with pytest.raises(ValueError):
            prap_recognize(pqr, term(pqr, "p"), route="distribution")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_routes_agree(seed, distribution):
    frag = "PrAP-distribution" if distribution else "PrAP"
    P = harness.gen_problem(harness.GenConfig(seed=seed, n_vars=3, theory_size=2, granularity=4, fragment=frag))
    assert is_distribution(P) or not distribution
    for tau in candidate_terms(P):
        a = prap_recognize(P, tau, route="lp")
        assert a == prap_recognize_fp(P, tau)
        if is_distribution(P):
            assert a == prap_recognize(P, tau, route="distribution")
