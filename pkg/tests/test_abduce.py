import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load, load_pit
from fpabd import harness
from fpabd.abduce import (
    candidate_pits,
    concise_limit,
    exists_concise_full,
    exists_sufficient,
    next_terms,
    next_weakenings,
    recognize_cem,
    recognize_full,
    recognize_minimal,
    recognize_sufficient,
    relax_value,
)
from fpabd.decide import fp_entails
from fpabd.formulas import PIL, PIT, AbductionProblem, And, Var, parse_pit, parse_problem, render
from fpabd.semantics import ProbModel, entropy, eval_fp, model_to_pit

F = Fraction
a, b, c, p, s, w = (Var(n) for n in "abcpsw")
SW = And((s, w))


def tiny_problem(seed: int) -> AbductionProblem:
    return harness.gen_problem(harness.GenConfig(seed=seed, n_vars=2, granularity=2, theory_size=1))


def brute_full_solutions(P: AbductionProblem):
    """Every complete PIT whose model satisfies Γ and δ, support within the concise bound."""
    vs = P.varset
    n = P.granularity
    worlds = 1 << len(vs)
    for units in itertools.product(range(n + 1), repeat=worlds):
        if sum(units) != n or sum(1 for u in units if u) > concise_limit(P):
            continue
        m = ProbModel.from_weights(vs, {k: F(u, n) for k, u in enumerate(units)})
        if all(eval_fp(m, g) == 1 for g in list(P.theory) + [P.observation]):
            yield model_to_pit(m)


class TestRecognizeSufficient:
    def test_eta_rain(self, rain):
        rep = recognize_sufficient(rain, load_pit("eta_rain.fp", rain))
        assert rep.verdict
        assert [t["verdict"] for t in rep.trace] == ["SAT", "UNSAT"]

    @pytest.mark.parametrize("name", ["eta1", "eta2", "eta3"])
    def test_example_four_pits_solve(self, rain, name):
        # exact decide accepts all three; the hand proof is in the decision ledger
        assert recognize_sufficient(rain, load_pit(f"{name}.fp", rain)).verdict

    def test_bound_outside_values(self, rain):
        eta = parse_pit("(>= (pr w) 67/200)", rain.variables)
        rep = recognize_sufficient(rain, eta)
        assert not rep.verdict
        assert "not in V" in rep.reason

    def test_event_outside_hypotheses(self, rain):
        rep = recognize_sufficient(rain, parse_pit("(>= (pr c) 1/2)", rain.variables))
        assert not rep.verdict
        assert "hypothesis" in rep.reason

    def test_inconsistent(self, rain):
        rep = recognize_sufficient(rain, parse_pit("(>= (pr w) 9/10)", rain.variables))
        assert not rep.verdict
        assert rep.reason == "theory and PIT are inconsistent"

    def test_not_entailed_has_countermodel(self, rain):
        rep = recognize_sufficient(rain, parse_pit("(>= (pr w) 1/10)", rain.variables))
        assert rep.reason == "observation not entailed"
        assert eval_fp(rep.evidence["countermodel"], rain.observation) != 1


class TestRecognizeFull:
    def test_corrected_theta(self, rain):
        assert recognize_full(rain, load_pit("theta_rain_corrected.fp", rain)).verdict

    def test_printed_theta_fails_one_formula(self, rain):
        rep = recognize_full(rain, load_pit("theta_rain.fp", rain))
        assert not rep.verdict
        assert rep.reason == "theory formula 3 evaluates to 9/10"

    def test_rain_prime(self, rain_prime):
        assert recognize_full(rain_prime, load_pit("theta_rain_corrected.fp", rain_prime)).verdict
        printed = recognize_full(rain_prime, load_pit("theta_rain.fp", rain_prime))
        assert printed.reason == "theory formula 2 evaluates to 9/10"

    def test_eta_not_complete(self, rain):
        rep = recognize_full(rain, load_pit("eta_rain.fp", rain))
        assert not rep.verdict
        assert rep.reason.startswith("not complete")

    def test_no_decide_calls(self, rain, monkeypatch):
        import fpabd.abduce as mod

        def boom(*args, **kwargs):
            raise AssertionError("decide called")

        monkeypatch.setattr(mod, "fp_sat", boom)
        assert recognize_full(rain, load_pit("theta_rain_corrected.fp", rain)).verdict

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_agrees_with_decide(self, seed):
        rng = random.Random(seed)
        P = harness.gen_problem(harness.GenConfig(seed=seed, n_vars=2, granularity=4))
        theta = harness.rand_complete_pit(rng, P.varset, P.granularity)
        fast = recognize_full(P, theta).verdict
        complete = harness.classify(theta, P.varset, P.granularity).is_complete_PIT
        ent = fp_entails(list(P.theory) + [lam.to_formula() for lam in theta.literals], P.observation, "consistent", P.varset)
        assert fast == (complete and ent.holds)
        if complete:
            # complete PITs are always satisfiable on their own
            assert harness.fp_sat([lam.to_formula() for lam in theta.literals], P.varset).sat


class TestNextTerms:
    def test_rain_hypotheses(self):
        assert next_terms([s, w, SW], SW) == ([s, w], [])
        assert next_terms([s, w, SW], s) == ([], [SW])

    def test_singleton(self):
        assert next_terms([s], s) == ([], [])

    def test_intermediate_blocks(self):
        ab, abc = And((a, b)), And((a, b, c))
        assert next_terms([a, ab, abc], abc) == ([ab], [])

    def test_not_member(self):
        with pytest.raises(ValueError):
            next_terms([s], w)


class TestWeakenings:
    def test_value_steps(self):
        assert relax_value(PIL(p, ">=", F(2, 5)), 5) == PIL(p, ">", F(1, 5))
        assert relax_value(PIL(p, ">", F(2, 5)), 5) == PIL(p, ">=", F(2, 5))
        assert relax_value(PIL(p, "<=", F(2, 5)), 5) == PIL(p, "<", F(3, 5))
        assert relax_value(PIL(p, "<", F(2, 5)), 5) == PIL(p, "<=", F(2, 5))
        assert relax_value(PIL(p, ">=", F(0)), 5) is None
        assert relax_value(PIL(p, "<=", F(1)), 5) is None

    def test_upper_bound_moves_to_stronger_term(self, rain):
        eta0 = load_pit("eta0.fp", rain)
        target = PIT((PIL(w, ">=", F(2, 5)), PIL(s, ">=", F(2, 5)), PIL(SW, "<=", F(2, 5))))
        outs = next_weakenings(eta0, rain.hypotheses, rain.granularity)
        assert target in outs
        assert len(outs) <= len(eta0.literals) * (len(rain.hypotheses) + 1)

    def test_boundary_only_swaps(self):
        outs = next_weakenings(PIT((PIL(SW, ">=", F(0)),)), [s, w, SW], 4)
        assert outs == [PIT((PIL(s, ">=", F(0)),)), PIT((PIL(w, ">=", F(0)),))]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_each_step_is_strictly_weaker(self, seed):
        rng = random.Random(seed)
        H = [p, Var("q"), And((p, Var("q")))]
        n = rng.choice((2, 3, 4))
        lam = PIL(rng.choice(H), rng.choice((">=", ">", "<=", "<")), F(rng.randint(0, n), n))
        if (lam.op == ">" and lam.bound == 1) or (lam.op == "<" and lam.bound == 0):
            return
        # a valid PIL such as Pr(p∧q) >= 0 has only equivalent weakenings
        valid = fp_entails([], lam.to_formula(), varset=["p", "q"]).holds
        for cand in next_weakenings(PIT((lam,)), H, n):
            (mu,) = cand.literals
            assert fp_entails([lam.to_formula()], mu.to_formula(), varset=["p", "q"]).holds
            if not valid:
                assert not fp_entails([mu.to_formula()], lam.to_formula(), varset=["p", "q"]).holds


class TestMinimal:
    def test_eta_rain_not_minimal(self, rain):
        eta = load_pit("eta_rain.fp", rain)
        rep = recognize_minimal(rain, eta)
        assert not rep.verdict
        d = rep.evidence["defeater"]
        assert recognize_sufficient(rain, d).verdict
        assert fp_entails([lam.to_formula() for lam in eta.literals], d.to_formula(), varset=rain.varset).holds

    def test_eta1_not_minimal(self, rain):
        # eta1 is a solution, and a one-step weakening still solves
        rep = recognize_minimal(rain, load_pit("eta1.fp", rain))
        assert not rep.verdict
        assert rep.reason == "a strictly weaker PIT is also a solution"

    def test_non_solution(self, rain):
        rep = recognize_minimal(rain, parse_pit("(>= (pr w) 1/10)", rain.variables))
        assert not rep.verdict
        assert rep.reason.startswith("not a sufficient solution")

    def test_single_hypothesis_minimal(self):
        P = parse_problem("vars: p; granularity: 2; theory {} obs: (>= (pr p) 1/2); hyps: p;")
        assert recognize_minimal(P, parse_pit("(>= (pr p) 1/2)", ["p"])).verdict

    def test_permutation_stable(self, rain):
        eta = load_pit("eta_min.fp", rain)
        flipped = PIT(tuple(reversed(eta.literals)))
        P2 = AbductionProblem(rain.variables, rain.theory, rain.observation, tuple(reversed(rain.hypotheses)), rain.granularity)
        assert recognize_minimal(rain, eta).verdict == recognize_minimal(P2, flipped).verdict


class TestExistsSufficient:
    def test_rain(self, rain):
        eta = exists_sufficient(rain)
        assert eta is not None
        assert recognize_sufficient(rain, eta).verdict
        assert recognize_sufficient(rain, load_pit("eta0.fp", rain)).verdict

    def test_rain_prime_none(self, rain_prime):
        assert exists_sufficient(rain_prime) is None

    def test_only_w(self):
        # Pr(w) >= 2/5 alone forces the observation; see the decision ledger
        P = load("rain_minus.fp")
        eta = exists_sufficient(P)
        assert render(eta) == "(>= (pr w) 2/5)"
        assert recognize_sufficient(P, eta).verdict

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_against_enumeration(self, seed):
        P = harness.gen_problem(harness.GenConfig(seed=seed, n_vars=2, granularity=2, theory_size=1))
        found = exists_sufficient(P)
        if found is not None:
            assert recognize_sufficient(P, found).verdict
        else:
            assert not any(recognize_sufficient(P, eta).verdict for eta in candidate_pits(P))


class TestConciseFull:
    def test_rain(self, rain):
        theta = exists_concise_full(rain)
        assert theta is not None
        assert recognize_full(rain, theta).verdict
        assert len(theta.literals) <= 2 * len(rain.events()) + 2

    def test_point_mass(self):
        P = parse_problem("vars: p; granularity: 1; theory {} obs: (pr p); hyps: p;")
        assert render(exists_concise_full(P)) == "(approx (pr p) 1)"

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_tiny_brute_force(self, seed):
        P = tiny_problem(seed)
        found = exists_concise_full(P)
        brute = list(brute_full_solutions(P))
        assert (found is not None) == bool(brute)
        if found is not None:
            assert recognize_full(P, found).verdict


class TestCem:
    def test_unique_candidate(self):
        P = parse_problem("vars: p; granularity: 1; theory {} obs: (pr p); hyps: p;")
        assert recognize_cem(P, parse_pit("(approx (pr p) 1)", ["p"])).verdict

    def test_corrected_theta_defeated(self, rain):
        theta = load_pit("theta_rain_corrected.fp", rain)
        rep = recognize_cem(rain, theta, hunt_granularity=20)
        assert not rep.verdict
        d = rep.evidence["defeater"]
        assert recognize_full(rain, d).verdict
        assert entropy(d) > entropy(theta)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_tiny_argmax(self, seed):
        P = tiny_problem(seed)
        sols = list(brute_full_solutions(P))
        if not sols:
            return
        best = max(entropy(t) for t in sols)
        for theta in sols[:3]:
            expected = entropy(theta) >= best - 1e-9
            assert recognize_cem(P, theta).verdict == expected
