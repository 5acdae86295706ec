import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_pit
from fpabd import harness
from fpabd.formulas import And, Not, Or, Var, parse_luk, parse_outer, parse_pit, render
from fpabd.fragments import lift_luk_formula
from fpabd.semantics import (
    ProbModel,
    SemanticsError,
    conditional_probability,
    cpl_entails,
    entropy,
    entropy_of_weights,
    eval_fp,
    eval_luk,
    measure_of,
    model_to_pit,
    pit_to_model,
    product_model,
    truth_set,
    world_of,
)

F = Fraction
p, q, s, w, c, r = (Var(n) for n in "pqswcr")

# the two measures over {s, w} that agree on marginals but not on s∧w
MU1 = ProbModel.from_sets("sw", {(): F(1, 4), ("s",): F(1, 4), ("w",): F(1, 4), ("s", "w"): F(1, 4)})
MU2 = ProbModel.from_sets("sw", {(): F(1, 2), ("s", "w"): F(1, 2)})


def rand_model(rng: random.Random, varset, g: int = 6) -> ProbModel:
    return ProbModel.from_weights(varset, harness.rand_distribution(rng, 1 << len(varset), g))


class TestTruthSet:
    def test_conjunction(self):
        assert truth_set(MU1, And((s, w))) == {world_of("sw", "sw")}

    def test_tautology(self):
        assert truth_set(["p", "q"], Or((p, Not(p)))) == {0, 1, 2, 3}

    def test_rain_worlds(self, rain):
        worlds = truth_set(rain.variables, And((c, r)))
        assert len(worlds) == 8
        assert all(w_ & 0b11 == 0b11 for w_ in worlds)

    def test_unknown_variable(self):
        with pytest.raises(SemanticsError):
            truth_set(["p"], q)


class TestMeasure:
    def test_non_truth_functional(self):
        assert measure_of(MU1, And((s, w))) == F(1, 4)
        assert measure_of(MU2, And((s, w))) == F(1, 2)
        for m in (MU1, MU2):
            assert measure_of(m, s) == F(1, 2)
            assert measure_of(m, w) == F(1, 2)

    def test_unknown_variable(self):
        with pytest.raises(SemanticsError):
            measure_of(MU1, p)

    def test_weights_validated(self):
        with pytest.raises(SemanticsError):
            ProbModel.from_weights("p", {0: F(1, 2)})
        with pytest.raises(SemanticsError):
            ProbModel.from_weights("p", {0: F(3, 2), 1: F(-1, 2)})

    def test_conditional(self):
        point = ProbModel.from_sets("pq", {("p", "q"): F(1)})
        uniform = ProbModel.from_weights("pq", {k: F(1, 4) for k in range(4)})
        assert conditional_probability(point, p, q) == 1
        assert conditional_probability(uniform, p, q) == F(1, 2)
        with pytest.raises(SemanticsError):
            conditional_probability(point, p, Not(q))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_additivity_and_complement(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(3)
        m = rand_model(rng, names)
        phi = harness.rand_inner(rng, names, 2)
        assert measure_of(m, Not(phi)) == 1 - measure_of(m, phi)
        worlds = list(range(8))
        rng.shuffle(worlds)
        k = rng.randint(0, 8)
        S, T = set(worlds[:k]), set(worlds[k:])
        weights = m.weights()
        mass = lambda ws: sum((weights.get(x, 0) for x in ws), F(0))
        assert mass(S | T) == mass(S) + mass(T) == 1

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_monotone(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(3)
        a = harness.rand_inner(rng, names, 2)
        b = harness.rand_inner(rng, names, 2)
        if not cpl_entails(a, b, names):
            b = Or((a, b))
        m = rand_model(rng, names)
        assert measure_of(m, a) <= measure_of(m, b)


class TestEvalLuk:
    def test_implication(self):
        assert eval_luk({"p": F(7, 10), "q": F(1, 2)}, parse_luk("(impl p q)")) == F(4, 5)

    def test_delta(self):
        assert eval_luk({"p": F(1)}, parse_luk("(delta p)")) == 1
        assert eval_luk({"p": F(999, 1000)}, parse_luk("(delta p)")) == 0

    def test_crisp(self):
        v = {"p": F(3, 5)}
        assert eval_luk(v, parse_luk("(>= p 1/2)")) == 1
        assert eval_luk(v, parse_luk("(neg (delta (impl p p)))")) == 0

    def test_unvalued(self):
        with pytest.raises(SemanticsError):
            eval_luk({}, parse_luk("(oplus p q)"))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10**6))
    def test_algebra(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(2)
        a = harness.rand_luk(rng, names, 2, 4)
        b = harness.rand_luk(rng, names, 2, 4)
        v = {n: harness.rand_value(rng, 8) for n in names}
        ev = lambda f: eval_luk(v, parse_luk(f))
        A, B = render(a), render(b)
        assert ev(f"(neg (neg {A}))") == ev(A)
        assert ev(f"(neg (oplus {A} {B}))") == ev(f"(odot (neg {A}) (neg {B}))")
        assert (ev(f"(impl {A} {B})") == 1) == (ev(A) <= ev(B))


class TestEvalFp:
    def test_corrected_theta_models_rain(self, rain):
        theta = load_pit("theta_rain_corrected.fp", rain)
        m = pit_to_model(theta, rain.varset, rain.granularity)
        for g in rain.theory:
            assert eval_fp(m, g) == 1
        assert eval_fp(m, rain.observation) == 1

    def test_printed_theta_breaks_one_equivalence(self, rain):
        # Pr(c∨r) = 7/10 but Pr(s∧w) ⊕ Pr(s∧w) = 3/5 under the printed values
        theta = load_pit("theta_rain.fp", rain)
        m = pit_to_model(theta, rain.varset, rain.granularity)
        assert measure_of(m, Or((c, r))) == F(7, 10)
        assert [eval_fp(m, g) for g in rain.theory] == [1, 1, 1, F(9, 10), 1, 1]
        assert eval_fp(m, rain.observation) == 1

    def test_rain_likelier_than_sun(self):
        f = parse_outer("(neg (delta (impl (pr r) (pr s))))", ["r", "s"])
        for pr_r, pr_s in [(F(1, 2), F(1, 4)), (F(1, 4), F(1, 4)), (F(1, 5), F(3, 5))]:
            m = product_model("rs", {"r": pr_r, "s": pr_s})
            assert (eval_fp(m, f) == 1) == (pr_r > pr_s)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6))
    def test_monotone_formula_valid(self, seed):
        m = rand_model(random.Random(seed), "pq")
        assert eval_fp(m, parse_outer("(impl (pr (and p q)) (pr p))", ["p", "q"])) == 1

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10**6))
    def test_product_lift(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(rng.randint(1, 3))
        phi = harness.rand_luk(rng, names, 3, 5)
        v = {n: harness.rand_value(rng, 10) for n in names}
        m = product_model(names, v)
        assert eval_luk(v, phi) == eval_fp(m, lift_luk_formula(phi))


class TestCompletePit:
    def test_theta_rain_model(self, rain):
        theta = load_pit("theta_rain.fp", rain)
        m = pit_to_model(theta, rain.varset, rain.granularity)
        assert sorted(m.weights().values()) == [F(1, 10), F(1, 10), F(3, 10), F(1, 2)]

    def test_point_mass(self):
        theta = parse_pit("(approx (pr (and p)) 1)", ["p"])
        m = pit_to_model(theta, ["p"], 1)
        assert m.weights() == {1: F(1)}

    def test_theta_up_model(self, rain):
        theta = load_pit("theta_up.fp", rain)
        m = pit_to_model(theta, rain.varset, rain.granularity)
        assert sorted(m.weights().values(), reverse=True) == [F(7, 20), F(3, 10), F(3, 20), F(1, 10), F(1, 10)]

    def test_incomplete_rejected(self, rain):
        with pytest.raises(SemanticsError):
            pit_to_model(load_pit("eta_rain.fp", rain), rain.varset, rain.granularity)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_sum_rule(self, seed):
        rng = random.Random(seed)
        names = harness.var_names(3)
        m = rand_model(rng, names, 8)
        theta = model_to_pit(m)
        back = pit_to_model(theta, names, 8)
        assert back == m
        for lam in theta.literals:
            assert measure_of(back, lam.event) == lam.bound
        phi = harness.rand_inner(rng, names, 3)
        direct = measure_of(back, phi)
        summed = sum((lam.bound for lam in theta.literals if lam.op == ">=" and cpl_entails(lam.event, phi, names)), F(0))
        assert direct == summed


class TestEntropy:
    def test_theta_rain(self, rain):
        assert entropy(load_pit("theta_rain.fp", rain)) == pytest.approx(1.685, abs=1e-3)

    def test_theta_up(self, rain):
        assert entropy(load_pit("theta_up.fp", rain)) == pytest.approx(2.126, abs=1e-3)

    def test_uniform_two(self):
        assert entropy_of_weights([F(1, 2), F(1, 2)]) == 1.0

    def test_zero_terms_ignored(self):
        assert entropy_of_weights([F(1), F(0)]) == 0.0
