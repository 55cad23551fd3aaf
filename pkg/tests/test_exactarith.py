"""Field arithmetic, canonical forms, equality modes, and encodings."""

import random
from fractions import Fraction

import pytest

from qbethe.errors import DivisionByZero, PoleAtSample
from qbethe.exactarith import (
    MRat,
    VarContext,
    mrat_equal,
    mrat_equal_report,
    mrat_from_json,
    mrat_to_json,
    mrat_to_latex,
    qscalar_normalize,
    svar,
    tvar,
)

T1, T2, S1 = tvar(1), tvar(2), svar(1)
CTX = VarContext([T1, T2, S1])


def V(v):
    return MRat.var(v, CTX)


def Q(k=1):
    return MRat.q(k, CTX)


class TestQScalar:
    def test_factor_cancellation(self):
        r = qscalar_normalize({2: 1, 0: -1}, {1: 1, 0: -1})
        assert r == qscalar_normalize({1: 1, 0: 1}, 1)

    def test_zero_normal_form(self):
        r = qscalar_normalize(0, {3: 1})
        assert r.is_zero()
        assert r == qscalar_normalize(0, {0: 5})

    def test_content_removal(self):
        r = qscalar_normalize({1: 2, 0: -2}, {0: 4})
        num, den = r.as_pair()
        assert r == qscalar_normalize({1: 1, 0: -1}, {0: 2})
        assert den == {0: 2}

    def test_zero_denominator(self):
        with pytest.raises(DivisionByZero):
            qscalar_normalize({1: 1}, 0)


class TestArithmetic:
    def test_common_denominator_collapse(self):
        a = V(T1) / (V(T1) - V(S1))
        b = V(S1) / (V(T1) - V(S1))
        assert a - b == 1

    def test_field_inverse(self):
        a = (Q(1) * V(T1) - Q(-1) * V(T2)) / (V(T1) - V(T2))
        assert a * a.inverse() == 1
        assert a / a == 1

    def test_gcd_reduction(self):
        r = (V(T1) ** 2 - V(S1) ** 2) / (V(T1) - V(S1))
        assert r == V(T1) + V(S1)
        num, den = r.as_pair()
        assert den == {0: 1}

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            V(T1) / MRat.const(0, CTX)

    def test_field_axioms_spot(self):
        a = V(T1) / (V(T1) - V(S1))
        b = (Q(1) * V(T2) - V(S1)) / V(T2)
        c = MRat.const(Fraction(3, 7), CTX) * V(S1)
        assert (a + b) * c == a * c + b * c
        assert (a - a).is_zero()
        assert a + (b + c) == (a + b) + c

    def test_sum_matches_repeated_add(self):
        parts = [V(T1) / (V(T1) - V(S1)), V(S1) / (V(T2) - V(S1)), Q(2) * V(T2)]
        acc = MRat.const(0, CTX)
        for p in parts:
            acc = acc + p
        assert MRat.sum(parts) == acc


class TestEval:
    def test_spec_value(self):
        y = V(T1) / (V(T1) - V(S1))
        assert y.eval_fraction({T1: 3, S1: 1, T2: 1}, Fraction(5)) == Fraction(3, 2)

    def test_determinism(self):
        f = (Q(1) * V(T1) - Q(-1) * V(S1)) / (V(T1) - V(S1))
        b = {T1: Fraction(7, 3), S1: Fraction(-2, 5), T2: 1}
        assert f.eval_fraction(b, Fraction(4, 9)) == f.eval_fraction(b, Fraction(4, 9))

    def test_pole_detection(self):
        f = 1 / (V(T1) - V(S1))
        with pytest.raises(PoleAtSample):
            f.eval_fraction({T1: 2, S1: 2, T2: 0}, Fraction(3))

    def test_qscalar_eval_keeps_q(self):
        f = (Q(1) * V(T1) - Q(-1) * V(S1)) / V(T1)
        r = f.eval_qscalar({T1: 1, S1: 1, T2: 0})
        assert r == qscalar_normalize({2: 1, 0: -1}, {1: 1})


class TestEquality:
    def test_reflexive_canonical(self):
        z = (V(S1) / V(T1)) * V(T1) / (V(T1) - V(S1))
        assert mrat_equal(z, z, mode="canonical")

    def test_distinct_vars_probabilistic(self):
        rep = mrat_equal_report(V(T1), MRat.var(S1, CTX), mode="probabilistic", trials=20)
        assert rep["equal"] is False
        assert rep["mode"] == "probabilistic"

    def test_cross_multiplication_criterion(self):
        a = V(T1) / (V(T1) - V(S1))
        b = (V(T1) * V(T2)) / ((V(T1) - V(S1)) * V(T2))
        na, da = a.as_pair()
        nb, db = b.as_pair()
        import qbethe.polycore as pc

        assert pc.mul(na, db) == pc.mul(nb, da)
        assert a == b

    def test_canonical_idempotent_and_context_stable(self):
        a = (V(T1) ** 2 - V(S1) ** 2) / (V(T1) - V(S1))
        bigger = VarContext([T1, T2, S1, svar(2)])
        lifted = a.lift(bigger)
        assert lifted == a
        assert a.as_pair() == a.lift(CTX).as_pair()

    def test_probabilistic_agrees_with_canonical_on_corpus(self):
        rng = random.Random(20240811)
        variables = [tvar(1), tvar(2), tvar(3), svar(1), svar(2), svar(3)]
        ctx = VarContext(variables)

        def rand_poly():
            out = MRat.const(rng.randint(1, 3), ctx)
            for _ in range(rng.randint(1, 4)):
                v = rng.choice(variables)
                w = rng.choice(variables)
                term = MRat.lincomb(
                    [(rng.randint(-3, 3), rng.randint(-1, 1), v),
                     (rng.randint(-3, 3), 0, w)],
                    ctx,
                )
                if not term.is_zero():
                    out = out * term
            return out

        agree = 0
        for trial in range(100):
            a = rand_poly() / rand_poly()
            if rng.random() < 0.5:
                scale = rand_poly()
                b = (a * scale) / scale
                expected = True
            else:
                delta = rand_poly()
                b = a + delta
                expected = delta.is_zero()
            can = mrat_equal(a, b, mode="canonical")
            prob = mrat_equal(a, b, mode="probabilistic", trials=4, seed=trial)
            assert can == expected
            assert prob == can
            agree += 1
        assert agree == 100


class TestEncoding:
    def test_json_round_trip(self):
        f = (Q(1) * V(T1) - Q(-1) * V(S1)) / ((V(T1) - V(S1)) * V(T2))
        data = mrat_to_json(f)
        back = mrat_from_json(data)
        assert back == f
        assert mrat_to_json(back) == data

    def test_latex_simple_fraction(self):
        f = 1 / (MRat.var(T1, VarContext([T1, S1])) - MRat.var(S1, VarContext([T1, S1])))
        assert mrat_to_latex(f) == r"\frac{1}{t_{1}-s_{1}}"

    def test_canonical_emission_is_reduced(self):
        f = (V(T1) ** 2 - V(S1) ** 2) / (V(T1) - V(S1))
        data = mrat_to_json(f)
        assert data["den"] == [["1/1", [0, 0, 0]]]
