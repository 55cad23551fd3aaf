"""Weight functions: examples, ordering equivalence, tensor property,
argument-permutation symmetry, and the decomposition window check."""

import pytest

from qbethe.deltarat import boxm_mismatches
from qbethe.exactarith import MRat, VarContext, svar, tvar
from qbethe.kernels import VarTuple
from qbethe.repcurrents.modules import build_eval_module, tensor_module
from qbethe.repcurrents.weights import (
    coproduct_combine,
    dec_ff11_sides,
    symmetry_check,
    verify_projection_identity,
    weight_function,
    weight_space_audit,
    pole_locus_audit,
)


@pytest.fixture(scope="module")
def sl2_1site():
    return tensor_module("sl2", ["half"])


@pytest.fixture(scope="module")
def sl2_2site():
    return tensor_module("sl2", ["half", "half"])


@pytest.fixture(scope="module")
def sl3_1site():
    return tensor_module("sl3", ["fund"])


@pytest.fixture(scope="module")
def sl3_2site():
    return tensor_module("sl3", ["fund", "fund"])


T1, T2, T3 = tvar(1), tvar(2), tvar(3)
S1, S2 = svar(1), svar(2)


class TestSl2Values:
    def test_single_current_component(self, sl2_1site):
        w = weight_function(sl2_1site, (T1,), (), "po333")
        z = sl2_1site.site_vars()[0]
        ctx = VarContext((T1, z))
        assert w.components[0].is_zero()
        assert w.components[1] == MRat.var(z, ctx) / (
            MRat.var(T1, ctx) - MRat.var(z, ctx)
        )

    def test_two_currents_annihilate_spin_half_site(self, sl2_1site):
        w = weight_function(sl2_1site, (T1, T2), (), "po333")
        assert w.is_zero()

    @pytest.mark.parametrize("a", [1, 2])
    @pytest.mark.parametrize("nsites", [1, 2])
    def test_ordering_equivalence(self, a, nsites):
        mod = tensor_module("sl2", ["half"] * nsites)
        ts = [tvar(i) for i in range(1, a + 1)]
        assert weight_function(mod, ts, (), "po333") == weight_function(
            mod, ts, (), "intt3"
        )

    def test_ordering_equivalence_spin1(self):
        mod = tensor_module("sl2", ["one"])
        for a in (1, 2):
            ts = [tvar(i) for i in range(1, a + 1)]
            assert weight_function(mod, ts, (), "po333") == weight_function(
                mod, ts, (), "intt3"
            )

    def test_weight_grading(self, sl2_2site):
        w = weight_function(sl2_2site, (T1, T2), (), "po333")
        assert not w.is_zero()
        assert weight_space_audit(w)


class TestSl3Values:
    def test_a1_b1_frozen_component(self, sl3_1site):
        # only the k = 1 composite term survives on one fundamental site:
        # component on e_3 equals -q t1 z1 / ((t1 - z1)(t1 - q s1))
        w = weight_function(sl3_1site, (T1,), (S1,), "po1")
        z = sl3_1site.site_vars()[0]
        ctx = VarContext((T1, S1, z))
        t, s, zz = MRat.var(T1, ctx), MRat.var(S1, ctx), MRat.var(z, ctx)
        expect = -MRat.q(1, ctx) * t * zz / (
            (t - zz) * (t - MRat.q(1, ctx) * s)
        )
        assert w.components[0].is_zero()
        assert w.components[1].is_zero()
        assert w.components[2] == expect
        assert weight_space_audit(w)

    def test_pole_locus_audit(self, sl3_2site):
        w = weight_function(sl3_2site, (T1,), (S1,), "po1")
        audit = pole_locus_audit(w)
        assert audit["unexpected"] == []

    def test_minus_variant_nonzero_and_graded(self, sl3_1site):
        w = weight_function(sl3_1site, (T1,), (S1,), "po2")
        assert weight_space_audit(w)


class TestProjectionIdentities:
    @pytest.mark.parametrize(
        "which", ["hcc1", "sect34-2", "sect34-4"]
    )
    def test_sl2_identities(self, which, sl2_2site):
        rep = verify_projection_identity(which, sl2_2site)
        assert rep["equal"], rep

    @pytest.mark.parametrize(
        "which",
        [
            "hcc1",
            "restore-ord-1",
            "restore-ord-2",
            "serre-proj",
            "sect34-1",
            "sect34-2",
            "sect34-3",
            "proj-3.14",
            "dec-m-pair",
            "po44-pair",
        ],
    )
    def test_sl3_identities(self, which, sl3_2site):
        rep = verify_projection_identity(which, sl3_2site)
        assert rep["equal"], rep

    def test_exam2(self, sl3_2site):
        rep = verify_projection_identity("exam2", sl3_2site)
        assert rep["displayed"], rep
        assert rep["replacement_line"], rep


class TestTensorProperty:
    def test_empty_multiset(self, sl2_1site):
        m1 = build_eval_module("sl2", "half", sl2_1site.site_vars()[0])
        from qbethe.exactarith import zvar

        m2 = build_eval_module("sl2", "half", zvar(2))
        w = coproduct_combine(m1, m2, ())
        assert w.components[0] == 1
        assert all(c.is_zero() for c in w.components[1:])

    @pytest.mark.parametrize(
        "multiset",
        [
            (("alpha", T1),),
            (("alpha", T1), ("alpha", T2)),
        ],
    )
    def test_sl2_tensor_axiom(self, multiset, sl2_2site):
        from qbethe.exactarith import zvar

        m1 = build_eval_module("sl2", "half", zvar(1))
        m2 = build_eval_module("sl2", "half", zvar(2))
        ts = [v for _r, v in multiset]
        direct = weight_function(sl2_2site, ts, (), "po333")
        combined = coproduct_combine(m1, m2, multiset)
        assert direct == combined

    @pytest.mark.parametrize(
        "multiset",
        [
            (("alpha", T1),),
            (("beta", S1),),
            (("alpha", T1), ("beta", S1)),
            (("alpha", T1), ("alpha", T2), ("beta", S1)),
        ],
    )
    def test_sl3_tensor_axiom(self, multiset, sl3_2site):
        from qbethe.exactarith import zvar

        m1 = build_eval_module("sl3", "fund", zvar(1))
        m2 = build_eval_module("sl3", "fund", zvar(2))
        ts = [v for r, v in multiset if r == "alpha"]
        ss = [v for r, v in multiset if r == "beta"]
        direct = weight_function(sl3_2site, ts, ss, "po1")
        combined = coproduct_combine(m1, m2, multiset)
        assert direct == combined


class TestSymmetry:
    def test_identity_permutation(self, sl2_2site):
        rep = symmetry_check(sl2_2site, (("alpha", T1), ("alpha", T2)), (0, 1))
        assert rep["equal"]

    def test_same_root_swap_sl2(self, sl2_2site):
        rep = symmetry_check(sl2_2site, (("alpha", T1), ("alpha", T2)), (1, 0))
        assert rep["route"] == "direct"
        assert rep["equal"]

    def test_mixed_swap_sl3(self, sl3_1site):
        rep = symmetry_check(sl3_1site, (("alpha", T1), ("beta", S1)), (1, 0))
        assert rep["route"] == "direct"
        assert rep["equal"]

    def test_all_transpositions_aab(self, sl3_1site):
        ms = (("alpha", T1), ("alpha", T2), ("beta", S1))
        routes = set()
        for sigma in ((1, 0, 2), (2, 1, 0), (0, 2, 1)):
            rep = symmetry_check(sl3_1site, ms, sigma)
            routes.add(rep["route"])
            assert rep["equal"], rep
        assert "direct" in routes and "induced" in routes


class TestDecomposition:
    @pytest.mark.parametrize("tag", ["sl3:fund", "sl2:one"])
    def test_dec_ff11_window(self, tag):
        alg, label = tag.split(":")
        mod = tensor_module(alg, [label])
        lhs, rhs, _axes, _win = dec_ff11_sides(mod, window=4)
        assert boxm_mismatches(lhs, rhs) == []
