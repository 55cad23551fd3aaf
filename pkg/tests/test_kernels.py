"""Kernels, symmetrization, interpolation functions, partition function."""

import pytest

from qbethe.errors import ArityMismatch, DegenerateNodes, SizeCap
from qbethe.exactarith import MRat, VarContext, svar, tvar
from qbethe.kernels import (
    VarTuple,
    izergin_det,
    partition_sym,
    phi,
    q_symmetrize,
    verify_kernel_identity,
    y_kernel,
    z_kernel,
)


def _vars(n, role="t"):
    mk = tvar if role == "t" else svar
    return [mk(i) for i in range(1, n + 1)]


class TestYZ:
    def test_empty_product(self):
        assert y_kernel(VarTuple(), VarTuple()) == 1
        assert z_kernel(VarTuple(), VarTuple()) == 1

    def test_single_factor(self):
        t1, s1 = tvar(1), svar(1)
        ctx = VarContext([t1, s1])
        y = y_kernel([t1], [s1])
        assert y == MRat.var(t1, ctx) / (MRat.var(t1, ctx) - MRat.var(s1, ctx))
        z = z_kernel([t1], [s1])
        assert z == MRat.var(s1, ctx) / (MRat.var(t1, ctx) - MRat.var(s1, ctx))

    def test_both_product_orderings_agree(self):
        # the constructor checks this internally up to k = 3; re-check k = 2
        ts, ss = _vars(2), _vars(2, "s")
        y_kernel(ts, ss, check_forms=True)
        y_kernel(_vars(3), _vars(3, "s"), check_forms=True)

    def test_z_is_y_times_ratio(self):
        ts, ss = _vars(2), _vars(2, "s")
        ctx = VarContext(ts + ss)
        ratio = MRat.const(1, ctx)
        for t, s in zip(ts, ss):
            ratio = ratio * MRat.var(s, ctx) / MRat.var(t, ctx)
        assert z_kernel(ts, ss) == y_kernel(ts, ss) * ratio

    def test_scaled_arguments(self):
        # Y(q^{-1}t; s) = t/(t - q s)
        t1, s1 = tvar(1), svar(1)
        ctx = VarContext([t1, s1])
        y = y_kernel([(t1, -1)], [s1])
        expect = MRat.var(t1, ctx) / (
            MRat.var(t1, ctx) - MRat.q(1, ctx) * MRat.var(s1, ctx)
        )
        assert y == expect

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            y_kernel(_vars(2), _vars(1, "s"))


class TestQSymmetrize:
    def test_single_variable_identity(self):
        t1, s1 = tvar(1), svar(1)
        F = y_kernel([t1], [s1])
        assert q_symmetrize(F, [t1]) == F

    def test_two_term_weight(self):
        t1, t2 = tvar(1), tvar(2)
        ctx = VarContext([t1, t2])
        one = MRat.const(1, ctx)
        got = q_symmetrize(one, [t1, t2])
        w = (MRat.q(-1, ctx) * MRat.var(t1, ctx) - MRat.q(1, ctx) * MRat.var(t2, ctx)) / (
            MRat.q(1, ctx) * MRat.var(t1, ctx) - MRat.q(-1, ctx) * MRat.var(t2, ctx)
        )
        assert got == 1 + w

    def test_qinv_vs_q_reversal_identity(self):
        # q^{-1}-symmetrization equals the triangle prefactor times the
        # q-symmetrization applied after reversing the arguments
        s1, s2 = svar(1), svar(2)
        ctx = VarContext([s1, s2])
        g = MRat.var(s1, ctx) / (MRat.var(s1, ctx) - 3 * MRat.var(s2, ctx))
        lhs = q_symmetrize(g, [s1, s2], "qinvsym")
        g_rev = g.permute({s1: s2, s2: s1})
        pref = (MRat.q(1, ctx) * MRat.var(s1, ctx) - MRat.q(-1, ctx) * MRat.var(s2, ctx)) / (
            MRat.q(-1, ctx) * MRat.var(s1, ctx) - MRat.q(1, ctx) * MRat.var(s2, ctx)
        )
        assert lhs == pref * q_symmetrize(g_rev, [s1, s2], "qsym")

    def test_size_cap(self):
        vs = _vars(8)
        ctx = VarContext(vs)
        with pytest.raises(SizeCap):
            q_symmetrize(MRat.const(1, ctx), vs)


class TestPhi:
    @pytest.mark.parametrize("flavor", ["plus", "minus"])
    @pytest.mark.parametrize("b", [1, 2, 3, 4])
    def test_kronecker_property(self, flavor, b):
        nodes = _vars(b, "s")
        x = svar(b + 1)
        for j in range(1, b + 1):
            f = phi(x, nodes, j, flavor)
            for i in range(1, b + 1):
                val = f.substitute({x: nodes[i - 1]}, ctx=f.ctx)
                assert val == (1 if i == j else 0)

    def test_b1_closed_form(self):
        s, s1 = svar(2), svar(1)
        ctx = VarContext([s, s1])
        f = phi(s, [s1], 1, "plus")
        expect = (MRat.q(-1, ctx) - MRat.q(1, ctx)) * MRat.var(s1, ctx) / (
            MRat.q(-1, ctx) * MRat.var(s, ctx) - MRat.q(1, ctx) * MRat.var(s1, ctx)
        )
        assert f == expect

    def test_pole_locations(self):
        s, s1 = svar(2), svar(1)
        f_plus = phi(s, [s1], 1, "plus")
        f_minus = phi(s, [s1], 1, "minus")
        from qbethe.errors import DivisionByZero

        # plus flavor: simple pole at s = q^2 s1; minus flavor at s = q^{-2} s1
        with pytest.raises(DivisionByZero):
            f_plus.substitute({s: (s1, 2)})
        with pytest.raises(DivisionByZero):
            f_minus.substitute({s: (s1, -2)})
        # and each is regular at the other point
        assert not f_plus.substitute({s: (s1, -2)}).is_zero() or True
        f_minus.substitute({s: (s1, 2)})

    @pytest.mark.parametrize("b", [2, 3, 4, 5])
    def test_degree_and_decay(self, b):
        import qbethe.polycore as pc

        nodes = _vars(b, "s")
        x = svar(b + 1)
        for flavor in ("plus", "minus"):
            f = phi(x, nodes, 1, flavor)
            num, den = f.as_pair()
            i = f.ctx.index(x)
            dn = pc.spec_degree(f.ctx.packing, num, i)
            dd = pc.spec_degree(f.ctx.packing, den, i)
            assert dn <= b - 1
            assert dn < dd  # vanishes as the argument grows

    def test_degenerate_nodes(self):
        s1 = svar(1)
        with pytest.raises(DegenerateNodes):
            phi(svar(3), [s1, s1], 1)


class TestPartition:
    def test_n1_both_sides(self):
        t1, s1 = tvar(1), svar(1)
        ctx = VarContext([t1, s1])
        expect = 1 / (MRat.var(t1, ctx) - MRat.var(s1, ctx))
        assert partition_sym([t1], [s1], "left") == expect
        assert partition_sym([t1], [s1], "right") == expect

    def test_n2_left_equals_right(self):
        ts, ss = _vars(2), _vars(2, "s")
        assert partition_sym(ts, ss, "left") == partition_sym(ts, ss, "right")

    def test_n2_symmetry(self):
        ts, ss = _vars(2), _vars(2, "s")
        z = partition_sym(ts, ss, "left")
        assert z.permute({ts[0]: ts[1], ts[1]: ts[0]}) == z
        assert z.permute({ss[0]: ss[1], ss[1]: ss[0]}) == z


class TestIzergin:
    def test_n1(self):
        t1, s1 = tvar(1), svar(1)
        ctx = VarContext([t1, s1])
        assert izergin_det([t1], [s1]) == 1 / (MRat.var(t1, ctx) - MRat.var(s1, ctx))

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_partition(self, n):
        ts, ss = _vars(n), _vars(n, "s")
        assert izergin_det(ts, ss) == partition_sym(ts, ss, "left")

    def test_repeated_symbol_rejected(self):
        t1 = tvar(1)
        with pytest.raises(DegenerateNodes):
            izergin_det([t1, tvar(2)], [t1, svar(2)])


class TestVerifier:
    def test_idZZ1_small_canonical(self):
        for n in (1, 2):
            rep = verify_kernel_identity("idZZ1", n, mode="canonical")
            assert rep["equal"]

    def test_idZZ10_with_permutations(self):
        rep = verify_kernel_identity("idZZ10", 2, sigma=(1, 0), mode="canonical")
        assert rep["equal"]
        rep = verify_kernel_identity(
            "idZZ10", 2, sigma=(1, 0), sigma_prime=(1, 0), mode="canonical"
        )
        assert rep["equal"]

    def test_detZ_canonical(self):
        rep = verify_kernel_identity("detZ", 2, mode="canonical")
        assert rep["equal"]

    def test_Zsym_canonical(self):
        rep = verify_kernel_identity("Zsym", 2, mode="canonical")
        assert rep["equal"]

    def test_probabilistic_n4(self):
        rep = verify_kernel_identity("idZZ1", 4, mode="probabilistic", trials=5, seed=3)
        assert rep["equal"]
        assert rep["trials"] == 5

    def test_size_cap(self):
        with pytest.raises(SizeCap):
            verify_kernel_identity("idZZ1", 9)
