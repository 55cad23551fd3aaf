"""Modules, half-currents (mode oracle first), screenings, projections."""

import pytest

from qbethe.deltarat import box_from_mrat
from qbethe.errors import ModuleCertificationFailed, UnsupportedRoot
from qbethe.exactarith import MRat, VarContext, svar, tvar, zvar
from qbethe.kernels import VarTuple
from qbethe.repcurrents.currents import (
    closed_form_f_mode,
    f_zero_mode,
    half_current,
    interp_current,
    k_op,
    k_op_inv,
    mat_add,
    mat_eq,
    mat_is_zero,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_subst,
    oracle_f_mode,
    proj_composite,
    screening_action,
    site_f_mode,
    string_projection,
)
from qbethe.repcurrents.modules import (
    build_eval_module,
    load_registry,
    registry_payload,
    tensor_module,
)


@pytest.fixture(scope="module")
def sl2_half():
    return build_eval_module("sl2", "half")


@pytest.fixture(scope="module")
def sl2_two_sites():
    return tensor_module("sl2", ["half", "half"])


@pytest.fixture(scope="module")
def sl3_fund():
    return build_eval_module("sl3", "fund")


@pytest.fixture(scope="module")
def sl3_two_sites():
    return tensor_module("sl3", ["fund", "fund"])


class TestModeOracle:
    """The closed-form multi-site half-current must match the truncated
    iterated-coproduct mode sums before anything is built on it."""

    CUTOFF = 8

    def _check(self, module, root):
        zone = module.site_vars()
        for n in (1, 2, 3, 5, self.CUTOFF):
            closed = closed_form_f_mode(module, root, n)
            oracle = oracle_f_mode(module, root, n, self.CUTOFF)
            # oracle truncation error only reaches cells where some site
            # exponent falls below n - cutoff, so this window is exact
            window = {v: (n - self.CUTOFF, max(n, self.CUTOFF)) for v in zone}
            for i in range(module.dim()):
                for j in range(module.dim()):
                    a = closed[i][j]
                    b = oracle[i][j]
                    a = a if isinstance(a, MRat) else MRat.const(a)
                    b = b if isinstance(b, MRat) else MRat.const(b)
                    boxa = box_from_mrat(a, zone, window)
                    boxb = box_from_mrat(b, zone, window)
                    assert boxa == boxb, (root, n, i, j)

    def test_two_site_spin_half(self, sl2_two_sites):
        self._check(sl2_two_sites, "alpha")

    def test_three_site_spin_half(self):
        self._check(tensor_module("sl2", ["half", "half", "half"]), "alpha")

    def test_two_site_fund_both_roots(self, sl3_two_sites):
        self._check(sl3_two_sites, "alpha")
        self._check(sl3_two_sites, "beta")

    def test_mixed_spin_sites(self):
        self._check(tensor_module("sl2", ["half", "one"]), "alpha")


class TestHalfCurrents:
    def test_one_site_geometric_sum(self, sl2_half):
        t = tvar(1)
        z = sl2_half.z
        ctx = VarContext((t, z))
        f = half_current(sl2_half, "alpha", "+", t)
        expect = MRat.var(z, ctx) / (MRat.var(t, ctx) - MRat.var(z, ctx))
        assert f[1][0] == expect
        for i, j in ((0, 0), (0, 1), (1, 1)):
            e = f[i][j]
            assert (isinstance(e, int) and e == 0) or e.is_zero()

    def test_minus_shares_rational_form(self, sl2_half):
        t = tvar(1)
        assert mat_eq(
            half_current(sl2_half, "alpha", "+", t),
            half_current(sl2_half, "alpha", "-", t),
        )

    def test_zero_mode_and_cartan(self, sl2_two_sites):
        f0 = f_zero_mode(sl2_two_sites, "alpha")
        K = k_op(sl2_two_sites, "alpha")
        Ki = k_op_inv(sl2_two_sites, "alpha")
        # k f[0] k^{-1} = q^{-2} f[0]
        assert mat_eq(
            mat_mul(K, mat_mul(f0, Ki)), mat_scale(f0, MRat.q(-2))
        )


class TestScreenings:
    def test_composite_projection_is_screening(self, sl3_fund):
        t = tvar(1)
        P = proj_composite(sl3_fund, "+", t)
        S = screening_action(
            sl3_fund, half_current(sl3_fund, "alpha", "+", t), "beta", "S"
        )
        assert mat_eq(P, S)

    def test_screening_kills_serre_combination(self, sl3_fund):
        # f_b[1] f_a[0] - q f_a[0] f_b[1] is annihilated by S_a
        fb1 = site_f_mode(sl3_fund, "beta", 1)
        fa0 = f_zero_mode(sl3_fund, "alpha")
        comb = mat_sub(mat_mul(fb1, fa0), mat_scale(mat_mul(fa0, fb1), MRat.q(1)))
        assert mat_is_zero(screening_action(sl3_fund, comb, "alpha", "S"))

    def test_tilde_vs_plain_conjugation(self, sl3_fund):
        # S~_i(y) = -q^{-2} k_i^{-1} S_i(y) k_i
        t = tvar(1)
        y = half_current(sl3_fund, "alpha", "+", t)
        for root in ("alpha", "beta"):
            lhs = screening_action(sl3_fund, y, root, "S-tilde")
            K = k_op(sl3_fund, root)
            Ki = k_op_inv(sl3_fund, root)
            rhs = mat_scale(
                mat_mul(Ki, mat_mul(screening_action(sl3_fund, y, root, "S"), K)),
                -MRat.q(-2),
            )
            assert mat_eq(lhs, rhs)

    def test_composite_unsupported_on_sl2(self, sl2_half):
        with pytest.raises(UnsupportedRoot):
            proj_composite(sl2_half, "+", tvar(1))


class TestCompositeProjection:
    def test_explicit_pole_structure(self, sl3_fund):
        # one fundamental site: P(f_{a+b}(t)) = -q z/(t-z) E_31
        t = tvar(1)
        z = sl3_fund.z
        ctx = VarContext((t, z))
        P = proj_composite(sl3_fund, "+", t)
        expect = -MRat.q(1, ctx) * MRat.var(z, ctx) / (
            MRat.var(t, ctx) - MRat.var(z, ctx)
        )
        assert P[2][0] == expect
        for i in range(3):
            for j in range(3):
                if (i, j) != (2, 0):
                    e = P[i][j]
                    assert isinstance(e, int) and e == 0 or (
                        isinstance(e, MRat) and e.is_zero()
                    )

    def test_total_composite_vanishes_but_projection_does_not(self, sl3_fund):
        # (pl-r2) on the fundamental: the total composite current acts as
        # zero, so P(f_{a+b}(z)) = (q - q^{-1}) (f_b^-(q^{-1}z) f_a(z))^+
        from qbethe.deltarat import composed_f_delta, dsm_is_zero

        t = tvar(1)
        assert dsm_is_zero(composed_f_delta(sl3_fund, t))
        fmin = mat_subst(
            half_current(sl3_fund, "beta", "-", t), {t: (t, -1)}
        )
        fa = sl3_fund.f_delta("alpha", t)
        # product (rational matrix) * (delta matrix), then the plus part
        prod = [[None] * 3 for _ in range(3)]
        from qbethe.deltarat import DeltaSum

        for i in range(3):
            for j in range(3):
                acc = DeltaSum.zero()
                for l in range(3):
                    e = fmin[i][l]
                    if isinstance(e, int):
                        if e == 0:
                            continue
                        e = MRat.const(e)
                    if e.is_zero() or fa[l][j].is_zero():
                        continue
                    acc = acc + DeltaSum.rational(e) * fa[l][j]
                prod[i][j] = acc
        # plus part: delta(q^c z/t) g -> [q^c z/(t - q^c z)] g; the stored
        # constraint may have either t or the site point as representative
        plus = [[MRat.const(0)] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                for term in prod[i][j].terms.values():
                    if t in term.bindings:
                        root, c = term.bindings[t]
                    else:
                        (other, (root2, c2)), = term.bindings.items()
                        assert root2 == t
                        root, c = other, -c2
                    ctx = VarContext((t, root))
                    p = MRat.lincomb([(1, c, root)], ctx)
                    frac = p / (MRat.var(t, ctx) - p)
                    plus[i][j] = plus[i][j] + frac * term.coeff
        got = mat_scale(plus, MRat.q(1) - MRat.q(-1))
        P = proj_composite(sl3_fund, "+", t)
        assert mat_eq(got, P)


class TestInterpAndStrings:
    def test_empty_params_is_projected_single(self, sl2_half):
        t = tvar(1)
        assert mat_eq(
            interp_current(sl2_half, "alpha", t, VarTuple()),
            half_current(sl2_half, "alpha", "+", t),
        )

    def test_vanishes_at_nodes(self, sl2_two_sites):
        t1, t2, t3 = tvar(1), tvar(2), tvar(3)
        m = interp_current(sl2_two_sites, "alpha", t1, VarTuple([t2, t3]))
        at_node = mat_subst(m, {t1: t2})
        assert mat_is_zero(at_node)

    def test_sl2_b1_matches_example(self, sl2_two_sites):
        # f+(t2) - (q - q^{-1}) t1/(q t1 - q^{-1} t2) f+(t1)
        t1, t2 = tvar(1), tvar(2)
        ctx = VarContext((t1, t2))
        m = interp_current(sl2_two_sites, "alpha", t2, VarTuple([t1]))
        coeff = (
            (MRat.q(1, ctx) - MRat.q(-1, ctx))
            * MRat.var(t1, ctx)
            / (MRat.q(1, ctx) * MRat.var(t1, ctx) - MRat.q(-1, ctx) * MRat.var(t2, ctx))
        )
        expect = mat_sub(
            half_current(sl2_two_sites, "alpha", "+", t2),
            mat_scale(half_current(sl2_two_sites, "alpha", "+", t1), coeff),
        )
        assert mat_eq(m, expect)

    def test_string_single_factor(self, sl2_half):
        t1 = tvar(1)
        assert mat_eq(
            string_projection(sl2_half, (t1,), 0),
            half_current(sl2_half, "alpha", "+", t1),
        )


class TestRegistry:
    def test_round_trip(self, sl2_half):
        payload = registry_payload(sl2_half)
        assert payload["certification_hash"]
        mod = load_registry(payload)
        t = tvar(1)
        assert mat_eq(
            half_current(mod, "alpha", "+", t),
            half_current(sl2_half, "alpha", "+", t),
        )

    def test_tensor_requires_distinct_points(self, sl2_half):
        from qbethe.errors import BadModule
        from qbethe.repcurrents.modules import TensorModule

        with pytest.raises(BadModule):
            TensorModule([sl2_half, sl2_half])

    def test_uncertified_site_rejected(self):
        from qbethe.repcurrents.modules import TensorModule, _candidate

        raw = _candidate("sl2", "half", zvar(5))
        with pytest.raises(ModuleCertificationFailed):
            TensorModule([raw])
