"""Acceptance gate: one test per criterion, each printing a verdict line.

Everything is exact rational arithmetic (tolerance = equality); the only
randomized parts are the Schwartz-Zippel identity modes, whose trial
counts and seeds are pinned here.  Expected full runtime is dominated by
the n = 4 determinant comparison and the n = 3 ordering equivalence
(several minutes each on a stock CPU).
"""

import time

import pytest

from qbethe.exactarith import MRat, VarContext, svar, tvar, zvar
from qbethe.kernels import (
    izergin_det,
    partition_sym,
    phi,
    verify_kernel_identity,
)


def _verdict(criterion: str, ok: bool, note: str = ""):
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}"
    if note:
        line += f"  [{note}]"
    print(line)
    assert ok, criterion


@pytest.fixture(scope="module")
def modules():
    from qbethe.repcurrents.modules import build_eval_module, tensor_module

    return {
        "sl2_1": tensor_module("sl2", ["half"]),
        "sl2_2": tensor_module("sl2", ["half", "half"]),
        "sl2_3": tensor_module("sl2", ["half", "half", "half"]),
        "sl3_1": tensor_module("sl3", ["fund"]),
        "sl3_2": tensor_module("sl3", ["fund", "fund"]),
        "spin1": tensor_module("sl2", ["one"]),
    }


def test_criterion_01_kernel_identities():
    t0 = time.time()
    for n in (1, 2, 3):
        rep = verify_kernel_identity("idZZ1", n, mode="canonical")
        assert rep["equal"], rep
    rep = verify_kernel_identity("idZZ10", 2, sigma=(1, 0), mode="canonical")
    assert rep["equal"], rep
    rep = verify_kernel_identity(
        "idZZ10", 3, sigma=(1, 2, 0), sigma_prime=(2, 0, 1), mode="canonical"
    )
    assert rep["equal"], rep
    small = time.time() - t0
    t0 = time.time()
    rep4 = verify_kernel_identity("idZZ1", 4, mode="probabilistic", trials=20, seed=1)
    assert rep4["equal"] and rep4["trials"] == 20, rep4
    el4 = time.time() - t0
    t0 = time.time()
    rep5 = verify_kernel_identity("idZZ1", 5, mode="probabilistic", trials=20, seed=2)
    assert rep5["equal"] and rep5["trials"] == 20, rep5
    el5 = time.time() - t0
    assert small + el4 < 60, f"n<=4 runtime {small + el4:.1f}s exceeds 60s"
    assert el5 < 600, f"n=5 runtime {el5:.1f}s exceeds 10min"
    _verdict(
        "criterion-01 kernel identity idZZ1/idZZ10 (n<=3 canonical, n=4,5 SZ x20)",
        True,
        f"n<=4 {small + el4:.1f}s, n=5 {el5:.1f}s",
    )


def test_criterion_02_determinant_claim():
    ok = True
    for n in (1, 2, 3, 4):
        ts = [tvar(i) for i in range(1, n + 1)]
        ss = [svar(i) for i in range(1, n + 1)]
        z = partition_sym(ts, ss, "left")
        ok = ok and (izergin_det(ts, ss) == z)
        if n == 2:
            ok = ok and (partition_sym(ts, ss, "right") == z)
        for grp in (ts, ss):
            for i in range(n):
                for j in range(i + 1, n):
                    ok = ok and (z.permute({grp[i]: grp[j], grp[j]: grp[i]}) == z)
        assert ok, f"failure at n={n}"
    _verdict("criterion-02 determinant form = partition function, symmetry (n<=4)", ok)


def test_criterion_03_interpolation_functions():
    import qbethe.polycore as pc
    from qbethe.errors import DivisionByZero

    ok = True
    for b in range(1, 6):
        nodes = [svar(i) for i in range(1, b + 1)]
        x = svar(b + 1)
        for flavor, pole_shift in (("plus", 2), ("minus", -2)):
            for j in range(1, b + 1):
                f = phi(x, nodes, j, flavor)
                for i in range(1, b + 1):
                    ok = ok and f.substitute({x: nodes[i - 1]}) == (1 if i == j else 0)
                num, den = f.as_pair()
                dn = pc.spec_degree(f.ctx.packing, num, f.ctx.index(x))
                dd = pc.spec_degree(f.ctx.packing, den, f.ctx.index(x))
                ok = ok and dn <= b - 1 and dn < dd
                for i in range(1, b + 1):
                    try:
                        f.substitute({x: (nodes[i - 1], pole_shift)})
                        ok = False  # a pole must sit at q^{+-2} s_i
                    except DivisionByZero:
                        pass
    _verdict("criterion-03 phi/phi~ node, degree, decay, pole properties (b<=5)", ok)


def test_criterion_04_defining_relation_certification(modules):
    from qbethe.deltarat import verify_distribution_identity

    t0 = time.time()
    ok = True
    base = ["rel-1-ee", "rel-1-ff", "rel-3-psie", "rel-3-psif", "rel-7a", "rel-10"]
    sl3only = [
        "rel-serre-f",
        "rel-com-f",
        "rel-com-aa-1",
        "rel-com-aa-2",
        "rel-com-aa-3",
    ]
    for key in ("sl2_1", "spin1", "sl3_1"):
        mod = modules[key].sites()[0]
        rels = base + (sl3only if mod.algebra == "sl3" else [])
        for rel in rels:
            rep = verify_distribution_identity(rel, mod, window=6)
            ok = ok and rep["equal"]
            assert rep["equal"], (key, rel, rep)
    elapsed = time.time() - t0
    assert elapsed < 300, f"certification runtime {elapsed:.1f}s exceeds 5min"
    _verdict(
        "criterion-04 defining relations (1),(3),(7a),(10),(serre1),(com-f),(com-aa) at window 6",
        ok,
        f"{elapsed:.1f}s",
    )


def test_criterion_05_section_34_examples(modules):
    from qbethe.repcurrents.weights import verify_projection_identity

    ok = True
    for which in ("sect34-1", "sect34-3"):
        rep = verify_projection_identity(which, modules["sl3_2"])
        ok = ok and rep["equal"]
        assert rep["equal"], (which, rep)
    for which in ("sect34-2", "sect34-4"):
        for key in ("sl2_2", "sl3_2"):
            rep = verify_projection_identity(which, modules[key])
            ok = ok and rep["equal"]
            assert rep["equal"], (which, key, rep)
    rep = verify_projection_identity("exam2", modules["sl3_2"])
    ok = ok and rep["displayed"] and rep["replacement_line"]
    assert ok, rep
    _verdict(
        "criterion-05 all five section-3.4 projection displays incl. (exam2) + replacement",
        ok,
    )


def test_criterion_06_sl2_ordering_equivalence(modules):
    from qbethe.repcurrents.weights import weight_function

    ok = True
    for key, nsites in (("sl2_1", 1), ("sl2_2", 2), ("sl2_3", 3)):
        for a in (1, 2, 3):
            ts = [tvar(i) for i in range(1, a + 1)]
            w1 = weight_function(modules[key], ts, (), "po333", cap=6)
            w2 = weight_function(modules[key], ts, (), "intt3", cap=6)
            ok = ok and (w1 == w2)
            assert ok, (key, a)
    _verdict("criterion-06 reverse and direct orderings agree (N<=3, a<=3)", ok)


def test_criterion_07_tensor_product_axiom(modules):
    from qbethe.repcurrents.modules import build_eval_module
    from qbethe.repcurrents.weights import coproduct_combine, weight_function

    t1, t2, s1, s2 = tvar(1), tvar(2), svar(1), svar(2)
    ok = True
    cases = [
        ("sl2", "half", "po333", (("alpha", t1),)),
        ("sl2", "half", "po333", (("alpha", t1), ("alpha", t2))),
        ("sl3", "fund", "po1", (("alpha", t1),)),
        ("sl3", "fund", "po1", (("beta", s1),)),
        ("sl3", "fund", "po1", (("alpha", t1), ("beta", s1))),
        ("sl3", "fund", "po1", (("alpha", t1), ("alpha", t2), ("beta", s1))),
        ("sl3", "fund", "po1", (("alpha", t1), ("beta", s1), ("beta", s2))),
    ]
    for alg, label, variant, ms in cases:
        mod = (
            __import__("qbethe.repcurrents.modules", fromlist=["tensor_module"])
            .tensor_module(alg, [label, label])
        )
        m1 = build_eval_module(alg, label, zvar(1))
        m2 = build_eval_module(alg, label, zvar(2))
        ts = [v for r, v in ms if r == "alpha"]
        ss = [v for r, v in ms if r == "beta"]
        direct = weight_function(mod, ts, ss, variant)
        combined = coproduct_combine(m1, m2, ms)
        ok = ok and (direct == combined)
        assert ok, ms
    _verdict(
        "criterion-07 tensor-product axiom, direct vs combined (sl2 a<=2; sl3 a+b<=3)",
        ok,
    )


def test_criterion_08_argument_symmetry(modules):
    from qbethe.repcurrents.weights import symmetry_check

    t1, t2, t3, s1, s2 = tvar(1), tvar(2), tvar(3), svar(1), svar(2)
    ok = True
    cases = [
        ("sl2_1", (("alpha", t1), ("alpha", t2)), [(1, 0)]),
        (
            "sl2_1",
            (("alpha", t1), ("alpha", t2), ("alpha", t3)),
            [(1, 0, 2), (0, 2, 1), (2, 1, 0)],
        ),
        ("sl3_1", (("alpha", t1), ("beta", s1)), [(1, 0)]),
        (
            "sl3_1",
            (("alpha", t1), ("alpha", t2), ("beta", s1)),
            [(1, 0, 2), (0, 2, 1), (2, 1, 0)],
        ),
        (
            "sl3_1",
            (("alpha", t1), ("beta", s1), ("beta", s2)),
            [(0, 2, 1), (1, 0, 2), (2, 1, 0)],
        ),
    ]
    for key, ms, sigmas in cases:
        for sigma in sigmas:
            rep = symmetry_check(modules[key], ms, sigma)
            ok = ok and rep["equal"]
            assert ok, (key, ms, sigma, rep)
    _verdict(
        "criterion-08 permuted arguments = exchange prefactor x original (all transpositions, a+b<=3)",
        ok,
    )


def test_criterion_09_opposite_projection_suite(modules):
    from qbethe.repcurrents.weights import verify_projection_identity

    ok = True
    for which in ("dec-m-pair", "po44-pair", "proj-3.14"):
        rep = verify_projection_identity(which, modules["sl3_2"])
        ok = ok and rep["equal"]
        assert ok, (which, rep)
    _verdict(
        "criterion-09 opposite-projection suite: triangular pair, string pair, single-current forms",
        ok,
    )


def test_criterion_10_borel_commutation_identities(modules):
    from qbethe.repcurrents.weights import verify_projection_identity

    ok = True
    for which, key in (
        ("hcc1", "sl2_2"),
        ("hcc1", "sl3_2"),
        ("restore-ord-1", "sl3_2"),
        ("restore-ord-2", "sl3_2"),
    ):
        rep = verify_projection_identity(which, modules[key])
        ok = ok and rep["equal"]
        assert ok, (which, rep)
    _verdict("criterion-10 half-current exchange and restore-ordering identities", ok)


def test_criterion_11_normally_ordered_decomposition(modules):
    from qbethe.deltarat import boxm_mismatches
    from qbethe.repcurrents.weights import dec_ff11_sides

    ok = True
    notes = []
    for key in ("sl3_1", "spin1"):
        lhs, rhs, _axes, _win = dec_ff11_sides(modules[key], window=6)
        ms = boxm_mismatches(lhs, rhs)
        ok = ok and not ms
        assert not ms, (key, ms)
        nonzero = any(not cell.is_zero() for row in lhs for cell in row)
        notes.append(f"{key}: {'nontrivial' if nonzero else 'both sides vanish'}")
    _verdict(
        "criterion-11 normally ordered decomposition, b=2, window 6",
        ok,
        "; ".join(notes),
    )


def test_criterion_12_oracle(modules):
    from qbethe.betheoracle import (
        b_operators_commute,
        bethe_vector,
        compare_collinear,
        dwbc_bruteforce,
        get_convention,
        scale_pattern_check,
    )
    from qbethe.repcurrents.weights import weight_function

    ok = get_convention("default") is not None and get_convention("alt") is not None
    ok = ok and b_operators_commute("default", (zvar(1), zvar(2)), tvar(1), tvar(2))
    for n in (1, 2, 3):
        ts = [tvar(i) for i in range(1, n + 1)]
        ss = [svar(i) for i in range(1, n + 1)]
        dwbc_bruteforce("default", ts, ss, compare_forms=True)
    pattern = scale_pattern_check("default", up_to=3)
    ok = ok and pattern["stable"]
    w = weight_function(modules["sl2_1"], (tvar(1),), (), "po333")
    b = bethe_vector("default", (zvar(1),), (tvar(1),))
    rep1 = compare_collinear(w, b)
    ok = ok and rep1["collinear"]
    w2 = weight_function(modules["sl2_2"], (tvar(1), tvar(2)), (), "po333")
    b2 = bethe_vector("default", (zvar(1), zvar(2)), (tvar(1), tvar(2)))
    diag = compare_collinear(w2, b2)
    _verdict(
        "criterion-12 oracle: YBE, [B,B]=0, DWBC scale stability, collinearity",
        ok,
        f"n=1 ratio {rep1['ratio']!r}; n=2 diagnostic collinear={diag['collinear']}",
    )
