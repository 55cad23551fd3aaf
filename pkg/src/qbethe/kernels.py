"""Scalar rational kernels and symmetrization operators.

Everything here is a pure function producing canonical ``MRat`` values:
the ordered kernels Y and Z, the weighted symmetrization sums over S_n in
both the q and the q^{-1} flavour, the interpolation functions phi and
phi-tilde with prescribed poles, the domain-wall partition function built
from either side of the kernel identity, and its determinant form
computed by fraction-free elimination.

Each identity checker has two routes: a fully symbolic one (canonical
equality of reduced rational functions) and a randomized Schwartz-Zippel
route that evaluates both sides at exact rational sample points; the
latter is what makes n = 5 affordable.
"""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

from . import polycore as pc
from .errors import (
    ArityMismatch,
    DegenerateNodes,
    SampleExhaustion,
    SizeCap,
    UsageError,
)
from .exactarith import (
    MRat,
    SpectralVar,
    VarContext,
    random_q,
    random_rational,
)

DEFAULT_SYM_CAP = 7
MAX_POLE_RETRIES = 64

# internal consistency checks (both product orderings of Y) are always on
# up to this size; beyond it they would double the cost of large builds
FORM_CHECK_LIMIT = 3


class VarTuple:
    """Ordered argument tuple: spectral variables with optional q-power
    prefactors, so that entries like q^{-1} t_i can be passed around."""

    __slots__ = ("entries",)

    def __init__(self, entries=()):
        norm = []
        for e in entries:
            if isinstance(e, SpectralVar):
                norm.append((e, 0))
            else:
                v, k = e
                norm.append((v, int(k)))
        if len({v for v, _ in norm}) != len(norm):
            raise DegenerateNodes("duplicate variable in argument tuple")
        self.entries = tuple(norm)

    @classmethod
    def of(cls, *items) -> "VarTuple":
        return cls(items)

    def scaled(self, qpow: int) -> "VarTuple":
        return VarTuple([(v, k + qpow) for v, k in self.entries])

    def reversed(self) -> "VarTuple":
        return VarTuple(list(reversed(self.entries)))

    def permuted(self, sigma) -> "VarTuple":
        return VarTuple([self.entries[sigma[i]] for i in range(len(self.entries))])

    @property
    def vars(self):
        return tuple(v for v, _ in self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __repr__(self):
        return "(" + ", ".join(
            v.name if k == 0 else f"q^{k}*{v.name}" for v, k in self.entries
        ) + ")"


def _as_vartuple(x) -> VarTuple:
    if isinstance(x, VarTuple):
        return x
    return VarTuple(x)


def _ctx_for(*tuples) -> VarContext:
    vs = []
    for tp in tuples:
        vs.extend(tp.vars)
    return VarContext(vs)


def _arg(ctx: VarContext, entry) -> MRat:
    v, k = entry
    return MRat.lincomb([(1, k, v)], ctx)


def _binom(ctx, c1, k1, v1, c2, k2, v2) -> MRat:
    """The rational function c1 q^{k1} x1 + c2 q^{k2} x2."""
    return MRat.lincomb([(c1, k1, v1), (c2, k2, v2)], ctx)


def _arg_diff(ctx, e1, e2) -> MRat:
    (v1, k1), (v2, k2) = e1, e2
    return MRat.lincomb([(1, k1, v1), (-1, k2, v2)], ctx)


# ---------------------------------------------------------------------------
# Y and Z kernels
# ---------------------------------------------------------------------------


def y_kernel(t, s, check_forms: bool | None = None) -> MRat:
    """Ordered kernel Y(t; s) for equally long argument tuples.

    Y = prod_i [1/(1 - s_i/t_i)] prod_{j<i} (q - q^{-1} s_j/t_i)/(1 - s_j/t_i).
    """
    t, s = _as_vartuple(t), _as_vartuple(s)
    if len(t) != len(s):
        raise ArityMismatch(f"|t| = {len(t)} but |s| = {len(s)}")
    k = len(t)
    ctx = _ctx_for(t, s)
    out = MRat.const(1, ctx)
    for i in range(k):
        ti = t[i]
        out = out * _arg(ctx, ti) / _arg_diff(ctx, ti, s[i])
        for j in range(i):
            sj = s[j]
            num = MRat.lincomb([(1, 1 + ti[1], ti[0]), (-1, -1 + sj[1], sj[0])], ctx)
            out = out * num / _arg_diff(ctx, ti, sj)
    if check_forms is None:
        check_forms = k <= FORM_CHECK_LIMIT
    if check_forms and k >= 2:
        alt = MRat.const(1, ctx)
        for i in range(k):
            si = s[i]
            alt = alt * _arg(ctx, t[i]) / _arg_diff(ctx, t[i], si)
            for j in range(i + 1, k):
                tj = t[j]
                num = MRat.lincomb(
                    [(1, 1 + tj[1], tj[0]), (-1, -1 + si[1], si[0])], ctx
                )
                alt = alt * num / _arg_diff(ctx, tj, si)
        if out != alt:
            raise AssertionError("the two product forms of Y disagree")
    return out


def z_kernel(t, s, check_forms: bool | None = None) -> MRat:
    """Z(t; s) = Y(t; s) * prod_i s_i/t_i."""
    t, s = _as_vartuple(t), _as_vartuple(s)
    out = y_kernel(t, s, check_forms=check_forms)
    ctx = _ctx_for(t, s)
    for i in range(len(t)):
        out = out * _arg(ctx, s[i]) / _arg(ctx, t[i])
    return out


# ---------------------------------------------------------------------------
# q-symmetrization
# ---------------------------------------------------------------------------


def sym_terms(variables, flavor: str = "qsym", cap: int = DEFAULT_SYM_CAP):
    """Yield (substitution map, weight MRat) for each permutation of the
    given variables; the weighted sum of pulled-back values is the q- or
    q^{-1}-symmetrization."""
    variables = list(variables)
    n = len(variables)
    if n > cap:
        raise SizeCap(f"symmetrization over {n} variables exceeds cap {cap}")
    if flavor not in ("qsym", "qinvsym"):
        raise ValueError(f"unknown symmetrization flavor {flavor!r}")
    ctx = VarContext(variables)
    for sigma in itertools.permutations(range(n)):
        w = MRat.const(1, ctx)
        if flavor == "qsym":
            for l in range(n):
                for lp in range(l + 1, n):
                    if sigma[l] > sigma[lp]:
                        num = _binom(ctx, 1, -1, variables[sigma[lp]], -1, 1, variables[sigma[l]])
                        den = _binom(ctx, 1, 1, variables[sigma[lp]], -1, -1, variables[sigma[l]])
                        w = w * num / den
        else:
            inv = [0] * n
            for i, si in enumerate(sigma):
                inv[si] = i
            for l in range(n):
                for lp in range(l + 1, n):
                    if inv[l] > inv[lp]:
                        num = _binom(ctx, 1, 1, variables[l], -1, -1, variables[lp])
                        den = _binom(ctx, 1, -1, variables[l], -1, 1, variables[lp])
                        w = w * num / den
        subst = {variables[i]: variables[sigma[i]] for i in range(n)}
        yield subst, w


def q_symmetrize(F: MRat, variables, flavor: str = "qsym", cap: int = DEFAULT_SYM_CAP) -> MRat:
    """Weighted sum over S_n of variable-permuted copies of F."""
    if isinstance(variables, VarTuple):
        variables = list(variables.vars)
    parts = []
    for subst, w in sym_terms(variables, flavor, cap):
        parts.append(w * F.substitute(subst, ctx=F.ctx.union(w.ctx)))
    return MRat.sum(parts)


# ---------------------------------------------------------------------------
# Interpolation functions phi (plus flavor) and phi-tilde (minus flavor)
# ---------------------------------------------------------------------------


def phi(target, nodes, j: int, flavor: str = "plus") -> MRat:
    """Interpolation function attached to node j (1-based).

    plus flavor:  phi_{s_j}(s)      = prod_{i != j} (s-s_i)/(s_j-s_i)
                                      * prod_i (q^{-1}s_j - q s_i)/(q^{-1}s - q s_i)
    minus flavor: phi~_{s_j}(s), with q and q^{-1} exchanged in the second
    product.  Equal to delta_ij at the nodes; numerator degree < b; decays
    at infinity.
    """
    nodes = _as_vartuple(nodes)
    b = len(nodes)
    if not 1 <= j <= b:
        raise ArityMismatch(f"node index {j} outside 1..{b}")
    if flavor not in ("plus", "minus"):
        raise ValueError(f"unknown phi flavor {flavor!r}")
    sgn = 1 if flavor == "plus" else -1
    if isinstance(target, SpectralVar):
        ctx = VarContext((target,) + nodes.vars)
        target = MRat.var(target, ctx)
    else:
        ctx = target.ctx.union(VarContext(nodes.vars))
        target = target.lift(ctx)
    yj = nodes[j - 1]
    out = MRat.const(1, ctx)
    for i in range(b):
        yi = nodes[i]
        if i != j - 1:
            dn = _arg_diff(ctx, yj, yi)
            if dn.is_zero():
                raise DegenerateNodes("coincident interpolation nodes")
            out = out * (target - _arg(ctx, yi)) / dn
        num = MRat.lincomb([(1, -sgn + yj[1], yj[0]), (-1, sgn + yi[1], yi[0])], ctx)
        den = MRat.q(-sgn, ctx) * target - MRat.lincomb([(1, sgn + yi[1], yi[0])], ctx)
        if den.is_zero():
            raise DegenerateNodes("degenerate pole structure")
        out = out * num / den
    return out


# ---------------------------------------------------------------------------
# Partition function and Izergin determinant
# ---------------------------------------------------------------------------


def _triangle_prefactor(ctx, variables) -> MRat:
    out = MRat.const(1, ctx)
    for i in range(len(variables)):
        for j in range(i + 1, len(variables)):
            num = _binom(ctx, 1, 1, variables[i], -1, -1, variables[j])
            den = _binom(ctx, 1, 0, variables[i], -1, 0, variables[j])
            out = out * num / den
    return out


def partition_sym(t, s, side: str = "left", cap: int = DEFAULT_SYM_CAP) -> MRat:
    """Domain-wall partition function from the symmetrized kernel identity.

    left  = prod_{i<j} (q t_i - q^{-1} t_j)/(t_i - t_j) Sym_t Y(t; s-reversed) / prod t_i
    right = prod_{i<j} (q s_i - q^{-1} s_j)/(s_i - s_j) Sym_s Y(t; s) / prod t_i
    """
    t, s = _as_vartuple(t), _as_vartuple(s)
    if len(t) != len(s):
        raise ArityMismatch(f"|t| = {len(t)} but |s| = {len(s)}")
    if any(k for _, k in list(t) + list(s)):
        raise DegenerateNodes("partition function expects plain variables")
    ctx = _ctx_for(t, s)
    if side == "left":
        sym = q_symmetrize(y_kernel(t, s.reversed()), list(t.vars), "qsym", cap)
        pref = _triangle_prefactor(ctx, list(t.vars))
    elif side == "right":
        sym = q_symmetrize(y_kernel(t, s), list(s.vars), "qsym", cap)
        pref = _triangle_prefactor(ctx, list(s.vars))
    else:
        raise ValueError(f"unknown side {side!r}")
    out = pref * sym
    for v in t.vars:
        out = out / MRat.var(v, ctx)
    return out


def izergin_det(t, s, method: str = "auto") -> MRat:
    """Determinant form of the partition function.

    prefactor prod_{i,j}(q t_i - q^{-1} s_j) / prod_{i<j}(t_i-t_j)(s_j-s_i)
    times det | 1/((t_i - s_j)(q t_i - q^{-1} s_j)) |.

    The determinant is exact either way: 'bareiss' runs fraction-free
    elimination on a row-cleared polynomial matrix, 'minors' runs a
    shared-minor expansion directly over the factored rational entries.
    The cleared-matrix route swells badly from n = 4 on (dense degree-24
    products), so 'auto' switches to minors there; the two routes are
    cross-checked against each other for n <= 3 in the test suite.
    """
    t, s = _as_vartuple(t), _as_vartuple(s)
    n = len(t)
    if n != len(s):
        raise ArityMismatch(f"|t| = {len(t)} but |s| = {len(s)}")
    if n < 1:
        raise ArityMismatch("need at least one variable pair")
    if len(set(t.vars + s.vars)) != 2 * n:
        raise DegenerateNodes("repeated variable across argument tuples")
    ctx = _ctx_for(t, s)
    if method == "auto":
        method = "bareiss" if n <= 3 else "minors"

    if method == "minors":
        entries = [
            [
                (
                    MRat.q(1, ctx)
                    / _arg_diff(ctx, t[i], s[j])
                    / MRat.lincomb(
                        [(1, 2 + t[i][1], t[i][0]), (-1, s[j][1], s[j][0])], ctx
                    )
                )
                for j in range(n)
            ]
            for i in range(n)
        ]
        detA = _minor_dp_det(ctx, entries)
    elif method == "bareiss":
        detA = _izergin_bareiss(ctx, t, s, n)
    else:
        raise ValueError(f"unknown determinant method {method!r}")

    pref = MRat.const(1, ctx)
    for i in range(n):
        for j in range(n):
            pref = pref * MRat.lincomb(
                [(1, 1 + t[i][1], t[i][0]), (-1, -1 + s[j][1], s[j][0])], ctx
            )
    for i in range(n):
        for j in range(i + 1, n):
            pref = pref / _arg_diff(ctx, t[i], t[j])
            pref = pref / _arg_diff(ctx, s[j], s[i])
    return pref * detA


def _minor_dp_det(ctx, entries) -> MRat:
    """Determinant by last-row expansion with shared minors over column
    subsets (exact rational arithmetic, factored denominators)."""
    n = len(entries)
    minors = {frozenset(): MRat.const(1, ctx)}
    for r in range(n):
        new: dict = {}
        for cols in itertools.combinations(range(n), r + 1):
            key = frozenset(cols)
            parts = []
            for pos, j in enumerate(cols):
                sub = minors[key - {j}]
                term = entries[r][j] * sub
                parts.append(term if (r + pos) % 2 == 0 else -term)
            new[key] = MRat.sum(parts)
        minors = new
    return minors[frozenset(range(n))]


def _izergin_bareiss(ctx, t, s, n) -> MRat:
    pk = ctx.packing

    def lin_poly(e1, e2, qshift):
        (v1, k1), (v2, k2) = e1, e2
        a = pc.var(pk, ctx.index(v1), 1, qshift + k1)
        b = pc.var(pk, ctx.index(v2), 1, k2)
        return pc.sub(a, b)

    # A_ij = 1/((t_i - s_j)(q t_i - q^{-1} s_j)) = q / ((t_i - s_j)(q^2 t_i - s_j))
    u = [[lin_poly(t[i], s[j], 0) for j in range(n)] for i in range(n)]
    v = [[lin_poly(t[i], s[j], 2) for j in range(n)] for i in range(n)]
    M = []
    for i in range(n):
        row = []
        for j in range(n):
            p = {0: 1}
            for jp in range(n):
                if jp != j:
                    p = pc.mul(p, u[i][jp])
                    p = pc.mul(p, v[i][jp])
            row.append(p)
        M.append(row)
    detM, sign = _bareiss_det(pk, M)
    den = {}
    for i in range(n):
        for j in range(n):
            for f in (u[i][j], v[i][j]):
                key = tuple(sorted(f.items()))
                if key in den:
                    den[key] = (f, den[key][1] + 1)
                else:
                    den[key] = (f, 1)
    from .exactarith import _normalize_parts, _reduce  # internal reuse

    return _reduce(_normalize_parts(ctx, Fraction(sign), n, detM, den))


def _bareiss_det(pk, M):
    """Fraction-free determinant of a square polynomial matrix.

    Returns (det polynomial, sign).  Exact divisions by the previous pivot
    are guaranteed by the Bareiss identity.
    """
    n = len(M)
    M = [row[:] for row in M]
    sign = 1
    prev = {0: 1}
    for k in range(n - 1):
        if not M[k][k]:
            for r in range(k + 1, n):
                if M[r][k]:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return {}, 1
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pc.sub(pc.mul(M[k][k], M[i][j]), pc.mul(M[i][k], M[k][j]))
                if not num:
                    M[i][j] = {}
                    continue
                quot = pc.divexact(pk, num, prev)
                if quot is None:
                    raise AssertionError("Bareiss division failed")
                M[i][j] = quot
            M[i][k] = {}
        prev = M[k][k]
    return M[n - 1][n - 1], sign


# ---------------------------------------------------------------------------
# Numeric (Schwartz-Zippel) evaluation of the identity sides
# ---------------------------------------------------------------------------


def _y_value(ts, ss, q: Fraction) -> Fraction:
    k = len(ts)
    out = Fraction(1)
    qi = 1 / q
    for i in range(k):
        d = ts[i] - ss[i]
        if d == 0:
            raise ZeroDivisionError
        out *= ts[i] / d
        for j in range(i):
            d = ts[i] - ss[j]
            if d == 0:
                raise ZeroDivisionError
            out *= (q * ts[i] - qi * ss[j]) / d
    return out


def _qsym_value(fn, vals, q: Fraction) -> Fraction:
    n = len(vals)
    qi = 1 / q
    total = Fraction(0)
    for sigma in itertools.permutations(range(n)):
        w = Fraction(1)
        for l in range(n):
            for lp in range(l + 1, n):
                if sigma[l] > sigma[lp]:
                    d = q * vals[sigma[lp]] - qi * vals[sigma[l]]
                    if d == 0:
                        raise ZeroDivisionError
                    w *= (qi * vals[sigma[lp]] - q * vals[sigma[l]]) / d
        total += w * fn([vals[sigma[i]] for i in range(n)])
    return total


def _triangle_value(vals, q: Fraction) -> Fraction:
    out = Fraction(1)
    qi = 1 / q
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            d = vals[i] - vals[j]
            if d == 0:
                raise ZeroDivisionError
            out *= (q * vals[i] - qi * vals[j]) / d
    return out


def _partition_value(ts, ss, q: Fraction, side: str) -> Fraction:
    if side == "left":
        sym = _qsym_value(lambda tt: _y_value(tt, list(reversed(ss)), q), ts, q)
        pref = _triangle_value(ts, q)
    else:
        sym = _qsym_value(lambda sb: _y_value(ts, sb, q), ss, q)
        pref = _triangle_value(ss, q)
    out = pref * sym
    for v in ts:
        out /= v
    return out


def _izergin_value(ts, ss, q: Fraction) -> Fraction:
    n = len(ts)
    qi = 1 / q
    A = []
    for i in range(n):
        row = []
        for j in range(n):
            d = (ts[i] - ss[j]) * (q * ts[i] - qi * ss[j])
            if d == 0:
                raise ZeroDivisionError
            row.append(1 / d)
        A.append(row)
    det = _fraction_det(A)
    pref = Fraction(1)
    for i in range(n):
        for j in range(n):
            pref *= q * ts[i] - qi * ss[j]
    for i in range(n):
        for j in range(i + 1, n):
            d = (ts[i] - ts[j]) * (ss[j] - ss[i])
            if d == 0:
                raise ZeroDivisionError
            pref /= d
    return pref * det


def _fraction_det(A) -> Fraction:
    n = len(A)
    A = [row[:] for row in A]
    det = Fraction(1)
    for k in range(n):
        piv = None
        for r in range(k, n):
            if A[r][k] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            det = -det
        det *= A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            for j in range(k, n):
                A[i][j] -= f * A[k][j]
    return det


# ---------------------------------------------------------------------------
# Identity verification
# ---------------------------------------------------------------------------


def _fresh_tuples(n: int):
    ts = [SpectralVar("t", i) for i in range(1, n + 1)]
    ss = [SpectralVar("s", i) for i in range(1, n + 1)]
    return ts, ss


def verify_kernel_identity(
    which: str,
    n: int,
    sigma=None,
    sigma_prime=None,
    mode: str = "auto",
    trials: int = 20,
    seed: int = 0,
    cap: int = DEFAULT_SYM_CAP,
) -> dict:
    """Check one of the catalogued kernel identities and report.

    which: 'idZZ1' | 'idZZ10' | 'detZ' | 'Zsym'.
    """
    if n > cap:
        raise SizeCap(f"n = {n} exceeds symmetrization cap {cap}")
    if mode == "auto":
        mode = "canonical" if n <= 3 else "probabilistic"
    sigma = tuple(sigma) if sigma is not None else tuple(range(n))
    sigma_prime = tuple(sigma_prime) if sigma_prime is not None else tuple(range(n))
    start = time.time()
    ts, ss = _fresh_tuples(n)
    report = {
        "identity": which,
        "n": n,
        "mode": mode,
        "sigma": list(sigma),
        "sigma_prime": list(sigma_prime),
    }

    if mode == "canonical":
        tt, st = VarTuple(ts), VarTuple(ss)
        ctx = _ctx_for(tt, st)
        if which == "idZZ1":
            lhs = _triangle_prefactor(ctx, ts) * q_symmetrize(
                y_kernel(tt, st.reversed()), ts, "qsym", cap
            )
            rhs = _triangle_prefactor(ctx, ss) * q_symmetrize(
                y_kernel(tt, st), ss, "qsym", cap
            )
            equal = lhs == rhs
        elif which == "idZZ10":
            sperm = st.permuted(sigma)
            tperm = tt.permuted(sigma_prime)
            lhs = _triangle_prefactor(ctx, ts) * q_symmetrize(
                y_kernel(tt, sperm), ts, "qsym", cap
            )
            rhs = _triangle_prefactor(ctx, ss) * q_symmetrize(
                y_kernel(tperm, st), ss, "qsym", cap
            )
            equal = lhs == rhs
        elif which == "detZ":
            equal = partition_sym(tt, st, "left", cap) == izergin_det(tt, st)
        elif which == "Zsym":
            z = partition_sym(tt, st, "left", cap)
            equal = True
            for group in (ts, ss):
                for i in range(n):
                    for j in range(i + 1, n):
                        swap = {group[i]: group[j], group[j]: group[i]}
                        if z.permute({**swap}) != z:
                            equal = False
                            report["violating_swap"] = [group[i].name, group[j].name]
        else:
            raise UsageError(f"unknown kernel identity {which!r}")
        report["equal"] = bool(equal)
    elif mode == "probabilistic":
        rng = random.Random(seed)
        failures = 0
        done = 0
        while done < trials:
            for _ in range(MAX_POLE_RETRIES):
                tv = [random_rational(rng) for _ in range(n)]
                sv = [random_rational(rng) for _ in range(n)]
                qv = random_q(rng)
                try:
                    la, ra = _identity_values(which, tv, sv, qv, sigma, sigma_prime)
                except ZeroDivisionError:
                    continue
                break
            else:
                raise SampleExhaustion("no pole-free sample found")
            if la != ra:
                failures += 1
            done += 1
        report["equal"] = failures == 0
        report["trials"] = trials
        report["seed"] = seed
        # generous degree bound: every factor in every permutation term
        degree_bound = 2 * n * n + 4 * n
        report["false_positive_bound_per_trial"] = min(
            1.0, degree_bound / (2 * 10**6)
        )
    else:
        raise ValueError(f"unknown mode {mode!r}")
    report["time_s"] = round(time.time() - start, 6)
    return report


def _identity_values(which, tv, sv, qv, sigma, sigma_prime):
    if which == "idZZ1":
        lhs = _triangle_value(tv, qv) * _qsym_value(
            lambda tt: _y_value(tt, list(reversed(sv)), qv), tv, qv
        )
        rhs = _triangle_value(sv, qv) * _qsym_value(
            lambda sb: _y_value(tv, sb, qv), sv, qv
        )
        return lhs, rhs
    if which == "idZZ10":
        sp = [sv[i] for i in sigma]
        tp = [tv[i] for i in sigma_prime]
        lhs = _triangle_value(tv, qv) * _qsym_value(
            lambda tt: _y_value(tt, sp, qv), tv, qv
        )
        rhs = _triangle_value(sv, qv) * _qsym_value(
            lambda sb: _y_value(tp, sb, qv), sv, qv
        )
        return lhs, rhs
    if which == "detZ":
        return _partition_value(tv, sv, qv, "left"), _izergin_value(tv, sv, qv)
    if which == "Zsym":
        base = _partition_value(tv, sv, qv, "left")
        tv2 = tv[:]
        if len(tv2) >= 2:
            tv2[0], tv2[1] = tv2[1], tv2[0]
        return base, _partition_value(tv2, sv, qv, "left")
    raise ValueError(f"unknown kernel identity {which!r}")
