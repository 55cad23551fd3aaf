"""Sparse integer-coefficient polynomial engine with bit-packed monomials.

Polynomials live in Z[q, v_1, ..., v_n] where q is the deformation
parameter (always lane 0) and v_1..v_n are the spectral variables of a
declared context.  A monomial is packed into a single Python int:

    [ total spectral degree | e(v_1) | e(v_2) | ... | e(v_n) | e(q) ]

with LANE bits per field, most significant first.  Integer comparison of
packed keys therefore realises the degree-lexicographic order on the
spectral variables (v_1 strongest), with the q-degree as final tie break.
Monomial multiplication is integer addition; divisibility is a SWAR
guard-bit test.

A polynomial is a dict {packed key: int coefficient} with no zero
coefficients.  The zero polynomial is the empty dict.
"""

from __future__ import annotations

from fractions import Fraction
import heapq
from math import gcd as igcd

from .errors import SizeCap

LANE = 16
LANE_MAX = 1 << (LANE - 1)  # exponents must stay below 2^15 for the guard trick


class Packing:
    """Monomial packing descriptor for q plus ``nspec`` spectral variables."""

    __slots__ = ("nspec", "qshift", "shifts", "totshift", "guards", "lanemask")

    def __init__(self, nspec: int):
        self.nspec = nspec
        # lane order (LSB first): q, v_n, v_{n-1}, ..., v_1, totdeg
        self.qshift = 0
        self.shifts = tuple(LANE * (nspec - i) for i in range(nspec))
        self.totshift = LANE * (nspec + 1)
        guards = 0
        for lane in range(nspec + 2):
            guards |= 1 << (LANE * lane + LANE - 1)
        self.guards = guards
        self.lanemask = (1 << LANE) - 1

    def pack(self, qexp: int, exps) -> int:
        tot = 0
        key = qexp
        if qexp < 0 or qexp >= LANE_MAX:
            raise SizeCap(f"q-exponent {qexp} out of packable range")
        for i, e in enumerate(exps):
            if e < 0 or e >= LANE_MAX:
                raise SizeCap(f"exponent {e} out of packable range")
            key |= e << self.shifts[i]
            tot += e
        if tot >= LANE_MAX:
            raise SizeCap(f"total degree {tot} out of packable range")
        return key | (tot << self.totshift)

    def unpack(self, key: int):
        """Return (qexp, spectral exponent tuple)."""
        m = self.lanemask
        qexp = key & m
        exps = tuple((key >> s) & m for s in self.shifts)
        return qexp, exps

    def qexp(self, key: int) -> int:
        return key & self.lanemask

    def spec_exp(self, key: int, i: int) -> int:
        return (key >> self.shifts[i]) & self.lanemask

    def divides(self, b: int, a: int) -> bool:
        """True iff monomial b divides monomial a (all lanes of a >= b)."""
        return ((a | self.guards) - b) & self.guards == self.guards


def zero() -> dict:
    return {}


def const(pk: Packing, c: int) -> dict:
    return {0: c} if c else {}


def mono(pk: Packing, c: int, qexp: int = 0, exps=None) -> dict:
    if not c:
        return {}
    return {pk.pack(qexp, exps if exps is not None else (0,) * pk.nspec): c}


def var(pk: Packing, i: int, c: int = 1, qexp: int = 0) -> dict:
    exps = [0] * pk.nspec
    exps[i] = 1
    return mono(pk, c, qexp, exps)


def is_zero(a: dict) -> bool:
    return not a


def add(a: dict, b: dict) -> dict:
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    get = out.get
    for k, c in b.items():
        r = get(k, 0) + c
        if r:
            out[k] = r
        else:
            del out[k]
    return out


def iadd(out: dict, b: dict) -> dict:
    """In-place add (out is mutated and returned)."""
    get = out.get
    for k, c in b.items():
        r = get(k, 0) + c
        if r:
            out[k] = r
        else:
            del out[k]
    return out


def neg(a: dict) -> dict:
    return {k: -c for k, c in a.items()}


def sub(a: dict, b: dict) -> dict:
    return iadd(dict(a), neg(b)) if b else dict(a)


def scale(a: dict, c: int) -> dict:
    if not c:
        return {}
    if c == 1:
        return dict(a)
    return {k: cc * c for k, cc in a.items()}


def mul_term(a: dict, key: int, c: int) -> dict:
    if not c:
        return {}
    return {k + key: cc * c for k, cc in a.items()}


def mul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    if len(a) == 1:
        ((k, c),) = a.items()
        return mul_term(b, k, c)
    out: dict = {}
    get = out.get
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            k = k1 + k2
            r = get(k, 0) + c1 * c2
            if r:
                out[k] = r
            else:
                out.pop(k, None)
    return out


def lead(a: dict) -> int:
    return max(a)


def trail(a: dict) -> int:
    return min(a)


def divexact(pk: Packing, a: dict, b: dict):
    """Exact quotient a/b, or None when b does not divide a."""
    if not a:
        return {}
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(b) == 1:
        ((kb, cb),) = b.items()
        out = {}
        for k, c in a.items():
            if not pk.divides(kb, k):
                return None
            q, r = divmod(c, cb)
            if r:
                return None
            out[k - kb] = q
        return out
    lb = max(b)
    cb = b[lb]
    tb = min(b)
    # fail fast on leading/trailing monomial divisibility
    if not pk.divides(lb, max(a)) or not pk.divides(tb, min(a)):
        return None
    r = dict(a)
    q_: dict = {}
    bitems = [(k, c) for k, c in b.items() if k != lb]
    # lazy max-heap over remaining keys (heapq is a min-heap, so negate)
    heap = [-k for k in r]
    heapq.heapify(heap)
    while heap:
        lr = -heapq.heappop(heap)
        c = r.get(lr)
        if c is None:
            continue  # stale entry
        del r[lr]
        if not pk.divides(lb, lr):
            return None
        m = lr - lb
        c, rem = divmod(c, cb)
        if rem:
            return None
        q_[m] = c
        rget = r.get
        for kb2, cb2 in bitems:
            kk = m + kb2
            old = rget(kk, 0)
            rr = old - c * cb2
            if rr:
                if old == 0:
                    heapq.heappush(heap, -kk)
                r[kk] = rr
            elif old:
                del r[kk]
    return None if r else q_


def content(a: dict) -> int:
    """gcd of the integer coefficients (0 for the zero polynomial)."""
    g = 0
    for c in a.values():
        g = igcd(g, c)
        if g == 1:
            return 1
    return g


def divide_content(a: dict, g: int) -> dict:
    if g == 1:
        return dict(a)
    return {k: c // g for k, c in a.items()}


def lead_coeff(a: dict) -> int:
    return a[max(a)] if a else 0


def spec_degree(pk: Packing, a: dict, i: int) -> int:
    return max((pk.spec_exp(k, i) for k in a), default=0) if a else 0


def q_degree(pk: Packing, a: dict) -> int:
    return max((pk.qexp(k) for k in a), default=0) if a else 0


def total_spec_degree(pk: Packing, a: dict) -> int:
    return max((k >> pk.totshift for k in a), default=0) if a else 0


def min_qexp(pk: Packing, a: dict) -> int:
    return min((pk.qexp(k) for k in a), default=0) if a else 0


def shift_q(pk: Packing, a: dict, delta: int) -> dict:
    """Multiply by q**delta (delta may be negative if all q-exponents allow)."""
    if not a or delta == 0:
        return dict(a)
    return {k + delta: c for k, c in a.items()}


def eval_frac(pk: Packing, a: dict, qval: Fraction, vals) -> Fraction:
    """Evaluate at q=qval, v_i=vals[i]; all values Fractions (or ints)."""
    total = Fraction(0)
    powcache: dict = {}
    for k, c in a.items():
        qe, exps = pk.unpack(k)
        term = Fraction(c)
        if qe:
            key = (-1, qe)
            p = powcache.get(key)
            if p is None:
                p = Fraction(qval) ** qe
                powcache[key] = p
            term *= p
        for i, e in enumerate(exps):
            if e:
                key = (i, e)
                p = powcache.get(key)
                if p is None:
                    p = Fraction(vals[i]) ** e
                    powcache[key] = p
                term *= p
        total += term
    return total


def repack(a: dict, old: Packing, new: Packing, var_map) -> dict:
    """Translate to another packing; var_map[i] = new index of old v_i."""
    out = {}
    for k, c in a.items():
        qe, exps = old.unpack(k)
        nexps = [0] * new.nspec
        for i, e in enumerate(exps):
            if e:
                nexps[var_map[i]] += e
        nk = new.pack(qe, nexps)
        out[nk] = out.get(nk, 0) + c
    return {k: c for k, c in out.items() if c}


def subst_monomial(pk: Packing, a: dict, i: int, j, c_qexp: int):
    """Substitute v_i -> q**c_qexp * v_j (j may be None to drop the variable,
    i.e. substitute v_i -> q**c_qexp).

    Returns (poly, shift) where poly = q**shift * (true image) with the
    minimal shift >= 0 that keeps all q-exponents non-negative.
    """
    if not a:
        return {}, 0
    items = []
    minq = 0
    for k, c in a.items():
        qe, exps = pk.unpack(k)
        e = exps[i]
        if e:
            lst = list(exps)
            lst[i] = 0
            if j is not None:
                lst[j] += e
            qe += c_qexp * e
            items.append((qe, tuple(lst), c))
        else:
            items.append((qe, exps, c))
        if qe < minq:
            minq = qe
    shift = -minq
    out: dict = {}
    for qe, exps, c in items:
        k = pk.pack(qe + shift, exps)
        r = out.get(k, 0) + c
        if r:
            out[k] = r
        else:
            del out[k]
    return out, shift


def scale_var(pk: Packing, a: dict, i: int, c_qexp: int):
    """Substitute v_i -> q**c_qexp * v_i; returns (poly, shift) as above."""
    return subst_monomial_scale(pk, a, i, c_qexp)


def subst_monomial_scale(pk: Packing, a: dict, i: int, c_qexp: int):
    if not a or c_qexp == 0:
        return dict(a), 0
    items = []
    minq = 0
    for k, c in a.items():
        qe, exps = pk.unpack(k)
        qe += c_qexp * exps[i]
        items.append((qe, exps, c))
        if qe < minq:
            minq = qe
    shift = -minq
    out: dict = {}
    for qe, exps, c in items:
        k = pk.pack(qe + shift, exps)
        out[k] = out.get(k, 0) + c
    return {k: c for k, c in out.items() if c}, shift


def sorted_terms(a: dict):
    """Terms sorted descending in the canonical (deglex, then q) order."""
    return sorted(a.items(), key=lambda kv: kv[0], reverse=True)


# ---------------------------------------------------------------------------
# General multivariate gcd (rare fallback path; primitive PRS on an
# unpacked recursive representation).  Hot-path cancellations are done by
# trial division against factored denominators instead.
# ---------------------------------------------------------------------------


def _unpack_poly(pk: Packing, a: dict) -> dict:
    out = {}
    for k, c in a.items():
        qe, exps = pk.unpack(k)
        out[(qe,) + exps] = c
    return out


def _pack_poly(pk: Packing, a: dict) -> dict:
    out = {}
    for exps, c in a.items():
        out[pk.pack(exps[0], exps[1:])] = c
    return out


def _t_degree(a: dict, i: int) -> int:
    return max((m[i] for m in a), default=0)


def _t_content_int(a: dict) -> int:
    g = 0
    for c in a.values():
        g = igcd(g, c)
        if g == 1:
            return 1
    return g


def _t_scale(a: dict, c: int) -> dict:
    return {m: cc * c for m, cc in a.items()} if c else {}


def _t_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            r = out.get(m, 0) + c1 * c2
            if r:
                out[m] = r
            else:
                out.pop(m, None)
    return out


def _t_to_univar(a: dict, i: int) -> dict:
    """View as univariate in variable i: {deg: coefficient tuple-poly}."""
    out: dict = {}
    for m, c in a.items():
        d = m[i]
        mm = m[:i] + (0,) + m[i + 1 :]
        out.setdefault(d, {})[mm] = c
    return out


def _t_from_univar(u: dict, i: int) -> dict:
    out: dict = {}
    for d, p in u.items():
        for m, c in p.items():
            mm = m[:i] + (d,) + m[i + 1 :]
            out[mm] = c
    return out


def _t_poly_content(u: dict, nv: int) -> dict:
    """gcd of the coefficient polynomials of a univariate view."""
    g: dict = {}
    for p in u.values():
        g = _t_gcd(g, p, nv)
        if len(g) == 1 and next(iter(g.values())) in (1, -1) and not any(next(iter(g))):
            return {(0,) * nv: 1}
    return g


def _t_divexact(a: dict, b: dict):
    """Exact division for tuple polys (None if inexact)."""
    if not a:
        return {}
    nv = len(next(iter(b)))
    lb = max(b, key=lambda m: (sum(m), m))
    cb = b[lb]
    r = dict(a)
    q_: dict = {}
    while r:
        lr = max(r, key=lambda m: (sum(m), m))
        m = tuple(x - y for x, y in zip(lr, lb))
        if any(x < 0 for x in m):
            return None
        c, rem = divmod(r[lr], cb)
        if rem:
            return None
        q_[m] = c
        for mb, cbb in b.items():
            mm = tuple(x + y for x, y in zip(m, mb))
            rr = r.get(mm, 0) - c * cbb
            if rr:
                r[mm] = rr
            else:
                r.pop(mm, None)
    return q_


def _t_prem(f: dict, g: dict, i: int):
    """Pseudo-remainder of f by g with respect to variable i."""
    uf = _t_to_univar(f, i)
    ug = _t_to_univar(g, i)
    df = max(uf)
    dg = max(ug)
    lg = ug[dg]
    r = uf
    dr = df
    while r and dr >= dg:
        lr = r.get(dr)
        if lr is None:
            dr -= 1
            continue
        # r = lg*r - lr * x^(dr-dg) * g; the two top-degree terms cancel,
        # so both are skipped explicitly.
        nr: dict = {}
        for d, p in r.items():
            if d == dr:
                continue
            nr[d] = _t_mul(p, lg)
        for d, p in ug.items():
            if d == dg:
                continue
            dd = d + dr - dg
            t = _t_mul(p, lr)
            if dd in nr:
                q = {m: c for m, c in nr[dd].items()}
                for m, c in t.items():
                    rr = q.get(m, 0) - c
                    if rr:
                        q[m] = rr
                    else:
                        q.pop(m, None)
                if q:
                    nr[dd] = q
                else:
                    nr.pop(dd, None)
            else:
                t = _t_scale(t, -1)
                if t:
                    nr[dd] = t
        r = {d: p for d, p in nr.items() if p}
        dr = max(r) if r else -1
    return _t_from_univar(r, i) if r else {}


def _t_gcd(a: dict, b: dict, nv: int) -> dict:
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    ca, cb = _t_content_int(a), _t_content_int(b)
    a = {m: c // ca for m, c in a.items()}
    b = {m: c // cb for m, c in b.items()}
    cg = igcd(ca, cb)
    # pick the first variable active in both
    main = None
    for i in range(nv):
        if _t_degree(a, i) > 0 and _t_degree(b, i) > 0:
            main = i
            break
    if main is None:
        # variables are disjoint: gcd of contents only
        for i in range(nv):
            if _t_degree(a, i) > 0 or _t_degree(b, i) > 0:
                ua = _t_to_univar(a, i) if _t_degree(a, i) else {0: a}
                ub = _t_to_univar(b, i) if _t_degree(b, i) else {0: b}
                g = _t_gcd(_t_poly_content(ua, nv), _t_poly_content(ub, nv), nv)
                return _t_scale(g, cg) if cg != 1 else g
        return {(0,) * nv: cg}
    ua = _t_to_univar(a, main)
    ub = _t_to_univar(b, main)
    conta = _t_poly_content(ua, nv)
    contb = _t_poly_content(ub, nv)
    contg = _t_gcd(conta, contb, nv)
    pa = _t_divexact(a, conta)
    pb = _t_divexact(b, contb)
    if _t_degree(pa, main) < _t_degree(pb, main):
        pa, pb = pb, pa
    # primitive PRS
    while True:
        if not pb:
            g = pa
            break
        if _t_degree(pb, main) == 0:
            g = {(0,) * nv: 1}
            break
        r = _t_prem(pa, pb, main)
        if not r:
            g = pb
            break
        cr = _t_content_int(r)
        r = {m: c // cr for m, c in r.items()}
        ur = _t_to_univar(r, main)
        contr = _t_poly_content(ur, nv)
        r = _t_divexact(r, contr)
        pa, pb = pb, r
    cgp = _t_content_int(g)
    g = {m: c // cgp for m, c in g.items()}
    g = _t_mul(g, contg)
    if cg != 1:
        g = _t_scale(g, cg)
    # sign normalisation: leading coefficient positive
    lm = max(g, key=lambda m: (sum(m), m))
    if g[lm] < 0:
        g = _t_scale(g, -1)
    return g


def poly_gcd(pk: Packing, a: dict, b: dict) -> dict:
    """General multivariate gcd over Z (content included); fallback path."""
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    ta = _unpack_poly(pk, a)
    tb = _unpack_poly(pk, b)
    g = _t_gcd(ta, tb, pk.nspec + 1)
    return _pack_poly(pk, g)
