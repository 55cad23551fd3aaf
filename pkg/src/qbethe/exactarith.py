"""Exact coefficient field Q(q) and multivariate rational arithmetic.

Every value of the engine is an ``MRat``: a rational function in named
spectral variables over the field Q(q), held in the normal form

    coeff * q**qexp * num / prod(factor_i ** mult_i)

where ``coeff`` is a Fraction, ``num`` and every denominator factor are
primitive integer polynomials in (q, spectral vars) with positive leading
coefficient and zero q-content.  Denominators are kept as factor multisets
so that the cancellations that actually occur in this problem domain
(binomial factors such as t_i - s_j or q^2 t_i - s_j) reduce to cheap
trial divisions.  A fully expanded, gcd-reduced canonical (num, den) pair
is computed on demand for emission and structural comparison.

``QScalar`` is the zero-spectral-variable case: a reduced ratio of integer
polynomials in q.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import gcd as igcd

from . import polycore as pc
from .errors import (
    ContextMismatch,
    DivisionByZero,
    PoleAtSample,
    SampleExhaustion,
)

ROLE_ORDER = {"t": 0, "s": 1, "u": 2, "w": 3, "z": 4}


@total_ordering
@dataclass(frozen=True)
class SpectralVar:
    """A named spectral variable: role tag plus positive index."""

    role: str
    index: int

    def __post_init__(self):
        if self.role not in ROLE_ORDER:
            raise ValueError(f"unknown variable role {self.role!r}")
        if self.index < 1:
            raise ValueError("variable index must be a positive integer")

    @property
    def name(self) -> str:
        return f"{self.role}{self.index}"

    @classmethod
    def parse(cls, name: str) -> "SpectralVar":
        m = re.fullmatch(r"([tsuwz])(\d+)", name)
        if not m:
            raise ValueError(f"cannot parse spectral variable {name!r}")
        return cls(m.group(1), int(m.group(2)))

    def sort_key(self):
        return (ROLE_ORDER[self.role], self.index)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return self.name


def tvar(i: int) -> SpectralVar:
    return SpectralVar("t", i)


def svar(i: int) -> SpectralVar:
    return SpectralVar("s", i)


def uvar(i: int) -> SpectralVar:
    return SpectralVar("u", i)


def wvar(i: int) -> SpectralVar:
    return SpectralVar("w", i)


def zvar(i: int) -> SpectralVar:
    return SpectralVar("z", i)


class VarContext:
    """An ordered set of spectral variables with its monomial packing.

    The order is canonical: t_1 < ... < t_a < s_1 < ... < u < w < z.
    """

    __slots__ = ("vars", "pos", "packing")
    _cache: dict = {}

    def __new__(cls, variables=()):
        vs = tuple(sorted(set(variables)))
        hit = cls._cache.get(vs)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "pos", {v: i for i, v in enumerate(vs)})
        object.__setattr__(self, "packing", pc.Packing(len(vs)))
        cls._cache[vs] = self
        return self

    def __len__(self):
        return len(self.vars)

    def __contains__(self, v):
        return v in self.pos

    def union(self, other: "VarContext") -> "VarContext":
        if other is self:
            return self
        return VarContext(self.vars + other.vars)

    def index(self, v: SpectralVar) -> int:
        try:
            return self.pos[v]
        except KeyError:
            raise ContextMismatch(f"variable {v} not in context {self.vars}")

    def __repr__(self):
        return f"VarContext({', '.join(v.name for v in self.vars)})"


EMPTY_CTX = VarContext(())


def _fkey(f: dict):
    return tuple(sorted(f.items()))


def _classify_factor(pk, f) -> bool:
    """Conservative irreducibility certificate for a normalized factor.

    True only for two-term factors c1*q^a*m1 + c2*q^b*m2 that are linear
    in some variable occurring in exactly one of the two monomials (after
    monomial-content extraction) -- the binomial shapes this engine's
    denominators are built from.  Anything else is treated as possibly
    composite and gets a full gcd at canonicalization time.
    """
    if len(f) != 2:
        return False
    (k1, _), (k2, _) = f.items()
    _, e1 = pk.unpack(k1)
    _, e2 = pk.unpack(k2)
    for a, b in zip(e1, e2):
        if (a == 1 and b == 0) or (a == 0 and b == 1):
            return True
    return False


def _normalize_parts(ctx, coeff, qexp, num, den):
    """Restore the normal-form invariants on raw parts.

    ``den`` maps factor keys to (poly, mult) or (poly, mult, irr).
    """
    if not num or coeff == 0:
        return MRat._make(ctx, Fraction(0), 0, {}, {})
    pk = ctx.packing
    # integer content and sign of the numerator
    c = pc.content(num)
    if num[pc.lead(num)] < 0:
        c = -c
    if c != 1:
        num = pc.divide_content(num, c)
        coeff = coeff * c
    mq = pc.min_qexp(pk, num)
    if mq:
        num = pc.shift_q(pk, num, -mq)
        qexp += mq
    nden: dict = {}

    def put(f, m, irr):
        k = _fkey(f)
        if k in nden:
            f0, m0, irr0 = nden[k]
            nden[k] = (f0, m0 + m, irr0 and irr)
        else:
            nden[k] = (f, m, irr)

    for entry in den.values():
        if len(entry) == 2:
            f, m = entry
            irr = None
        else:
            f, m, irr = entry
        if m <= 0:
            continue
        cf = pc.content(f)
        if f[pc.lead(f)] < 0:
            cf = -cf
        if cf != 1:
            f = pc.divide_content(f, cf)
            coeff = coeff / (cf**m)
        # common monomial content (q and spectral) of the factor
        kc = None
        for k in f:
            kc = k if kc is None else _key_min(pk, kc, k)
        if kc:
            f = {k - kc: cc for k, cc in f.items()}
            qe, exps = pk.unpack(kc)
            qexp -= qe * m
            for i, e in enumerate(exps):
                if e:
                    put(pc.var(pk, i), e * m, True)
        if len(f) == 1 and pc.lead(f) == 0:
            continue  # constant factor absorbed into coeff
        if len(f) == 1:
            qe, exps = pk.unpack(pc.lead(f))
            qexp -= qe * m
            for i, e in enumerate(exps):
                if e:
                    put(pc.var(pk, i), e * m, True)
            continue
        if irr is None:
            irr = _classify_factor(pk, f)
        put(f, m, irr)
    return MRat._make(ctx, coeff, qexp, num, nden)


def _key_min(pk, k1, k2):
    """Lane-wise minimum of two packed monomial keys."""
    q1, e1 = pk.unpack(k1)
    q2, e2 = pk.unpack(k2)
    return pk.pack(min(q1, q2), tuple(min(a, b) for a, b in zip(e1, e2)))


def _reduce(r: "MRat") -> "MRat":
    """Cancel denominator factors dividing the numerator exactly."""
    if not r.num:
        return MRat._make(r.ctx, Fraction(0), 0, {}, {})
    pk = r.ctx.packing
    num = r.num
    qexp = r.qexp
    coeff = r.coeff
    den = {}
    changed = False
    la, ta = max(num), min(num)
    for key, (f, m, irr) in r.den.items():
        while m > 0:
            if len(f) > 1:
                # cheap pre-check against the cached extreme monomials
                if not pk.divides(max(f), la) or not pk.divides(min(f), ta):
                    break
            q_ = pc.divexact(pk, num, f)
            if q_ is None:
                break
            num = q_
            la, ta = max(num), min(num)
            m -= 1
            changed = True
        if m:
            den[key] = (f, m, irr)
    if not changed:
        return r
    return _normalize_parts(r.ctx, coeff, qexp, num, den)


class MRat:
    """Canonical multivariate rational function over Q(q)."""

    __slots__ = ("ctx", "coeff", "qexp", "num", "den", "_pair")

    def __init__(self, value=0, ctx: VarContext = EMPTY_CTX):
        built = _from_value(value, ctx)
        object.__setattr__(self, "ctx", built.ctx)
        object.__setattr__(self, "coeff", built.coeff)
        object.__setattr__(self, "qexp", built.qexp)
        object.__setattr__(self, "num", built.num)
        object.__setattr__(self, "den", built.den)
        object.__setattr__(self, "_pair", None)

    @classmethod
    def _make(cls, ctx, coeff, qexp, num, den):
        self = object.__new__(cls)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "qexp", qexp)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_pair", None)
        return self

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, value, ctx: VarContext = EMPTY_CTX) -> "MRat":
        c = Fraction(value)
        if c == 0:
            return cls._make(ctx, Fraction(0), 0, {}, {})
        return cls._make(ctx, c, 0, {0: 1}, {})

    @classmethod
    def var(cls, v: SpectralVar, ctx: VarContext | None = None) -> "MRat":
        if ctx is None:
            ctx = VarContext((v,))
        i = ctx.index(v)
        return cls._make(ctx, Fraction(1), 0, pc.var(ctx.packing, i), {})

    @classmethod
    def q(cls, power: int = 1, ctx: VarContext = EMPTY_CTX) -> "MRat":
        return cls._make(ctx, Fraction(1), power, {0: 1}, {})

    @classmethod
    def lincomb(cls, terms, ctx: VarContext) -> "MRat":
        """Polynomial sum of (coeff:int, qpow:int, var or None) monomials."""
        pk = ctx.packing
        shift = max(0, -min((qp for _, qp, _ in terms), default=0))
        poly: dict = {}
        for c, qp, v in terms:
            if v is None:
                mono = pc.mono(pk, c, qp + shift)
            else:
                mono = pc.var(pk, ctx.index(v), c, qp + shift)
            pc.iadd(poly, mono)
        return _normalize_parts(ctx, Fraction(1), -shift, poly, {})

    @classmethod
    def sum(cls, terms) -> "MRat":
        """Sum many rational functions over the factored common denominator.

        Equivalent to repeated ``+`` but defers cancellation to a single
        final reduction, which is what symmetrization sums need.
        """
        terms = [t for t in terms if isinstance(t, MRat) or t]
        terms = [t if isinstance(t, MRat) else MRat.const(t) for t in terms]
        terms = [t for t in terms if not t.is_zero()]
        if not terms:
            return cls.const(0)
        ctx = terms[0].ctx
        for t in terms[1:]:
            ctx = ctx.union(t.ctx)
        terms = [t.lift(ctx) for t in terms]
        pk = ctx.packing
        den: dict = {}
        for t in terms:
            for k, (f, m, irr) in t.den.items():
                if k in den:
                    den[k] = (den[k][0], max(den[k][1], m), den[k][2])
                else:
                    den[k] = (f, m, irr)
        L = 1
        for t in terms:
            d = t.coeff.denominator
            L = L * d // igcd(L, d)
        qm = min(t.qexp for t in terms)
        total: dict = {}
        for t in terms:
            n = t.num
            for k, (f, m, _irr) in den.items():
                mt = t.den[k][1] if k in t.den else 0
                for _ in range(m - mt):
                    n = pc.mul(n, f)
            n = pc.scale(n, int(t.coeff * L))
            n = pc.shift_q(pk, n, t.qexp - qm)
            pc.iadd(total, n)
        return _reduce(_normalize_parts(ctx, Fraction(1, L), qm, total, den))

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return (
            not self.den
            and self.qexp == 0
            and self.coeff == 1
            and self.num == {0: 1}
        )

    def total_degree(self) -> int:
        pk = self.ctx.packing
        d = pc.total_spec_degree(pk, self.num)
        for f, m, _irr in self.den.values():
            d += pc.total_spec_degree(pk, f) * m
        return d

    def free_vars(self):
        pk = self.ctx.packing
        seen = set()
        for poly in [self.num] + [f for f, _m, _irr in self.den.values()]:
            for k in poly:
                for i, v in enumerate(self.ctx.vars):
                    if v not in seen and pk.spec_exp(k, i):
                        seen.add(v)
        return seen

    # -- context lifting -----------------------------------------------------

    def lift(self, ctx: VarContext) -> "MRat":
        if ctx is self.ctx:
            return self
        vmap = [ctx.index(v) for v in self.ctx.vars]
        pk, npk = self.ctx.packing, ctx.packing
        num = pc.repack(self.num, pk, npk, vmap)
        den = {}
        for f, m, irr in self.den.values():
            nf = pc.repack(f, pk, npk, vmap)
            den[_fkey(nf)] = (nf, m, irr)
        return MRat._make(ctx, self.coeff, self.qexp, num, den)

    def _unified(self, other: "MRat"):
        if isinstance(other, (int, Fraction)):
            other = MRat.const(other, self.ctx)
        if self.ctx is other.ctx:
            return self, other
        ctx = self.ctx.union(other.ctx)
        return self.lift(ctx), other.lift(ctx)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        a, b = self._unified(other)
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        pk = a.ctx.packing
        den: dict = {}
        for k, (f, m, irr) in a.den.items():
            den[k] = (f, m, irr)
        for k, (f, m, irr) in b.den.items():
            if k in den:
                den[k] = (den[k][0], max(den[k][1], m), den[k][2])
            else:
                den[k] = (f, m, irr)
        na = a.num
        for k, (f, m, _irr) in den.items():
            ma = a.den[k][1] if k in a.den else 0
            for _ in range(m - ma):
                na = pc.mul(na, f)
        nb = b.num
        for k, (f, m, _irr) in den.items():
            mb = b.den[k][1] if k in b.den else 0
            for _ in range(m - mb):
                nb = pc.mul(nb, f)
        qm = min(a.qexp, b.qexp)
        ca, cb = a.coeff, b.coeff
        L = (ca.denominator * cb.denominator) // igcd(
            ca.denominator, cb.denominator
        )
        ia = int(ca * L)
        ib = int(cb * L)
        na = pc.shift_q(pk, pc.scale(na, ia), a.qexp - qm)
        nb = pc.shift_q(pk, pc.scale(nb, ib), b.qexp - qm)
        num = pc.iadd(na, nb)
        return _reduce(_normalize_parts(a.ctx, Fraction(1, L), qm, num, den))

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        if self.is_zero():
            return self
        return MRat._make(self.ctx, -self.coeff, self.qexp, self.num, self.den)

    def __sub__(self, other):
        a, b = self._unified(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0 or self.is_zero():
                return MRat._make(self.ctx, Fraction(0), 0, {}, {})
            return MRat._make(
                self.ctx, self.coeff * c, self.qexp, self.num, self.den
            )
        a, b = self._unified(other)
        if a.is_zero() or b.is_zero():
            return MRat._make(a.ctx, Fraction(0), 0, {}, {})
        den: dict = {}
        for k, (f, m, irr) in a.den.items():
            den[k] = (f, m, irr)
        for k, (f, m, irr) in b.den.items():
            if k in den:
                den[k] = (den[k][0], den[k][1] + m, den[k][2])
            else:
                den[k] = (f, m, irr)
        num = pc.mul(a.num, b.num)
        return _reduce(
            _normalize_parts(
                a.ctx, a.coeff * b.coeff, a.qexp + b.qexp, num, den
            )
        )

    def __rmul__(self, other):
        return self.__mul__(other)

    def inverse(self) -> "MRat":
        if self.is_zero():
            raise DivisionByZero("inverse of zero rational function")
        num = {0: 1}
        pk = self.ctx.packing
        for f, m, _irr in self.den.values():
            for _ in range(m):
                num = pc.mul(num, f)
        den = {_fkey(self.num): (self.num, 1)} if self.num != {0: 1} else {}
        return _reduce(
            _normalize_parts(self.ctx, 1 / self.coeff, -self.qexp, num, den)
        )

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                raise DivisionByZero("division by zero constant")
            return self * Fraction(1, 1) / MRat.const(c, self.ctx)
        a, b = self._unified(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return MRat.const(other, self.ctx) / self

    def __pow__(self, n: int):
        if n == 0:
            return MRat.const(1, self.ctx)
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    # -- canonical pair, equality, emission ----------------------------------

    def as_pair(self):
        """Fully expanded canonical (num, den) integer-polynomial pair.

        Both are content-free jointly, gcd-reduced, with the denominator's
        leading term (deglex, then q-degree) carrying a positive sign.
        """
        if self._pair is not None:
            return self._pair
        pk = self.ctx.packing
        num = self.num
        den = {0: 1}
        all_irr = True
        for f, m, irr in self.den.values():
            all_irr = all_irr and irr
            for _ in range(m):
                den = pc.mul(den, f)
        cn, cd = self.coeff.numerator, self.coeff.denominator
        num = pc.scale(num, cn)
        den = pc.scale(den, cd)
        if self.qexp > 0:
            num = pc.shift_q(pk, num, self.qexp)
        elif self.qexp < 0:
            den = pc.shift_q(pk, den, -self.qexp)
        if num and den != {0: 1} and not all_irr:
            g = pc.poly_gcd(pk, num, den)
            if len(g) > 1 or g != {0: 1}:
                num = pc.divexact(pk, num, g)
                den = pc.divexact(pk, den, g)
        if not num:
            den = {0: 1}
        elif den[pc.lead(den)] < 0:
            num = pc.scale(num, -1)
            den = pc.scale(den, -1)
        pair = (num, den)
        object.__setattr__(self, "_pair", pair)
        return pair

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MRat.const(other, self.ctx)
        if not isinstance(other, MRat):
            return NotImplemented
        a, b = self._unified(other)
        if a.is_zero() or b.is_zero():
            return a.is_zero() and b.is_zero()
        if (
            a.qexp == b.qexp
            and a.coeff == b.coeff
            and a.num == b.num
            and {k: m for k, (_, m, _i) in a.den.items()}
            == {k: m for k, (_, m, _i) in b.den.items()}
        ):
            return True
        # difference over the factored lcm (cheaper than cross products)
        return (a - b).is_zero()

    def __hash__(self):
        num, den = self.as_pair()
        return hash(
            (self.ctx.vars, tuple(sorted(num.items())), tuple(sorted(den.items())))
        )

    # -- substitution ---------------------------------------------------------

    def substitute(self, mapping, ctx: VarContext | None = None) -> "MRat":
        """Map variables: ``mapping[v] = w`` or ``(w, qpow)`` meaning
        v -> q**qpow * w (w may be None to send v -> q**qpow)."""
        norm = {}
        for v, tgt in mapping.items():
            if isinstance(tgt, SpectralVar) or tgt is None:
                norm[v] = (tgt, 0)
            else:
                norm[v] = (tgt[0], tgt[1])
        out_vars = [norm.get(v, (v, 0))[0] for v in self.ctx.vars]
        inferred = VarContext([v for v in out_vars if v is not None])
        ctx = inferred if ctx is None else ctx.union(inferred)
        pk = self.ctx.packing
        npk = ctx.packing

        def conv(poly):
            out: dict = {}
            minq = 0
            items = []
            for k, c in poly.items():
                qe, exps = pk.unpack(k)
                nexps = [0] * npk.nspec
                for i, e in enumerate(exps):
                    if not e:
                        continue
                    v = self.ctx.vars[i]
                    tgt, qp = norm.get(v, (v, 0))
                    qe += qp * e
                    if tgt is not None:
                        nexps[ctx.index(tgt)] += e
                items.append((qe, tuple(nexps), c))
                if qe < minq:
                    minq = qe
            shift = -minq
            for qe, nexps, c in items:
                k = npk.pack(qe + shift, nexps)
                r = out.get(k, 0) + c
                if r:
                    out[k] = r
                else:
                    del out[k]
            return out, shift

        num, s_num = conv(self.num)
        qexp = self.qexp - s_num
        den = {}
        for f, m, _irr in self.den.values():
            nf, s_f = conv(f)
            if not nf:
                raise DivisionByZero(
                    "substitution sends a denominator factor to zero"
                )
            qexp += s_f * m
            k = _fkey(nf)
            if k in den:
                den[k] = (den[k][0], den[k][1] + m)
            else:
                den[k] = (nf, m)
        return _reduce(_normalize_parts(ctx, self.coeff, qexp, num, den))

    def permute(self, perm) -> "MRat":
        """Apply a variable bijection within the same context."""
        return self.substitute(perm, ctx=self.ctx)

    def scale_var(self, v: SpectralVar, qpow: int) -> "MRat":
        return self.substitute({v: (v, qpow)}, ctx=self.ctx)

    # -- evaluation -----------------------------------------------------------

    def eval_fraction(self, bindings, qval) -> Fraction:
        """Exact value at spectral bindings plus a numeric q."""
        pk = self.ctx.packing
        vals = []
        for v in self.ctx.vars:
            if v not in bindings:
                raise ContextMismatch(f"missing binding for {v}")
            vals.append(Fraction(bindings[v]))
        qv = Fraction(qval)
        if qv == 0:
            raise PoleAtSample("q = 0 is outside the coefficient field")
        denval = Fraction(1)
        for f, m, _irr in self.den.values():
            fv = pc.eval_frac(pk, f, qv, vals)
            if fv == 0:
                raise PoleAtSample("denominator factor vanished at sample")
            denval *= fv**m
        numval = pc.eval_frac(pk, self.num, qv, vals)
        return self.coeff * qv**self.qexp * numval / denval

    def eval_qscalar(self, bindings) -> "MRat":
        """Evaluate the spectral variables at exact rationals, keep q."""
        pk = self.ctx.packing
        vals = []
        for v in self.ctx.vars:
            if v not in bindings:
                raise ContextMismatch(f"missing binding for {v}")
            vals.append(Fraction(bindings[v]))
        epk = EMPTY_CTX.packing

        def eval_poly(poly):
            out: dict = {}
            denlcm = 1
            terms = []
            for k, c in poly.items():
                qe, exps = pk.unpack(k)
                val = Fraction(c)
                for i, e in enumerate(exps):
                    if e:
                        val *= vals[i] ** e
                terms.append((qe, val))
                denlcm = denlcm * val.denominator // igcd(
                    denlcm, val.denominator
                )
            for qe, val in terms:
                c = int(val * denlcm)
                if not c:
                    continue
                k = epk.pack(qe, ())
                r = out.get(k, 0) + c
                if r:
                    out[k] = r
                else:
                    del out[k]
            return out, denlcm

        num, ln = eval_poly(self.num)
        res = _normalize_parts(
            EMPTY_CTX, self.coeff / ln, self.qexp, num, {}
        )
        for f, m, _irr in self.den.values():
            fp, lf = eval_poly(f)
            if not fp:
                raise PoleAtSample("denominator factor vanished at sample")
            fac = _normalize_parts(EMPTY_CTX, Fraction(1, lf), 0, fp, {})
            for _ in range(m):
                res = res / fac
        return res

    # -- printing ---------------------------------------------------------------

    def __repr__(self):
        num, den = self.as_pair()
        s = format_poly(self.ctx, num)
        if den != {0: 1}:
            s = f"({s})/({format_poly(self.ctx, den)})"
        return s


def _from_value(value, ctx) -> MRat:
    if isinstance(value, MRat):
        return value.lift(ctx) if ctx is not value.ctx else value
    if isinstance(value, (int, Fraction)):
        return MRat.const(value, ctx)
    if isinstance(value, SpectralVar):
        return MRat.var(value, ctx if value in ctx else None)
    raise TypeError(f"cannot build MRat from {value!r}")


# ---------------------------------------------------------------------------
# QScalar: the zero-spectral-variable case
# ---------------------------------------------------------------------------

QScalar = MRat  # a QScalar is an MRat over the empty spectral context


def qscalar_normalize(raw_num, raw_den) -> MRat:
    """Build the canonical element of Q(q) from raw integer q-polynomials.

    Accepts ints, coefficient lists (index = q-power) or {power: coeff}
    dicts.  Raises DivisionByZero on a zero denominator.
    """
    num = _qpoly_from_raw(raw_num)
    den = _qpoly_from_raw(raw_den)
    if not den:
        raise DivisionByZero("zero denominator in Q(q) scalar")
    r = _normalize_parts(
        EMPTY_CTX, Fraction(1), 0, num, {_fkey(den): (den, 1)} if den != {0: 1} else {}
    )
    num2, den2 = r.as_pair()
    return _normalize_parts(
        EMPTY_CTX,
        Fraction(1),
        0,
        num2,
        {_fkey(den2): (den2, 1)} if den2 != {0: 1} else {},
    )


def _qpoly_from_raw(raw) -> dict:
    pk = EMPTY_CTX.packing
    if isinstance(raw, int):
        return pc.const(pk, raw)
    if isinstance(raw, dict):
        items = raw.items()
    else:
        items = enumerate(raw)
    out: dict = {}
    for p, c in items:
        if c:
            k = pk.pack(p, ())
            out[k] = out.get(k, 0) + c
    return {k: c for k, c in out.items() if c}


# ---------------------------------------------------------------------------
# Equality testing
# ---------------------------------------------------------------------------

CANONICAL_VAR_LIMIT = 6
CANONICAL_DEGREE_LIMIT = 16
SAMPLE_BOUND = 10**6
MAX_POLE_RETRIES = 64


def random_rational(rng: random.Random) -> Fraction:
    num = rng.randint(-SAMPLE_BOUND, SAMPLE_BOUND)
    den = rng.randint(1, SAMPLE_BOUND)
    return Fraction(num, den)


def random_q(rng: random.Random) -> Fraction:
    while True:
        v = random_rational(rng)
        if v not in (0, 1, -1):
            return v


def sample_bindings(ctx: VarContext, rng: random.Random):
    return {v: random_rational(rng) for v in ctx.vars}


def mrat_equal(a: MRat, b: MRat, mode: str = "auto", trials: int = 20, seed: int = 0):
    """Decide equality; returns the boolean verdict.

    ``canonical`` cross-multiplies reduced forms; ``probabilistic`` is a
    Schwartz-Zippel style randomized test.  ``auto`` follows the size
    switch (canonical up to 6 variables and total degree 16).
    """
    return mrat_equal_report(a, b, mode=mode, trials=trials, seed=seed)["equal"]


def mrat_equal_report(
    a: MRat, b: MRat, mode: str = "auto", trials: int = 20, seed: int = 0
) -> dict:
    if isinstance(b, (int, Fraction)):
        b = MRat.const(b, a.ctx)
    a, b = a._unified(b)
    if mode == "auto":
        big = (
            len(a.ctx) > CANONICAL_VAR_LIMIT
            or max(a.total_degree(), b.total_degree()) > CANONICAL_DEGREE_LIMIT
        )
        mode = "probabilistic" if big else "canonical"
    if mode == "canonical":
        return {"equal": a == b, "mode": "canonical"}
    if mode != "probabilistic":
        raise ValueError(f"unknown equality mode {mode!r}")
    rng = random.Random(seed)
    degree_bound = a.total_degree() + b.total_degree() + 2
    failures = 0
    for _ in range(trials):
        ok = False
        for _retry in range(MAX_POLE_RETRIES):
            bindings = sample_bindings(a.ctx, rng)
            qv = random_q(rng)
            try:
                va = a.eval_fraction(bindings, qv)
                vb = b.eval_fraction(bindings, qv)
            except PoleAtSample:
                continue
            ok = True
            break
        if not ok:
            raise SampleExhaustion(
                "could not find a pole-free sample after bounded retries"
            )
        if va != vb:
            failures += 1
    bound = Fraction(degree_bound, 2 * SAMPLE_BOUND + 1)
    return {
        "equal": failures == 0,
        "mode": "probabilistic",
        "trials": trials,
        "seed": seed,
        "false_positive_bound_per_trial": float(min(bound, 1)),
        "false_positive_bound": float(min(bound, 1) ** trials),
    }


# ---------------------------------------------------------------------------
# Emission: canonical JSON, LaTeX and text formats
# ---------------------------------------------------------------------------


def _qpoly_str(qdict: dict) -> str:
    """Integer polynomial in q as a string, descending powers."""
    if not qdict:
        return "0"
    parts = []
    for p in sorted(qdict, reverse=True):
        c = qdict[p]
        if p == 0:
            body = str(abs(c))
        else:
            head = "" if abs(c) == 1 else f"{abs(c)}*"
            body = f"{head}q" if p == 1 else f"{head}q^{p}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += sign + body
    return out


_QTERM_RE = re.compile(r"([+-]?)(\d+)?\*?(q(?:\^(\d+))?)?")


def _qpoly_parse(s: str) -> dict:
    s = s.replace(" ", "")
    if not s:
        raise ValueError("empty q-polynomial string")
    out: dict = {}
    pos = 0
    while pos < len(s):
        m = _QTERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse q-polynomial {s!r} at {pos}")
        sign, coeff, qpart, power = m.groups()
        c = int(coeff) if coeff else 1
        if sign == "-":
            c = -c
        if qpart:
            p = int(power) if power else 1
        else:
            p = 0
            if coeff is None:
                raise ValueError(f"cannot parse q-polynomial {s!r} at {pos}")
        out[p] = out.get(p, 0) + c
        pos = m.end()
    return {p: c for p, c in out.items() if c}


def _poly_term_groups(ctx: VarContext, poly: dict):
    """Group a packed poly into {spectral exponent vector: q-coeff dict}."""
    pk = ctx.packing
    groups: dict = {}
    for k, c in poly.items():
        qe, exps = pk.unpack(k)
        groups.setdefault(exps, {})[qe] = c
    return groups


def mrat_to_json(m: MRat) -> dict:
    num, den = m.as_pair()
    names = [v.name for v in m.ctx.vars]

    def enc(poly):
        groups = _poly_term_groups(m.ctx, poly)
        out = []
        for exps in sorted(groups, key=lambda e: (sum(e), e), reverse=True):
            out.append([_qpoly_str(groups[exps]) + "/1", list(exps)])
        return out

    return {"vars": names, "num": enc(num), "den": enc(den)}


def mrat_from_json(data: dict) -> MRat:
    ctx = VarContext([SpectralVar.parse(n) for n in data["vars"]])
    order = [SpectralVar.parse(n) for n in data["vars"]]
    pk = ctx.packing

    def dec(entries) -> MRat:
        total = MRat.const(0, ctx)
        for qstr, exps in entries:
            if "/" in qstr:
                ns, ds = qstr.rsplit("/", 1)
            else:
                ns, ds = qstr, "1"
            coeff = qscalar_normalize(_qpoly_parse(ns), _qpoly_parse(ds))
            mono = MRat._make(
                ctx,
                Fraction(1),
                0,
                {pk.pack(0, _reorder(exps, order, ctx)): 1},
                {},
            )
            total = total + coeff.lift(ctx) * mono
        return total

    num = dec(data["num"])
    den = dec(data["den"])
    if den.is_zero():
        raise DivisionByZero("zero denominator in JSON payload")
    return num / den


def _reorder(exps, order, ctx):
    out = [0] * len(ctx.vars)
    for e, v in zip(exps, order):
        out[ctx.index(v)] = e
    return tuple(out)


def format_poly(ctx: VarContext, poly: dict, latex: bool = False) -> str:
    if not poly:
        return "0"
    groups = _poly_term_groups(ctx, poly)
    parts = []
    for exps in sorted(groups, key=lambda e: (sum(e), e), reverse=True):
        qc = groups[exps]
        mono_parts = []
        for i, e in enumerate(exps):
            if not e:
                continue
            name = ctx.vars[i].name
            if latex:
                name = f"{ctx.vars[i].role}_{{{ctx.vars[i].index}}}"
            if e == 1:
                mono_parts.append(name)
            else:
                mono_parts.append(f"{name}^{{{e}}}" if latex else f"{name}^{e}")
        mono = ("*" if not latex else " ").join(mono_parts)
        coeff = _qpoly_str(qc)
        if latex:
            coeff = (
                coeff.replace("*", " ")
                .replace("q^", "q^{")
            )
            # close the braces opened above
            coeff = re.sub(r"q\^\{(\d+)", r"q^{\1}", coeff)
        if mono:
            if coeff == "1":
                term = mono
            elif coeff == "-1":
                term = f"-{mono}"
            elif "+" in coeff[1:] or "-" in coeff[1:]:
                term = f"({coeff}){'' if latex else '*'}{mono}"
            else:
                term = f"{coeff}{' ' if latex else '*'}{mono}"
        else:
            term = coeff
        parts.append(term)
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def mrat_to_latex(m: MRat) -> str:
    num, den = m.as_pair()
    ns = format_poly(m.ctx, num, latex=True)
    if den == {0: 1}:
        return ns
    ds = format_poly(m.ctx, den, latex=True)
    return rf"\frac{{{ns}}}{{{ds}}}"


def mrat_to_text(m: MRat) -> str:
    return repr(m)
