"""Operator-valued rational functions on tensor modules.

Operators are plain square matrices of ``MRat`` entries.  The positive
and negative half-currents share one rational closed form,

    f^{+}(t) = f^{-}(t) = sum_{site i, branch b} p_ib/(t - p_ib) *
               (1 x ... x F_b x psi(p_ib) x ... x psi(p_ib)),

with p_ib the branch point q^c z_i; the two halves differ only in the
asymptotic zone in which that rational function is expanded, which is
material only inside the Laurent-window checks of the delta calculus.
The closed form is validated against a truncated iterated-coproduct mode
oracle before anything else is built on it (see the test suite).
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import ArityMismatch, DegenerateNodes, UnsupportedRoot
from ..exactarith import MRat, SpectralVar, VarContext
from ..kernels import VarTuple, phi

ALPHA = "alpha"
BETA = "beta"


# ---------------------------------------------------------------------------
# Matrix helpers (entries: MRat or int)
# ---------------------------------------------------------------------------


def mat_id(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_zero(n):
    return [[0 for _ in range(n)] for _ in range(n)]


def _ent(e) -> MRat:
    return e if isinstance(e, MRat) else MRat.const(e)


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                a, b = A[i][l], B[l][j]
                if isinstance(a, int) and a == 0:
                    continue
                if isinstance(b, int) and b == 0:
                    continue
                term = _ent(a) * _ent(b)
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else 0)
        out.append(row)
    return out


def mat_add(A, B):
    return [
        [
            b if (isinstance(a, int) and a == 0) else (
                a if (isinstance(b, int) and b == 0) else _ent(a) + _ent(b)
            )
            for a, b in zip(ra, rb)
        ]
        for ra, rb in zip(A, B)
    ]


def mat_scale(A, c):
    if isinstance(c, (int, Fraction)):
        c = MRat.const(c)
    return [
        [0 if (isinstance(a, int) and a == 0) else _ent(a) * c for a in row]
        for row in A
    ]


def mat_sub(A, B):
    return mat_add(A, mat_scale(B, -1))


def mat_eq(A, B) -> bool:
    for ra, rb in zip(A, B):
        for a, b in zip(ra, rb):
            if _ent(a) != _ent(b):
                return False
    return True


def mat_is_zero(A) -> bool:
    for row in A:
        for a in row:
            if isinstance(a, int):
                if a != 0:
                    return False
            elif not a.is_zero():
                return False
    return True


def mat_subst(A, mapping):
    out = []
    for row in A:
        nrow = []
        for a in row:
            if isinstance(a, int):
                nrow.append(a)
            else:
                nrow.append(a.substitute(mapping, ctx=a.ctx))
        out.append(nrow)
    return out


def kron(A, B):
    n, m = len(A), len(B)
    out = []
    for i in range(n):
        for k in range(m):
            row = []
            for j in range(n):
                for l in range(m):
                    a, b = A[i][j], B[k][l]
                    if (isinstance(a, int) and a == 0) or (
                        isinstance(b, int) and b == 0
                    ):
                        row.append(0)
                    else:
                        row.append(_ent(a) * _ent(b))
            out.append(row)
    return out


def mat_apply(A, vec):
    out = []
    for row in A:
        acc = None
        for a, v in zip(row, vec):
            if isinstance(a, int) and a == 0:
                continue
            if isinstance(v, int) and v == 0:
                continue
            term = _ent(a) * _ent(v)
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else MRat.const(0))
    return out


# ---------------------------------------------------------------------------
# Currents and zero modes
# ---------------------------------------------------------------------------


def _branch_fraction(zv, c, var, ctx) -> MRat:
    """p/(t - p) with p = q^c z."""
    p = MRat.lincomb([(1, c, zv)], ctx)
    t = MRat.var(var, ctx)
    return p / (t - p)


def half_current(module, root, sign, var: SpectralVar):
    """Closed-form half-current matrix f^{±}_root(var) on the module.

    Both signs share the rational representative; ``sign`` is recorded by
    the caller when an expansion zone is needed.
    """
    if var in module.site_vars():
        raise ArityMismatch("current argument collides with a site symbol")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    dim = module.dim()
    out = mat_zero(dim)
    for zv, c, coeffm in module.f_branches(root):
        ctx = VarContext((var, zv))
        frac = _branch_fraction(zv, c, var, ctx)
        out = mat_add(out, mat_scale(coeffm, frac))
    return out


def f_zero_mode(module, root):
    """Zero mode f[0] with its coproduct psi tails."""
    dim = module.dim()
    out = mat_zero(dim)
    for _zv, _c, coeffm in module.f_branches(root):
        out = mat_add(out, coeffm)
    return out


def k_op(module, root):
    return module.k_matrix(root)


def k_op_inv(module, root):
    K = module.k_matrix(root)
    return [
        [K[i][j].inverse() if i == j else 0 for j in range(len(K))]
        for i in range(len(K))
    ]


def screening_action(module, x, root, side: str = "S"):
    """Screening operators at the matrix level.

    S_i(y)       = y f_i[0] - f_i[0] k_i y k_i^{-1}
    S-tilde_i(y) = f_i[0] y - k_i^{-1} y k_i f_i[0]
    """
    f0 = f_zero_mode(module, root)
    K = k_op(module, root)
    Ki = k_op_inv(module, root)
    if side == "S":
        return mat_sub(mat_mul(x, f0), mat_mul(f0, mat_mul(K, mat_mul(x, Ki))))
    if side == "S-tilde":
        return mat_sub(mat_mul(f0, x), mat_mul(Ki, mat_mul(x, mat_mul(K, f0))))
    raise ValueError("side must be 'S' or 'S-tilde'")


def proj_composite(module, sign, var: SpectralVar, order=(ALPHA, BETA)):
    """Projections of the composite-root current.

    plus:  P(f_{a+b}(t))  = f^{+}_a(t) f_b[0] - q f_b[0] f^{+}_a(t)
    minus: P^-(f_{a+b}(t)) = q^{-1} f^{-}_b(q^{-1} t) f_a[0]
                             - f_a[0] f^{-}_b(q^{-1} t)
    ``order`` selects which simple root plays 'a'.
    """
    ra, rb = order
    if len(module.roots()) < 2:
        raise UnsupportedRoot("composite current needs two simple roots")
    if sign == "+":
        fa = half_current(module, ra, "+", var)
        f0 = f_zero_mode(module, rb)
        return mat_sub(mat_mul(fa, f0), mat_scale(mat_mul(f0, fa), MRat.q(1)))
    if sign == "-":
        fb = half_current(module, rb, "-", var)
        fb = mat_subst(fb, {var: (var, -1)})  # argument q^{-1} t
        f0 = f_zero_mode(module, ra)
        return mat_sub(
            mat_scale(mat_mul(fb, f0), MRat.q(-1)), mat_mul(f0, fb)
        )
    raise ValueError("sign must be '+' or '-'")


def projected_single(module, kind, sign, var: SpectralVar, order=(ALPHA, BETA)):
    """P^{±} of a single current; kind is a simple root or 'composite'.

    P(f_root(t)) = f^{+}(t); P^-(f_root(t)) = -f^{-}(t); composites per
    proj_composite.
    """
    if kind == "composite":
        return proj_composite(module, sign, var, order)
    if sign == "+":
        return half_current(module, kind, "+", var)
    return mat_scale(half_current(module, kind, "-", var), -1)


# ---------------------------------------------------------------------------
# Mode oracle for the multi-site closed form
# ---------------------------------------------------------------------------


def psi_mode_matrix(site, root, k: int):
    """k-th Taylor mode of the site's psi(w) at w -> infinity (a diagonal
    matrix, polynomial in the site point)."""
    from ..deltarat import box_from_mrat

    w = SpectralVar("w", 9)
    psi = site.psi_mrat(root, w)
    dim = site.dim()
    out = mat_zero(dim)
    window = {w: (-k, 0), site.z: (0, k)}
    for i in range(dim):
        box = box_from_mrat(psi[i][i], (w, site.z), window)
        entry = MRat.const(0)
        for (ew, ez), c in box.table.items():
            if ew == -k:
                entry = entry + c * MRat.var(site.z) ** ez
        out[i][i] = entry
    return out


def site_f_mode(site, root, m: int):
    """Mode f[m] on a single site: sum over branches of (q^c z)^m F."""
    dim = site.dim()
    out = mat_zero(dim)
    for c, M in site.f_br[root]:
        zpow = MRat.q(c * m) * (
            MRat.var(site.z) ** m if m >= 0 else MRat.var(site.z).inverse() ** (-m)
        )
        out = mat_add(out, mat_scale([[_ent(e) for e in row] for row in M], zpow))
    return out


def oracle_f_mode(module, root, n: int, psi_cutoff: int):
    """Iterated-coproduct mode of the lowering current, with the psi tails
    truncated at total mode ``psi_cutoff``: the independent oracle for the
    closed-form half-currents."""
    sites = module.sites()
    N = len(sites)
    dim = module.dim()
    total = mat_zero(dim)

    def tails(idx, remaining):
        # yield (list of per-site matrices for sites > idx, used modes)
        if idx == N - 1:
            yield [], 0
            return
        for rest, used in tails(idx + 1, remaining):
            budget = remaining - used
            for k in range(0, budget + 1):
                yield [psi_mode_matrix(sites[idx + 1], root, k)] + rest, used + k

    for i in range(N):
        for tail_mats, used in tails(i, psi_cutoff):
            fmat = site_f_mode(sites[i], root, n - used)
            parts = [mat_id(s.dim()) for s in sites[:i]] + [fmat] + tail_mats
            term = parts[0]
            for p in parts[1:]:
                term = kron(term, p)
            total = mat_add(total, term)
    return total


def closed_form_f_mode(module, root, n: int):
    """t^{-n} coefficient of the closed-form half-current: the branch
    points raised to the n-th power times their psi-tail matrices."""
    dim = module.dim()
    out = mat_zero(dim)
    for zv, c, coeffm in module.f_branches(root):
        p = MRat.q(c * n) * (MRat.var(zv) ** n)
        out = mat_add(out, mat_scale(coeffm, p))
    return out


# ---------------------------------------------------------------------------
# Interpolated currents and string projections
# ---------------------------------------------------------------------------


def interp_current(module, kind, var, params, flavor: str = "plus", order=(ALPHA, BETA)):
    """Projected current minus its interpolation over the parameter nodes:

        P^{±}(f(t; t_1..t_b)) = P^{±}(f(t)) - sum_m phi_{t_m}(t) P^{±}(f(t_m))

    plus flavor uses phi and P^{+}; minus uses phi-tilde and P^{-}.
    ``var`` and the entries of ``params`` may carry q-power scalings.
    """
    params = params if isinstance(params, VarTuple) else VarTuple(params)
    if isinstance(var, SpectralVar):
        var = (var, 0)
    sign = "+" if flavor == "plus" else "-"

    def base(entry):
        v, k = entry
        m = projected_single(module, kind, sign, v, order)
        if k:
            m = mat_subst(m, {v: (v, k)})
        return m

    out = base(var)
    if not len(params):
        return out
    ctx = VarContext((var[0],) + params.vars)
    target = MRat.lincomb([(1, var[1], var[0])], ctx)
    for m in range(1, len(params) + 1):
        if params[m - 1][0] == var[0]:
            raise DegenerateNodes("interpolation node equals the lead variable")
        coef = phi(target, params, m, flavor)
        out = mat_sub(out, mat_scale(base(params[m - 1]), coef))
    return out


def string_projection(module, tvars, k: int, sign: str = "+", order=(ALPHA, BETA), cap: int = 6):
    """Factored projection of a current string.

    sign '+': P(f_a(t_1)..f_a(t_{n-k}) f_{a+b}(t_{n-k+1})..f_{a+b}(t_n)) =
        prod_{i<=n-k<j} (q t_i - q^{-1} t_j)/(t_i - t_j)
        prod_{i<j} (q^{-1} t_i - q t_j)/(q t_i - q^{-1} t_j)
        * P(f_{a+b}(t_n)) P(f_{a+b}(t_{n-1}; t_n)) ...
        * P(f_a(t_{n-k}; t_{n-k+1..n})) ... P(f_a(t_1; t_2..n))

    sign '-': the opposite-projection analogue, with the composite factors
    at arguments q t_i: P^-(f_{a+b}(q s_1)..f_{a+b}(q s_k) f_b(s_{k+1})..
    f_b(s_n)), built from phi-tilde interpolated P^- currents.
    """
    tvars = tvars if isinstance(tvars, VarTuple) else VarTuple(tvars)
    n = len(tvars)
    if n > cap:
        raise ArityMismatch(f"string length {n} exceeds cap {cap}")
    if not 0 <= k <= n:
        raise ArityMismatch("composite count outside 0..n")
    if k > 0 and len(module.roots()) < 2:
        raise UnsupportedRoot("composite strings need the second simple root")
    ra, rb = order
    dim = module.dim()
    out = mat_id(dim)
    if sign == "+":
        ctx = VarContext(tvars.vars)
        pref = MRat.const(1, ctx)
        for i in range(n):
            for j in range(i + 1, n):
                xi, xj = tvars[i], tvars[j]
                if i < n - k <= j:
                    pref = pref * MRat.lincomb(
                        [(1, 1 + xi[1], xi[0]), (-1, -1 + xj[1], xj[0])], ctx
                    ) / MRat.lincomb([(1, xi[1], xi[0]), (-1, xj[1], xj[0])], ctx)
                pref = pref * MRat.lincomb(
                    [(1, -1 + xi[1], xi[0]), (-1, 1 + xj[1], xj[0])], ctx
                ) / MRat.lincomb(
                    [(1, 1 + xi[1], xi[0]), (-1, -1 + xj[1], xj[0])], ctx
                )
        for pos in range(n, n - k, -1):
            params = VarTuple(list(tvars)[pos:])
            out = mat_mul(
                out, interp_current(module, "composite", tvars[pos - 1], params, "plus", order)
            )
        for pos in range(n - k, 0, -1):
            params = VarTuple(list(tvars)[pos:])
            out = mat_mul(
                out, interp_current(module, ra, tvars[pos - 1], params, "plus", order)
            )
        return mat_scale(out, pref)
    if sign == "-":
        # variables s_1..s_n; composites at arguments q s_1..q s_k
        ctx = VarContext(tvars.vars)
        pref = MRat.const(1, ctx)
        for i in range(n):
            for j in range(i + 1, n):
                xi, xj = tvars[i], tvars[j]
                if i < k <= j:
                    pref = pref * MRat.lincomb(
                        [(1, 1 + xi[1], xi[0]), (-1, -1 + xj[1], xj[0])], ctx
                    ) / MRat.lincomb([(1, xi[1], xi[0]), (-1, xj[1], xj[0])], ctx)
                pref = pref * MRat.lincomb(
                    [(1, -1 + xi[1], xi[0]), (-1, 1 + xj[1], xj[0])], ctx
                ) / MRat.lincomb(
                    [(1, 1 + xi[1], xi[0]), (-1, -1 + xj[1], xj[0])], ctx
                )
        for pos in range(n, k, -1):
            params = [tvars[m] for m in range(pos - 2, -1, -1)]
            out = mat_mul(
                out,
                interp_current(module, rb, tvars[pos - 1], VarTuple(params), "minus", order),
            )
        for pos in range(k, 0, -1):
            lead = (tvars[pos - 1][0], tvars[pos - 1][1] + 1)
            params = [(v, c + 1) for v, c in [tvars[m] for m in range(pos - 2, -1, -1)]]
            out = mat_mul(
                out,
                interp_current(module, "composite", lead, VarTuple(params), "minus", order),
            )
        return mat_scale(out, pref)
    raise ValueError("sign must be '+' or '-'")
