"""Evaluation modules and their tensor products.

A one-site module stores, per simple root, the *branch decomposition* of
the total currents: f(t) = sum_b delta(q^{c_b} z / t) F_b and likewise for
e(t), together with the diagonal rational matrices psi(w) and the Cartan
matrices k.  The spin-1/2 and fundamental modules have a single branch;
the three-dimensional spin-1 module needs two branches (at q z and
q^{-1} z) because relation (z - q^{-2} w) f(z) f(w) = f(w) f(z)
(q^{-2} z - w) forces F^2 = 0 for any single-branch action.  The spin-1
data below is obtained by restricting the two-site coproduct action of
two spin-1/2 modules at points q^{-1} z and q z to the invariant
three-dimensional subspace.

No module is handed out before the defining-relation suite has certified
it; the tensor product of certified modules is accepted without
re-certification (the coproduct preserves the relations).
"""

from __future__ import annotations

import hashlib
import json

from ..deltarat import (
    DeltaSum,
    verify_distribution_identity,
)
from ..errors import BadModule, ModuleCertificationFailed, UnsupportedRoot
from ..exactarith import (
    MRat,
    SpectralVar,
    VarContext,
    mrat_from_json,
    mrat_to_json,
    zvar,
)

ALPHA = "alpha"
BETA = "beta"

CERT_RELATIONS = {
    "sl2": ("rel-1-ee", "rel-1-ff", "rel-3-psie", "rel-3-psif", "rel-7a", "rel-10"),
    "sl3": (
        "rel-1-ee",
        "rel-1-ff",
        "rel-3-psie",
        "rel-3-psif",
        "rel-7a",
        "rel-10",
        "rel-serre-f",
        "rel-com-f",
        "rel-ccf",
        "rel-com-aa-1",
        "rel-com-aa-2",
        "rel-com-aa-3",
    ),
}

_CARTAN = {
    (ALPHA, ALPHA): 2,
    (BETA, BETA): 2,
    (ALPHA, BETA): -1,
    (BETA, ALPHA): -1,
}


def _psi_factor(ctx, arg, zv, na, nb, da, db) -> MRat:
    """(q^{na} w - q^{nb} z)/(q^{da} w - q^{db} z) at w = q^k u."""
    (u, k) = arg
    num = MRat.lincomb([(1, na + k, u), (-1, nb, zv)], ctx)
    den = MRat.lincomb([(1, da + k, u), (-1, db, zv)], ctx)
    return num / den


class EvalModule:
    """One evaluation site with certified current matrices."""

    def __init__(self, algebra, label, dim, z, roots, f_br, e_br, kpow, psi_fac):
        self.algebra = algebra
        self.label = label
        self._dim = dim
        self.z = z
        self._roots = tuple(roots)
        self.f_br = f_br
        self.e_br = e_br
        self.kpow = kpow
        self.psi_fac = psi_fac
        self.cert_report = None

    # -- protocol used by the relation checker -----------------------------

    def n_sites(self) -> int:
        return 1

    def dim(self) -> int:
        return self._dim

    def roots(self):
        return self._roots

    def cartan(self, i, j) -> int:
        return _CARTAN[(i, j)]

    def site_vars(self):
        return (self.z,)

    def sites(self):
        return (self,)

    def describe(self) -> str:
        return f"{self.algebra}:{self.label}:{self.z.name}"

    def _check_root(self, root):
        if root not in self._roots:
            raise UnsupportedRoot(f"{self.describe()} has no root {root!r}")

    def f_delta(self, root, var):
        self._check_root(root)
        return _branches_to_dsm(self._dim, var, self.z, self.f_br[root])

    def e_delta(self, root, var):
        self._check_root(root)
        return _branches_to_dsm(self._dim, var, self.z, self.e_br[root])

    def psi_mrat(self, root, arg):
        """Diagonal psi matrix at argument q^k u; arg is a var or (var, k)."""
        self._check_root(root)
        if isinstance(arg, SpectralVar):
            arg = (arg, 0)
        ctx = VarContext((arg[0], self.z))
        out = []
        for i, facs in enumerate(self.psi_fac[root]):
            # the factor products already carry the k eigenvalue as their
            # limit at infinity (certified by the relation suite)
            entry = MRat.const(1, ctx)
            for na, nb, da, db in facs:
                entry = entry * _psi_factor(ctx, arg, self.z, na, nb, da, db)
            out.append(entry)
        return _diag(out)

    def k_matrix(self, root):
        self._check_root(root)
        return _diag([MRat.q(p) for p in self.kpow[root]])

    def lambda_series(self, root, arg) -> MRat:
        """Highest-vector eigenvalue of psi at the given argument."""
        return self.psi_mrat(root, arg)[0][0]

    def f_branches(self, root):
        """Branch list [(point var, qpow, matrix)] of the lowering current."""
        self._check_root(root)
        return [(self.z, c, M) for c, M in self.f_br[root]]

    def weight_index(self, basis_index: int):
        """Root-lowering multidegree of a basis vector: (a, b) counts of
        (alpha, beta) lowerings below the highest vector."""
        if self.algebra == "sl2":
            return _sl2_weight_index(basis_index)
        return _sl3_weight_index(basis_index)

    def __repr__(self):
        return f"EvalModule({self.describe()})"


def _sl3_weight_index(i):
    # fundamental: e1 -> e2 is one alpha lowering, e2 -> e3 one beta
    return [(0, 0), (1, 0), (1, 1)][i]


def _sl2_weight_index(i):
    return (i, 0)


def _branches_to_dsm(dim, var, zv, branches):
    out = [[DeltaSum.zero() for _ in range(dim)] for _ in range(dim)]
    for c, M in branches:
        for i in range(dim):
            for j in range(dim):
                entry = M[i][j]
                if isinstance(entry, int):
                    if entry == 0:
                        continue
                    entry = MRat.const(entry)
                elif entry.is_zero():
                    continue
                out[i][j] = out[i][j] + DeltaSum.delta(var, zv, c, entry)
    return out


def _diag(entries):
    n = len(entries)
    out = [[MRat.const(0) for _ in range(n)] for _ in range(n)]
    for i, e in enumerate(entries):
        out[i][i] = e
    return out


def _zeros(n):
    return [[0 for _ in range(n)] for _ in range(n)]


def _qplus() -> MRat:
    return MRat.q(1) + MRat.q(-1)


def _candidate(algebra: str, weight: str, z: SpectralVar) -> EvalModule:
    if algebra == "sl2" and weight in ("half", "1", "spin-1/2"):
        F = _zeros(2)
        F[1][0] = 1
        E = _zeros(2)
        E[0][1] = 1
        mod = EvalModule(
            "sl2",
            "half",
            2,
            z,
            (ALPHA,),
            {ALPHA: [(0, F)]},
            {ALPHA: [(0, E)]},
            {ALPHA: [1, -1]},
            {ALPHA: [[(1, -1, 0, 0)], [(-1, 1, 0, 0)]]},
        )
        return mod
    if algebra == "sl2" and weight in ("one", "2", "spin-1"):
        # fused from spin-1/2 at q^{-1} z and q z; two branches
        F1 = _zeros(3)
        F1[1][0] = 1
        F2 = _zeros(3)
        F2[2][1] = _qplus()
        E1 = _zeros(3)
        E1[0][1] = _qplus()
        E2 = _zeros(3)
        E2[1][2] = 1
        psi = [
            [(1, -2, 0, -1), (1, 0, 0, 1)],
            [(1, -2, 0, -1), (-1, 2, 0, 1)],
            [(-1, 0, 0, -1), (-1, 2, 0, 1)],
        ]
        mod = EvalModule(
            "sl2",
            "one",
            3,
            z,
            (ALPHA,),
            {ALPHA: [(1, F1), (-1, F2)]},
            {ALPHA: [(1, E1), (-1, E2)]},
            {ALPHA: [2, 0, -2]},
            {ALPHA: psi},
        )
        return mod
    if algebra == "sl3" and weight in ("fund", "fundamental"):
        Fa = _zeros(3)
        Fa[1][0] = 1
        Fb = _zeros(3)
        Fb[2][1] = 1
        Ea = _zeros(3)
        Ea[0][1] = 1
        Eb = _zeros(3)
        Eb[1][2] = 1
        mod = EvalModule(
            "sl3",
            "fund",
            3,
            z,
            (ALPHA, BETA),
            {ALPHA: [(0, Fa)], BETA: [(1, Fb)]},
            {ALPHA: [(0, Ea)], BETA: [(1, Eb)]},
            {ALPHA: [1, -1, 0], BETA: [0, 1, -1]},
            {
                ALPHA: [[(1, -1, 0, 0)], [(-1, 1, 0, 0)], []],
                BETA: [[], [(1, 0, 0, 1)], [(-1, 2, 0, 1)]],
            },
        )
        return mod
    raise BadModule(f"unsupported module request {algebra}:{weight}")


_MODULE_CACHE: dict = {}


def build_eval_module(algebra: str, weight: str, z=None, window: int = 4) -> EvalModule:
    """Construct and certify an evaluation module (cached per request)."""
    if z is None:
        z = zvar(1)
    key = (algebra, weight, z)
    hit = _MODULE_CACHE.get(key)
    if hit is not None:
        return hit
    mod = _candidate(algebra, weight, z)
    reports = []
    for rel in CERT_RELATIONS[algebra]:
        rep = verify_distribution_identity(rel, mod, window=window)
        reports.append(rep)
        if not rep["equal"]:
            raise ModuleCertificationFailed(
                f"{mod.describe()} failed {rel}: {rep.get('detail')}"
            )
    mod.cert_report = reports
    _MODULE_CACHE[key] = mod
    return mod


class TensorModule:
    """Ordered tensor product of certified one-site modules.

    The basis order is site-major lexicographic; currents act through the
    iterated current-style coproduct, which places the lowering matrix at
    one site, psi tails (evaluated at that branch point) on all later
    sites for f-currents, and on all earlier sites for e-currents.
    """

    def __init__(self, sites):
        sites = tuple(sites)
        if not sites:
            raise BadModule("empty tensor product")
        alg = sites[0].algebra
        for s in sites:
            if s.algebra != alg:
                raise BadModule("mixed algebras in a tensor product")
            if s.cert_report is None:
                raise ModuleCertificationFailed(
                    f"site {s.describe()} was not certified"
                )
        if len({s.z for s in sites}) != len(sites):
            raise BadModule("evaluation-point symbols must be distinct per site")
        self._sites = sites
        self.algebra = alg
        self._dim = 1
        for s in sites:
            self._dim *= s.dim()

    # -- protocol -----------------------------------------------------------

    def n_sites(self):
        return len(self._sites)

    def dim(self):
        return self._dim

    def roots(self):
        return self._sites[0].roots()

    def cartan(self, i, j):
        return _CARTAN[(i, j)]

    def site_vars(self):
        return tuple(s.z for s in self._sites)

    def sites(self):
        return self._sites

    def describe(self):
        return " (x) ".join(s.describe() for s in self._sites)

    def weight_index(self, basis_index: int):
        idx = []
        rem = basis_index
        for s in reversed(self._sites):
            idx.append(rem % s.dim())
            rem //= s.dim()
        idx.reverse()
        a = b = 0
        for s, i in zip(self._sites, idx):
            wa, wb = s.weight_index(i)
            a += wa
            b += wb
        return (a, b)

    def _tail_matrix(self, root, site_idx, c, direction):
        """Kron product with psi tails at q^c z_{site_idx}.

        direction +1: tails on later sites (f-current); -1: earlier (e)."""
        from .currents import kron, mat_id

        point = (self._sites[site_idx].z, c)
        parts = []
        for j, s in enumerate(self._sites):
            if j == site_idx:
                parts.append(None)  # filled by the branch matrix
            elif (direction > 0 and j > site_idx) or (direction < 0 and j < site_idx):
                parts.append(s.psi_mrat(root, point))
            else:
                parts.append(mat_id(s.dim()))
        return parts

    def _current_delta(self, root, var, which):
        out = None
        for i, s in enumerate(self._sites):
            branches = s.f_br[root] if which == "f" else s.e_br[root]
            direction = 1 if which == "f" else -1
            for c, M in branches:
                parts = self._tail_matrix(root, i, c, direction)
                parts[i] = [
                    [
                        MRat.const(e) if isinstance(e, int) else e
                        for e in row
                    ]
                    for row in M
                ]
                from .currents import kron

                coeffm = parts[0]
                for p in parts[1:]:
                    coeffm = kron(coeffm, p)
                term = _coeff_to_dsm(coeffm, var, s.z, c)
                out = term if out is None else _dsm_add(out, term)
        return out

    def f_delta(self, root, var):
        if root not in self.roots():
            raise UnsupportedRoot(root)
        return self._current_delta(root, var, "f")

    def e_delta(self, root, var):
        if root not in self.roots():
            raise UnsupportedRoot(root)
        return self._current_delta(root, var, "e")

    def psi_mrat(self, root, arg):
        from .currents import kron

        out = self._sites[0].psi_mrat(root, arg)
        for s in self._sites[1:]:
            out = kron(out, s.psi_mrat(root, arg))
        return out

    def k_matrix(self, root):
        from .currents import kron

        out = self._sites[0].k_matrix(root)
        for s in self._sites[1:]:
            out = kron(out, s.k_matrix(root))
        return out

    def lambda_series(self, root, arg) -> MRat:
        out = MRat.const(1)
        for s in self._sites:
            out = out * s.lambda_series(root, arg)
        return out

    def f_branches(self, root):
        """Flattened branch list [(point var, qpow, coefficient matrix)] with
        psi tails included; the rational closed forms of the half-currents
        and zero modes are assembled from exactly this data."""
        from .currents import kron

        out = []
        for i, s in enumerate(self._sites):
            for c, M in s.f_br[root]:
                parts = self._tail_matrix(root, i, c, +1)
                parts[i] = [
                    [MRat.const(e) if isinstance(e, int) else e for e in row]
                    for row in M
                ]
                coeffm = parts[0]
                for p in parts[1:]:
                    coeffm = kron(coeffm, p)
                out.append((s.z, c, coeffm))
        return out

    def __repr__(self):
        return f"TensorModule({self.describe()})"


def _coeff_to_dsm(coeffm, var, zv, c):
    dim = len(coeffm)
    out = [[DeltaSum.zero() for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            e = coeffm[i][j]
            if isinstance(e, int):
                if e == 0:
                    continue
                e = MRat.const(e)
            elif e.is_zero():
                continue
            out[i][j] = DeltaSum.delta(var, zv, c, e)
    return out


def _dsm_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def tensor_module(algebra, weights, zs=None) -> TensorModule:
    """Convenience builder: certified sites at distinct points."""
    if zs is None:
        zs = [zvar(i + 1) for i in range(len(weights))]
    return TensorModule(
        [build_eval_module(algebra, w, z) for w, z in zip(weights, zs)]
    )


# ---------------------------------------------------------------------------
# Registry file format
# ---------------------------------------------------------------------------


def registry_payload(mod: EvalModule) -> dict:
    """JSON-serializable description of a certified one-site module."""

    def enc_matrix(M):
        return [
            [
                mrat_to_json(e if isinstance(e, MRat) else MRat.const(e))
                for e in row
            ]
            for row in M
        ]

    cert = [
        {"relation": r["relation"], "equal": r["equal"]} for r in (mod.cert_report or [])
    ]
    payload = {
        "algebra": mod.algebra,
        "weight": mod.label,
        "evaluation_point": mod.z.name,
        "dim": mod.dim(),
        "roots": list(mod.roots()),
        "f_branches": {
            r: [[c, enc_matrix(M)] for c, M in mod.f_br[r]] for r in mod.roots()
        },
        "e_branches": {
            r: [[c, enc_matrix(M)] for c, M in mod.e_br[r]] for r in mod.roots()
        },
        "k_powers": {r: mod.kpow[r] for r in mod.roots()},
        "psi_factors": {r: mod.psi_fac[r] for r in mod.roots()},
        "certification": cert,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    payload["certification_hash"] = hashlib.sha256(blob).hexdigest()
    return payload


def load_registry(payload: dict) -> EvalModule:
    """Rebuild a module from its registry payload and re-certify."""
    z = SpectralVar.parse(payload["evaluation_point"])

    def dec_matrix(M):
        return [[mrat_from_json(e) for e in row] for row in M]

    mod = EvalModule(
        payload["algebra"],
        payload["weight"],
        payload["dim"],
        z,
        tuple(payload["roots"]),
        {r: [(c, dec_matrix(M)) for c, M in payload["f_branches"][r]] for r in payload["roots"]},
        {r: [(c, dec_matrix(M)) for c, M in payload["e_branches"][r]] for r in payload["roots"]},
        {r: list(payload["k_powers"][r]) for r in payload["roots"]},
        {r: [[tuple(f) for f in fl] for fl in payload["psi_factors"][r]] for r in payload["roots"]},
    )
    for rel in CERT_RELATIONS[mod.algebra]:
        rep = verify_distribution_identity(rel, mod, window=4)
        if not rep["equal"]:
            raise ModuleCertificationFailed(f"registry module failed {rel}")
    mod.cert_report = [{"relation": r, "equal": True} for r in CERT_RELATIONS[mod.algebra]]
    return mod
