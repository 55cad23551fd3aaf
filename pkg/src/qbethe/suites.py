"""Named check suites with blocking/diagnostic classification.

The registry maps each suite id to a builder returning (check_id,
callable, blocking) triples; the runner executes them in order and
assembles a deterministic report.  Diagnostic checks (the Bethe-vector
collinearity probes beyond the proportional regime) never gate the exit
code.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

from . import __version__
from .errors import UsageError
from .exactarith import SpectralVar, svar, tvar, zvar

SUITE_IDS = (
    "kernels",
    "relations",
    "projections",
    "weight-sl2",
    "weight-sl3",
    "tensor-property",
    "oracle",
)


@dataclass
class SuiteConfig:
    suite: str
    n: int = 3
    sites: int = 2
    a: int = 2
    b: int = 2
    window: int = 4
    mode: str = "auto"
    trials: int = 20
    seed: int = 0
    emit: str = "json"
    out: str | None = None
    include_timings: bool = False

    def validate(self):
        if self.suite not in SUITE_IDS + ("all",):
            raise UsageError(f"unknown suite {self.suite!r}")
        if self.n > 5 or self.sites > 3 or self.a + self.b > 6:
            raise UsageError("cap violation: n <= 5, sites <= 3, a+b <= 6")
        if self.window > 8:
            raise UsageError("cap violation: window <= 8")


def _kernels_checks(cfg: SuiteConfig):
    from .kernels import verify_kernel_identity, phi, VarTuple, y_kernel

    checks = []
    for n in range(1, min(cfg.n, 3) + 1):
        checks.append(
            (
                f"idZZ1-n{n}-canonical",
                lambda n=n: verify_kernel_identity("idZZ1", n, mode="canonical"),
                True,
            )
        )
    for n in range(4, cfg.n + 1):
        checks.append(
            (
                f"idZZ1-n{n}-probabilistic",
                lambda n=n: verify_kernel_identity(
                    "idZZ1", n, mode="probabilistic", trials=cfg.trials, seed=cfg.seed
                ),
                True,
            )
        )
    checks.append(
        (
            "idZZ10-n2-sigma",
            lambda: verify_kernel_identity("idZZ10", 2, sigma=(1, 0), mode="canonical"),
            True,
        )
    )
    for n in range(1, min(cfg.n, 3) + 1):
        checks.append(
            (
                f"detZ-n{n}",
                lambda n=n: verify_kernel_identity("detZ", n, mode="canonical"),
                True,
            )
        )
    checks.append(
        ("Zsym-n2", lambda: verify_kernel_identity("Zsym", 2, mode="canonical"), True)
    )

    def phi_check():
        ok = True
        for b in range(1, 5):
            nodes = [svar(i) for i in range(1, b + 1)]
            x = svar(b + 1)
            for flavor in ("plus", "minus"):
                for j in range(1, b + 1):
                    f = phi(x, nodes, j, flavor)
                    for i in range(1, b + 1):
                        val = f.substitute({x: nodes[i - 1]})
                        if not val == (1 if i == j else 0):
                            ok = False
        return {"equal": ok, "property": "phi nodes give the Kronecker delta"}

    checks.append(("phi-delta-b4", phi_check, True))

    def y_forms():
        for k in (2, 3):
            y_kernel(
                [tvar(i) for i in range(1, k + 1)],
                [svar(i) for i in range(1, k + 1)],
                check_forms=True,
            )
        return {"equal": True, "property": "both Y product orderings agree"}

    checks.append(("y-forms-k3", y_forms, True))
    return checks


MODULE_TAGS = ("sl2:half", "sl2:one", "sl3:fund")


def _module(tag: str):
    from .repcurrents.modules import build_eval_module

    alg, label = tag.split(":")[:2]
    return build_eval_module(alg, label)


def _relations_checks(cfg: SuiteConfig):
    from .deltarat import verify_distribution_identity

    base = ["rel-1-ee", "rel-1-ff", "rel-3-psie", "rel-3-psif", "rel-7a", "rel-10"]
    sl3only = [
        "rel-serre-f",
        "rel-com-f",
        "rel-ccf",
        "rel-com-aa-1",
        "rel-com-aa-2",
        "rel-com-aa-3",
    ]
    checks = []
    for tag in MODULE_TAGS:
        rels = base + (sl3only if tag.startswith("sl3") else [])
        for rel in rels:
            checks.append(
                (
                    f"{rel}@{tag}",
                    lambda rel=rel, tag=tag: verify_distribution_identity(
                        rel, _module(tag), window=cfg.window
                    ),
                    True,
                )
            )
    for tag in ("sl3:fund", "sl2:one"):
        checks.append(
            (
                f"rel-dec-ff11@{tag}",
                lambda tag=tag: verify_distribution_identity(
                    "rel-dec-ff11", _tensor1(tag), window=cfg.window
                ),
                True,
            )
        )
    return checks


def _tensor1(tag):
    from .repcurrents.modules import tensor_module

    alg, label = tag.split(":")[:2]
    return tensor_module(alg, [label])


def _tensor2(alg, label):
    from .repcurrents.modules import tensor_module

    return tensor_module(alg, [label, label])


def _projections_checks(cfg: SuiteConfig):
    from .repcurrents.weights import verify_projection_identity

    sl2 = _tensor2("sl2", "half")
    sl3 = _tensor2("sl3", "fund")
    items = [
        ("hcc1", sl2),
        ("sect34-2", sl2),
        ("sect34-4", sl2),
        ("hcc1", sl3),
        ("restore-ord-1", sl3),
        ("restore-ord-2", sl3),
        ("serre-proj", sl3),
        ("sect34-1", sl3),
        ("sect34-2", sl3),
        ("sect34-3", sl3),
        ("exam2", sl3),
        ("proj-3.14", sl3),
        ("dec-m-pair", sl3),
        ("po44-pair", sl3),
    ]
    return [
        (
            f"{which}@{mod.describe()}",
            lambda which=which, mod=mod: verify_projection_identity(which, mod),
            True,
        )
        for which, mod in items
    ]


def _weight_sl2_checks(cfg: SuiteConfig):
    from .repcurrents.modules import tensor_module
    from .repcurrents.weights import weight_function, weight_space_audit

    checks = []
    for nsites in range(1, cfg.sites + 1):
        for a in range(1, cfg.a + 1):
            def chk(nsites=nsites, a=a):
                mod = tensor_module("sl2", ["half"] * nsites)
                ts = [tvar(i) for i in range(1, a + 1)]
                w1 = weight_function(mod, ts, (), "po333")
                w2 = weight_function(mod, ts, (), "intt3")
                return {
                    "equal": w1 == w2 and weight_space_audit(w1),
                    "sites": nsites,
                    "a": a,
                }

            checks.append((f"po333-vs-intt3-N{nsites}-a{a}", chk, True))
    return checks


def _weight_sl3_checks(cfg: SuiteConfig):
    from .exactarith import MRat, VarContext
    from .repcurrents.modules import tensor_module
    from .repcurrents.weights import (
        pole_locus_audit,
        weight_function,
        weight_space_audit,
    )

    def regression():
        mod = tensor_module("sl3", ["fund"])
        t1, s1 = tvar(1), svar(1)
        w = weight_function(mod, (t1,), (s1,), "po1")
        z = mod.site_vars()[0]
        ctx = VarContext((t1, s1, z))
        t, s, zz = MRat.var(t1, ctx), MRat.var(s1, ctx), MRat.var(z, ctx)
        expect = -MRat.q(1, ctx) * t * zz / ((t - zz) * (t - MRat.q(1, ctx) * s))
        return {
            "equal": w.components[2] == expect
            and w.components[0].is_zero()
            and w.components[1].is_zero(),
            "frozen": "-q t1 z1 / ((t1 - z1)(t1 - q s1)) on the doubly lowered vector",
        }

    def grading_and_poles():
        mod = tensor_module("sl3", ["fund", "fund"])
        w = weight_function(mod, (tvar(1),), (svar(1),), "po1")
        audit = pole_locus_audit(w)
        return {
            "equal": weight_space_audit(w) and audit["unexpected"] == [],
            "named_factors": audit["named"],
        }

    def minus_variant():
        mod = tensor_module("sl3", ["fund"])
        w = weight_function(mod, (tvar(1),), (svar(1),), "po2")
        return {"equal": weight_space_audit(w)}

    return [
        ("a1b1-frozen-component", regression, True),
        ("grading-and-pole-locus", grading_and_poles, True),
        ("minus-projection-grading", minus_variant, True),
    ]


def _tensor_property_checks(cfg: SuiteConfig):
    from .repcurrents.modules import build_eval_module, tensor_module
    from .repcurrents.weights import coproduct_combine, weight_function

    t1, t2, s1, s2 = tvar(1), tvar(2), svar(1), svar(2)
    cases = [
        ("sl2", "half", "po333", (("alpha", t1),)),
        ("sl2", "half", "po333", (("alpha", t1), ("alpha", t2))),
        ("sl3", "fund", "po1", (("alpha", t1),)),
        ("sl3", "fund", "po1", (("beta", s1),)),
        ("sl3", "fund", "po1", (("alpha", t1), ("beta", s1))),
        ("sl3", "fund", "po1", (("alpha", t1), ("alpha", t2), ("beta", s1))),
        ("sl3", "fund", "po1", (("alpha", t1), ("beta", s1), ("beta", s2))),
    ]
    checks = []
    for alg, label, variant, ms in cases:
        if sum(1 for _ in ms) > cfg.a + cfg.b:
            continue

        def chk(alg=alg, label=label, variant=variant, ms=ms):
            mod = tensor_module(alg, [label, label])
            m1 = build_eval_module(alg, label, zvar(1))
            m2 = build_eval_module(alg, label, zvar(2))
            ts = [v for r, v in ms if r == "alpha"]
            ss = [v for r, v in ms if r == "beta"]
            direct = weight_function(mod, ts, ss, variant)
            combined = coproduct_combine(m1, m2, ms)
            return {"equal": direct == combined, "multiset": [(r, v.name) for r, v in ms]}

        name = "-".join(f"{r[0]}{v.name}" for r, v in ms)
        checks.append((f"weight1-{alg}-{name}", chk, True))
    return checks


def _symmetry_checks(cfg: SuiteConfig):
    from .repcurrents.modules import tensor_module
    from .repcurrents.weights import symmetry_check

    t1, t2, s1, s2 = tvar(1), tvar(2), svar(1), svar(2)
    cases = [
        ("sl2", "half", (("alpha", t1), ("alpha", t2)), (1, 0)),
        ("sl3", "fund", (("alpha", t1), ("beta", s1)), (1, 0)),
        ("sl3", "fund", (("alpha", t1), ("alpha", t2), ("beta", s1)), (1, 0, 2)),
        ("sl3", "fund", (("alpha", t1), ("alpha", t2), ("beta", s1)), (2, 1, 0)),
        ("sl3", "fund", (("alpha", t1), ("alpha", t2), ("beta", s1)), (0, 2, 1)),
        ("sl3", "fund", (("alpha", t1), ("beta", s1), ("beta", s2)), (1, 0, 2)),
    ]
    checks = []
    for alg, label, ms, sigma in cases:

        def chk(alg=alg, label=label, ms=ms, sigma=sigma):
            mod = tensor_module(alg, [label])
            rep = symmetry_check(mod, ms, sigma)
            rep["equal"] = rep["equal"]
            return rep

        name = "-".join(f"{r[0]}{v.name}" for r, v in ms) + "-s" + "".join(map(str, sigma))
        checks.append((f"symmetry-{alg}-{name}", chk, True))
    return checks


def _oracle_checks(cfg: SuiteConfig):
    from .betheoracle import (
        b_operators_commute,
        bethe_vector,
        compare_collinear,
        dwbc_bruteforce,
        get_convention,
        scale_pattern_check,
    )
    from .repcurrents.modules import tensor_module
    from .repcurrents.weights import weight_function

    checks = [
        (
            "ybe-default",
            lambda: {"equal": get_convention("default") is not None},
            True,
        ),
        ("ybe-alt", lambda: {"equal": get_convention("alt") is not None}, True),
        (
            "b-commute-N2",
            lambda: {
                "equal": b_operators_commute(
                    "default", (zvar(1), zvar(2)), tvar(1), tvar(2)
                )
            },
            True,
        ),
    ]
    for n in range(1, min(cfg.n, 3) + 1):

        def chk(n=n):
            ts = [tvar(i) for i in range(1, n + 1)]
            ss = [svar(i) for i in range(1, n + 1)]
            dwbc_bruteforce("default", ts, ss, compare_forms=True)
            return {"equal": True, "n": n}

        checks.append((f"dwbc-forms-n{n}", chk, True))
    def scale_check():
        rep = scale_pattern_check("default", up_to=min(cfg.n, 3))
        rep["equal"] = rep["stable"]
        rep["per_n"] = {str(k): v for k, v in rep.get("per_n", {}).items()}
        return rep

    checks.append(("dwbc-scale-pattern", scale_check, True))

    def collinear_n1():
        mod = tensor_module("sl2", ["half"])
        w = weight_function(mod, (tvar(1),), (), "po333")
        b = bethe_vector("default", (zvar(1),), (tvar(1),))
        rep = compare_collinear(w, b)
        rep["equal"] = rep["collinear"]
        rep["ratio"] = repr(rep.get("ratio"))
        return rep

    checks.append(("collinear-weight-bethe-n1", collinear_n1, True))

    def collinear_n2():
        # two creation operators on two sites: the bottom weight space is
        # one-dimensional, so collinearity is automatic; recorded anyway
        mod = tensor_module("sl2", ["half", "half"])
        w = weight_function(mod, (tvar(1), tvar(2)), (), "po333")
        b = bethe_vector("default", (zvar(1), zvar(2)), (tvar(1), tvar(2)))
        rep = compare_collinear(w, b)
        rep["equal"] = rep["collinear"]
        return rep

    checks.append(("collinear-weight-bethe-n2-diagnostic", collinear_n2, False))

    def collinear_n1_two_sites():
        # the nontrivial probe: one lowering on two sites; the two
        # constructions are not proportional there (measured, not claimed)
        mod = tensor_module("sl2", ["half", "half"])
        w = weight_function(mod, (tvar(1),), (), "po333")
        b = bethe_vector("default", (zvar(1), zvar(2)), (tvar(1),))
        rep = compare_collinear(w, b)
        rep["equal"] = rep["collinear"]
        rep["violating_pair"] = list(rep.get("violating_pair", ()))
        return rep

    checks.append(
        ("collinear-weight-bethe-n1-N2-diagnostic", collinear_n1_two_sites, False)
    )
    return checks


_REGISTRY = {
    "kernels": _kernels_checks,
    "relations": _relations_checks,
    "projections": _projections_checks,
    "weight-sl2": _weight_sl2_checks,
    "weight-sl3": _weight_sl3_checks,
    "tensor-property": lambda cfg: _tensor_property_checks(cfg) + _symmetry_checks(cfg),
    "oracle": _oracle_checks,
}


def run_suite(cfg: SuiteConfig) -> dict:
    """Execute one suite (or all) and assemble the report."""
    cfg.validate()
    suites = SUITE_IDS if cfg.suite == "all" else (cfg.suite,)
    results = []
    failed_blocking = 0
    for sid in suites:
        for check_id, fn, blocking in _REGISTRY[sid](cfg):
            t0 = time.time()
            try:
                detail = fn()
                ok = bool(detail.get("equal", False))
            except Exception as exc:  # surfaced, not swallowed
                detail = {"error": f"{type(exc).__name__}: {exc}"}
                ok = False
            elapsed = time.time() - t0
            status = "pass" if ok else ("diagnostic" if not blocking else "fail")
            if not ok and blocking:
                failed_blocking += 1
            entry = {
                "suite": sid,
                "check": check_id,
                "status": status,
                "blocking": blocking,
            }
            for k, v in sorted(detail.items()):
                if k in ("equal", "time_s"):
                    continue
                if isinstance(v, (str, int, float, bool, list, dict, type(None))):
                    entry[k] = v
            if cfg.include_timings:
                entry["time_s"] = round(elapsed, 3)
            elif "time_s" in entry:
                del entry["time_s"]
            results.append(entry)
    payload = {
        "suite": cfg.suite,
        "config": {
            "n": cfg.n,
            "sites": cfg.sites,
            "a": cfg.a,
            "b": cfg.b,
            "window": cfg.window,
            "mode": cfg.mode,
            "trials": cfg.trials,
        },
        "seed": cfg.seed,
        "mode": cfg.mode,
        "checks": results,
        "failed_blocking": failed_blocking,
        "version": __version__,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    payload["artifact_hash"] = hashlib.sha256(blob).hexdigest()
    return payload
