"""Command-line entry point: kernels, relations, weight, oracle, run.

Reports are deterministic for a fixed configuration and seed; wall-clock
timings are only included on request so that emitted files stay
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import QbetheError, UsageError
from .exactarith import (
    MRat,
    SpectralVar,
    mrat_to_json,
    mrat_to_latex,
    mrat_to_text,
)


def _emit_value(value, form: str) -> str:
    from .repcurrents.weights import WeightVector

    if isinstance(value, MRat):
        if form == "json":
            return json.dumps(mrat_to_json(value), sort_keys=True, indent=1)
        if form == "latex":
            return mrat_to_latex(value)
        if form == "text":
            return mrat_to_text(value)
    if isinstance(value, WeightVector):
        if form == "json":
            return json.dumps(
                {
                    "multiset": [[r, v.name] for r, v in value.multiset],
                    "components": [mrat_to_json(c) for c in value.components],
                },
                sort_keys=True,
                indent=1,
            )
        if form == "latex":
            lines = [mrat_to_latex(c) for c in value.components]
            return "\\begin{pmatrix}" + " \\\\ ".join(lines) + "\\end{pmatrix}"
        if form == "text":
            return "\n".join(
                f"[{i}] {mrat_to_text(c)}" for i, c in enumerate(value.components)
            )
    if isinstance(value, dict):
        if form == "json":
            return json.dumps(value, sort_keys=True, indent=1)
        if form in ("text", "latex"):
            return json.dumps(value, sort_keys=True, indent=1)
    raise UsageError(f"cannot emit {type(value).__name__} as {form}")


def _write(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_vars(spec: str):
    return [SpectralVar.parse(s) for s in spec.split(",") if s]


def _module_from_tag(tag: str):
    from .repcurrents.modules import build_eval_module, tensor_module

    parts = tag.split(":")
    alg, label = parts[0], parts[1]
    label = {"half": "half", "spin12": "half", "one": "one", "spin1": "one", "fund": "fund"}.get(
        label, label
    )
    if len(parts) > 2 and parts[2]:
        z = SpectralVar.parse(parts[2])
        return tensor_module(alg, [label], [z])
    return tensor_module(alg, [label])


def cmd_kernels(args) -> int:
    from .kernels import partition_sym, verify_kernel_identity

    if args.kernels_cmd == "check":
        rep = verify_kernel_identity(
            args.id,
            args.n,
            mode=args.mode,
            trials=args.trials,
            seed=args.seed,
        )
        _write(_emit_value(rep, "json"), args.out)
        return 0 if rep["equal"] else 1
    if args.kernels_cmd == "partition":
        ts = [SpectralVar("t", i) for i in range(1, args.n + 1)]
        ss = [SpectralVar("s", i) for i in range(1, args.n + 1)]
        z = partition_sym(ts, ss, "left")
        _write(_emit_value(z, args.emit), args.out)
        return 0
    raise UsageError("kernels needs a subcommand: check | partition")


def cmd_relations(args) -> int:
    from .deltarat import verify_distribution_identity

    module = _module_from_tag(args.module)
    if module.n_sites() == 1:
        module = module.sites()[0]
    rep = verify_distribution_identity(args.id, module, window=args.window)
    _write(_emit_value(rep, "json"), args.out)
    return 0 if rep["equal"] else 1


def cmd_weight(args) -> int:
    from .repcurrents.modules import tensor_module
    from .repcurrents.weights import weight_function

    sites = _parse_vars(args.sites)
    labels = {"sl2": "half", "sl3": "fund"}
    label = args.spin or labels[args.algebra]
    mod = tensor_module(args.algebra, [label] * len(sites), sites)
    ts = _parse_vars(args.t) if args.t else []
    ss = _parse_vars(args.s) if args.s else []
    w = weight_function(mod, ts, ss, args.variant)
    _write(_emit_value(w, args.emit), args.out)
    return 0


def _vector_from_spec(spec: str):
    from .betheoracle import bethe_vector
    from .repcurrents.modules import tensor_module
    from .repcurrents.weights import weight_function

    kind, *rest = spec.split(":")
    if kind == "weight":
        alg, sites, ts = rest[0], _parse_vars(rest[1]), _parse_vars(rest[2])
        ss = _parse_vars(rest[3]) if len(rest) > 3 else []
        label = {"sl2": "half", "sl3": "fund"}[alg]
        mod = tensor_module(alg, [label] * len(sites), sites)
        variant = "po333" if alg == "sl2" else "po1"
        return weight_function(mod, ts, ss, variant)
    if kind == "bethe":
        conv, sites, ts = rest[0], _parse_vars(rest[1]), _parse_vars(rest[2])
        return bethe_vector(conv, sites, ts)
    raise UsageError(f"unknown vector spec {spec!r} (use weight:... or bethe:...)")


def cmd_oracle(args) -> int:
    if args.oracle_cmd == "dwbc":
        from .betheoracle import dwbc_bruteforce

        ts = [SpectralVar("t", i) for i in range(1, args.n + 1)]
        ss = [SpectralVar("s", i) for i in range(1, args.n + 1)]
        z = dwbc_bruteforce(args.conv, ts, ss)
        _write(_emit_value(z, args.emit), args.out)
        return 0
    if args.oracle_cmd == "compare":
        from .betheoracle import compare_collinear

        v1 = _vector_from_spec(args.left)
        v2 = _vector_from_spec(args.right)
        rep = compare_collinear(v1, v2)
        if "ratio" in rep and rep["ratio"] is not None:
            rep["ratio"] = mrat_to_text(rep["ratio"])
        _write(_emit_value(rep, "json"), args.out)
        return 0
    raise UsageError("oracle needs a subcommand: dwbc | compare")


def cmd_run(args) -> int:
    from .suites import SuiteConfig, run_suite

    cfg = SuiteConfig(
        suite=args.suite,
        n=args.n,
        sites=args.sites,
        a=args.a,
        b=args.b,
        window=args.window,
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        emit=args.emit,
        out=args.out,
        include_timings=args.timings,
    )
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        for k, v in data.items():
            if not hasattr(cfg, k):
                raise UsageError(f"unknown config key {k!r}")
            setattr(cfg, k, v)
    report = run_suite(cfg)
    _write(_emit_value(report, "json"), cfg.out)
    summary = [
        f"{c['suite']}:{c['check']}: {c['status']}" for c in report["checks"]
    ]
    print("\n".join(summary), file=sys.stderr)
    return 0 if report["failed_blocking"] == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qbethe",
        description="Exact checks for nested-Bethe-vector weight functions "
        "of quantum affine sl2 and sl3.",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--mode", default="auto", choices=["auto", "canonical", "probabilistic"])
        sp.add_argument("--emit", default="json", choices=["json", "latex", "text"])
        sp.add_argument("--out", default=None)
        sp.add_argument("--trials", type=int, default=20)

    k = sub.add_parser("kernels", help="kernel identities and the partition function")
    ks = k.add_subparsers(dest="kernels_cmd", required=True)
    kc = ks.add_parser("check")
    kc.add_argument("--id", required=True, choices=["idZZ1", "idZZ10", "detZ", "Zsym"])
    kc.add_argument("--n", type=int, default=2)
    common(kc)
    kp = ks.add_parser("partition")
    kp.add_argument("--n", type=int, default=2)
    common(kp)

    r = sub.add_parser("relations", help="defining-relation checks on modules")
    rs = r.add_subparsers(dest="relations_cmd", required=True)
    rv = rs.add_parser("verify")
    rv.add_argument("--id", required=True)
    rv.add_argument("--module", default="sl2:half:z1")
    rv.add_argument("--window", type=int, default=4)
    common(rv)

    w = sub.add_parser("weight", help="weight-function computation")
    ws = w.add_subparsers(dest="weight_cmd", required=True)
    w = ws.add_parser("compute")
    w.add_argument("--algebra", required=True, choices=["sl2", "sl3"])
    w.add_argument("--sites", required=True, help="comma list of site symbols, e.g. z1,z2")
    w.add_argument("--spin", default=None, help="half | one | fund")
    w.add_argument("--t", default="", help="comma list of first-root variables")
    w.add_argument("--s", default="", help="comma list of second-root variables")
    w.add_argument("--variant", default="po1", choices=["po1", "po333", "intt3", "po2"])
    common(w)

    o = sub.add_parser("oracle", help="six-vertex and Bethe-vector oracles")
    os_ = o.add_subparsers(dest="oracle_cmd", required=True)
    od = os_.add_parser("dwbc")
    od.add_argument("--n", type=int, default=2)
    od.add_argument("--conv", default="default", choices=["default", "alt"])
    common(od)
    oc = os_.add_parser("compare")
    oc.add_argument("--left", required=True)
    oc.add_argument("--right", required=True)
    common(oc)

    ru = sub.add_parser("run", help="named check suites")
    ru.add_argument("--suite", required=True)
    ru.add_argument("--n", type=int, default=3)
    ru.add_argument("--sites", type=int, default=2)
    ru.add_argument("--a", type=int, default=2)
    ru.add_argument("--b", type=int, default=2)
    ru.add_argument("--window", type=int, default=4)
    ru.add_argument("--config", default=None)
    ru.add_argument("--timings", action="store_true")
    common(ru)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd == "kernels":
            return cmd_kernels(args)
        if args.cmd == "relations":
            return cmd_relations(args)
        if args.cmd == "weight":
            return cmd_weight(args)
        if args.cmd == "oracle":
            return cmd_oracle(args)
        if args.cmd == "run":
            return cmd_run(args)
        raise UsageError(f"unknown command {args.cmd!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except QbetheError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
