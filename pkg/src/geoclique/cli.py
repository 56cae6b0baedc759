"""Command-line entry point: geoclique <subcommand> [flags].

Exit codes: 0 success, 2 input error, 3 internal invariant violation (for
instance an odd cycle where the iocp promise forbids one).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import gadgets
from .approx import (
    IocpViolation,
    SolveResult,
    derive_params,
    mis_eptas,
    mis_iocp_recursive,
    mis_subexp,
    qptas_branch,
)
from .geom import (
    GeneratorSpec,
    SchemaError,
    generate_instance,
    instance_from_dict,
    instance_to_dict,
    intersection_graph,
    save_instance,
)
from .graph import (
    CapExceeded,
    Graph,
    brute_force,
    graph_from_dimacs,
    graph_from_json,
    graph_to_dimacs,
    graph_to_json,
    popcount,
)
from .pipelines import PipelineConfig, clique_disk, clique_pierce2, clique_unit_ball
from .structural import (
    DegeneratePosition,
    NeedleSearchError,
    NotK22,
    check_k22_quadrilateral,
    common_needle_direction,
    crossing_profile,
    find_two_anticomplete_odd_cycles,
    vc_dimension,
)


class InputError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("GEOCLIQUE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"GEOCLIQUE_SEED must be an integer, got {raw!r}") from None


# -- reading inputs -------------------------------------------------------------------

def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _parse_json(text: str, path: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def load_any(path: str):
    """Return (graph, instance or None) from a graph JSON, DIMACS file, instance JSON
    or a gadget bundle."""
    text = _read_text(path)
    stripped = text.lstrip()
    if stripped[:1] in ("p", "c", "e") or path.endswith((".dimacs", ".col", ".clq")):
        return graph_from_dimacs(text), None
    obj = _parse_json(text, path)
    if isinstance(obj, dict) and "instance" in obj:
        obj = obj["instance"]
    if isinstance(obj, dict) and "objects" in obj:
        inst = instance_from_dict(obj)
        return intersection_graph(inst), inst
    return graph_from_json(obj), None


def _emit(obj, args, text=None):
    out = getattr(args, "output", None)
    if args.format == "table" and text is None:
        text = _table(obj)
    payload = text if text is not None else json.dumps(obj, sort_keys=True)
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + ("" if payload.endswith("\n") else "\n"))
    else:
        print(payload)


def _table(obj) -> str:
    if isinstance(obj, list):
        return "\n".join(_table(o) for o in obj)
    return "\n".join(f"{k:>18}  {json.dumps(v) if isinstance(v, (dict, list)) else v}"
                     for k, v in sorted(obj.items()))


# -- subcommands ----------------------------------------------------------------------

def cmd_gen(args):
    dim = args.dim or (3 if args.kind == "unit_balls" else 2)
    spec = GeneratorSpec(args.kind, args.n, dim=dim, box=(0.0, args.box))
    try:
        spec.validate()
    except ValueError as exc:
        raise InputError(str(exc)) from None
    data = save_instance(generate_instance(spec, args.seed))
    if args.output and args.output != "-":
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return 0


def cmd_graph(args):
    g, _ = load_any(args.input)
    if args.format == "dimacs":
        sys.stdout.write(graph_to_dimacs(g))
        return 0
    obj = json.loads(graph_to_json(g))
    _emit(obj, args, None if args.format != "table" else f"n={g.n} m={g.num_edges()}")
    return 0


def _mis(g: Graph, args) -> SolveResult:
    extra = {} if args.cap is None else {"cap": args.cap}
    if args.mode == "exact":
        m = brute_force(g, cap=args.cap or max(24, g.n))
        return SolveResult(m, popcount(m), seed=args.seed, metadata={"mode": "exact"})
    if args.mode == "subexp":
        return mis_subexp(g, **extra)
    if args.mode == "qptas":
        return qptas_branch(g, args.eps, args.iocp, seed=args.seed, beta=args.beta,
                            **({} if args.cap is None else {"exact_cap": args.cap}))
    params = derive_params(args.eps, args.beta, 4, args.iocp, "practical", t=args.trials)
    if args.iocp > 1:
        return mis_iocp_recursive(g, params, seed=args.seed)
    return mis_eptas(g, params, seed=args.seed)


def cmd_mis(args):
    g, _ = load_any(args.input)
    res = _mis(g, args)
    out = res.to_json()
    out["mode"] = args.mode
    _emit(out, args)
    return 0


def _clique(g, inst, args):
    cfg = PipelineConfig(eps=args.eps, seed=args.seed, beta=args.beta_override, mode=args.mode,
                         trials=args.trials)
    unit3 = inst is not None and inst.kind == "balls" and inst.dim == 3 \
        and len({o.r for o in inst.objects}) <= 1
    if args.mode == "pierce2":
        if inst is None:
            raise InputError("pierce2 needs a disk instance, not a bare graph")
        return clique_pierce2(inst, seed=args.seed)
    if args.geometry == "unit_balls" or (args.geometry == "auto" and unit3):
        return clique_unit_ball(inst if inst is not None else g, cfg)
    return clique_disk(inst if inst is not None else g, cfg)


def cmd_clique(args):
    g, inst = load_any(args.input)
    res = _clique(g, inst, args)
    out = res.to_json()
    out["mode"] = args.mode
    _emit(out, args)
    return 0


def _chains(path):
    obj = _parse_json(_read_text(path), path)
    if not isinstance(obj, dict) or "chain1" not in obj or "chain2" not in obj:
        raise InputError(f"{path}: expected an object with 'chain1' and 'chain2'")
    return obj["chain1"], obj["chain2"]


def cmd_check(args):
    prop = args.property
    if prop in ("iocp", "vcdim"):
        g, _ = load_any(args.input)
        if prop == "iocp":
            w = find_two_anticomplete_odd_cycles(g, args.cap)
            out = {"property": "iocp", "status": w.status, "examined": w.examined,
                   "cycles": [list(c) for c in w.cycles] if w.found else None}
        else:
            out = {"property": "vcdim", "vcdim": vc_dimension(g, cap=args.cap or 20)}
        _emit(out, args)
        return 0
    if prop == "k22":
        _, inst = load_any(args.input)
        if inst is None or inst.kind != "balls" or inst.dim != 2:
            raise InputError("k22 needs an instance of four disks")
        v = check_k22_quadrilateral(list(inst.objects))
        out = {"property": "k22", "convex": v.convex, "diagonal_nonedges": v.diagonal_nonedges,
               "corollary_holds": v.corollary_holds, "inner_center": v.inner_center}
        _emit(out, args)
        return 0 if v.corollary_holds and v.diagonal_nonedges is not False else 3
    c1, c2 = _chains(args.input)
    if prop == "crossing":
        p = crossing_profile(c1, c2, seed=args.seed)
        out = {"property": "crossing", **p.invariants()}
        _emit(out, args)
        return 0 if all(v for k, v in out.items() if isinstance(v, bool)) else 3
    m = common_needle_direction(c1, c2)
    out = {"property": "needle", "direction": list(m.direction), "angular_error": m.angular_error,
           "method": m.method}
    _emit(out, args)
    return 0


def _parse_lengths(text):
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cycle lengths must be comma-separated integers, got {text!r}") from None


def cmd_gadget(args):
    if args.target == "cocycles":
        evens = _parse_lengths(args.evens)
        odds = _parse_lengths(args.odd)
        try:
            inst = gadgets.realize_co_cycles_disks(evens, odds or None)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        expected = gadgets.cycle_union_complement(evens + odds)
        report = gadgets.verify_realization(inst, expected)
        params = {"evens": evens, "odd": odds[0] if odds else None}
    else:
        if not args.graph:
            raise InputError("--graph is required for co-2-subdivision targets")
        g, _ = load_any(args.graph)
        try:
            r = gadgets.realize(g, args.target, args.eps)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        inst, expected, report = r.instance, r.co2.graph, r.report
        params = {"target": r.target, "eps": r.params.eps, "eps1": r.params.eps1, "eps2": r.params.eps2,
                  "grid": r.params.grid, "schedule": r.params.schedule, "aux": r.params.aux}
    bundle = {"instance": instance_to_dict(inst), "expected": json.loads(graph_to_json(expected)),
              "report": report.to_json(), "params": params}
    _emit(bundle, args, None if args.format != "table" else _table(report.to_json()))
    return 0 if report.equal else 3


def cmd_verify(args):
    text = _read_text(args.input)
    obj = _parse_json(text, args.input)
    if isinstance(obj, dict) and "instance" in obj:
        inst = instance_from_dict(obj["instance"])
        expected = graph_from_json(obj["expected"]) if "expected" in obj else None
    else:
        inst = instance_from_dict(obj)
        expected = None
    if args.graph:
        expected, _ = load_any(args.graph)
    if expected is None:
        raise InputError("no expected graph: pass --graph or a gadget bundle")
    try:
        report = gadgets.verify_realization(inst, expected)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(report.to_json(), args)
    return 0


def _bench_row(job):
    idx, args = job
    spec = GeneratorSpec(args.kind, args.n, dim=3 if args.kind == "unit_balls" else 2, box=(0.0, args.box))
    inst = generate_instance(spec, args.seed + idx)
    g = intersection_graph(inst)
    exact = brute_force(g, "clique", cap=max(24, g.n))
    cfg = PipelineConfig(eps=args.eps, seed=args.seed + idx, mode=args.mode, trials=args.trials)
    if args.mode == "pierce2":
        res = clique_pierce2(inst, seed=args.seed + idx)
    elif args.kind == "unit_balls":
        res = clique_unit_ball(inst, cfg)
    else:
        res = clique_disk(inst, cfg)
    return {"id": idx, "kind": args.kind, "n": g.n, "seed": args.seed + idx, "mode": args.mode,
            "value": res.value, "omega": popcount(exact), "ratio": res.value / max(1, popcount(exact)),
            "valid": g.is_clique(res.mask)}


def cmd_bench(args):
    jobs = [(i, args) for i in range(args.count)]
    if args.workers and args.workers > 1:
        with ThreadPoolExecutor(args.workers) as ex:
            rows = list(ex.map(_bench_row, jobs))
    else:
        rows = [_bench_row(j) for j in jobs]
    rows.sort(key=lambda r: r["id"])
    if args.format == "table":
        print(f"{'id':>4} {'n':>3} {'omega':>5} {'value':>5} valid")
        for r in rows:
            print(f"{r['id']:>4} {r['n']:>3} {r['omega']:>5} {r['value']:>5} {r['valid']}")
    else:
        for r in rows:
            print(json.dumps(r, sort_keys=True))
    return 0


# -- parser -------------------------------------------------------------------------------

def build_parser(seed_default: int) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geoclique", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, fmt=("json", "table")):
        sp.add_argument("--seed", type=int, default=seed_default)
        sp.add_argument("--format", choices=fmt, default="json")
        sp.add_argument("-o", "--output")

    sp = sub.add_parser("gen", help="generate a random instance")
    sp.add_argument("--kind", default="disks", choices=("disks", "balls", "unit_balls", "triangles", "ellipses"))
    sp.add_argument("--n", type=int, default=12)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--box", type=float, default=10.0)
    common(sp)
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("graph", help="intersection graph of an instance")
    sp.add_argument("input")
    common(sp, ("json", "table", "dimacs"))
    sp.set_defaults(fn=cmd_graph)

    sp = sub.add_parser("mis", help="maximum independent set")
    sp.add_argument("input")
    sp.add_argument("--mode", default="eptas", choices=("eptas", "qptas", "subexp", "exact"))
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--beta", type=float, default=0.25)
    sp.add_argument("--iocp", type=int, default=1)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--cap", type=int, help="enumeration cap for exact leaves")
    common(sp)
    sp.set_defaults(fn=cmd_mis)

    sp = sub.add_parser("clique", help="maximum clique of a disk or unit-ball input")
    sp.add_argument("input")
    sp.add_argument("--mode", default="eptas", choices=("eptas", "subexp", "exact", "pierce2"))
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--beta", dest="beta_override", type=float)
    sp.add_argument("--geometry", default="auto", choices=("auto", "disks", "unit_balls"))
    sp.add_argument("--trials", type=int)
    common(sp)
    sp.set_defaults(fn=cmd_clique)

    sp = sub.add_parser("check", help="structural property checks")
    sp.add_argument("input")
    sp.add_argument("--property", required=True, choices=("iocp", "vcdim", "crossing", "k22", "needle"))
    sp.add_argument("--cap", type=int)
    common(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("gadget", help="build and verify a hardness gadget")
    sp.add_argument("--target", required=True,
                    help="balls4 | balls3 | balls3eps(EPS) | triangles | ellipses | cocycles")
    sp.add_argument("--graph", help="source graph for co-2-subdivision targets")
    sp.add_argument("--eps", type=float, help="radius band for balls3eps (default 0.2)")
    sp.add_argument("--evens", default="", help="even cycle lengths for cocycles, e.g. 4,6")
    sp.add_argument("--odd", default="", help="odd cycle length for cocycles")
    common(sp)
    sp.set_defaults(fn=cmd_gadget)

    sp = sub.add_parser("verify", help="check an instance against an expected graph")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--graph")
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("bench", help="run a seeded corpus and emit JSON lines")
    sp.add_argument("--kind", default="disks", choices=("disks", "unit_balls"))
    sp.add_argument("--n", type=int, default=12)
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--box", type=float, default=6.0)
    sp.add_argument("--mode", default="eptas", choices=("eptas", "subexp", "exact", "pierce2"))
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--workers", type=int, default=1)
    common(sp)
    sp.set_defaults(fn=cmd_bench)
    return p


def run(argv=None) -> int:
    try:
        parser = build_parser(default_seed())
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code in (0, None) else 2
        return args.fn(args)
    except (InputError, SchemaError, NotK22, DegeneratePosition, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IocpViolation as exc:
        print(json.dumps({"error": str(exc), "evidence": exc.evidence}, default=str), file=sys.stderr)
        return 3
    except (gadgets.GadgetError, NeedleSearchError, AssertionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
