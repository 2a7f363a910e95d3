"""Command-line front end: gen, solve, prove, bench, render.

Exit codes: 0 success, 2 parse error / bad arguments, 3 inadmissible
instance, 4 solver or generation failure, 5 validation failure.
"""

from __future__ import annotations

import argparse
import re
import sys
import time

from . import io as tio
from . import render as trender
from .discretize import InadmissibleInstanceError, discretize
from .geometry import BoundsError, build_grid, build_workspace
from .ilp import ExhaustiveGuardError, SolverError
from .instances import GenerationError, dense_instance, random_instance
from .paft import InfeasibleInstanceError, SwapEngine, isag, paft
from .prover import format_certificate, verify
from .triilp import (HorizonExceededError, SolveReport, solve_split,
                     solve_triilp, underestimated_makespan)
from .validate import synthesize, validate

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INADMISSIBLE = 3
EXIT_SOLVER = 4
EXIT_VALIDATION = 5

_METHOD_RE = re.compile(r"^triilp-split-(\d+)$")


def _parse_method(name: str):
    if name in ("triilp", "paft", "isag"):
        return name, None
    m = _METHOD_RE.match(name)
    if m:
        k = int(m.group(1))
        if k < 1:
            raise tio.ParseError(f"bad split arity in method {name!r}")
        return "triilp-split", k
    raise tio.ParseError(f"unknown method {name!r}")


def _run_method(method: str, dinst, backend: str, solver_cmd: str | None,
                engine: SwapEngine | None = None):
    """Returns (DiscretePlan, SolveReport)."""
    name, k = _parse_method(method)
    if name == "triilp":
        return solve_triilp(dinst, backend=backend, solver_cmd=solver_cmd)
    if name == "triilp-split":
        return solve_split(dinst, k, backend=backend, solver_cmd=solver_cmd)
    t0 = time.perf_counter()
    if name == "isag":
        plan = isag(dinst, engine)
    else:
        plan, _ = paft(dinst, engine)
    lo = underestimated_makespan(dinst)
    ratio = 1.0 if lo == 0 else plan.T / lo
    return plan, SolveReport(makespan=plan.T, underestimate=lo,
                             optimality_ratio=ratio,
                             wall_time=time.perf_counter() - t0, iterations=0)


def _print_report(pairs: list[tuple[str, object]]) -> None:
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        print(f"{k.ljust(width)}  {v}")
    for k, v in pairs:
        print(f"{k}={v}")


def cmd_gen(args) -> int:
    ws = build_workspace(args.n1, args.n2)
    if args.pattern == "dense":
        inst = dense_instance(ws, args.count, args.seed, strict=args.strict)
    else:
        inst = random_instance(ws, args.count, args.seed)
    tio.write_instance(args.out, inst)
    print(f"wrote {args.out} ({inst.n} discs, pattern={args.pattern})")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = tio.read_instance(args.instance)
    ws = inst.workspace
    grid = build_grid(ws)
    dinst, snap_s, snap_g = discretize(inst, grid)
    plan, report = _run_method(args.method, dinst, args.backend,
                               args.solver_cmd)
    cplan = synthesize(inst, grid, plan, snap_s, snap_g)
    vr = validate(cplan, ws)
    if not vr.valid:
        print(f"validation failed: min clearance {vr.min_pair_clearance:.9f}, "
              f"boundary_ok={vr.boundary_ok}; refusing to write the plan",
              file=sys.stderr)
        return EXIT_VALIDATION
    if args.out:
        with open(args.out, "w") as f:
            if args.plan_mode == "continuous":
                f.write(tio.format_continuous_plan(cplan))
            else:
                f.write(tio.format_discrete_plan(plan))
    _print_report([
        ("method", args.method),
        ("robots", inst.n),
        ("discrete_makespan", report.makespan),
        ("underestimate", report.underestimate),
        ("ratio", f"{report.optimality_ratio:.6f}"),
        ("continuous_makespan", f"{cplan.makespan:.6f}"),
        ("min_pair_clearance", f"{vr.min_pair_clearance:.9f}"),
        ("wall_time", f"{report.wall_time:.3f}"),
        ("plan_file", args.out or "-"),
    ])
    return EXIT_OK


def cmd_prove(args) -> int:
    epsilons = [float(e) for e in args.epsilons.split(",") if e]
    passed = False
    for eps in epsilons:
        cert = verify(eps)
        out = f"{args.out}.eps{eps}.cert" if len(epsilons) > 1 else args.out
        with open(out, "w") as f:
            f.write(format_certificate(cert))
        print(f"epsilon={eps}: min_delta={cert.min_delta:.9g} "
              f"verdict={cert.verdict} cases={cert.case_count} -> {out}")
        if cert.passed:
            passed = True
            break
    return EXIT_OK if passed else 1


def cmd_bench(args) -> int:
    sizes = []
    for tok in args.sizes.split(","):
        n1s, n2s = tok.lower().split("x")
        sizes.append((int(n1s), int(n2s)))
    robots = [int(r) for r in args.robots.split(",")]
    methods = args.methods.split(",")
    rows = []
    for n1, n2 in sizes:
        ws = build_workspace(n1, n2)
        grid = build_grid(ws)
        engine = SwapEngine(grid)
        for n in robots:
            for method in methods:
                times, achieved, bounds, failures = [], [], [], 0
                for k in range(args.count):
                    seed = args.seed + 1000 * k
                    try:
                        if args.pattern == "dense":
                            inst = dense_instance(ws, n, seed)
                        else:
                            inst = random_instance(ws, n, seed)
                        dinst, snap_s, snap_g = discretize(inst, grid)
                        t0 = time.perf_counter()
                        plan, rep = _run_method(method, dinst, args.backend,
                                                args.solver_cmd, engine)
                        times.append(time.perf_counter() - t0)
                        cplan = synthesize(inst, grid, plan, snap_s, snap_g)
                        if not validate(cplan, ws).valid:
                            raise RuntimeError("plan failed validation")
                        achieved.append(rep.makespan)
                        bounds.append(rep.underestimate)
                    except Exception as exc:  # noqa: BLE001 - suite continues
                        failures += 1
                        print(f"# failure n1={n1} n2={n2} n={n} method={method} "
                              f"seed={seed}: {exc}", file=sys.stderr)
                mean_time = sum(times) / len(times) if times else float("nan")
                denom = sum(bounds)
                ratio = 1.0 if denom == 0 else sum(achieved) / denom
                rows.append({"method": method, "n": n, "n1": n1, "n2": n2,
                             "mean_time": mean_time, "ratio": ratio,
                             "failures": failures})
    header = ["method", "n", "mean_time", "ratio", "failures"]
    lines = ["\t".join(header)]
    for r in rows:
        lines.append("\t".join([r["method"], str(r["n"]),
                                f"{r['mean_time']:.6f}", f"{r['ratio']:.6f}",
                                str(r["failures"])]))
    table = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(table)
    print(table, end="")
    if args.plot:
        with open(args.plot, "w") as f:
            f.write(trender.render_benchmark(rows))
    return EXIT_OK


def cmd_render(args) -> int:
    inst = tio.read_instance(args.instance)
    ws = inst.workspace
    grid = build_grid(ws)
    dplan = cplan = None
    if args.plan:
        loaded = tio.read_plan(args.plan)
        if hasattr(loaded, "steps"):
            dplan = loaded
            if dplan.n != inst.n:
                raise tio.ParseError("plan robot count differs from instance")
        else:
            cplan = loaded
            if len(cplan.trajectories) != inst.n:
                raise tio.ParseError("plan robot count differs from instance")
    svg = trender.render(ws, grid=grid, inst=inst, dplan=dplan, cplan=cplan,
                         mode=args.mode, at=args.time)
    with open(args.out, "w") as f:
        f.write(svg)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="triroute",
                                 description=__doc__.strip().splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--n1", type=int, required=True)
    g.add_argument("--n2", type=int, required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--pattern", choices=["dense", "random"], default="random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--strict", action=argparse.BooleanOptionalAction,
                   default=True,
                   help="dense pitch 8/3 + 1e-6 (on) or exactly 8/3 (off)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="route an instance and validate the plan")
    s.add_argument("instance")
    s.add_argument("--method", default="triilp",
                   help="triilp | triilp-split-K | paft | isag")
    s.add_argument("--backend", choices=["exhaustive", "external"],
                   default="exhaustive")
    s.add_argument("--solver-cmd", default=None,
                   help="external solver template with {model} {solution} "
                        "({python} available); overrides TRIROUTE_SOLVER_CMD")
    s.add_argument("--plan-mode", choices=["continuous", "discrete"],
                   default="continuous")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_solve)

    p = sub.add_parser("prove", help="run the separation sweep certificates")
    p.add_argument("--epsilons", default="0.1,0.05,0.025",
                   help="comma list, processed in order, stops at first pass")
    p.add_argument("--out", default="separation.cert")
    p.set_defaults(func=cmd_prove)

    b = sub.add_parser("bench", help="benchmark methods over a suite")
    b.add_argument("--sizes", default="2x3", help="comma list of N1xN2")
    b.add_argument("--robots", default="4", help="comma list of robot counts")
    b.add_argument("--methods", default="triilp")
    b.add_argument("--pattern", choices=["dense", "random"], default="random")
    b.add_argument("--count", type=int, default=3, help="instances per cell")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--backend", choices=["exhaustive", "external"],
                   default="exhaustive")
    b.add_argument("--solver-cmd", default=None)
    b.add_argument("--out", default=None)
    b.add_argument("--plot", default=None)
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("render", help="draw an instance or plan as SVG")
    r.add_argument("--instance", required=True)
    r.add_argument("--plan", default=None)
    r.add_argument("--mode", choices=["snapshot", "trace"], default="snapshot")
    r.add_argument("--time", type=float, default=0.0)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (tio.ParseError, BoundsError, ValueError) as exc:
        if isinstance(exc, InadmissibleInstanceError):
            print(f"inadmissible instance: {exc}", file=sys.stderr)
            return EXIT_INADMISSIBLE
        if isinstance(exc, InfeasibleInstanceError):
            print(f"solver failure: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SolverError, HorizonExceededError, GenerationError,
            ExhaustiveGuardError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
