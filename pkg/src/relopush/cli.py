"""Command line entry point: plan, simulate and bench rearrangement scenarios."""
from __future__ import annotations

import argparse
import sys
import time

from .bench import bench, plot_report, write_report
from .planner import ALGORITHMS, plan
from .render import render
from .scenario import BUNDLED, ScenarioError, resolve
from .simulator import DEFAULT_SPEED, CollisionError, ExecutionError, execute, goal_errors, write_trace

EXIT_OK, EXIT_PLAN_FAILED, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def parse(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def _non_negative(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relopush", description="Pushing-based rearrangement planning for a car-like robot.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    scen_help = f"scenario file, or a bundled name ({', '.join(BUNDLED)})"

    pp = sub.add_parser("plan", help="compute a rearrangement plan and print its summary")
    pp.add_argument("scenario", help=scen_help)
    pp.add_argument("--algo", choices=ALGORITHMS, default="relopush")
    pp.add_argument("--render", metavar="OUT.svg", help="write an SVG drawing of the plan")

    ps = sub.add_parser("simulate", help="plan, then replay the plan kinematically")
    ps.add_argument("scenario", help=scen_help)
    ps.add_argument("--algo", choices=ALGORITHMS, default="relopush")
    ps.add_argument("--speed", type=_positive(float), default=DEFAULT_SPEED, help="m/s (default %(default)s)")
    ps.add_argument("--trace", metavar="OUT.csv", help="write the sampled state trace")

    pb = sub.add_parser("bench", help="run jittered trials and write a CSV report")
    pb.add_argument("scenario", help=scen_help)
    pb.add_argument("--algo", choices=ALGORITHMS, nargs="+", default=["relopush"])
    pb.add_argument("--trials", type=_positive(int), default=100)
    pb.add_argument("--jitter", type=_non_negative, default=0.05, help="metres (default %(default)s)")
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--out", metavar="REPORT.csv", required=True)
    pb.add_argument("--workers", type=_positive(int), default=1)
    pb.add_argument("--no-timing", action="store_true",
                    help="leave the T_p columns empty so the report depends only on the inputs")
    pb.add_argument("--figure", metavar="OUT.png", help="also write a bar chart of S and L_p")
    return p


def _summary(p) -> str:
    lines = [f"order: {' '.join(map(str, p.order))}",
             f"L_p={p.L_p:.3f} m  L_t={p.L_t:.3f} m  N_pre={p.N_pre}  N_obs={p.N_obs}"]
    for i, s in enumerate(p.subtasks):
        lines.append(f"  {i:3d} {s.kind:<13s} object {s.object_id}  {s.length:.3f} m")
    return "\n".join(lines)


def _cmd_plan(args, sc) -> int:
    t0 = time.perf_counter()
    p = plan(sc, args.algo)
    tp = time.perf_counter() - t0
    if p is None:
        print(f"{args.algo}: no plan found ({tp * 1000:.0f} ms)", file=sys.stderr)
        return EXIT_PLAN_FAILED
    print(f"{args.algo}: plan found in {tp * 1000:.0f} ms")
    print(_summary(p))
    if args.render:
        render(p, sc, args.render)
    return EXIT_OK


def _cmd_simulate(args, sc) -> int:
    p = plan(sc, args.algo)
    if p is None:
        print(f"{args.algo}: no plan found", file=sys.stderr)
        return EXIT_PLAN_FAILED
    try:
        state, trace = execute(p, sc, args.speed)
    except (CollisionError, ExecutionError) as e:
        print(f"replay failed: {e}", file=sys.stderr)
        return EXIT_PLAN_FAILED
    if args.trace:
        write_trace(trace, args.trace, [o.id for o in sc.objects])
    print(f"T_e={state.t:.2f} s  odometer={state.odometer:.3f} m  pushing={state.push_odometer:.3f} m")
    for oid, (dpos, dang) in sorted(goal_errors(state, sc).items()):
        print(f"  object {oid}: position error {dpos:.4f} m, heading error {dang:.4f} rad")
    return EXIT_OK


def _cmd_bench(args, sc) -> int:
    reports = [bench(sc, a, args.trials, args.jitter, args.seed, workers=args.workers) for a in args.algo]
    write_report(reports, args.out, timing=not args.no_timing)
    if args.figure:
        plot_report(reports, args.figure)
    for r in reports:
        print(f"{r.algo}: S={r.S:.0f}%  L_p={r.mean('L_p'):.3f} m  T_p={r.mean('T_p') * 1000:.0f} ms")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = resolve(args.scenario)
    except ScenarioError as e:
        print(f"{args.scenario}: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return {"plan": _cmd_plan, "simulate": _cmd_simulate, "bench": _cmd_bench}[args.command](args, sc)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
