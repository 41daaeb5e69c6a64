"""Command-line interface.

Subcommands: simulate, plan line|swarm|distance|pattern, maneuver
expansion|contraction|reverse, ctrb, sweep. Exit codes: 0 success,
2 validation error, 3 infeasible plan. Every failure prints one
machine-parsable line ``error[<code>]: <message>`` to stderr.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .controllability import SwarmSystem, controllable_dof
from .errors import MilliswarmError, PlanningError, SchemaError
from .io import (
    export_trajectory,
    format_trajectory_csv,
    parse_plan,
    parse_scenario,
    solution_to_json,
    write_plan,
    write_solution,
)
from .kinematics import Pose, RobotSpec, Schedule, SlipModel, simulate
from .maneuvers import plan_contraction, plan_expansion, plan_reverse
from .paths import (
    DistanceChangeRequest,
    Order,
    apply_distance_change,
    circle_schedule,
    solve_distance_change,
    straight_schedule,
    triangle_schedule,
)
from .planner import execute_swarm_plan, plan_pattern, plan_swarm, simulate_plan, solve_leader_line
from .svgplot import write_svg
from .sweep import SweepConfig, format_sweep_csv, sweep_angle, sweep_grid, sweep_steps
from .validation import validate_plan


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="milliswarm",
        description="Simulate and plan broadcast-actuated pivot-walking millirobot swarms.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario_required=True):
        p.add_argument("--scenario", required=scenario_required, help="scenario JSON file")
        p.add_argument("--out", help="output file (CSV for trajectories, JSON for plans)")
        p.add_argument("--svg", help="also render the result to this SVG file")
        p.add_argument("--seed", type=int, default=None, help="slip-noise seed (noise off when absent)")
        p.add_argument("--slip", type=float, default=0.0, help="slip-noise scale (fraction of sweep)")
        p.add_argument("--tolerance", type=float, default=None, help="override solver tolerance, mm")

    p = sub.add_parser("simulate", help="simulate a gait or plan file on a scenario")
    common(p)
    p.add_argument("--plan", help="plan JSON produced by the planners")
    p.add_argument("--gait", choices=["straight", "triangle", "circle"],
                   help="built-in gait instead of a plan file")
    p.add_argument("--theta", type=float, help="sweep angle, degrees")
    p.add_argument("--theta2", type=float, help="second sweep angle (circle), degrees")
    p.add_argument("--k", type=int, help="half-step count (per leg for triangle, full steps for circle)")

    plan = sub.add_parser("plan", help="inverse planners")
    plan_sub = plan.add_subparsers(dest="plan_command", required=True)

    p = plan_sub.add_parser("line", help="solve straight motion for one robot to its target")
    common(p)
    p.add_argument("--robot", help="robot id (default: first with a pattern target)")

    p = plan_sub.add_parser("swarm", help="leader-follower length solving for all robots")
    common(p)
    p.add_argument("--catalog", help="comma-separated span catalog to snap to, mm")

    p = plan_sub.add_parser("distance", help="two-robot gap change via triangular paths")
    common(p)
    p.add_argument("--desired-gap", type=float, required=True, help="final gap, mm")
    p.add_argument("--order", choices=["preserve", "swap"], default="preserve")

    p = plan_sub.add_parser("pattern", help="initial positions that walk onto the targets")
    common(p)
    p.add_argument("--theta", type=float, required=True, help="sweep angle, degrees")
    p.add_argument("--k", type=int, required=True, help="half-step count")
    p.add_argument("--heading", type=float, default=90.0, help="shared heading, degrees")

    man = sub.add_parser("maneuver", help="staged maneuvers")
    man_sub = man.add_subparsers(dest="maneuver_command", required=True)
    for name in ("expansion", "contraction", "reverse"):
        p = man_sub.add_parser(name)
        common(p)

    p = sub.add_parser("ctrb", help="controllability rank of the swarm system")
    p.add_argument("--scenario", help="scenario JSON file (span ratios from its robots)")
    p.add_argument("--nu", help="comma-separated span ratios, e.g. 0.3,0.9")

    p = sub.add_parser("sweep", help="two-robot distance parameter sweeps")
    p.add_argument("--kind", choices=["steps", "angle", "grid"], default="steps")
    p.add_argument("--out", help="output CSV path (stdout when absent)")
    p.add_argument("--theta", type=float, default=24.0, help="fixed sweep for --kind steps, degrees")
    p.add_argument("--k-max", type=int, default=60, help="max steps per leg")
    p.add_argument("--span-a", type=float, default=20.0)
    p.add_argument("--span-b", type=float, default=10.0)
    p.add_argument("--initial-gap", type=float, default=20.0)
    return parser


def _scenario_with_tolerance(args):
    scenario = parse_scenario(args.scenario)
    if getattr(args, "tolerance", None) is not None:
        from dataclasses import replace

        scenario.solver = replace(scenario.solver, tolerance=args.tolerance)
    return scenario


def _emit_trajectories(args, trajectories, scenario=None):
    if args.out:
        export_trajectory(trajectories, args.out)
    else:
        sys.stdout.write(format_trajectory_csv(trajectories))
    if args.svg:
        write_svg(trajectories, args.svg, scenario)


def _slip(args):
    if args.seed is None or args.slip == 0.0:
        return None
    return SlipModel(scale=args.slip, seed=args.seed)


def _cmd_simulate(args) -> int:
    scenario = _scenario_with_tolerance(args)
    if args.plan:
        plan = parse_plan(args.plan)
        sim = simulate_plan(plan, scenario.robots, scenario.initial)
        trajectories = sim.trajectories()
    else:
        if not args.gait:
            raise SchemaError("simulate needs --plan or --gait")
        if args.theta is None or args.k is None:
            raise SchemaError("--gait needs --theta and --k")
        theta = math.radians(args.theta)
        if args.gait == "straight":
            schedule = straight_schedule(theta, args.k)
        elif args.gait == "triangle":
            schedule = triangle_schedule(theta, args.k)
        else:
            if args.theta2 is None:
                raise SchemaError("circle gait needs --theta2")
            schedule = circle_schedule(theta, math.radians(args.theta2), args.k)
        trajectories = simulate(scenario.robots, scenario.initial, schedule, _slip(args))
    _emit_trajectories(args, trajectories, scenario)
    return 0


def _cmd_plan_line(args) -> int:
    scenario = _scenario_with_tolerance(args)
    if not scenario.pattern_targets:
        raise SchemaError("scenario has no pattern_targets")
    rid = args.robot or sorted(scenario.pattern_targets)[0]
    spec = scenario.robot(rid)
    line = solve_leader_line(scenario.initial[rid].position, scenario.pattern_targets[rid],
                             spec.pivot_span, scenario.solver)
    doc = {
        "robot": rid,
        "theta_c_deg": math.degrees(line.theta_c),
        "k": line.k,
        "heading_deg": math.degrees(line.heading),
    }
    print("\n".join(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}"
                    for key, value in doc.items()))
    if args.out or args.svg:
        robots = [spec]
        initial = {rid: Pose(scenario.initial[rid].x, scenario.initial[rid].y, line.heading)}
        trajectories = simulate(robots, initial, line.schedule(), _slip(args))
        _emit_trajectories(args, trajectories, scenario)
    return 0


def _cmd_plan_swarm(args) -> int:
    scenario = _scenario_with_tolerance(args)
    catalog = [float(v) for v in args.catalog.split(",")] if args.catalog else None
    solution = plan_swarm(scenario, catalog=catalog)
    for key, value in solution_to_json(solution).items():
        print(f"{key}: {value}")
    if args.out:
        write_solution(solution, args.out)
    if args.svg:
        trajectories = execute_swarm_plan(scenario, solution)
        write_svg(trajectories, args.svg, scenario)
    return 0


def _cmd_plan_distance(args) -> int:
    scenario = _scenario_with_tolerance(args)
    if len(scenario.robots) != 2:
        raise SchemaError("plan distance needs a two-robot scenario")
    a, b = scenario.robots
    pa, pb = scenario.initial[a.id], scenario.initial[b.id]
    gap = math.hypot(pb.x - pa.x, pb.y - pa.y)
    request = DistanceChangeRequest(a.pivot_span, b.pivot_span, gap, args.desired_gap,
                                    Order(args.order))
    solution = solve_distance_change(request, scenario.solver)
    print(f"theta_c_deg: {math.degrees(solution.theta_c):.6g}")
    print(f"k_per_leg: {solution.k}")
    print(f"gap_change_mm: {solution.gap_change:.6g}")
    line_angle = math.atan2(pb.y - pa.y, pb.x - pa.x)
    if a.pivot_span < b.pivot_span:
        line_angle += math.pi  # layout expects the faster robot behind
    trajectories, signed = apply_distance_change(request, solution, line_angle,
                                                 (pa.x, pa.y))
    print(f"final_gap_mm: {abs(signed):.6g}")
    print(f"order: {'preserved' if signed > 0 else 'swapped'}")
    if args.out or args.svg:
        _emit_trajectories(args, trajectories, scenario)
    return 0


def _cmd_plan_pattern(args) -> int:
    scenario = _scenario_with_tolerance(args)
    if not scenario.pattern_targets:
        raise SchemaError("scenario has no pattern_targets")
    ids = sorted(scenario.pattern_targets)
    targets = [scenario.pattern_targets[rid] for rid in ids]
    spans = [scenario.robot(rid).pivot_span for rid in ids]
    initials = plan_pattern(targets, spans, math.radians(args.theta), args.k,
                            math.radians(args.heading), scenario.workspace)
    for rid, (x, y) in zip(ids, initials):
        print(f"{rid}: x={x:.6g} y={y:.6g} heading={args.heading:.6g}")
    if args.out or args.svg:
        robots = [scenario.robot(rid) for rid in ids]
        initial = {rid: Pose(x, y, math.radians(args.heading))
                   for rid, (x, y) in zip(ids, initials)}
        schedule = straight_schedule(math.radians(args.theta), args.k) if args.k \
            else Schedule((), "no-op")
        trajectories = simulate(robots, initial, schedule, _slip(args))
        _emit_trajectories(args, trajectories, scenario)
    return 0


def _cmd_maneuver(args) -> int:
    scenario = _scenario_with_tolerance(args)
    planner = {"expansion": plan_expansion, "contraction": plan_contraction,
               "reverse": plan_reverse}[args.maneuver_command]
    plan = planner(scenario)
    report = validate_plan(plan, scenario)
    print(f"phases: {len(plan.phases)}")
    for i, phase in enumerate(plan.phases, 1):
        print(f"  {i}. [{phase.mode.value}] {phase.intent} ({len(phase.schedule)} steps)")
    print(f"min_robot_distance_mm: {report.min_robot_distance:.6g}")
    print(f"min_obstacle_clearance_mm: {report.min_obstacle_clearance:.6g}")
    print(f"violations: {len(report.violations)}")
    if args.out:
        write_plan(plan, args.out)
    if args.svg:
        sim = simulate_plan(plan, scenario.robots, scenario.initial)
        write_svg(sim.trajectories(), args.svg, scenario)
    return 0


def _cmd_ctrb(args) -> int:
    if args.nu:
        nu = tuple(float(v) for v in args.nu.split(","))
    elif args.scenario:
        scenario = parse_scenario(args.scenario)
        nu = tuple(r.pivot_span / r.body_length for r in scenario.robots)
    else:
        raise SchemaError("ctrb needs --nu or --scenario")
    system = SwarmSystem(nu)
    rank = controllable_dof(system)
    print(f"robots: {system.n}")
    print(f"state_dim: {2 * system.n}")
    print(f"controllable_dof: {rank}")
    print(f"fully_controllable: {rank == 2 * system.n}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = SweepConfig(span_a=args.span_a, span_b=args.span_b, initial_gap=args.initial_gap,
                      theta_deg=args.theta, k_max=args.k_max)
    rows = {"steps": sweep_steps, "angle": sweep_angle, "grid": sweep_grid}[args.kind](cfg)
    text = format_sweep_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "plan":
            return {
                "line": _cmd_plan_line,
                "swarm": _cmd_plan_swarm,
                "distance": _cmd_plan_distance,
                "pattern": _cmd_plan_pattern,
            }[args.plan_command](args)
        if args.command == "maneuver":
            return _cmd_maneuver(args)
        if args.command == "ctrb":
            return _cmd_ctrb(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        raise SchemaError(f"unknown command {args.command!r}")
    except PlanningError as exc:
        sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return 3
    except MilliswarmError as exc:
        sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
