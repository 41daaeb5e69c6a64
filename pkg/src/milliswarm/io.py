"""Scenario, trajectory and plan persistence.

Scenario files are JSON documents (schema version 1) with mandatory
unit declarations; lengths are millimeters and angles degrees in every
file, converted to radians at this boundary. Unknown fields are
rejected. All writers emit byte-stable output: sorted keys, LF line
endings and shortest round-trip numbers capped at nine significant
digits.
"""
from __future__ import annotations

import io as _io
import json
import math
import os
from typing import Dict, List, Mapping, Optional, Sequence, Union

from .errors import IoError, ParseError, SchemaError, UnitError
from .kinematics import (
    PivotHalfStep,
    Pivot,
    Pose,
    RobotSpec,
    Schedule,
    Trajectory,
    TumbleDirection,
    TumbleStep,
    Variant,
)
from .paths import SolverBounds
from .planner import Channel, ManeuverPlan, Rect, Scenario, SolutionSet

SCHEMA_VERSION = 1
REQUIRED_UNITS = {"length": "mm", "angle": "deg"}


def _fmt(value: float) -> str:
    """Nine-significant-digit shortest form, stable across runs."""
    text = f"{value:.9g}"
    return "0" if text == "-0" else text


def _reject_unknown(obj: Mapping, allowed, where: str):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise SchemaError(f"unknown field(s) {unknown} in {where}")


def _need(obj: Mapping, key: str, where: str):
    if key not in obj:
        raise SchemaError(f"missing field {key!r} in {where}")
    return obj[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number, got {value!r}")
    return float(value)


# ---------------------------------------------------------------------------
# scenario files
# ---------------------------------------------------------------------------

def parse_scenario_text(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: top level must be an object")
    _reject_unknown(doc, {
        "schema_version", "units", "workspace", "robots", "initial",
        "pattern_targets", "final_targets", "obstacles", "solver",
    }, "scenario")
    version = _need(doc, "schema_version", "scenario")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    units = _need(doc, "units", "scenario")
    if not isinstance(units, dict):
        raise UnitError("units must be an object with 'length' and 'angle'")
    _reject_unknown(units, REQUIRED_UNITS, "units")
    for key, expected in REQUIRED_UNITS.items():
        if units.get(key) != expected:
            raise UnitError(
                f"units.{key} must be {expected!r}, got {units.get(key)!r}; "
                f"no unit inference is performed"
            )

    robots = []
    for i, entry in enumerate(_need(doc, "robots", "scenario")):
        where = f"robots[{i}]"
        _reject_unknown(entry, {"id", "body_length", "pivot_span", "variant"}, where)
        variant = entry.get("variant", "legged")
        if variant not in ("legged", "centered_magnet"):
            raise SchemaError(f"{where}: unknown variant {variant!r}")
        robots.append(RobotSpec(
            str(_need(entry, "id", where)),
            _number(_need(entry, "body_length", where), f"{where}.body_length"),
            _number(_need(entry, "pivot_span", where), f"{where}.pivot_span"),
            Variant(variant),
        ))
    known = {r.id for r in robots}

    initial = {}
    for rid, entry in _need(doc, "initial", "scenario").items():
        if rid not in known:
            raise SchemaError(f"initial pose references unknown robot id {rid!r}")
        _reject_unknown(entry, {"x", "y", "heading"}, f"initial[{rid!r}]")
        initial[rid] = Pose(
            _number(_need(entry, "x", f"initial[{rid!r}]"), "x"),
            _number(_need(entry, "y", f"initial[{rid!r}]"), "y"),
            math.radians(_number(entry.get("heading", 0.0), "heading")),
        )

    def parse_targets(name) -> Optional[Dict]:
        if name not in doc:
            return None
        out = {}
        for rid, entry in doc[name].items():
            if rid not in known:
                raise SchemaError(f"{name} references unknown robot id {rid!r}")
            _reject_unknown(entry, {"x", "y"}, f"{name}[{rid!r}]")
            out[rid] = (
                _number(_need(entry, "x", name), "x"),
                _number(_need(entry, "y", name), "y"),
            )
        return out

    obstacles = []
    for i, entry in enumerate(doc.get("obstacles", [])):
        where = f"obstacles[{i}]"
        _reject_unknown(entry, {"type", "center", "opening", "wall_thickness",
                                "wall_extent", "axis"}, where)
        if _need(entry, "type", where) != "channel":
            raise SchemaError(f"{where}: only 'channel' obstacles are supported")
        center = _need(entry, "center", where)
        _reject_unknown(center, {"x", "y"}, f"{where}.center")
        obstacles.append(Channel(
            _number(_need(center, "x", where), "center.x"),
            _number(_need(center, "y", where), "center.y"),
            _number(_need(entry, "opening", where), "opening"),
            _number(entry.get("wall_thickness", 4.0), "wall_thickness"),
            _number(entry.get("wall_extent", 120.0), "wall_extent"),
            str(entry.get("axis", "x")),
        ))

    workspace = Rect(-60.0, 60.0, -60.0, 60.0)
    if "workspace" in doc:
        entry = doc["workspace"]
        _reject_unknown(entry, {"x_min", "x_max", "y_min", "y_max"}, "workspace")
        workspace = Rect(
            _number(_need(entry, "x_min", "workspace"), "x_min"),
            _number(_need(entry, "x_max", "workspace"), "x_max"),
            _number(_need(entry, "y_min", "workspace"), "y_min"),
            _number(_need(entry, "y_max", "workspace"), "y_max"),
        )

    solver = SolverBounds()
    if "solver" in doc:
        entry = doc["solver"]
        _reject_unknown(entry, {"theta_max", "k_max", "tolerance"}, "solver")
        solver = SolverBounds(
            math.radians(_number(entry.get("theta_max", 90.0), "theta_max")),
            int(entry.get("k_max", 200)),
            _number(entry.get("tolerance", 0.1), "tolerance"),
        )

    return Scenario(
        robots=robots,
        initial=initial,
        pattern_targets=parse_targets("pattern_targets"),
        final_targets=parse_targets("final_targets"),
        obstacles=obstacles,
        workspace=workspace,
        solver=solver,
    )


def parse_scenario(path: Union[str, os.PathLike]) -> Scenario:
    """Load and fully validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario_text(text, source=str(path))


def scenario_to_json(scenario: Scenario) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "units": dict(REQUIRED_UNITS),
        "workspace": {
            "x_min": scenario.workspace.x_min, "x_max": scenario.workspace.x_max,
            "y_min": scenario.workspace.y_min, "y_max": scenario.workspace.y_max,
        },
        "robots": [
            {"id": r.id, "body_length": r.body_length, "pivot_span": r.pivot_span,
             "variant": r.variant.value}
            for r in scenario.robots
        ],
        "initial": {
            rid: {"x": p.x, "y": p.y, "heading": math.degrees(p.heading)}
            for rid, p in sorted(scenario.initial.items())
        },
        "solver": {
            "theta_max": math.degrees(scenario.solver.theta_max),
            "k_max": scenario.solver.k_max,
            "tolerance": scenario.solver.tolerance,
        },
    }
    for name, targets in (("pattern_targets", scenario.pattern_targets),
                          ("final_targets", scenario.final_targets)):
        if targets:
            doc[name] = {rid: {"x": t[0], "y": t[1]} for rid, t in sorted(targets.items())}
    if scenario.obstacles:
        doc["obstacles"] = [
            {"type": "channel", "center": {"x": ch.center_x, "y": ch.center_y},
             "opening": ch.opening, "wall_thickness": ch.wall_thickness,
             "wall_extent": ch.wall_extent, "axis": ch.axis}
            for ch in scenario.obstacles
        ]
    return doc


def _round_floats(o):
    if isinstance(o, float):
        return json.loads(_fmt(o))
    if isinstance(o, dict):
        return {k: _round_floats(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_round_floats(v) for v in o]
    return o


def _dump_json(doc: dict, path: Union[str, os.PathLike]):
    text = json.dumps(_round_floats(doc), indent=2, sort_keys=True) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_scenario(scenario: Scenario, path: Union[str, os.PathLike]):
    _dump_json(scenario_to_json(scenario), path)


# ---------------------------------------------------------------------------
# trajectory tables
# ---------------------------------------------------------------------------

CSV_HEADER = "step_index,robot_id,x_mm,y_mm,heading_deg,mode"


def trajectory_rows(trajectories: Sequence[Trajectory]) -> List[tuple]:
    """Flatten trajectories into (step, robot, x, y, heading_deg, mode) rows.

    Rows are sorted by (step_index, robot_id); step 0 rows repeat the
    initial poses with mode ``init``.
    """
    if not trajectories:
        raise IoError("no trajectories to export")
    rows = []
    for t in trajectories:
        for step, pose in enumerate(t.poses):
            mode = "init" if step == 0 else t.modes[step - 1]
            rows.append((step, t.robot_id, pose.x, pose.y, math.degrees(pose.heading), mode))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def format_trajectory_csv(trajectories: Sequence[Trajectory]) -> str:
    out = _io.StringIO()
    out.write(CSV_HEADER + "\n")
    for step, rid, x, y, heading, mode in trajectory_rows(trajectories):
        out.write(f"{step},{rid},{_fmt(x)},{_fmt(y)},{_fmt(heading)},{mode}\n")
    return out.getvalue()


def export_trajectory(trajectories: Sequence[Trajectory], path: Union[str, os.PathLike],
                      format: str = "csv"):
    """Write trajectories as CSV or as the structured JSON mirror."""
    if format == "csv":
        text = format_trajectory_csv(trajectories)
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
    elif format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "units": dict(REQUIRED_UNITS),
            "rows": [
                {"step_index": s, "robot_id": rid, "x_mm": x, "y_mm": y,
                 "heading_deg": h, "mode": m}
                for s, rid, x, y, h, m in trajectory_rows(trajectories)
            ],
        }
        _dump_json(doc, path)
    else:
        raise IoError(f"unknown trajectory format {format!r}")


# ---------------------------------------------------------------------------
# plan files
# ---------------------------------------------------------------------------

def _schedule_to_json(schedule: Schedule) -> list:
    steps = []
    for s in schedule:
        if isinstance(s, PivotHalfStep):
            steps.append({"type": "pivot", "pivot": s.pivot.value,
                          "sweep_deg": math.degrees(s.sweep)})
        else:
            steps.append({"type": "tumble", "direction": s.direction.value})
    return steps


def plan_to_json(plan: ManeuverPlan) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "units": dict(REQUIRED_UNITS),
        "label": plan.label,
        "phases": [
            {
                "mode": phase.mode.value,
                "intent": phase.intent,
                "schedule": _schedule_to_json(phase.schedule),
                "waypoints": {
                    rid: {"x": w[0], "y": w[1]} for rid, w in sorted(phase.waypoints.items())
                },
            }
            for phase in plan.phases
        ],
    }


def solution_to_json(solution: SolutionSet) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "units": dict(REQUIRED_UNITS),
        "label": solution.label,
        "theta_c_deg": math.degrees(solution.theta_c),
        "k": solution.k,
        "heading_deg": math.degrees(solution.heading),
        "lengths": {rid: v for rid, v in sorted(solution.lengths.items())},
    }


def write_plan(plan: ManeuverPlan, path: Union[str, os.PathLike]):
    _dump_json(plan_to_json(plan), path)


def write_solution(solution: SolutionSet, path: Union[str, os.PathLike]):
    _dump_json(solution_to_json(solution), path)


def parse_plan_text(text: str, source: str = "<string>") -> ManeuverPlan:
    from .planner import PhaseMode, PlanPhase

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    _reject_unknown(doc, {"schema_version", "units", "label", "phases"}, "plan")
    if _need(doc, "schema_version", "plan") != SCHEMA_VERSION:
        raise SchemaError("unsupported plan schema_version")
    phases = []
    for i, entry in enumerate(_need(doc, "phases", "plan")):
        where = f"phases[{i}]"
        _reject_unknown(entry, {"mode", "intent", "schedule", "waypoints"}, where)
        steps = []
        for j, s in enumerate(_need(entry, "schedule", where)):
            if s.get("type") == "pivot":
                steps.append(PivotHalfStep(Pivot(s["pivot"]), math.radians(s["sweep_deg"])))
            elif s.get("type") == "tumble":
                steps.append(TumbleStep(TumbleDirection(s["direction"])))
            else:
                raise SchemaError(f"{where}.schedule[{j}]: unknown step type")
        waypoints = {
            rid: (w["x"], w["y"]) for rid, w in entry.get("waypoints", {}).items()
        }
        phases.append(PlanPhase(PhaseMode(_need(entry, "mode", where)),
                                Schedule(tuple(steps)), entry.get("intent", ""), waypoints))
    return ManeuverPlan(tuple(phases), doc.get("label", ""))


def parse_plan(path: Union[str, os.PathLike]) -> ManeuverPlan:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read plan {path}: {exc}") from exc
    return parse_plan_text(text, source=str(path))
