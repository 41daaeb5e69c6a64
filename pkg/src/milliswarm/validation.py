"""Plan validation: collisions, obstacle clearance, workspace, terminal error.

The kinematic model treats robots as zero-width segments of one body
length centered on the midpoint and aligned with the heading. Validation
simulates a plan step by step and reports the worst-case pairwise
segment distance, the worst wall clearance, workspace containment and
the per-robot terminal error against the scenario targets. Findings are
report entries with severity, never exceptions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .kinematics import Pose
from .planner import ManeuverPlan, Rect, Scenario, simulate_plan


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning" | "info"
    kind: str
    message: str
    step: Optional[int] = None
    robots: Tuple[str, ...] = ()


@dataclass
class ValidationReport:
    findings: List[Finding] = field(default_factory=list)
    min_robot_distance: float = math.inf
    min_obstacle_clearance: float = math.inf
    workspace_ok: bool = True
    terminal_errors: Dict[str, float] = field(default_factory=dict)

    @property
    def violations(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == "error"]


def _segment(pose: Pose, length: float):
    hx, hy = math.cos(pose.heading), math.sin(pose.heading)
    half = length / 2.0
    return (
        (pose.x - half * hx, pose.y - half * hy),
        (pose.x + half * hx, pose.y + half * hy),
    )


def _clamp(v, lo, hi):
    return lo if v < lo else hi if v > hi else v


def point_segment_distance(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    t = 0.0 if den == 0.0 else _clamp(((px - ax) * dx + (py - ay) * dy) / den, 0.0, 1.0)
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_intersect(a, b, c, d) -> bool:
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)):
        return True
    return False


def segment_segment_distance(a, b, c, d) -> float:
    if segments_intersect(a, b, c, d):
        return 0.0
    return min(
        point_segment_distance(a, c, d),
        point_segment_distance(b, c, d),
        point_segment_distance(c, a, b),
        point_segment_distance(d, a, b),
    )


def segment_rect_distance(a, b, rect: Rect) -> float:
    inside = rect.contains(*a) or rect.contains(*b)
    if inside:
        return 0.0
    corners = rect.corners
    edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    return min(segment_segment_distance(a, b, e0, e1) for e0, e1 in edges)


def validate_plan(
    plan: ManeuverPlan,
    scenario: Scenario,
    collision_threshold: float = 0.0,
    clearance_threshold: float = 0.0,
) -> ValidationReport:
    """Simulate a plan and audit it against the scenario geometry.

    ``collision_threshold`` is the pairwise segment distance below which
    a collision entry is reported; ``clearance_threshold`` plays the same
    role for obstacle walls. Terminal errors are measured against the
    scenario's final targets when present, else the pattern targets.
    """
    report = ValidationReport()
    sim = simulate_plan(plan, scenario.robots, scenario.initial)
    ids = [r.id for r in scenario.robots]
    lengths = {r.id: r.body_length for r in scenario.robots}
    wall_rects = [w for ch in scenario.obstacles for w in ch.wall_rects()]
    n_steps = len(sim.poses[ids[0]])

    for step in range(n_steps):
        segs = {rid: _segment(sim.poses[rid][step], lengths[rid]) for rid in ids}
        for i, ra in enumerate(ids):
            for rb in ids[i + 1 :]:
                dist = segment_segment_distance(*segs[ra], *segs[rb])
                if dist < report.min_robot_distance:
                    report.min_robot_distance = dist
                if dist <= collision_threshold:
                    report.findings.append(Finding(
                        "error", "collision",
                        f"robots {ra!r} and {rb!r} are {dist:.3f} mm apart at step {step}",
                        step=step, robots=(ra, rb)))
        for rid in ids:
            for rect in wall_rects:
                clearance = segment_rect_distance(*segs[rid], rect)
                if clearance < report.min_obstacle_clearance:
                    report.min_obstacle_clearance = clearance
                if clearance <= clearance_threshold:
                    report.findings.append(Finding(
                        "error", "obstacle",
                        f"robot {rid!r} touches a wall at step {step} "
                        f"(clearance {clearance:.3f} mm)",
                        step=step, robots=(rid,)))
            for end in segs[rid]:
                if not scenario.workspace.contains(*end):
                    report.workspace_ok = False
                    report.findings.append(Finding(
                        "error", "workspace",
                        f"robot {rid!r} leaves the workspace at step {step}",
                        step=step, robots=(rid,)))

    targets = scenario.final_targets or scenario.pattern_targets or {}
    for rid in ids:
        if rid in targets:
            end = sim.poses[rid][-1]
            tx, ty = targets[rid]
            report.terminal_errors[rid] = math.hypot(end.x - tx, end.y - ty)
    for rid, err in sorted(report.terminal_errors.items()):
        severity = "info" if err <= scenario.solver.tolerance else "error"
        if severity == "error":
            report.findings.append(Finding(
                severity, "terminal",
                f"robot {rid!r} ends {err:.3f} mm from its target", robots=(rid,)))
    return report
