"""Inverse planning for broadcast-actuated swarms.

The controllability analysis allows exactly one fully steerable robot,
so planning follows a leader-follower scheme: solve sweep angle, step
count and heading for one leader moving on a straight line, then derive
every follower's pivot span from the linearity of pivot-walk
displacement in span. Pattern formation runs the same solve backwards,
and the staged maneuvers (reverse, expansion, contraction) compose
straight, circular and tumbling phases whose per-phase parameters are
solved in sequence with earlier phases frozen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    ChannelTooNarrow,
    DegenerateSpans,
    Infeasible,
    MissingInitialPose,
    NonParallelTargets,
    NonRigidTranslation,
    PhaseSolverFailure,
    ResidualExceedsTolerance,
    SchemaError,
    SpanOutOfBounds,
    Unreachable,
    WorkspaceViolation,
)
from .kinematics import (
    Pivot,
    PivotHalfStep,
    Pose,
    RobotSpec,
    Schedule,
    TumbleDirection,
    TumbleStep,
    Variant,
    simulate,
    wrap_angle,
)
from .paths import (
    DistanceChangeRequest,
    DistanceChangeSolution,
    DistanceGait,
    Order,
    SolverBounds,
    advance_angle,
    advance_ratio,
    balanced_straight_schedule,
    straight_schedule,
    solve_distance_change,
)

PARALLEL_TOL = 1e-6  # rad


# ---------------------------------------------------------------------------
# scenario types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rect:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def contains(self, x: float, y: float, margin: float = 0.0) -> bool:
        return (
            self.x_min - margin <= x <= self.x_max + margin
            and self.y_min - margin <= y <= self.y_max + margin
        )

    @property
    def corners(self):
        return (
            (self.x_min, self.y_min),
            (self.x_max, self.y_min),
            (self.x_max, self.y_max),
            (self.x_min, self.y_max),
        )


DEFAULT_WORKSPACE = Rect(-60.0, 60.0, -60.0, 60.0)  # 12 cm x 12 cm


@dataclass(frozen=True)
class Channel:
    """A narrow gap in an axis-aligned wall.

    ``axis`` is the direction the wall runs along: an ``"x"`` wall lies
    on the line y = center_y and is crossed by moving in y. The opening
    of width ``opening`` is centered on ``(center_x, center_y)``.
    """

    center_x: float
    center_y: float
    opening: float
    wall_thickness: float = 4.0
    wall_extent: float = 120.0
    axis: str = "x"

    def __post_init__(self):
        if self.opening <= 0:
            raise SchemaError(f"channel opening must be > 0, got {self.opening}")
        if self.axis not in ("x", "y"):
            raise SchemaError(f"channel axis must be 'x' or 'y', got {self.axis!r}")

    def wall_rects(self) -> Tuple[Rect, Rect]:
        half_open = self.opening / 2.0
        half_ext = self.wall_extent / 2.0
        half_t = self.wall_thickness / 2.0
        if self.axis == "x":
            return (
                Rect(self.center_x - half_ext, self.center_x - half_open,
                     self.center_y - half_t, self.center_y + half_t),
                Rect(self.center_x + half_open, self.center_x + half_ext,
                     self.center_y - half_t, self.center_y + half_t),
            )
        return (
            Rect(self.center_x - half_t, self.center_x + half_t,
                 self.center_y - half_ext, self.center_y - half_open),
            Rect(self.center_x - half_t, self.center_x + half_t,
                 self.center_y + half_open, self.center_y + half_ext),
        )

    def frame(self):
        """Unit vectors (along-wall, across-wall) and scalar coordinates."""
        if self.axis == "x":
            return (1.0, 0.0), (0.0, 1.0)
        return (0.0, 1.0), (1.0, 0.0)


@dataclass
class Scenario:
    """Initial poses, targets, robot catalog, obstacles, solver options."""

    robots: List[RobotSpec]
    initial: Dict[str, Pose]
    pattern_targets: Optional[Dict[str, Tuple[float, float]]] = None
    final_targets: Optional[Dict[str, Tuple[float, float]]] = None
    obstacles: List[Channel] = field(default_factory=list)
    workspace: Rect = DEFAULT_WORKSPACE
    solver: SolverBounds = SolverBounds()

    def __post_init__(self):
        ids = [r.id for r in self.robots]
        if len(set(ids)) != len(ids):
            raise SchemaError("robot ids must be unique")
        for rid in ids:
            if rid not in self.initial:
                raise MissingInitialPose(f"no initial pose for robot {rid!r}")
        for name, targets in (("pattern_targets", self.pattern_targets),
                              ("final_targets", self.final_targets)):
            if targets:
                for rid in targets:
                    if rid not in self.initial:
                        raise SchemaError(f"{name} references unknown robot id {rid!r}")
        for rid, pose in self.initial.items():
            if not self.workspace.contains(pose.x, pose.y):
                raise WorkspaceViolation(
                    f"initial pose of {rid!r} at ({pose.x}, {pose.y}) is outside the workspace"
                )

    def robot(self, rid: str) -> RobotSpec:
        for r in self.robots:
            if r.id == rid:
                return r
        raise SchemaError(f"unknown robot id {rid!r}")


@dataclass(frozen=True)
class SolutionSet:
    """Planner output: shared sweep angle, step count, heading, spans."""

    theta_c: float
    k: int
    heading: float
    lengths: Dict[str, float]
    label: str = ""


class PhaseMode(Enum):
    PIVOT = "pivot"
    TUMBLE = "tumble"


@dataclass(frozen=True)
class PlanPhase:
    mode: PhaseMode
    schedule: Schedule
    intent: str
    waypoints: Dict[str, Tuple[float, float]]


@dataclass(frozen=True)
class ManeuverPlan:
    phases: Tuple[PlanPhase, ...]
    label: str = ""

    def full_schedule(self) -> Schedule:
        total = Schedule((), self.label)
        for phase in self.phases:
            total = total + phase.schedule
        return total


@dataclass
class PlanSimulation:
    poses: Dict[str, List[Pose]]  # per robot, index 0 = initial
    modes: Dict[str, List[str]]  # per robot, one tag per step
    phase_bounds: List[int]  # pose index at the end of each phase

    def at_phase_end(self, phase_index: int) -> Dict[str, Pose]:
        i = self.phase_bounds[phase_index]
        return {rid: ps[i] for rid, ps in self.poses.items()}

    def trajectories(self) -> List["Trajectory"]:
        from .kinematics import Trajectory

        return [Trajectory(rid, ps, self.modes[rid]) for rid, ps in self.poses.items()]


def simulate_plan(plan: ManeuverPlan, robots: Sequence[RobotSpec],
                  initial: Mapping[str, Pose]) -> PlanSimulation:
    """Run every phase in order and keep the stitched pose history."""
    poses = {r.id: [initial[r.id]] for r in robots}
    modes = {r.id: [] for r in robots}
    bounds = []
    current = dict(initial)
    for phase in plan.phases:
        trajectories = simulate(robots, current, phase.schedule)
        for t in trajectories:
            poses[t.robot_id].extend(t.poses[1:])
            modes[t.robot_id].extend(t.modes)
            current[t.robot_id] = t.final
        bounds.append(len(poses[robots[0].id]) - 1)
    return PlanSimulation(poses, modes, bounds)


# ---------------------------------------------------------------------------
# Algorithm-1 style line and length solving
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineSolution:
    """Straight-motion solve for one robot: schedule plus aim heading."""

    theta_c: float
    k: int
    heading: float
    span: float

    def schedule(self) -> Schedule:
        if self.k == 0:
            return Schedule((), "no-op")
        return straight_schedule(self.theta_c, self.k)

    @property
    def advance_direction(self) -> float:
        if self.k == 0:
            return self.heading
        return wrap_angle(self.heading + advance_angle(self.theta_c, self.k))

    @property
    def ratio(self) -> float:
        return advance_ratio(self.theta_c, self.k) if self.k else 0.0


def solve_leader_line(start: Tuple[float, float], goal: Tuple[float, float],
                      leader_span: float, bounds: SolverBounds = SolverBounds()) -> LineSolution:
    """Solve (theta_c, k, heading) moving the leader from start to goal.

    Picks the smallest k whose reach at theta_max covers the distance,
    then bisects the monotone displacement ratio for theta_c; the heading
    compensates the small lead-chord tilt so the net displacement points
    exactly at the goal. A zero-distance goal yields the empty schedule.
    """
    dx, dy = goal[0] - start[0], goal[1] - start[1]
    distance = math.hypot(dx, dy)
    if leader_span <= 0:
        raise SpanOutOfBounds(f"leader span must be > 0, got {leader_span}")
    if distance < 1e-12:
        return LineSolution(0.0, 0, 0.0, leader_span)
    target_ratio = distance / leader_span
    if advance_ratio(bounds.theta_max, bounds.k_max) < target_ratio:
        raise Unreachable(
            f"distance {distance:.3f} mm exceeds span*g(theta_max, k_max) "
            f"= {leader_span * advance_ratio(bounds.theta_max, bounds.k_max):.3f} mm"
        )
    k = 1
    while advance_ratio(bounds.theta_max, k) < target_ratio:
        k += 1
    lo, hi = 1e-12, bounds.theta_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if advance_ratio(mid, k) < target_ratio:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    heading = wrap_angle(math.atan2(dy, dx) - advance_angle(theta, k))
    return LineSolution(theta, k, heading, leader_span)


@dataclass(frozen=True)
class FollowerLengths:
    spans: Dict[str, float]
    residuals: Dict[str, float]  # placement error after catalog snapping, mm


def solve_follower_lengths(
    leader: LineSolution,
    starts: Mapping[str, Tuple[float, float]],
    goals: Mapping[str, Tuple[float, float]],
    span_min: Optional[float] = None,
    span_max: Optional[float] = None,
    catalog: Optional[Sequence[float]] = None,
) -> FollowerLengths:
    """Pivot spans that carry each follower to its goal under the leader's schedule.

    Displacement is exactly linear in span, so span_i = distance_i / g.
    Every follower displacement must be parallel to the leader's advance
    direction (and point the same way); otherwise the broadcast
    straight-line class cannot realize it. With a catalog the solved span
    snaps to the nearest entry and the induced placement error is
    reported per robot.
    """
    if leader.k == 0:
        raise Infeasible("leader solution is the empty schedule; nothing to follow")
    g = leader.ratio
    direction = leader.advance_direction
    spans: Dict[str, float] = {}
    residuals: Dict[str, float] = {}
    for rid in sorted(starts):
        sx, sy = starts[rid]
        gx, gy = goals[rid]
        dx, dy = gx - sx, gy - sy
        distance = math.hypot(dx, dy)
        if distance < 1e-12:
            raise SpanOutOfBounds(
                f"follower {rid!r} has zero displacement; a robot cannot have zero span"
            )
        misalign = abs(wrap_angle(math.atan2(dy, dx) - direction))
        if misalign > PARALLEL_TOL:
            raise NonParallelTargets(
                f"follower {rid!r} displacement is {math.degrees(misalign):.4g} deg off the "
                f"leader's advance direction; broadcast straight motion cannot realize it"
            )
        span = distance / g
        if span_min is not None and span < span_min:
            raise SpanOutOfBounds(f"follower {rid!r} needs span {span:.3f} mm < span_min {span_min}")
        if span_max is not None and span > span_max:
            raise SpanOutOfBounds(f"follower {rid!r} needs span {span:.3f} mm > span_max {span_max}")
        if catalog:
            snapped = min(catalog, key=lambda c: (abs(c - span), c))
            residuals[rid] = abs(snapped - span) * g
            span = snapped
        else:
            residuals[rid] = 0.0
        spans[rid] = span
    return FollowerLengths(spans, residuals)


def plan_swarm(scenario: Scenario, catalog: Optional[Sequence[float]] = None,
               span_min: Optional[float] = None, span_max: Optional[float] = None) -> SolutionSet:
    """Leader-follower positioning for every robot in the scenario.

    The robot with the largest displacement becomes the leader and keeps
    its cataloged span (followers then need smaller spans); the solved
    set holds one shared (theta_c, k, heading) and a span per robot.
    Simulating the returned solution places every robot within the
    solver tolerance of its pattern target.
    """
    if not scenario.pattern_targets:
        raise SchemaError("plan_swarm needs pattern_targets for every robot")
    missing = [r.id for r in scenario.robots if r.id not in scenario.pattern_targets]
    if missing:
        raise SchemaError(f"pattern_targets missing for robots: {missing}")

    def displacement(rid):
        p = scenario.initial[rid]
        t = scenario.pattern_targets[rid]
        return math.hypot(t[0] - p.x, t[1] - p.y)

    leader_id = max((r.id for r in scenario.robots), key=lambda rid: (displacement(rid), rid))
    leader_spec = scenario.robot(leader_id)
    start = scenario.initial[leader_id].position
    goal = scenario.pattern_targets[leader_id]
    line = solve_leader_line(start, goal, leader_spec.pivot_span, scenario.solver)
    starts = {r.id: scenario.initial[r.id].position for r in scenario.robots if r.id != leader_id}
    goals = {rid: scenario.pattern_targets[rid] for rid in starts}
    lengths = {leader_id: leader_spec.pivot_span}
    if starts:
        followers = solve_follower_lengths(line, starts, goals, span_min, span_max, catalog)
        lengths.update(followers.spans)
    return SolutionSet(line.theta_c, line.k, line.heading, lengths, label=f"leader={leader_id}")


def execute_swarm_plan(scenario: Scenario, solution: SolutionSet):
    """Simulate a solved swarm plan with the solved spans and heading."""
    robots = []
    initial = {}
    for spec in scenario.robots:
        span = solution.lengths[spec.id]
        body = spec.body_length if spec.variant is Variant.LEGGED else span
        robots.append(RobotSpec(spec.id, max(body, span), span, spec.variant))
        pose = scenario.initial[spec.id]
        initial[spec.id] = Pose(pose.x, pose.y, solution.heading)
    schedule = (
        straight_schedule(solution.theta_c, solution.k) if solution.k else Schedule((), "no-op")
    )
    return simulate(robots, initial, schedule)


# ---------------------------------------------------------------------------
# pattern formation and tumbling translation
# ---------------------------------------------------------------------------

def plan_pattern(
    pattern: Sequence[Tuple[float, float]],
    spans: Sequence[float],
    theta_c: float,
    k: int,
    heading: float,
    workspace: Rect = DEFAULT_WORKSPACE,
) -> List[Tuple[float, float]]:
    """Initial positions whose straight walk produces the target pattern.

    Runs the length solve backwards: subtract each robot's exact
    displacement from its target. Forward-simulating from the returned
    initials reproduces the pattern to floating point.
    """
    if len(pattern) != len(spans):
        raise SchemaError("pattern and spans must have the same length")
    from .paths import straight_displacement

    initials = []
    c, s = math.cos(heading), math.sin(heading)
    for (tx, ty), span in zip(pattern, spans):
        if k == 0:
            initials.append((tx, ty))
            continue
        dx, dy = straight_displacement(span, theta_c, k)
        wx, wy = c * dx - s * dy, s * dx + c * dy
        ix, iy = tx - wx, ty - wy
        if not workspace.contains(ix, iy):
            raise WorkspaceViolation(
                f"required initial position ({ix:.2f}, {iy:.2f}) falls outside the workspace"
            )
        initials.append((ix, iy))
    return initials


@dataclass(frozen=True)
class TumbleTranslation:
    schedule: Schedule
    heading: float
    count: int
    residual: float  # mm left over after the integer number of strides


def plan_tumble_translate(
    plan_targets: Mapping[str, Tuple[float, float]],
    final_targets: Mapping[str, Tuple[float, float]],
    body_length,
    tolerance: Optional[float] = None,
    position_tol: float = 0.1,
) -> TumbleTranslation:
    """Tumble schedule realizing a rigid translation of the formation.

    All robots must share one body length and one displacement vector;
    tumbling then translates the formation exactly, preserving its shape.
    The translation quantizes to whole strides; the remainder is always
    reported and rejected only beyond ``tolerance`` (default half a
    stride). The robots must be oriented along the returned heading.
    """
    if isinstance(body_length, Mapping):
        values = set(float(v) for v in body_length.values())
        if len(values) > 1:
            raise NonRigidTranslation(
                "mixed body lengths tumble at different strides; formation would shear"
            )
        length = values.pop()
    else:
        length = float(body_length)
    if length <= 0:
        raise NonRigidTranslation(f"body length must be > 0, got {length}")
    if set(plan_targets) != set(final_targets):
        raise SchemaError("plan_targets and final_targets must cover the same robots")
    deltas = []
    for rid in sorted(plan_targets):
        px, py = plan_targets[rid]
        fx, fy = final_targets[rid]
        deltas.append((fx - px, fy - py))
    ref = deltas[0]
    for d in deltas[1:]:
        if math.hypot(d[0] - ref[0], d[1] - ref[1]) > position_tol:
            raise NonRigidTranslation(
                "per-robot displacements differ; the translation is not rigid"
            )
    magnitude = math.hypot(*ref)
    tol = length / 2.0 if tolerance is None else tolerance
    if magnitude < 1e-12:
        return TumbleTranslation(Schedule((), "no-op"), 0.0, 0, 0.0)
    heading = math.atan2(ref[1], ref[0])
    count = round(magnitude / length)
    residual = magnitude - count * length
    if abs(residual) > tol:
        raise ResidualExceedsTolerance(
            f"translation {magnitude:.3f} mm leaves residual {residual:.3f} mm "
            f"beyond tolerance {tol:.3f} mm at stride {length} mm"
        )
    steps = tuple(TumbleStep(TumbleDirection.FORWARD) for _ in range(count))
    return TumbleTranslation(Schedule(steps, f"tumble({count})"), heading, count, residual)
