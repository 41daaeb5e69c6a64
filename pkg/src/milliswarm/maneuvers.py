"""Staged maneuvers: reverse, expansion and contraction.

Each maneuver composes broadcast phases whose parameters are solved in
sequence with earlier phases frozen. Geometry convention for channel
work: the robots' long axes stay parallel to the crossing direction, so
straight pivot phases slide the group along the wall (changing gaps in
proportion to span) while tumbling carries it through the gap without
changing any gap at all.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

from .errors import (
    ChannelTooNarrow,
    DegenerateSpans,
    Infeasible,
    NonRigidTranslation,
    PhaseSolverFailure,
    SchemaError,
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
    canonical_pivot_schedule,
    simulate,
    wrap_angle,
)
from .paths import (
    DistanceChangeRequest,
    DistanceGait,
    Order,
    balanced_straight_schedule,
    solve_distance_change,
)
from .planner import (
    ManeuverPlan,
    PhaseMode,
    PlanPhase,
    Scenario,
)

CHANNEL_MARGIN = 0.8  # fraction of the opening usable by the formation


def _tumbles(count: int, direction: TumbleDirection) -> Schedule:
    return Schedule(tuple(TumbleStep(direction) for _ in range(count)), f"tumble({count})")


def _unit(angle: float) -> Tuple[float, float]:
    return (math.cos(angle), math.sin(angle))


def _advanced(pos, vec, scale):
    return (pos[0] + scale * vec[0], pos[1] + scale * vec[1])


def _rotated(vec, angle):
    c, s = math.cos(angle), math.sin(angle)
    return (c * vec[0] - s * vec[1], s * vec[0] + c * vec[1])


# ---------------------------------------------------------------------------
# reverse maneuver (two robots through a channel, order swapped)
# ---------------------------------------------------------------------------

def plan_reverse(scenario: Scenario, margin: float = CHANNEL_MARGIN,
                 stage_clearance: float = 1.0) -> ManeuverPlan:
    """Five-phase plan steering two robots through a channel with their
    order reversed.

    Phases: (1) pivot walk along the wall direction shrinking the gap
    below the opening, (2) tumble to a staging point just before the
    wall, (3) tumble through the gap, (4) pivot walk expanding the gap
    until the faster robot has passed the slower one, (5) tumble to the
    final line. The robots face across the wall the whole time, so the
    pivot phases never move them toward it and the tumble phases never
    change their gap.
    """
    if len(scenario.robots) != 2:
        raise SchemaError(f"reverse maneuver needs exactly 2 robots, got {len(scenario.robots)}")
    if not scenario.obstacles:
        raise SchemaError("reverse maneuver needs a channel obstacle")
    if not scenario.final_targets or set(scenario.final_targets) != {r.id for r in scenario.robots}:
        raise SchemaError("reverse maneuver needs final_targets for both robots")
    a, b = scenario.robots
    if a.pivot_span == b.pivot_span:
        raise DegenerateSpans("equal spans cannot change their gap under broadcast input")
    if a.body_length != b.body_length:
        raise NonRigidTranslation("reverse maneuver tumbles in formation; body lengths must match")
    body = a.body_length
    channel = scenario.obstacles[0]
    along, across = channel.frame()

    def t_of(p):  # transverse coordinate, along the wall
        return p[0] * along[0] + p[1] * along[1]

    def n_of(p):  # crossing coordinate
        return p[0] * across[0] + p[1] * across[1]

    poses = {r.id: scenario.initial[r.id] for r in scenario.robots}
    finals = dict(scenario.final_targets)
    wall_n = n_of((channel.center_x, channel.center_y))
    gap_t = t_of((channel.center_x, channel.center_y))
    side = math.copysign(1.0, n_of(poses[a.id].position) - wall_n)
    for r in scenario.robots:
        if math.copysign(1.0, n_of(poses[r.id].position) - wall_n) != side:
            raise SchemaError("both robots must start on the same side of the wall")
        if math.copysign(1.0, n_of(finals[r.id]) - wall_n) != -side:
            raise SchemaError("final targets must lie on the far side of the wall")

    heading = poses[a.id].heading
    across_angle = math.atan2(across[1], across[0])
    if min(abs(wrap_angle(heading - across_angle)),
           abs(wrap_angle(heading - across_angle - math.pi))) > 1e-9:
        raise PhaseSolverFailure(
            "phase solver: robots must face across the wall (long axis along the crossing)"
        )
    if abs(wrap_angle(poses[b.id].heading - heading)) > 1e-9:
        raise PhaseSolverFailure("phase solver: robots must share one heading")

    fast, slow = (a, b) if a.pivot_span > b.pivot_span else (b, a)
    t0 = {r.id: t_of(poses[r.id].position) for r in scenario.robots}
    gap0 = abs(t0[fast.id] - t0[slow.id])
    usable = margin * channel.opening
    chase = math.copysign(1.0, t0[slow.id] - t0[fast.id])  # walk direction along the wall

    # phase 1: shrink the transverse gap below the usable opening
    if gap0 > usable:
        try:
            sol = solve_distance_change(
                DistanceChangeRequest(fast.pivot_span, slow.pivot_span, gap0, usable,
                                      Order.PRESERVE),
                scenario.solver,
                gait=DistanceGait.STRAIGHT,
            )
        except Infeasible as exc:
            raise ChannelTooNarrow(
                f"cannot shrink gap {gap0:.2f} mm below the opening within solver bounds"
            ) from exc
        stride1 = (sol.k + 1) * math.sin(sol.theta_c / 2.0)
        phase1_schedule = balanced_straight_schedule(
            sol.theta_c, sol.k, mirror=_mirror_for(heading, chase, along))
    else:
        stride1 = 0.0
        phase1_schedule = Schedule((), "no-op")
    t1 = {r.id: t0[r.id] + chase * r.pivot_span * stride1 for r in scenario.robots}
    gap1 = abs(t1[fast.id] - t1[slow.id])
    for rid, t in t1.items():
        if abs(t - gap_t) > margin * channel.opening / 2.0 + 1e-9:
            raise PhaseSolverFailure(
                f"phase solver: robot {rid!r} ends phase 1 at transverse offset "
                f"{abs(t - gap_t):.2f} mm from the opening; adjust the initial positions "
                f"or the channel"
            )

    # tumble senses: Forward moves along the heading
    into = -side  # crossing direction sign along the across axis
    forward_sign = math.copysign(1.0, math.cos(wrap_angle(heading - across_angle)))
    direction_in = TumbleDirection.FORWARD if forward_sign == into else TumbleDirection.BACKWARD
    direction_out = (TumbleDirection.BACKWARD if direction_in is TumbleDirection.FORWARD
                     else TumbleDirection.FORWARD)

    n0 = {r.id: n_of(poses[r.id].position) for r in scenario.robots}
    clear = channel.wall_thickness / 2.0 + body / 2.0 + stage_clearance
    d_near = min(side * (n0[r.id] - wall_n) for r in scenario.robots)
    d_far = max(side * (n0[r.id] - wall_n) for r in scenario.robots)
    count2 = max(0, math.floor((d_near - clear) / body))
    count3 = math.ceil((d_far + clear) / body) - count2
    if count3 < 1:
        raise PhaseSolverFailure("phase solver: no room to tumble through the channel")
    n_after2 = {rid: n - side * count2 * body for rid, n in n0.items()}
    n_after3 = {rid: n - side * (count2 + count3) * body for rid, n in n0.items()}

    # phase 4: expand past each other to the final spacing (order swap)
    gap_final = abs(t_of(finals[fast.id]) - t_of(finals[slow.id]))
    sol4 = solve_distance_change(
        DistanceChangeRequest(fast.pivot_span, slow.pivot_span, gap1, gap_final, Order.SWAP),
        scenario.solver,
        gait=DistanceGait.STRAIGHT,
    )
    stride4 = (sol4.k + 1) * math.sin(sol4.theta_c / 2.0)
    phase4_schedule = balanced_straight_schedule(
        sol4.theta_c, sol4.k, mirror=_mirror_for(heading, chase, along))
    t4 = {r.id: t1[r.id] + chase * r.pivot_span * stride4 for r in scenario.robots}
    for rid in t4:
        if abs(t4[rid] - t_of(finals[rid])) > scenario.solver.tolerance:
            raise PhaseSolverFailure(
                f"phase solver: robot {rid!r} ends {abs(t4[rid] - t_of(finals[rid])):.3f} mm "
                f"off its final transverse position"
            )

    # phase 5: tumble to the final line
    drops = {rid: side * (n_after3[rid] - n_of(finals[rid])) for rid in n_after3}
    ref = drops[fast.id]
    if abs(drops[slow.id] - ref) > scenario.solver.tolerance:
        raise PhaseSolverFailure("phase solver: final targets are not a rigid tumble apart")
    signed5 = round(ref / body)
    if abs(ref - signed5 * body) > scenario.solver.tolerance:
        raise PhaseSolverFailure(
            f"phase solver: final line is {ref:.3f} mm past the channel, not a whole "
            f"number of {body} mm strides"
        )
    count5 = abs(signed5)
    direction5 = direction_in if signed5 >= 0 else direction_out
    n_final = {rid: n - side * signed5 * body for rid, n in n_after3.items()}

    def xy(t, n):
        return (t * along[0] + n * across[0], t * along[1] + n * across[1])

    def waypoints(ts, ns):
        return {rid: xy(ts[rid], ns[rid]) for rid in ts}

    phases = (
        PlanPhase(PhaseMode.PIVOT, phase1_schedule, "shrink gap below the opening",
                  waypoints(t1, n0)),
        PlanPhase(PhaseMode.TUMBLE, _tumbles(count2, direction_in), "tumble to the staging point",
                  waypoints(t1, n_after2)),
        PlanPhase(PhaseMode.TUMBLE, _tumbles(count3, direction_in), "tumble through the channel",
                  waypoints(t1, n_after3)),
        PlanPhase(PhaseMode.PIVOT, phase4_schedule, "expand gap and swap order",
                  waypoints(t4, n_after3)),
        PlanPhase(PhaseMode.TUMBLE, _tumbles(count5, direction5), "tumble to the final line",
                  waypoints(t4, n_final)),
    )
    return ManeuverPlan(phases, "reverse")


def _mirror_for(heading, chase, along):
    # balanced gait advances 90 deg left of the heading; mirror when that
    # lands opposite the required chase direction along the wall
    adv = wrap_angle(heading + math.pi / 2.0)
    along_angle = math.atan2(along[1], along[0])
    want = along_angle if chase > 0 else wrap_angle(along_angle + math.pi)
    return abs(wrap_angle(adv - want)) > math.pi / 2.0


# ---------------------------------------------------------------------------
# expansion / contraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionParams:
    """Fixed shape parameters of the staged expansion recipe."""

    approach_theta1: float = math.radians(30.0)
    approach_theta2: float = math.radians(18.0)
    approach_pairs: int = 3
    transit_theta: float = math.radians(40.0)
    incline_theta: float = math.radians(30.0)
    incline_steps: int = 7  # odd
    final_theta1: float = math.radians(28.0)
    final_theta2: float = math.radians(16.0)
    final_pairs: int = 4
    wall_clearance: float = 5.0

    def heading_change(self, with_channel: bool) -> float:
        dh = self.approach_pairs * (self.approach_theta1 - self.approach_theta2)
        if with_channel:
            dh += self.incline_theta  # odd-count equal-angle gait ends tilted one sweep
        dh += self.final_pairs * (self.final_theta1 - self.final_theta2)
        return dh


def _arc_schedule(theta1: float, theta2: float, pairs: int) -> Schedule:
    """Open circular arc: ``pairs`` full steps of the alternating gait."""
    steps = []
    for i in range(1, 2 * pairs + 1):
        if i % 2 == 1:
            steps.append(PivotHalfStep(Pivot.BACK, theta1))
        else:
            steps.append(PivotHalfStep(Pivot.FRONT, -theta2))
    return Schedule(tuple(steps), f"arc({pairs} pairs)")


def _unit_probe_displacement(schedule: Schedule) -> Tuple[Tuple[float, float], float]:
    """Displacement per unit span (heading 0) and the heading change."""
    probe = RobotSpec.legged("probe", 1.0, body_length=10.0)
    end = simulate([probe], {"probe": Pose(0.0, 0.0, 0.0)}, schedule)[0].final
    return (end.x, end.y), end.heading


def expansion_phase_chain(robots, positions, heading0, obstacles, params: ExpansionParams,
                          margin: float = CHANNEL_MARGIN, into_hint: float = 1.0):
    """Forward-chain the expansion phases from given start positions.

    Returns (phases, final_positions). Shared by the planner (which then
    checks the chain against the scenario targets) and by the scenario
    generator (which adopts the chain's end as the targets).
    """
    approach = _arc_schedule(params.approach_theta1, params.approach_theta2,
                             params.approach_pairs)
    w1, dh1 = _unit_probe_displacement(approach)
    final_arc = _arc_schedule(params.final_theta1, params.final_theta2, params.final_pairs)
    w2, _ = _unit_probe_displacement(final_arc)

    current = {
        r.id: _advanced(positions[r.id], _rotated(w1, heading0), r.pivot_span) for r in robots
    }
    heading = wrap_angle(heading0 + dh1)
    phases: List[PlanPhase] = [
        PlanPhase(PhaseMode.PIVOT, approach, "circular approach", dict(current)),
    ]

    if obstacles:
        channel = obstacles[0]
        along, across = channel.frame()
        across_angle = math.atan2(across[1], across[0])
        wall_n = channel.center_x * across[0] + channel.center_y * across[1]
        gap_t = channel.center_x * along[0] + channel.center_y * along[1]
        advance = wrap_angle(heading + math.pi / 2.0)
        if min(abs(wrap_angle(advance - across_angle)),
               abs(wrap_angle(advance - across_angle - math.pi))) > 1e-9:
            raise PhaseSolverFailure(
                "phase solver: after the approach arc the gait must advance across the wall"
            )
        into = math.copysign(1.0, into_hint)
        if abs(wrap_angle(advance - (across_angle if into > 0
                                     else wrap_angle(across_angle + math.pi)))) > 1e-9:
            mirror = True
            advance = wrap_angle(heading - math.pi / 2.0)
        else:
            mirror = False
        # file fit: every robot's long axis lies along the wall during
        # transit, and the formation spread must respect the margin
        ts = {r.id: current[r.id][0] * along[0] + current[r.id][1] * along[1] for r in robots}
        spread = max(ts.values()) - min(ts.values())
        if spread > margin * channel.opening:
            raise PhaseSolverFailure(
                f"phase solver: formation spread {spread:.2f} mm exceeds the usable opening"
            )
        for r in robots:
            if abs(ts[r.id] - gap_t) + r.pivot_span / 2.0 > channel.opening / 2.0 - 1e-9:
                raise PhaseSolverFailure(
                    f"phase solver: robot {r.id!r} does not fit the opening during transit"
                )
        need_stride = max(
            (channel.wall_thickness / 2.0 + params.wall_clearance
             - into * (current[r.id][0] * across[0] + current[r.id][1] * across[1] - wall_n))
            / r.pivot_span
            for r in robots
        )
        interior = 1
        while (interior + 1) * math.sin(params.transit_theta / 2.0) < need_stride:
            interior += 2
        transit = balanced_straight_schedule(params.transit_theta, interior, mirror=mirror)
        stride = (interior + 1) * math.sin(params.transit_theta / 2.0)
        adv_vec = _unit(advance)
        current = {
            r.id: _advanced(current[r.id], (adv_vec[0] * stride, adv_vec[1] * stride),
                            r.pivot_span)
            for r in robots
        }
        phases.append(PlanPhase(PhaseMode.PIVOT, transit, "straight transit through the channel",
                                dict(current)))

        incline = canonical_pivot_schedule(params.incline_theta, params.incline_theta,
                                           params.incline_steps, label="incline")
        wi, dhi = _unit_probe_displacement(incline)
        current = {
            r.id: _advanced(current[r.id], _rotated(wi, heading), r.pivot_span) for r in robots
        }
        heading = wrap_angle(heading + dhi)
        phases.append(PlanPhase(PhaseMode.PIVOT, incline, "inclined straight segment",
                                dict(current)))

    current = {
        r.id: _advanced(current[r.id], _rotated(w2, heading), r.pivot_span) for r in robots
    }
    phases.append(PlanPhase(PhaseMode.PIVOT, final_arc, "final circular placement",
                            dict(current)))
    return phases, current


def plan_expansion(scenario: Scenario, params: ExpansionParams = ExpansionParams(),
                   margin: float = CHANNEL_MARGIN) -> ManeuverPlan:
    """Staged expansion: circular approach, channel transit, inclined
    segment, final circular placement.

    The recipe's shape parameters are fixed (see ``ExpansionParams``);
    the transit length is solved so every robot clears the wall, and the
    remaining phases must land each robot within the solver tolerance of
    its pattern target, else the failing phase is named. Without a
    channel the transit and incline phases are omitted, leaving a
    two-phase plan.
    """
    if len(scenario.robots) < 2:
        raise SchemaError("expansion needs at least two robots")
    if not scenario.pattern_targets:
        raise SchemaError("expansion needs pattern_targets (the expanded formation)")
    robots = scenario.robots
    targets = scenario.pattern_targets
    wall_rects = [w for ch in scenario.obstacles for w in ch.wall_rects()]
    for r in robots:
        if r.id not in targets:
            raise SchemaError(f"pattern_targets missing robot {r.id!r}")
        tx, ty = targets[r.id]
        if not scenario.workspace.contains(tx, ty):
            raise WorkspaceViolation(f"target of {r.id!r} lies outside the workspace")
        for rect in wall_rects:
            if rect.contains(tx, ty):
                raise WorkspaceViolation(f"target of {r.id!r} lies inside a wall")

    heading0 = scenario.initial[robots[0].id].heading
    for r in robots:
        if abs(wrap_angle(scenario.initial[r.id].heading - heading0)) > 1e-9:
            raise PhaseSolverFailure("phase solver: robots must share one heading")

    positions = {r.id: scenario.initial[r.id].position for r in robots}
    into_hint = 1.0
    if scenario.obstacles:
        _, across = scenario.obstacles[0].frame()
        into_hint = sum(
            (targets[r.id][0] - positions[r.id][0]) * across[0]
            + (targets[r.id][1] - positions[r.id][1]) * across[1] for r in robots)
    phases, final_positions = expansion_phase_chain(
        robots, positions, heading0, scenario.obstacles, params, margin, into_hint)

    for r in robots:
        ex, ey = final_positions[r.id]
        tx, ty = targets[r.id]
        err = math.hypot(ex - tx, ey - ty)
        if err > scenario.solver.tolerance:
            raise PhaseSolverFailure(
                f"phase solver: final circular placement leaves robot {r.id!r} "
                f"{err:.3f} mm from its target"
            )
    return ManeuverPlan(tuple(phases), "expansion")


def plan_contraction(scenario: Scenario, params: ExpansionParams = ExpansionParams()) -> ManeuverPlan:
    """Contraction: the exact time reversal of the expansion maneuver.

    The scenario starts from the expanded formation with targets at the
    compact one; the plan is the expansion plan for the opposite journey
    with every phase inverted and the phase order reversed.
    """
    if not scenario.pattern_targets:
        raise SchemaError("contraction needs pattern_targets (the compact formation)")
    heading_end = scenario.initial[scenario.robots[0].id].heading
    heading0 = wrap_angle(heading_end - params.heading_change(bool(scenario.obstacles)))
    forward = Scenario(
        robots=scenario.robots,
        initial={
            rid: Pose(scenario.pattern_targets[rid][0], scenario.pattern_targets[rid][1], heading0)
            for rid in scenario.pattern_targets
        },
        pattern_targets={r.id: scenario.initial[r.id].position for r in scenario.robots},
        obstacles=scenario.obstacles,
        workspace=scenario.workspace,
        solver=scenario.solver,
    )
    expansion = plan_expansion(forward, params)
    n = len(expansion.phases)
    reversed_phases = []
    for j in range(n - 1, -1, -1):
        phase = expansion.phases[j]
        if j == 0:
            waypoints = {rid: forward.initial[rid].position for rid in forward.initial}
        else:
            waypoints = expansion.phases[j - 1].waypoints
        reversed_phases.append(PlanPhase(phase.mode, phase.schedule.inverted(),
                                         f"undo: {phase.intent}", waypoints))
    return ManeuverPlan(tuple(reversed_phases), "contraction")
