"""Ready-made scenarios mirroring the reference experiments.

Maneuver scenarios are built backwards from their plan geometry, the
same way the hardware runs were staged: pick the channel and the solved
gaps first, then derive initial and final positions that make the plan
land exactly. All builders are deterministic.
"""
from __future__ import annotations

import math
from typing import Tuple

from .kinematics import Pose, RobotSpec, wrap_angle
from .maneuvers import CHANNEL_MARGIN, ExpansionParams, expansion_phase_chain
from .paths import SolverBounds, advance_angle, advance_ratio
from .planner import Channel, Rect, Scenario, plan_pattern

DEFAULT_WORKSPACE = Rect(-60.0, 60.0, -60.0, 60.0)


def make_pair_scenario(spans: Tuple[float, float] = (15.0, 5.0), gap: float = 20.0) -> Scenario:
    """Two centered-magnet robots on a shared line, for distance changes."""
    a = RobotSpec.centered("m1", spans[0])
    b = RobotSpec.centered("m2", spans[1])
    return Scenario(
        robots=[a, b],
        initial={"m1": Pose(0.0, 0.0, 0.0), "m2": Pose(gap, 0.0, 0.0)},
    )


def make_hexagon_scenario(side: float = 20.0, theta_deg: float = 20.0, k: int = 20,
                          heading_deg: float = 90.0, tumbles: int = 2) -> Scenario:
    """Six legged robots forming a regular hexagon, then tumbling away.

    Two robots of each span (3, 7, 9 mm legs on 10 mm bodies) walk from
    solved initial positions onto the hexagon vertices, then the whole
    pattern tumbles ``tumbles`` strides along the post-walk heading.
    """
    spans = (3.0, 3.0, 7.0, 7.0, 9.0, 9.0)
    robots = [RobotSpec.legged(f"m{i + 1}", s) for i, s in enumerate(spans)]
    vertices = [
        (side * math.cos(math.radians(60.0 * i)), side * math.sin(math.radians(60.0 * i)))
        for i in range(6)
    ]
    theta = math.radians(theta_deg)
    heading = math.radians(heading_deg)
    initials = plan_pattern(vertices, spans, theta, k, heading)
    # the straight gait ends tilted half a sweep; tumbles follow that axis
    end_heading = heading + (theta / 2.0 if k % 2 == 1 else -theta / 2.0)
    body = robots[0].body_length
    shift = (tumbles * body * math.cos(end_heading), tumbles * body * math.sin(end_heading))
    return Scenario(
        robots=robots,
        initial={r.id: Pose(x, y, heading) for r, (x, y) in zip(robots, initials)},
        pattern_targets={r.id: v for r, v in zip(robots, vertices)},
        final_targets={
            r.id: (v[0] + shift[0], v[1] + shift[1]) for r, v in zip(robots, vertices)
        },
    )


def make_reverse_scenario(
    span_fast: float = 9.0,
    span_slow: float = 3.0,
    body_length: float = 10.0,
    initial_gap: float = 30.0,
    final_gap: float = 24.0,
    opening: float = 15.0,
    wall_thickness: float = 4.0,
    crossing_offset: float = 12.0,
    staging_tumbles: int = 2,
    exit_tumbles: int = 2,
    stage_clearance: float = 1.0,
    margin: float = CHANNEL_MARGIN,
) -> Scenario:
    """Two-robot reverse scenario consistent with its five-phase plan.

    The wall runs along x at y = 0; both robots face down (heading -90
    degrees) and pass downward through the opening. ``crossing_offset``
    separates the two robots along the crossing so they never collide
    while overtaking; it must exceed the body length.
    """
    if span_fast <= span_slow:
        raise ValueError("span_fast must exceed span_slow")
    d_span = span_fast - span_slow
    usable = margin * opening
    gap_mid = min(usable, initial_gap)
    stride1 = (initial_gap - gap_mid) / d_span
    stride4 = (gap_mid + final_gap) / d_span
    # phase-1 end positions centered on the opening, fast robot behind
    t_fast1, t_slow1 = -gap_mid / 2.0, gap_mid / 2.0
    t_fast0, t_slow0 = t_fast1 - span_fast * stride1, t_slow1 - span_slow * stride1
    t_fast4, t_slow4 = t_fast1 + span_fast * stride4, t_slow1 + span_slow * stride4
    clear = wall_thickness / 2.0 + body_length / 2.0 + stage_clearance
    y_slow0 = clear + staging_tumbles * body_length
    y_fast0 = y_slow0 + crossing_offset
    count3 = math.ceil((y_fast0 + clear) / body_length) - staging_tumbles
    total_down = (staging_tumbles + count3 + exit_tumbles) * body_length
    robots = [
        RobotSpec.legged("fast", span_fast, body_length),
        RobotSpec.legged("slow", span_slow, body_length),
    ]
    heading = -math.pi / 2.0
    return Scenario(
        robots=robots,
        initial={
            "fast": Pose(t_fast0, y_fast0, heading),
            "slow": Pose(t_slow0, y_slow0, heading),
        },
        final_targets={
            "fast": (t_fast4, y_fast0 - total_down),
            "slow": (t_slow4, y_slow0 - total_down),
        },
        obstacles=[Channel(0.0, 0.0, opening, wall_thickness, 120.0, axis="x")],
    )


def make_expansion_scenario(
    spans: Tuple[float, ...] = (3.0, 5.0, 7.0, 9.0),
    params: ExpansionParams = ExpansionParams(),
    opening: float = 14.0,
    wall_thickness: float = 4.0,
    wall_x: float = -10.0,
    lead_in: float = 8.0,
    file_spacing: float = 1.5,
    file_stagger: float = 2.5,
    with_channel: bool = True,
) -> Scenario:
    """Four-robot expansion scenario consistent with its staged plan.

    The wall runs along y at ``wall_x``; the group files up behind it,
    walks through in a line and expands on the far side. Initial
    positions are derived by undoing the approach arc from the staged
    file; targets come from forward-chaining the full recipe.
    """
    robots = [RobotSpec.centered(f"m{i + 1}", s) for i, s in enumerate(spans)]
    channel = Channel(wall_x, 0.0, opening, wall_thickness, 120.0, axis="y") if with_channel else None
    obstacles = [channel] if channel else []
    # transit advances +x with heading -90 deg; the approach arc must end there
    heading_transit = -math.pi / 2.0
    heading0 = wrap_angle(
        heading_transit - params.approach_pairs * (params.approach_theta1 - params.approach_theta2)
    )
    # staging file: larger spans sit nearer the opening center, and the
    # file is staggered along the transit axis in span order (faster
    # robots ahead) so the zero-width segments never cross
    order = sorted(range(len(robots)), key=lambda i: -robots[i].pivot_span)
    offsets = {}
    for rank, idx in enumerate(order):
        magnitude = (rank // 2 + 0.5) * file_spacing
        offsets[robots[idx].id] = magnitude if rank % 2 == 0 else -magnitude
    staging_x = wall_x - wall_thickness / 2.0 - lead_in
    staging = {
        r.id: (staging_x + file_stagger * r.pivot_span, offsets[r.id]) for r in robots
    }
    if not with_channel:
        staging = {
            r.id: (staging_x + file_stagger * r.pivot_span, 12.0 * i)
            for i, r in enumerate(robots)
        }
    from .maneuvers import _arc_schedule, _rotated, _unit_probe_displacement

    w1, _ = _unit_probe_displacement(
        _arc_schedule(params.approach_theta1, params.approach_theta2, params.approach_pairs))
    w1 = _rotated(w1, heading0)
    initials = {
        r.id: (staging[r.id][0] - r.pivot_span * w1[0], staging[r.id][1] - r.pivot_span * w1[1])
        for r in robots
    }
    positions = {rid: p for rid, p in initials.items()}
    _, finals = expansion_phase_chain(robots, positions, heading0, obstacles, params,
                                      into_hint=1.0)
    return Scenario(
        robots=robots,
        initial={rid: Pose(p[0], p[1], heading0) for rid, p in initials.items()},
        pattern_targets=finals,
        obstacles=obstacles,
    )


def make_contraction_scenario(
    spans: Tuple[float, ...] = (3.0, 5.0, 7.0, 9.0),
    params: ExpansionParams = ExpansionParams(),
    **kwargs,
) -> Scenario:
    """Contraction scenario: the expansion scenario run backwards."""
    forward = make_expansion_scenario(spans, params, **kwargs)
    heading_end = wrap_angle(
        forward.initial[forward.robots[0].id].heading
        + params.heading_change(bool(forward.obstacles))
    )
    return Scenario(
        robots=forward.robots,
        initial={
            rid: Pose(pos[0], pos[1], heading_end)
            for rid, pos in forward.pattern_targets.items()
        },
        pattern_targets={rid: pose.position for rid, pose in forward.initial.items()},
        obstacles=forward.obstacles,
        workspace=forward.workspace,
        solver=forward.solver,
    )
