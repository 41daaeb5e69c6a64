"""Kinematic simulator and inverse planner for broadcast-actuated
pivot-walking millirobot swarms.

One magnetic field drives every robot identically; per-robot geometry
(pivot span, body length) is the only differentiator. This package
provides the exact step kinematics, the basic motion paths built from
them, the controllability analysis of the resulting linear swarm model,
leader-follower inverse planning, staged maneuvers, and deterministic
file and SVG output.
"""

__version__ = "0.1.0"

from .controllability import (
    SwarmSystem,
    UnicycleParams,
    build_input_matrix,
    controllability_matrix,
    controllable_dof,
    drift_matrix,
    numeric_rank,
)
from .errors import MilliswarmError, PlanningError, ValidationError
from .kinematics import (
    Pivot,
    PivotHalfStep,
    Pose,
    RobotSpec,
    Schedule,
    SlipModel,
    Trajectory,
    TumbleDirection,
    TumbleStep,
    Variant,
    canonical_pivot_schedule,
    closed_form_position,
    pivot_half_step,
    simulate,
    tumble_step,
    wrap_angle,
)
from .maneuvers import (
    ExpansionParams,
    plan_contraction,
    plan_expansion,
    plan_reverse,
)
from .paths import (
    CircleMetrics,
    DistanceChangeRequest,
    DistanceChangeSolution,
    DistanceGait,
    Order,
    SolverBounds,
    TriangleMetrics,
    advance_angle,
    advance_ratio,
    apply_distance_change,
    balanced_straight_schedule,
    circle_body_angles,
    circle_metrics,
    circle_schedule,
    closing_sweep,
    fit_circle,
    solve_distance_change,
    straight_displacement,
    straight_schedule,
    triangle_metrics,
    triangle_schedule,
)
from .planner import (
    Channel,
    LineSolution,
    ManeuverPlan,
    PhaseMode,
    PlanPhase,
    Rect,
    Scenario,
    SolutionSet,
    execute_swarm_plan,
    plan_pattern,
    plan_swarm,
    plan_tumble_translate,
    simulate_plan,
    solve_follower_lengths,
    solve_leader_line,
)
from .presets import (
    make_contraction_scenario,
    make_expansion_scenario,
    make_hexagon_scenario,
    make_pair_scenario,
    make_reverse_scenario,
)
from .validation import ValidationReport, validate_plan
