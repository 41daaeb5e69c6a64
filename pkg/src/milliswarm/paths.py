"""Constructors and metrics for the basic motion paths.

Three path families built from pivot half-steps:

* straight: equal sweep magnitudes with a half-magnitude lead step; the
  robot advances along a line 90 degrees to the left of its heading,
  covering a distance proportional to its pivot span.
* triangle: k half-steps out, then k with every sweep negated while the
  pivot alternation continues; the midpoint returns exactly to the base
  line, tracing an isosceles triangle.
* circle: alternating sweeps theta1/theta2 with theta1 != theta2 plus a
  closing sweep; full-step midpoints lie on an exact circle and two
  consecutive rounds return the robot to its start.

The two-robot distance-change solver inverts the triangle base length,
which is linear in pivot span, to hit a requested final gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import (
    ClosingAngleOutOfRange,
    DegenerateSpans,
    EqualSweepAngles,
    Infeasible,
    StepCountNonPositive,
    SweepOutOfRange,
)
from .kinematics import (
    Pivot,
    PivotHalfStep,
    Pose,
    RobotSpec,
    Schedule,
    simulate,
)


def _check_sweep(theta_c: float):
    if not (0.0 < theta_c < math.pi):
        raise SweepOutOfRange(f"sweep angle must be in (0, pi), got {theta_c}")


def _check_count(k: int):
    if k < 1:
        raise StepCountNonPositive(f"step count must be >= 1, got {k}")


# ---------------------------------------------------------------------------
# straight line
# ---------------------------------------------------------------------------

def straight_schedule(theta_c: float, k: int, lead_pivot: Pivot = Pivot.BACK) -> Schedule:
    """Straight-line gait: half-magnitude first sweep, then full sweeps.

    The back pivot always takes positive sweeps and the front pivot
    negative ones, so after the lead step the body oscillates
    symmetrically about its initial heading and every later half-step
    advances exactly 90 degrees to the left of that heading. ``k`` counts
    half-steps including the lead.
    """
    _check_sweep(theta_c)
    _check_count(k)
    steps = []
    for i in range(1, k + 1):
        if lead_pivot is Pivot.BACK:
            pivot = Pivot.BACK if i % 2 == 1 else Pivot.FRONT
        else:
            pivot = Pivot.FRONT if i % 2 == 1 else Pivot.BACK
        sweep = theta_c if pivot is Pivot.BACK else -theta_c
        if i == 1:
            sweep /= 2.0
        steps.append(PivotHalfStep(pivot, sweep))
    return Schedule(tuple(steps), f"straight(theta={theta_c:.6g},k={k})")


def straight_displacement(
    span: float, theta_c: float, k: int, lead_pivot: Pivot = Pivot.BACK
) -> Tuple[float, float]:
    """Exact net displacement of ``straight_schedule`` for heading 0.

    The lead half-step contributes a chord ``span sin(theta_c/4)`` tilted
    a quarter sweep off the advance axis; the remaining k - 1 half-steps
    each contribute ``span sin(theta_c/2)`` straight along it. The
    magnitude is ``span * g(theta_c, k)`` with g independent of span and
    strictly increasing in both arguments.
    """
    _check_sweep(theta_c)
    if k == 0:
        return (0.0, 0.0)
    _check_count(k)
    tilt = theta_c / 4.0 if lead_pivot is Pivot.BACK else -theta_c / 4.0
    lead = math.sin(theta_c / 4.0)
    ax = math.pi / 2.0
    dx = lead * math.cos(ax + tilt)
    dy = lead * math.sin(ax + tilt)
    dy += (k - 1) * math.sin(theta_c / 2.0)
    return (span * dx, span * dy)


def advance_ratio(theta_c: float, k: int) -> float:
    """g(theta_c, k): straight-gait displacement per unit pivot span."""
    dx, dy = straight_displacement(1.0, theta_c, k)
    return math.hypot(dx, dy)


def advance_angle(theta_c: float, k: int, lead_pivot: Pivot = Pivot.BACK) -> float:
    """Direction of the straight-gait displacement relative to the heading."""
    dx, dy = straight_displacement(1.0, theta_c, k, lead_pivot)
    return math.atan2(dy, dx)


def balanced_straight_schedule(theta_c: float, interior: int, mirror: bool = False) -> Schedule:
    """Heading-neutral straight gait used by maneuver phases.

    A half-magnitude lead, ``interior`` full sweeps (must be odd) and a
    half-magnitude closing sweep. The heading returns exactly to its
    initial value and the net displacement is exactly
    ``(interior + 1) * span * sin(theta_c / 2)`` at 90 degrees to the
    left of the heading (to the right when ``mirror`` is set).
    """
    _check_sweep(theta_c)
    if interior < 1 or interior % 2 == 0:
        raise StepCountNonPositive(f"interior step count must be odd and >= 1, got {interior}")
    sgn = -1.0 if mirror else 1.0
    steps = [PivotHalfStep(Pivot.BACK if not mirror else Pivot.FRONT, sgn * theta_c / 2.0)]
    for i in range(interior):
        if i % 2 == 0:
            steps.append(PivotHalfStep(Pivot.FRONT if not mirror else Pivot.BACK, -sgn * theta_c))
        else:
            steps.append(PivotHalfStep(Pivot.BACK if not mirror else Pivot.FRONT, sgn * theta_c))
    steps.append(PivotHalfStep(Pivot.BACK if not mirror else Pivot.FRONT, sgn * theta_c / 2.0))
    return Schedule(tuple(steps), f"balanced(theta={theta_c:.6g},n={interior},mirror={mirror})")


def balanced_advance(span: float, theta_c: float, interior: int) -> float:
    """Net displacement magnitude of ``balanced_straight_schedule``."""
    return (interior + 1) * span * math.sin(theta_c / 2.0)


# ---------------------------------------------------------------------------
# triangle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TriangleMetrics:
    """Exact geometry of the triangular path for one robot."""

    base: float
    height: float
    base_angle: float
    half_steps_per_leg: int


def triangle_schedule(theta_c: float, k: int) -> Schedule:
    """Triangular path: k half-steps out, k back with sweeps negated.

    The second leg flips every sweep sign while the pivot alternation
    keeps running, which mirrors the first leg about the apex vertical
    and brings the midpoint back onto the base line exactly (to floating
    point). ``k`` counts half-steps per leg; the total is 2k.
    """
    _check_sweep(theta_c)
    _check_count(k)
    steps = []
    for i in range(1, 2 * k + 1):
        pivot = Pivot.BACK if i % 2 == 1 else Pivot.FRONT
        sweep = theta_c if pivot is Pivot.BACK else -theta_c
        if i > k:
            sweep = -sweep
        steps.append(PivotHalfStep(pivot, sweep))
    return Schedule(tuple(steps), f"triangle(theta={theta_c:.6g},k={k})")


def triangle_base_offset(theta_c: float, k: int) -> float:
    """Angle from a robot's heading to its triangle base line.

    The base direction depends on leg parity: ``heading + theta_c`` for
    odd k (net progress along +base), ``heading`` for even k (net
    progress along -base).
    """
    return theta_c if k % 2 == 1 else 0.0


def triangle_net_advance(theta_c: float, k: int) -> float:
    """Signed base-line progress per unit span (positive along the base)."""
    d = 2.0 * k * math.sin(theta_c / 2.0) ** 2
    return d if k % 2 == 1 else -d


def triangle_metrics(span: float, theta_c: float, k: int) -> TriangleMetrics:
    """Exact base, height and base angle of the triangular path.

    Each leg is k chords of ``span sin(theta_c/2)`` at the base angle
    ``(pi - theta_c)/2``, so ``base = 2 k span sin^2(theta_c/2)`` and
    ``height = (base/2) cot(theta_c/2)`` hold exactly.
    """
    _check_sweep(theta_c)
    _check_count(k)
    base = 2.0 * k * span * math.sin(theta_c / 2.0) ** 2
    height = k * (span / 2.0) * math.sin(theta_c)
    return TriangleMetrics(base, height, (math.pi - theta_c) / 2.0, k)


# ---------------------------------------------------------------------------
# circle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleMetrics:
    """Fitted geometry of the circular path for one robot."""

    radius: float
    center: Tuple[float, float]
    fit_residual: float
    body_angles: tuple  # beta_i for i = 1 .. 2k-1
    cumulative_angle: float  # theta_d after step 2k-1
    closing_sweep: float


def circle_body_angles(theta1: float, theta2: float, i: int) -> Tuple[float, float]:
    """(theta_d, beta_i) after half-step i of the alternating gait.

    ``theta_d = floor((i+1)/2) theta1 - floor(i/2) theta2`` is the long
    axis angle relative to the start; beta folds it to the angle between
    the (undirected) axis and the x direction.
    """
    if i < 1:
        raise StepCountNonPositive(f"step index must be >= 1, got {i}")
    theta_d = ((i + 1) // 2) * theta1 - (i // 2) * theta2
    beta = theta_d if theta_d <= math.pi / 2.0 else math.pi - theta_d
    return theta_d, beta


def closing_sweep(theta1: float, theta2: float, k: int) -> float:
    """Extra sweep that completes the round: pi - (k theta1 - (k-1) theta2)."""
    return math.pi - (k * theta1 - (k - 1) * theta2)


def circle_schedule(theta1: float, theta2: float, k: int) -> Schedule:
    """Circular path: 2k-1 alternating half-steps plus the closing sweep.

    Emits k half-steps at +theta1 on the back pivot interleaved with
    k - 1 at -theta2 on the front pivot, then one closing half-step of
    ``closing_sweep`` on the front pivot. After the closing step the
    heading has advanced exactly pi, so the body lies parallel to its
    initial line and repeating the schedule returns the robot to its
    starting point, closing the circle.
    """
    _check_sweep(theta1)
    _check_sweep(theta2)
    _check_count(k)
    if theta1 == theta2:
        raise EqualSweepAngles("circle requires theta1 != theta2")
    theta_e = closing_sweep(theta1, theta2, k)
    if not (0.0 < theta_e < math.pi):
        raise ClosingAngleOutOfRange(
            f"closing sweep {theta_e} outside (0, pi); reduce k or the sweep angles"
        )
    steps = []
    for i in range(1, 2 * k):
        if i % 2 == 1:
            steps.append(PivotHalfStep(Pivot.BACK, theta1))
        else:
            steps.append(PivotHalfStep(Pivot.FRONT, -theta2))
    steps.append(PivotHalfStep(Pivot.FRONT, theta_e))
    return Schedule(tuple(steps), f"circle(t1={theta1:.6g},t2={theta2:.6g},k={k})")


def fit_circle(points: np.ndarray) -> Tuple[Tuple[float, float], float, float]:
    """Least-squares circle through 2-D points (center, radius, max residual)."""
    pts = np.asarray(points, dtype=float)
    a = np.column_stack([2.0 * pts[:, 0], 2.0 * pts[:, 1], np.ones(len(pts))])
    b = (pts**2).sum(axis=1)
    (cx, cy, c), *_ = np.linalg.lstsq(a, b, rcond=None)
    r = math.sqrt(c + cx * cx + cy * cy)
    residual = float(np.abs(np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) - r).max())
    return (float(cx), float(cy)), float(r), residual


def circle_metrics(span: float, theta1: float, theta2: float, k: int) -> CircleMetrics:
    """Radius and body angles of the circular path, from simulation.

    There is no closed form for the radius; it is recovered by a
    least-squares circle fit on the full-step midpoints (the midpoints
    after odd half-steps lie on a second concentric circle, so only the
    even ones enter the fit). Requires k >= 3 fit points.
    """
    if k < 3:
        raise StepCountNonPositive(f"circle fit needs k >= 3 full steps, got {k}")
    schedule = circle_schedule(theta1, theta2, k)
    robot = RobotSpec.legged("probe", span, body_length=max(span, 10.0))
    traj = simulate([robot], {"probe": Pose(0.0, 0.0, 0.0)}, schedule)[0]
    pts = np.array([[p.x, p.y] for p in traj.poses[0 : 2 * k - 1 : 2]])
    center, radius, residual = fit_circle(pts)
    betas = tuple(circle_body_angles(theta1, theta2, i)[1] for i in range(1, 2 * k))
    theta_d = k * theta1 - (k - 1) * theta2
    return CircleMetrics(radius, center, residual, betas, theta_d, closing_sweep(theta1, theta2, k))


def circle_round_displacement(span: float, theta1: float, theta2: float, k: int):
    """Net displacement of one closed round; the next round cancels it."""
    schedule = circle_schedule(theta1, theta2, k)
    robot = RobotSpec.legged("probe", span, body_length=max(span, 10.0))
    end = simulate([robot], {"probe": Pose(0.0, 0.0, 0.0)}, schedule)[0].final
    return (end.x, end.y)


# ---------------------------------------------------------------------------
# two-robot distance change
# ---------------------------------------------------------------------------

class Order(Enum):
    PRESERVE = "preserve"
    SWAP = "swap"


class DistanceGait(Enum):
    TRIANGLE = "triangle"
    STRAIGHT = "straight"


@dataclass(frozen=True)
class DistanceChangeRequest:
    """Change the gap between two robots sharing one broadcast schedule."""

    span_a: float
    span_b: float
    initial_gap: float
    desired_gap: float
    order: Order = Order.PRESERVE

    def __post_init__(self):
        if self.span_a == self.span_b:
            raise DegenerateSpans("equal spans cannot change their gap under broadcast input")
        if self.initial_gap <= 0:
            raise SweepOutOfRange(f"initial gap must be > 0, got {self.initial_gap}")
        if self.desired_gap < 0:
            raise SweepOutOfRange(f"desired gap must be >= 0, got {self.desired_gap}")


@dataclass(frozen=True)
class SolverBounds:
    theta_max: float = math.pi / 2.0
    k_max: int = 200
    tolerance: float = 0.1  # mm


@dataclass(frozen=True)
class DistanceChangeSolution:
    """Solved (theta_c, k) plus the layout needed to execute it.

    ``heading_offset`` is added to the gap-line direction to obtain each
    robot's initial heading. ``toward_partner`` is +1 when the faster
    robot must walk toward the slower one (gap shrinking or order swap)
    and -1 when it walks away; flipping the headings by pi realizes the
    -1 case, which the offset already includes.
    """

    theta_c: float
    k: int
    gait: DistanceGait
    gap_change: float
    heading_offset: float
    toward_partner: int

    def schedule(self) -> Schedule:
        if self.k == 0:
            return Schedule((), "no-op")
        if self.gait is DistanceGait.TRIANGLE:
            return triangle_schedule(self.theta_c, self.k)
        return balanced_straight_schedule(self.theta_c, self.k)


def _triangle_gap_change(d_span: float, theta_c: float, k: int) -> float:
    return 2.0 * k * d_span * math.sin(theta_c / 2.0) ** 2


def _bisect_increasing(fn, target, lo, hi, iters=200):
    # fn must be increasing on [lo, hi] with fn(lo) <= target <= fn(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_distance_change(
    request: DistanceChangeRequest,
    bounds: SolverBounds = SolverBounds(),
    gait: DistanceGait = DistanceGait.TRIANGLE,
) -> DistanceChangeSolution:
    """Find (theta_c, k) so the shared schedule sets the requested gap.

    The gap between two robots walking the same gait on their common
    line changes by ``|span_a - span_b| * f(theta_c, k)`` with f the
    per-unit-span base progress of the gait, monotone in both arguments.
    Deterministic tie-break: the smallest k admitting theta_c <= theta_max,
    then the unique theta_c by bisection. With the triangle gait the
    robots return exactly to their shared line; the straight gait keeps
    their headings fixed (used inside maneuvers that tumble afterwards).
    """
    d_span = abs(request.span_a - request.span_b)
    if request.order is Order.SWAP:
        needed = request.initial_gap + request.desired_gap
        toward = 1
    elif request.desired_gap <= request.initial_gap:
        needed = request.initial_gap - request.desired_gap
        toward = 1
    else:
        needed = request.desired_gap - request.initial_gap
        toward = -1

    if needed == 0.0:
        return DistanceChangeSolution(0.0, 0, gait, 0.0, 0.0, toward)

    if gait is DistanceGait.TRIANGLE:
        def change(theta, k):
            return _triangle_gap_change(d_span, theta, k)

        ks = range(1, bounds.k_max + 1)
    else:
        def change(theta, k):
            return d_span * (k + 1) * math.sin(theta / 2.0)

        ks = range(1, bounds.k_max + 1, 2)  # interior count must be odd

    for k in ks:
        if change(bounds.theta_max, k) >= needed:
            theta = _bisect_increasing(lambda t: change(t, k), needed, 1e-12, bounds.theta_max)
            if gait is DistanceGait.TRIANGLE:
                # heading = base - base_offset; net progress runs against
                # the base for even k, folded into the offset with the
                # chase direction
                offset = -triangle_base_offset(theta, k)
                sense = 1.0 if k % 2 == 1 else -1.0
            else:
                sense = 1.0  # balanced gait advances 90 deg left of heading
                offset = -math.pi / 2.0
            if sense * toward < 0:
                offset += math.pi
            return DistanceChangeSolution(theta, k, gait, needed, offset, toward)
    raise Infeasible(
        f"gap change {needed:.3f} mm requires more than k_max={bounds.k_max} half-steps "
        f"at theta_max={math.degrees(bounds.theta_max):.1f} deg"
    )


def apply_distance_change(
    request: DistanceChangeRequest,
    solution: DistanceChangeSolution,
    line_angle: float = 0.0,
    origin: Tuple[float, float] = (0.0, 0.0),
):
    """Simulate a solved distance change from a canonical layout.

    The faster robot is placed at ``origin`` and the slower one
    ``initial_gap`` ahead along ``line_angle``; both receive the heading
    baked into the solution. Returns (trajectories, signed_final_gap)
    where the sign is positive when the original order survived.
    """
    fast, slow = (request.span_a, request.span_b)
    if fast < slow:
        fast, slow = slow, fast
    heading = line_angle + solution.heading_offset
    ux, uy = math.cos(line_angle), math.sin(line_angle)
    robots = [
        RobotSpec.legged("fast", fast, body_length=max(fast, slow, 10.0)),
        RobotSpec.legged("slow", slow, body_length=max(fast, slow, 10.0)),
    ]
    initial = {
        "fast": Pose(origin[0], origin[1], heading),
        "slow": Pose(origin[0] + request.initial_gap * ux, origin[1] + request.initial_gap * uy, heading),
    }
    trajectories = simulate(robots, initial, solution.schedule())
    ends = {t.robot_id: t.final for t in trajectories}
    rel = (ends["slow"].x - ends["fast"].x) * ux + (ends["slow"].y - ends["fast"].y) * uy
    return trajectories, rel
