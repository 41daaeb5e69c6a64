"""Rigid-body step kinematics for pivot walking and tumbling.

Units are millimeters and radians throughout; degrees exist only at file
and CLI boundaries. All functions are pure and deterministic.

Convention (locked by the closed-form/iterative equivalence test in the
suite): the front pivot of a robot at pose ``(x, y, phi)`` sits at
``center + (P/2)(cos phi, sin phi)`` and the back pivot at the opposite
end. In the canonical forward gait the back pivot takes positive sweeps
and the front pivot negative ones; a robot walking this gait advances
roughly perpendicular to its long axis, 90 degrees to the left of its
heading. A tumble moves the center one body length along the heading and
leaves the planar heading unchanged.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

from .errors import (
    LengthNonPositive,
    MilliswarmError,
    MissingInitialPose,
    NegativeStepCount,
    NonFiniteInput,
    SpanNonPositive,
    SweepOutOfRange,
)

TWO_PI = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.remainder(angle, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


def _require_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteInput(f"{name} contains non-finite value {v!r}")


class Variant(Enum):
    CENTERED_MAGNET = "centered_magnet"
    LEGGED = "legged"


class Pivot(Enum):
    FRONT = "front"
    BACK = "back"


class TumbleDirection(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class RobotSpec:
    """Physical description of one millirobot.

    ``body_length`` sets the tumbling stride, ``pivot_span`` the distance
    between the two pivot points and hence the pivot-walking stride. The
    centered-magnet design pivots on its body ends, so there the span
    equals the length; the legged design has a fixed body with legs at an
    arbitrary (smaller or equal) separation.
    """

    id: str
    body_length: float
    pivot_span: float
    variant: Variant = Variant.LEGGED

    def __post_init__(self):
        _require_finite("RobotSpec", self.body_length, self.pivot_span)
        if self.body_length <= 0:
            raise LengthNonPositive(f"robot {self.id!r}: body_length must be > 0")
        if self.pivot_span <= 0:
            raise SpanNonPositive(f"robot {self.id!r}: pivot_span must be > 0")
        if self.pivot_span > self.body_length + 1e-12:
            raise SpanNonPositive(
                f"robot {self.id!r}: pivot_span {self.pivot_span} exceeds body_length "
                f"{self.body_length}"
            )
        if self.variant is Variant.CENTERED_MAGNET and self.pivot_span != self.body_length:
            raise SpanNonPositive(
                f"robot {self.id!r}: centered-magnet design pivots on its ends, "
                f"so pivot_span must equal body_length"
            )

    @classmethod
    def centered(cls, id: str, length: float) -> "RobotSpec":
        return cls(id, length, length, Variant.CENTERED_MAGNET)

    @classmethod
    def legged(cls, id: str, pivot_span: float, body_length: float = 10.0) -> "RobotSpec":
        return cls(id, body_length, pivot_span, Variant.LEGGED)


@dataclass(frozen=True)
class Pose:
    """Planar pose: midpoint position plus heading of the long axis.

    The heading is normalized to (-pi, pi] on construction.
    """

    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        _require_finite("Pose", self.x, self.y, self.heading)
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def position(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class PivotHalfStep:
    pivot: Pivot
    sweep: float  # signed radians, |sweep| < pi

    def __post_init__(self):
        _require_finite("PivotHalfStep", self.sweep)
        if not abs(self.sweep) < math.pi:
            raise SweepOutOfRange(f"|sweep| must be < pi, got {self.sweep}")


@dataclass(frozen=True)
class TumbleStep:
    # A tumble is a full 180-degree end-over-end flip; it has no angle.
    direction: TumbleDirection = TumbleDirection.FORWARD


StepCommand = Union[PivotHalfStep, TumbleStep]


@dataclass(frozen=True)
class Schedule:
    """A broadcast actuation sequence, applied identically to every robot.

    Per-robot outcomes differ only through the robot geometry: pivot
    half-steps scale with the pivot span, tumbles with the body length.
    """

    steps: tuple = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __add__(self, other: "Schedule") -> "Schedule":
        label = self.label if not other.label else f"{self.label}+{other.label}"
        return Schedule(self.steps + tuple(other.steps), label)

    def inverted(self) -> "Schedule":
        """Time-reversed schedule: undoing each step in reverse order.

        The inverse of a pivot half-step is the opposite sweep about the
        same pivot; the inverse of a tumble is a tumble the other way.
        """
        inv = []
        for s in reversed(self.steps):
            if isinstance(s, PivotHalfStep):
                inv.append(PivotHalfStep(s.pivot, -s.sweep))
            else:
                d = (
                    TumbleDirection.BACKWARD
                    if s.direction is TumbleDirection.FORWARD
                    else TumbleDirection.FORWARD
                )
                inv.append(TumbleStep(d))
        return Schedule(tuple(inv), f"inv({self.label})" if self.label else "")

    def signed_sweep_sum(self) -> float:
        return sum(s.sweep for s in self.steps if isinstance(s, PivotHalfStep))


@dataclass
class Trajectory:
    """Pose history of one robot under a schedule.

    ``poses[0]`` is the initial pose; ``modes[i]`` tags the step that
    produced ``poses[i + 1]`` as ``"pivot"`` or ``"tumble"``.
    """

    robot_id: str
    poses: list = field(default_factory=list)
    modes: list = field(default_factory=list)

    @property
    def final(self) -> Pose:
        return self.poses[-1]


@dataclass(frozen=True)
class SlipModel:
    """Optional pivot-point slip: multiplicative noise on each sweep.

    Disabled unless constructed explicitly; the draw order is fixed
    (steps outer, robots inner) so results are reproducible per seed.
    """

    scale: float = 0.0
    seed: int = 0


def pivot_half_step(pose: Pose, pivot: Pivot, sweep: float, span: float) -> Pose:
    """Rotate the robot rigidly about one pivot point by ``sweep``.

    The pivot point is ``center +/- (span/2) u(heading)`` (front = +,
    back = -). Exact rigid-body rotation: the returned center is the old
    center rotated about the pivot, the returned heading is the old
    heading plus the sweep.
    """
    _require_finite("pivot_half_step", pose.x, pose.y, pose.heading, sweep, span)
    if span <= 0:
        raise SpanNonPositive(f"pivot span must be > 0, got {span}")
    if not abs(sweep) < math.pi:
        raise SweepOutOfRange(f"|sweep| must be < pi, got {sweep}")
    sign = 1.0 if pivot is Pivot.FRONT else -1.0
    qx = pose.x + sign * (span / 2.0) * math.cos(pose.heading)
    qy = pose.y + sign * (span / 2.0) * math.sin(pose.heading)
    rx, ry = pose.x - qx, pose.y - qy
    c, s = math.cos(sweep), math.sin(sweep)
    return Pose(qx + c * rx - s * ry, qy + s * rx + c * ry, pose.heading + sweep)


def tumble_step(pose: Pose, direction: TumbleDirection, body_length: float) -> Pose:
    """Advance one body length along the axis; heading is unchanged.

    The 180-degree flip happens out of plane, so its only planar effect
    is the translation.
    """
    _require_finite("tumble_step", pose.x, pose.y, pose.heading, body_length)
    if body_length <= 0:
        raise LengthNonPositive(f"body length must be > 0, got {body_length}")
    sign = 1.0 if direction is TumbleDirection.FORWARD else -1.0
    return Pose(
        pose.x + sign * body_length * math.cos(pose.heading),
        pose.y + sign * body_length * math.sin(pose.heading),
        pose.heading,
    )


def apply_step(pose: Pose, step: StepCommand, robot: RobotSpec) -> Pose:
    if isinstance(step, PivotHalfStep):
        return pivot_half_step(pose, step.pivot, step.sweep, robot.pivot_span)
    return tumble_step(pose, step.direction, robot.body_length)


def simulate(
    robots: Sequence[RobotSpec],
    initial: Mapping[str, Pose],
    schedule: Schedule,
    slip: Optional[SlipModel] = None,
) -> list:
    """Apply a broadcast schedule to every robot and record trajectories.

    Deterministic: identical inputs give bit-identical outputs. An empty
    schedule yields trajectories holding only the initial poses. With a
    ``SlipModel`` each pivot sweep is scaled by ``1 + scale * xi`` with
    ``xi`` drawn from a seeded standard normal, independently per robot
    and step.
    """
    for r in robots:
        if r.id not in initial:
            raise MissingInitialPose(f"no initial pose for robot {r.id!r}")
    rng = random.Random(slip.seed) if slip is not None and slip.scale != 0.0 else None
    trajectories = [Trajectory(r.id, [initial[r.id]]) for r in robots]
    for index, step in enumerate(schedule):
        noisy = step
        for r, traj in zip(robots, trajectories):
            if rng is not None and isinstance(step, PivotHalfStep):
                noisy = PivotHalfStep(step.pivot, step.sweep * (1.0 + slip.scale * rng.gauss(0.0, 1.0)))
            try:
                traj.poses.append(apply_step(traj.poses[-1], noisy, r))
            except MilliswarmError as exc:
                raise type(exc)(f"step {index}, robot {r.id!r}: {exc}") from exc
            traj.modes.append("pivot" if isinstance(step, PivotHalfStep) else "tumble")
    return trajectories


def canonical_pivot_schedule(theta1: float, theta2: float, k: int, label: str = "") -> Schedule:
    """The alternating gait the closed-form position integrates.

    Half-step i is a +theta1 sweep about the back pivot for odd i and a
    -theta2 sweep about the front pivot for even i.
    """
    if k < 0:
        raise NegativeStepCount(f"step count must be >= 0, got {k}")
    steps = []
    for i in range(1, k + 1):
        if i % 2 == 1:
            steps.append(PivotHalfStep(Pivot.BACK, theta1))
        else:
            steps.append(PivotHalfStep(Pivot.FRONT, -theta2))
    return Schedule(tuple(steps), label or f"canonical({k})")


def closed_form_position(
    span: float, theta1: float, theta2: float, k: int, initial: Pose = Pose(0.0, 0.0, 0.0)
):
    """Closed-form midpoint position after k half-steps of the canonical gait.

    Evaluates the double sum with floor functions directly: with
    ``td(i) = floor((i+1)/2) theta1 - floor(i/2) theta2`` the body angle
    after half-step i (relative to the initial heading), the midpoint
    displacement is

        (span/2) * sum_{i=1..k} (-1)^(i-1) [u(td(i)) - u(td(i-1))]

    rotated by the initial heading, where u is the planar unit vector.
    For robots that pivot on their legs the pivot span is substituted for
    the body length. k = 0 returns the initial position.
    """
    _require_finite("closed_form_position", span, theta1, theta2)
    if span <= 0:
        raise SpanNonPositive(f"span must be > 0, got {span}")
    if k < 0:
        raise NegativeStepCount(f"step count must be >= 0, got {k}")
    dx = dy = 0.0
    for i in range(1, k + 1):
        td_prev = ((i) // 2) * theta1 - ((i - 1) // 2) * theta2
        td_here = ((i + 1) // 2) * theta1 - (i // 2) * theta2
        s = 1.0 if i % 2 == 1 else -1.0
        dx += s * (math.cos(td_here) - math.cos(td_prev))
        dy += s * (math.sin(td_here) - math.sin(td_prev))
    dx *= span / 2.0
    dy *= span / 2.0
    c, s = math.cos(initial.heading), math.sin(initial.heading)
    return (initial.x + c * dx - s * dy, initial.y + s * dx + c * dy)
