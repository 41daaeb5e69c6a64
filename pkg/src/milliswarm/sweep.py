"""Parametric sweeps of the two-robot distance change.

Reproduces the reference parameter study: two robots 20 mm and 10 mm,
initial gap 20 mm, walking triangular out-and-back paths. The reported
value is the final gap with the sign convention that negative means the
original order survived and positive means the robots traded places.
"""
from __future__ import annotations

import io as _io
import math
from dataclasses import dataclass
from typing import List, Tuple

from .kinematics import PivotHalfStep, Pivot, Pose, RobotSpec, Schedule, simulate
from .paths import triangle_base_offset


@dataclass(frozen=True)
class SweepConfig:
    span_a: float = 20.0
    span_b: float = 10.0
    initial_gap: float = 20.0
    theta_deg: float = 24.0  # fixed sweep for the step sweep
    k_max: int = 60  # steps per leg for the step sweep
    total_steps: int = 33  # total half-steps for the angle sweep
    turn_at: int = 12  # leg change for the angle sweep
    theta_min_deg: float = 1.0
    theta_max_deg: float = 90.0
    theta_step_deg: float = 1.0


@dataclass(frozen=True)
class SweepRow:
    theta_deg: float
    k_out: int
    k_back: int
    gap_mm: float  # signed: negative = order preserved
    order: str


def _two_leg_schedule(theta: float, k_out: int, k_back: int) -> Schedule:
    steps = []
    for i in range(1, k_out + k_back + 1):
        pivot = Pivot.BACK if i % 2 == 1 else Pivot.FRONT
        sweep = theta if pivot is Pivot.BACK else -theta
        if i > k_out:
            sweep = -sweep
        steps.append(PivotHalfStep(pivot, sweep))
    return Schedule(tuple(steps))


def _signed_gap(cfg: SweepConfig, theta: float, k_out: int, k_back: int) -> float:
    """Euclidean final gap, negative when the original order is preserved."""
    fast = RobotSpec.centered("fast", max(cfg.span_a, cfg.span_b))
    slow = RobotSpec.centered("slow", min(cfg.span_a, cfg.span_b))
    # base line along x; the faster robot chases the slower one
    offset = triangle_base_offset(theta, k_out)
    heading = -offset if k_out % 2 == 1 else math.pi
    initial = {
        "fast": Pose(0.0, 0.0, heading),
        "slow": Pose(cfg.initial_gap, 0.0, heading),
    }
    ends = {
        t.robot_id: t.final
        for t in simulate([fast, slow], initial, _two_leg_schedule(theta, k_out, k_back))
    }
    gap = math.hypot(ends["slow"].x - ends["fast"].x, ends["slow"].y - ends["fast"].y)
    preserved = ends["slow"].x - ends["fast"].x > 0
    return -gap if preserved else gap


def sweep_steps(cfg: SweepConfig = SweepConfig()) -> List[SweepRow]:
    """Final gap against the number of steps at a fixed sweep angle."""
    theta = math.radians(cfg.theta_deg)
    rows = []
    for k in range(1, cfg.k_max + 1):
        gap = _signed_gap(cfg, theta, k, k)
        rows.append(SweepRow(cfg.theta_deg, k, k, gap, "swapped" if gap > 0 else "preserved"))
    return rows


def sweep_angle(cfg: SweepConfig = SweepConfig()) -> List[SweepRow]:
    """Final gap against the sweep angle at a fixed total step count.

    The out leg runs ``turn_at`` half-steps, the back leg the remaining
    ``total_steps - turn_at``.
    """
    rows = []
    k_out = cfg.turn_at
    k_back = cfg.total_steps - cfg.turn_at
    deg = cfg.theta_min_deg
    while deg <= cfg.theta_max_deg + 1e-9:
        gap = _signed_gap(cfg, math.radians(deg), k_out, k_back)
        rows.append(SweepRow(deg, k_out, k_back, gap, "swapped" if gap > 0 else "preserved"))
        deg += cfg.theta_step_deg
    return rows


def sweep_grid(cfg: SweepConfig = SweepConfig(),
               theta_values: Tuple[float, ...] = (),
               k_values: Tuple[int, ...] = ()) -> List[SweepRow]:
    """Final gap over a (theta, k) grid of symmetric triangles."""
    thetas = theta_values or tuple(
        cfg.theta_min_deg + i * cfg.theta_step_deg
        for i in range(int((cfg.theta_max_deg - cfg.theta_min_deg) / cfg.theta_step_deg) + 1)
    )
    ks = k_values or tuple(range(1, cfg.k_max + 1))
    rows = []
    for deg in thetas:
        for k in ks:
            gap = _signed_gap(cfg, math.radians(deg), k, k)
            rows.append(SweepRow(deg, k, k, gap, "swapped" if gap > 0 else "preserved"))
    return rows


def format_sweep_csv(rows: List[SweepRow]) -> str:
    out = _io.StringIO()
    out.write("theta_deg,k_out,k_back,gap_mm,order\n")
    for row in rows:
        out.write(
            f"{row.theta_deg:.9g},{row.k_out},{row.k_back},{row.gap_mm:.9g},{row.order}\n"
        )
    return out.getvalue()
