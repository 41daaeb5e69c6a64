"""Deterministic SVG rendering of trajectories and scenario geometry.

One polyline per robot midpoint path, a square marker at the initial
position and a circle at the final one, walls drawn as rectangles.
Element order and ids follow the robot order, all numbers are fixed to
three decimals, so identical inputs give byte-identical documents.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import IoError
from .kinematics import Trajectory
from .planner import Rect, Scenario

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


@dataclass(frozen=True)
class SvgOptions:
    scale: float = 4.0  # pixels per mm
    padding: float = 6.0  # mm
    marker_size: float = 2.0  # mm
    wall_fill: str = "#708090"
    background: str = "#ffffff"


def _f(value: float) -> str:
    text = f"{value:.3f}"
    return "0.000" if text == "-0.000" else text


def render_svg(trajectories: Sequence[Trajectory], scenario: Optional[Scenario] = None,
               options: SvgOptions = SvgOptions()) -> str:
    """Render midpoint paths over the scenario geometry as SVG 1.1 text."""
    if not trajectories:
        raise IoError("no trajectories to render")
    if scenario is not None:
        bounds = scenario.workspace
    else:
        xs = [p.x for t in trajectories for p in t.poses]
        ys = [p.y for t in trajectories for p in t.poses]
        bounds = Rect(min(xs), max(xs), min(ys), max(ys))
    pad = options.padding
    width = (bounds.x_max - bounds.x_min + 2 * pad) * options.scale
    height = (bounds.y_max - bounds.y_min + 2 * pad) * options.scale

    def px(x: float) -> str:
        return _f((x - bounds.x_min + pad) * options.scale)

    def py(y: float) -> str:
        # SVG y grows downward; flip so +y points up like the bench camera
        return _f((bounds.y_max - y + pad) * options.scale)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect id="background" x="0" y="0" width="{_f(width)}" height="{_f(height)}" '
        f'fill="{options.background}"/>',
    ]
    if scenario is not None:
        for ci, channel in enumerate(scenario.obstacles):
            for wi, wall in enumerate(channel.wall_rects()):
                parts.append(
                    f'<rect id="wall-{ci}-{wi}" x="{px(wall.x_min)}" y="{py(wall.y_max)}" '
                    f'width="{_f((wall.x_max - wall.x_min) * options.scale)}" '
                    f'height="{_f((wall.y_max - wall.y_min) * options.scale)}" '
                    f'fill="{options.wall_fill}"/>'
                )
    m = options.marker_size * options.scale
    for i, t in enumerate(trajectories):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{px(p.x)},{py(p.y)}" for p in t.poses)
        parts.append(
            f'<polyline id="path-{t.robot_id}" points="{points}" fill="none" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        first, last = t.poses[0], t.poses[-1]
        parts.append(
            f'<rect id="start-{t.robot_id}" '
            f'x="{_f(float(px(first.x)) - m / 2)}" y="{_f(float(py(first.y)) - m / 2)}" '
            f'width="{_f(m)}" height="{_f(m)}" fill="{color}"/>'
        )
        parts.append(
            f'<circle id="end-{t.robot_id}" cx="{px(last.x)}" cy="{py(last.y)}" '
            f'r="{_f(m / 2)}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(trajectories: Sequence[Trajectory], path: Union[str, os.PathLike],
              scenario: Optional[Scenario] = None, options: SvgOptions = SvgOptions()):
    text = render_svg(trajectories, scenario, options)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
