"""The three basic motion paths: straight, triangle, circle.

Builds each schedule, simulates it, checks the path metrics against
their closed forms and renders an overview SVG to demos/out/.
"""
import math
import os

from milliswarm import (
    Pose,
    RobotSpec,
    circle_metrics,
    circle_schedule,
    closing_sweep,
    simulate,
    straight_displacement,
    straight_schedule,
    triangle_metrics,
    triangle_schedule,
)
from milliswarm.paths import triangle_base_offset
from milliswarm.svgplot import write_svg

os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
out = lambda name: os.path.join(os.path.dirname(__file__), "out", name)

robot = RobotSpec.legged("r", 9.0)

print("= straight line =")
theta, k = math.radians(20), 16
trajectory = simulate([robot], {"r": Pose(0, 0, 0)}, straight_schedule(theta, k))[0]
dx, dy = straight_displacement(robot.pivot_span, theta, k)
print(f"  simulated end ({trajectory.final.x:.6f}, {trajectory.final.y:.6f})")
print(f"  closed form   ({dx:.6f}, {dy:.6f})")
print(f"  advance is perpendicular to the heading: direction "
      f"{math.degrees(math.atan2(dy, dx)):.2f} deg for heading 0")

print("\n= triangle: out k half-steps, back k with negated sweeps =")
theta, k = math.radians(25), 8
h0 = -triangle_base_offset(theta, k)
trajectory = simulate([robot], {"r": Pose(0, 0, h0)}, triangle_schedule(theta, k))[0]
metrics = triangle_metrics(robot.pivot_span, theta, k)
ys = [p.y for p in trajectory.poses]
print(f"  returns to the base line: y_end = {trajectory.final.y:.2e} mm")
print(f"  apex height {max(ys):.4f} mm vs closed form {metrics.height:.4f} mm")
print(f"  base {abs(trajectory.final.x):.4f} mm vs closed form {metrics.base:.4f} mm")
print(f"  base angle {math.degrees(metrics.base_angle):.1f} deg = (180 - {math.degrees(theta):.0f})/2")

print("\n= circle: alternating unequal sweeps plus a closing step =")
t1, t2, kc = math.radians(25), math.radians(15), 10
m = circle_metrics(robot.pivot_span, t1, t2, kc)
print(f"  closing sweep {math.degrees(m.closing_sweep):.1f} deg"
      f" (= 180 - ({kc}*{math.degrees(t1):.0f} - {kc-1}*{math.degrees(t2):.0f}))")
print(f"  fitted radius {m.radius:.4f} mm, fit residual {m.fit_residual:.2e} mm")
schedule = circle_schedule(t1, t2, kc)
twice = simulate([robot], {"r": Pose(0, 0, 0)}, schedule + schedule)[0]
print(f"  two rounds close the loop: distance from start "
      f"{math.hypot(twice.final.x, twice.final.y):.2e} mm")

frames = {
    "straight": simulate([robot], {"r": Pose(0, -40, 0)}, straight_schedule(math.radians(20), 16))[0],
    "triangle": simulate([robot], {"r": Pose(-40, 0, h0)}, triangle_schedule(math.radians(25), 8))[0],
    "circle": simulate([robot], {"r": Pose(20, 20, 0)}, circle_schedule(t1, t2, kc) + circle_schedule(t1, t2, kc))[0],
}
for name, t in frames.items():
    t.robot_id = name
write_svg(list(frames.values()), out("basic_paths.svg"))
print(f"\nwrote {out('basic_paths.svg')}")
