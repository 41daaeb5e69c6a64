"""Single-step kinematics: pivot sweeps, tumbles, and the closed form.

Walks through the two primitive motions and shows that the closed-form
midpoint position agrees with step-by-step simulation to machine
precision, including the exact linearity in pivot span.
"""
import math

from milliswarm import (
    Pivot,
    Pose,
    RobotSpec,
    SlipModel,
    canonical_pivot_schedule,
    closed_form_position,
    pivot_half_step,
    simulate,
    tumble_step,
    TumbleDirection,
)

print("= one pivot half-step =")
pose = Pose(0.0, 0.0, 0.0)
for sweep_deg in (20, 90, 179):
    after = pivot_half_step(pose, Pivot.FRONT, math.radians(sweep_deg), span=10.0)
    chord = math.hypot(after.x, after.y)
    print(f"  front pivot, sweep {sweep_deg:3d} deg -> center ({after.x:+7.3f}, {after.y:+7.3f}),"
          f" chord {chord:.3f} mm (= 10 sin({sweep_deg/2:.1f} deg) = {10*math.sin(math.radians(sweep_deg/2)):.3f})")

print("\n= one tumble =")
after = tumble_step(Pose(3.0, 4.0, math.radians(90)), TumbleDirection.FORWARD, body_length=5.0)
print(f"  from (3, 4) heading 90 deg: -> ({after.x:g}, {after.y:g}), heading unchanged")

print("\n= closed form vs simulation =")
span, t1, t2, k = 7.0, math.radians(33), math.radians(11), 17
robot = RobotSpec.legged("a", span)
start = Pose(1.0, 2.0, 0.4)
trajectory = simulate([robot], {"a": start}, canonical_pivot_schedule(t1, t2, k))[0]
cf = closed_form_position(span, t1, t2, k, start)
err = math.hypot(trajectory.final.x - cf[0], trajectory.final.y - cf[1])
print(f"  k={k} half-steps: simulated ({trajectory.final.x:.6f}, {trajectory.final.y:.6f}),"
      f" closed form ({cf[0]:.6f}, {cf[1]:.6f}), error {err:.2e} mm")

print("\n= displacement is linear in span =")
for span in (3.0, 6.0, 9.0):
    x, y = closed_form_position(span, t1, t2, k)
    print(f"  span {span:3.0f} mm -> displacement {math.hypot(x, y):.6f} mm"
          f" ({math.hypot(x, y)/span:.6f} per mm of span)")

print("\n= broadcast: one schedule, many robots =")
robots = [RobotSpec.legged(f"m{i}", s) for i, s in enumerate((3.0, 5.0, 9.0), 1)]
initial = {r.id: Pose(0.0, 10.0 * i, 0.0) for i, r in enumerate(robots)}
for t in simulate(robots, initial, canonical_pivot_schedule(t1, t2, 10)):
    dx = t.final.x - t.poses[0].x
    dy = t.final.y - t.poses[0].y
    print(f"  {t.robot_id}: displacement ({dx:+.3f}, {dy:+.3f}), direction"
          f" {math.degrees(math.atan2(dy, dx)):.3f} deg")

print("\n= optional slip noise (seeded, off by default) =")
noisy = simulate(robots, initial, canonical_pivot_schedule(t1, t2, 10),
                 slip=SlipModel(scale=0.05, seed=42))
for t in noisy:
    print(f"  {t.robot_id}: final ({t.final.x:+.3f}, {t.final.y:+.3f}) with 5% sweep noise")
