"""Reaching a pose — the bacterial memetic inverse-kinematics solver.

We pick a random valid posture, compute its pose with forward kinematics,
then ask the solver to recover motor angles for that pose from scratch.
The per-generation trace shows the evolutionary search handing over to the
damped local search.
"""

import numpy as np

from gesturebot import BmaParams, DEFAULT_LIMITS, Pose9, fk_array, solve_ik

rng = np.random.default_rng(7)
secret = rng.uniform(DEFAULT_LIMITS.lower, DEFAULT_LIMITS.upper)
target = Pose9.from_array(fk_array(secret))
print("target pose (from a hidden posture):")
print(f"  right hand {tuple(round(v, 4) for v in target.right_hand)}")
print(f"  left hand  {tuple(round(v, 4) for v in target.left_hand)}")
print(f"  head       {tuple(round(v, 4) for v in target.head_center)}\n")

report = solve_ik(target, BmaParams(rng_seed=1234))
print(f"solved in {report.generations_run} generations, "
      f"{report.evaluations} cost evaluations, {report.wall_time:.2f}s")
print(f"final squared pose error: {report.best_cost:.3e} m^2 "
      f"({'success' if report.succeeded else 'best effort'})\n")

print("generation  best cost")
for rec in report.trace:
    if rec.generation % 3 == 0 or rec is report.trace[-1]:
        print(f"  {rec.generation:9d}  {rec.best_cost:.3e}")

print("\nThe arms are redundant, so the recovered posture may legitimately")
print("differ from the hidden one while reaching the identical pose:")
recovered = report.best_angles.to_array()
print(f"  max joint difference: {np.max(np.abs(recovered - secret)):.4f} rad")
residual = fk_array(recovered) - target.to_array()
print(f"  max coordinate error: {np.max(np.abs(residual)):.2e} m")
