"""Where are the hands? — forward kinematics of the 8-motor torso.

The robot has a waist, two three-joint arms and a head pitch.  Given the
eight motor angles, the closed-form chain returns the nine Cartesian
coordinates of the two fingertips and the head center.
"""

import numpy as np

from gesturebot import JointAngles, LinkLengths, clamp_joints, forward_kinematics, validate_joints


def show(label, pose):
    print(f"{label}:")
    for name, xyz in (("right hand", pose.right_hand),
                      ("left hand", pose.left_hand),
                      ("head center", pose.head_center)):
        print(f"  {name:12s} ({xyz[0]:+.4f}, {xyz[1]:+.4f}, {xyz[2]:+.4f}) m")


links = LinkLengths()
print(f"link lengths: {links}")
print(f"arm reach {links.arm_reach:.3f} m, head reach {links.head_reach:.3f} m\n")

show("all motors at zero", forward_kinematics(JointAngles(0, 0, 0, 0, 0, 0, 0, 0)))
show("waist turned 90 degrees",
     forward_kinematics(JointAngles(np.pi / 2, 0, 0, 0, 0, 0, 0, 0)))
show("arms raised",
     forward_kinematics(JointAngles(0, 2.0, 0.8, 0.4, 2.0, -0.8, -0.4, 0.5)))

print("\nJoint limits are a separate concern from the pure math:")
wild = JointAngles(3.0, 0, 0, 0, 0, 0, 0, 0)
result = validate_joints(wild)
print(f"  waist at 3.0 rad -> violations {result.violations}")
print(f"  clamped: waist = {clamp_joints(wild).theta_w}")
