#!/usr/bin/env python3
"""Walk through the core frame conversion: base actions <-> camera actions.

A delta action is the relative rigid motion between two consecutive
end-effector poses.  Training converts it into a third-person camera's
frame with the extrinsic calibration T (A_cam = T A T^-1); inference
converts the model's camera-frame output back for execution.
"""

import numpy as np

from camact import se3
from camact.codec import decode_action, encode_action

np.set_printoptions(precision=5, suppress=True)

# Two nearby gripper poses in the robot base frame: a short advance with a
# slight yaw correction while the tool points down.
p1 = se3.RigidTransform(se3.rot_x(np.pi), [0.40, -0.10, 0.30])
p2 = se3.RigidTransform(se3.rot_z(0.05) @ se3.rot_x(np.pi), [0.42, -0.08, 0.28])

action = se3.action_from_pose_pair(p1, p2)
print("base-frame action (relative motion p1 -> p2)")
print("  translation [m]:", action.translation)
print("  rotation angle [rad]:", se3.rotation_angle(action.rotation))

# A camera one and a half meters away, looking down at the workspace.
extrinsic = se3.RigidTransform(
    se3.rot_x(2.2) @ se3.rot_z(0.7), [0.1, 0.25, 1.5]
)

# Training direction: express the same physical motion in the camera frame.
action_cam = se3.conjugate_action(extrinsic, action)
print("\ncamera-frame action (training target)")
print("  translation [m]:", action_cam.translation)
print("  rotation angle [rad]:", se3.rotation_angle(action_cam.rotation))
print("  (the rotation angle is frame-invariant; translation is not)")

# Equivalent two-step route: map both poses into the camera frame first.
p1_cam = se3.transform_pose(extrinsic, p1)
p2_cam = se3.transform_pose(extrinsic, p2)
two_step = se3.action_from_pose_pair(p1_cam, p2_cam)
print("\ntwo-step route agrees within",
      np.max(np.abs(two_step.as_matrix() - action_cam.as_matrix())))

# The 7-dim vector form used as a model target.
vec = encode_action(action_cam, gripper=0.8)
print("\n7-dim target <x y z roll pitch yaw gripper>:", vec)

# Inference direction: the model predicts in camera space; execution needs
# the base frame back.
predicted_motion, gripper = decode_action(vec)
recovered = se3.inverse_conjugate_action(extrinsic, predicted_motion)
print("\nrecovered base-frame action, error vs original:",
      np.max(np.abs(recovered.as_matrix() - action.as_matrix())))
print("gripper passes through untouched:", gripper)
