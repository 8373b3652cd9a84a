"""Vectorized kernels over stacked rotations and transforms.

Everything here mirrors the scalar core in se3/codec but operates on arrays
with a leading batch axis: rotations (n, 3, 3), translations (n, 3),
quaternions (n, 4) scalar-first, action vectors (n, 7).  Used by the
round-trip self-check and anywhere throughput matters; semantics match the
scalar path to floating-point roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import se3


def rot_from_quat_batch(q: np.ndarray) -> np.ndarray:
    """(n, 4) scalar-first unit quaternions to (n, 3, 3) rotation matrices."""
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty((q.shape[0], 3, 3))
    out[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    out[:, 0, 1] = 2.0 * (x * y - w * z)
    out[:, 0, 2] = 2.0 * (x * z + w * y)
    out[:, 1, 0] = 2.0 * (x * y + w * z)
    out[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    out[:, 1, 2] = 2.0 * (y * z - w * x)
    out[:, 2, 0] = 2.0 * (x * z - w * y)
    out[:, 2, 1] = 2.0 * (y * z + w * x)
    out[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return out


def quat_from_rot_batch(r: np.ndarray) -> np.ndarray:
    """(n, 3, 3) rotations to (n, 4) canonical scalar-first quaternions.

    Same Shepperd branching as the scalar path, picked per row.
    """
    r = np.asarray(r, dtype=np.float64)
    n = r.shape[0]
    q = np.empty((n, 4))
    trace = r[:, 0, 0] + r[:, 1, 1] + r[:, 2, 2]

    case0 = trace > 0.0
    case1 = ~case0 & (r[:, 0, 0] > r[:, 1, 1]) & (r[:, 0, 0] > r[:, 2, 2])
    case2 = ~case0 & ~case1 & (r[:, 1, 1] > r[:, 2, 2])
    case3 = ~case0 & ~case1 & ~case2

    s = np.empty(n)
    s[case0] = np.sqrt(trace[case0] + 1.0) * 2.0
    q[case0, 0] = 0.25 * s[case0]
    q[case0, 1] = (r[case0, 2, 1] - r[case0, 1, 2]) / s[case0]
    q[case0, 2] = (r[case0, 0, 2] - r[case0, 2, 0]) / s[case0]
    q[case0, 3] = (r[case0, 1, 0] - r[case0, 0, 1]) / s[case0]

    s[case1] = np.sqrt(1.0 + r[case1, 0, 0] - r[case1, 1, 1] - r[case1, 2, 2]) * 2.0
    q[case1, 0] = (r[case1, 2, 1] - r[case1, 1, 2]) / s[case1]
    q[case1, 1] = 0.25 * s[case1]
    q[case1, 2] = (r[case1, 0, 1] + r[case1, 1, 0]) / s[case1]
    q[case1, 3] = (r[case1, 0, 2] + r[case1, 2, 0]) / s[case1]

    s[case2] = np.sqrt(1.0 + r[case2, 1, 1] - r[case2, 0, 0] - r[case2, 2, 2]) * 2.0
    q[case2, 0] = (r[case2, 0, 2] - r[case2, 2, 0]) / s[case2]
    q[case2, 1] = (r[case2, 0, 1] + r[case2, 1, 0]) / s[case2]
    q[case2, 2] = 0.25 * s[case2]
    q[case2, 3] = (r[case2, 1, 2] + r[case2, 2, 1]) / s[case2]

    s[case3] = np.sqrt(1.0 + r[case3, 2, 2] - r[case3, 0, 0] - r[case3, 1, 1]) * 2.0
    q[case3, 0] = (r[case3, 1, 0] - r[case3, 0, 1]) / s[case3]
    q[case3, 1] = (r[case3, 0, 2] + r[case3, 2, 0]) / s[case3]
    q[case3, 2] = (r[case3, 1, 2] + r[case3, 2, 1]) / s[case3]
    q[case3, 3] = 0.25 * s[case3]

    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return canonical_quat_batch(q)


def canonical_quat_batch(q: np.ndarray) -> np.ndarray:
    """Per-row sign canonicalization: w >= 0, ties broken on x, y, z."""
    q = np.array(q, dtype=np.float64, copy=True)
    flip = q[:, 0] < 0.0
    undecided = q[:, 0] == 0.0
    for k in (1, 2, 3):
        flip |= undecided & (q[:, k] < 0.0)
        undecided &= q[:, k] == 0.0
    q[flip] = -q[flip]
    return q


def rpy_from_rot_batch(r: np.ndarray) -> np.ndarray:
    """(n, 3, 3) rotations to (n, 3) roll/pitch/yaw, matching se3.rpy_from_rot."""
    r = np.asarray(r, dtype=np.float64)
    cos_pitch = np.hypot(r[:, 0, 0], r[:, 1, 0])
    pitch = np.arctan2(-r[:, 2, 0], cos_pitch)
    gimbal = cos_pitch < se3.GIMBAL_EPS
    roll = np.where(gimbal, 0.0, np.arctan2(r[:, 2, 1], r[:, 2, 2]))
    yaw = np.where(
        gimbal,
        np.arctan2(-r[:, 0, 1], r[:, 1, 1]),
        np.arctan2(r[:, 1, 0], r[:, 0, 0]),
    )
    # arctan2 can return exactly -pi; the scalar path maps it to +pi.
    roll = np.where(roll <= -np.pi, roll + 2.0 * np.pi, roll)
    yaw = np.where(yaw <= -np.pi, yaw + 2.0 * np.pi, yaw)
    return np.stack([roll, pitch, yaw], axis=1)


def rot_from_rpy_batch(rpy: np.ndarray) -> np.ndarray:
    """(n, 3) roll/pitch/yaw to (n, 3, 3), R = Rz(yaw) Ry(pitch) Rx(roll)."""
    rpy = np.asarray(rpy, dtype=np.float64)
    cr, sr = np.cos(rpy[:, 0]), np.sin(rpy[:, 0])
    cp, sp = np.cos(rpy[:, 1]), np.sin(rpy[:, 1])
    cy, sy = np.cos(rpy[:, 2]), np.sin(rpy[:, 2])
    out = np.empty((rpy.shape[0], 3, 3))
    out[:, 0, 0] = cy * cp
    out[:, 0, 1] = cy * sp * sr - sy * cr
    out[:, 0, 2] = cy * sp * cr + sy * sr
    out[:, 1, 0] = sy * cp
    out[:, 1, 1] = sy * sp * sr + cy * cr
    out[:, 1, 2] = sy * sp * cr - cy * sr
    out[:, 2, 0] = -sp
    out[:, 2, 1] = cp * sr
    out[:, 2, 2] = cp * cr
    return out


def compose_batch(
    r1: np.ndarray, t1: np.ndarray, r2: np.ndarray, t2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise homogeneous product (r1, t1) @ (r2, t2)."""
    rot = np.einsum("nij,njk->nik", r1, r2)
    trans = np.einsum("nij,nj->ni", r1, t2) + t1
    return rot, trans


def inverse_batch(r: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise inverse: (R^T, -R^T t)."""
    rt = np.swapaxes(r, 1, 2)
    return rt, -np.einsum("nij,nj->ni", rt, t)


def conjugate_batch(
    rt: np.ndarray, tt: np.ndarray, ra: np.ndarray, ta: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise T @ A @ T^-1 for extrinsics (rt, tt) and actions (ra, ta)."""
    r1, t1 = compose_batch(rt, tt, ra, ta)
    ri, ti = inverse_batch(rt, tt)
    return compose_batch(r1, t1, ri, ti)


def inverse_conjugate_batch(
    rt: np.ndarray, tt: np.ndarray, ra: np.ndarray, ta: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise T^-1 @ A @ T; inverse of conjugate_batch."""
    ri, ti = inverse_batch(rt, tt)
    r1, t1 = compose_batch(ri, ti, ra, ta)
    return compose_batch(r1, t1, rt, tt)


def encode_batch(r: np.ndarray, t: np.ndarray, gripper: np.ndarray) -> np.ndarray:
    """Row-wise motion + gripper to (n, 7) action vectors."""
    out = np.empty((r.shape[0], 7))
    out[:, :3] = t
    out[:, 3:6] = rpy_from_rot_batch(r)
    out[:, 6] = gripper
    return out


def decode_batch(v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(n, 7) action vectors to row-wise (rotations, translations, grippers)."""
    v = np.asarray(v, dtype=np.float64)
    return rot_from_rpy_batch(v[:, 3:6]), v[:, :3].copy(), v[:, 6].copy()


def rotation_angle_batch(r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """Row-wise geodesic angle between rotation pairs."""
    diff = np.linalg.norm((r1 - r2).reshape(r1.shape[0], -1), axis=1)
    return 2.0 * np.arcsin(np.minimum(1.0, diff / (2.0 * np.sqrt(2.0))))


def random_unit_quats(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniformly distributed canonical unit quaternions (normalized Gaussians)."""
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return canonical_quat_batch(q)


def random_rigid_batch(
    rng: np.random.Generator, n: int, trans_scale: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """n random rigid transforms: uniform rotations, uniform box translations."""
    rot = rot_from_quat_batch(random_unit_quats(rng, n))
    trans = rng.uniform(-trans_scale, trans_scale, size=(n, 3))
    return rot, trans


@dataclass(frozen=True)
class RoundtripReport:
    """Worst-case errors from a camera -> base -> camera conjugation sweep."""

    samples: int
    max_translation_error: float
    max_rotation_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.max_translation_error < self.tolerance
            and self.max_rotation_error < self.tolerance
        )


def roundtrip_check(samples: int, seed: int, tolerance: float = 1e-9) -> RoundtripReport:
    """Self-check: conjugate random actions base-ward then camera-ward again.

    Draws (action, extrinsic) pairs, maps each camera-frame action to the
    base frame and back, and reports the worst translation and rotation
    discrepancies.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    ra, ta = random_rigid_batch(rng, samples, trans_scale=0.5)
    rt, tt = random_rigid_batch(rng, samples, trans_scale=2.0)
    r_base, t_base = inverse_conjugate_batch(rt, tt, ra, ta)
    r_back, t_back = conjugate_batch(rt, tt, r_base, t_base)
    trans_err = float(np.max(np.linalg.norm(t_back - ta, axis=1)))
    rot_err = float(np.max(rotation_angle_batch(r_back, ra)))
    return RoundtripReport(
        samples=samples,
        max_translation_error=trans_err,
        max_rotation_error=rot_err,
        tolerance=tolerance,
    )
