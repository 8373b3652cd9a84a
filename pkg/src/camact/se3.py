"""Rigid-body transform core: rotations, poses, delta actions, frame changes.

Conventions used throughout the package:
  - rotation matrices are 3x3 float64, right-handed, det = +1
  - quaternions are scalar-first (w, x, y, z), Hamilton product, canonical
    sign w >= 0 (if w == 0, the first nonzero of x, y, z is positive)
  - euler angles are roll/pitch/yaw in radians, extrinsic X-Y-Z order:
    R = Rz(yaw) @ Ry(pitch) @ Rx(roll)
  - translations are meters
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Max |R^T R - I| drift tolerated before compose() re-orthonormalizes.
ORTHO_TOL = 1e-9
# Quaternion norm handling: below EXACT accept as-is, up to REJECT renormalize,
# beyond REJECT raise.
QUAT_NORM_EXACT = 1e-12
QUAT_NORM_REJECT = 1e-6
# cos(pitch) below this switches rpy extraction to the gimbal-lock branch.
GIMBAL_EPS = 5e-10


def _as_vec3(v, name: str) -> np.ndarray:
    out = np.asarray(v, dtype=np.float64)
    if out.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} has non-finite components")
    return out


def _as_mat3(m, name: str) -> np.ndarray:
    out = np.asarray(m, dtype=np.float64)
    if out.shape != (3, 3):
        raise ValueError(f"{name} must have shape (3, 3), got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} has non-finite components")
    return out


def rotation_drift(r: np.ndarray) -> float:
    """Max-abs deviation of R^T R from the identity."""
    r = np.asarray(r, dtype=np.float64)
    return float(np.max(np.abs(r.T @ r - np.eye(3))))


def is_rotation(r, tol: float = ORTHO_TOL) -> bool:
    """True if r is orthonormal with det +1, both within tol."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    return rotation_drift(r) <= tol and abs(np.linalg.det(r) - 1.0) <= tol


def orthonormalize(r: np.ndarray) -> np.ndarray:
    """Nearest rotation matrix (polar decomposition via SVD)."""
    u, _, vt = np.linalg.svd(np.asarray(r, dtype=np.float64))
    out = u @ vt
    if np.linalg.det(out) < 0.0:
        u = u.copy()
        u[:, -1] = -u[:, -1]
        out = u @ vt
    return out


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    out = math.fmod(a + math.pi, 2.0 * math.pi)
    if out <= 0.0:
        out += 2.0 * math.pi
    return out - math.pi


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_from_rpy(rpy) -> np.ndarray:
    """Rotation matrix from (roll, pitch, yaw), extrinsic X-Y-Z.

    R = Rz(yaw) @ Ry(pitch) @ Rx(roll)
    """
    rpy = _as_vec3(rpy, "rpy")
    return rot_z(rpy[2]) @ rot_y(rpy[1]) @ rot_x(rpy[0])


def rpy_from_rot(r) -> np.ndarray:
    """(roll, pitch, yaw) from a rotation matrix; inverse of rot_from_rpy.

    pitch is in [-pi/2, pi/2]; roll and yaw in (-pi, pi].  At gimbal lock
    (|pitch| = pi/2) roll is fixed to 0 and yaw absorbs the free angle, so
    the matrix (not the angle triple) round-trips.
    """
    r = _as_mat3(r, "rotation")
    cos_pitch = math.hypot(r[0, 0], r[1, 0])
    pitch = math.atan2(-r[2, 0], cos_pitch)
    if cos_pitch < GIMBAL_EPS:
        roll = 0.0
        yaw = math.atan2(-r[0, 1], r[1, 1])
    else:
        roll = math.atan2(r[2, 1], r[2, 2])
        yaw = math.atan2(r[1, 0], r[0, 0])
    return np.array([wrap_angle(roll), pitch, wrap_angle(yaw)])


def canonical_quat(q) -> np.ndarray:
    """Fix the quaternion double-cover sign: w >= 0, tie broken on x, y, z."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (4,):
        raise ValueError(f"quaternion must have shape (4,), got {q.shape}")
    if q[0] != 0.0:
        return -q if q[0] < 0.0 else q.copy()
    for component in q[1:]:
        if component != 0.0:
            return -q if component < 0.0 else q.copy()
    return q.copy()


def quat_from_rot(r) -> np.ndarray:
    """Unit quaternion (w, x, y, z) from a rotation matrix.

    Shepperd's method: branch on the largest of trace and diagonal entries
    for numerical stability, then canonicalize the sign.
    """
    r = _as_mat3(r, "rotation")
    trace = r[0, 0] + r[1, 1] + r[2, 2]
    if trace > 0.0:
        s = math.sqrt(trace + 1.0) * 2.0
        q = np.array(
            [
                0.25 * s,
                (r[2, 1] - r[1, 2]) / s,
                (r[0, 2] - r[2, 0]) / s,
                (r[1, 0] - r[0, 1]) / s,
            ]
        )
    elif r[0, 0] > r[1, 1] and r[0, 0] > r[2, 2]:
        s = math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        q = np.array(
            [
                (r[2, 1] - r[1, 2]) / s,
                0.25 * s,
                (r[0, 1] + r[1, 0]) / s,
                (r[0, 2] + r[2, 0]) / s,
            ]
        )
    elif r[1, 1] > r[2, 2]:
        s = math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
        q = np.array(
            [
                (r[0, 2] - r[2, 0]) / s,
                (r[0, 1] + r[1, 0]) / s,
                0.25 * s,
                (r[1, 2] + r[2, 1]) / s,
            ]
        )
    else:
        s = math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
        q = np.array(
            [
                (r[1, 0] - r[0, 1]) / s,
                (r[0, 2] + r[2, 0]) / s,
                (r[1, 2] + r[2, 1]) / s,
                0.25 * s,
            ]
        )
    q /= np.linalg.norm(q)
    return canonical_quat(q)


def rot_from_quat(q) -> np.ndarray:
    """Rotation matrix from a scalar-first unit quaternion.

    Norm deviations below QUAT_NORM_EXACT pass through, up to
    QUAT_NORM_REJECT are renormalized, beyond that raise ValueError.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (4,):
        raise ValueError(f"quaternion must have shape (4,), got {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError("quaternion has non-finite components")
    norm = float(np.linalg.norm(q))
    if abs(norm - 1.0) > QUAT_NORM_REJECT:
        raise ValueError(f"quaternion norm {norm} deviates from 1 beyond {QUAT_NORM_REJECT}")
    if abs(norm - 1.0) > QUAT_NORM_EXACT:
        q = q / norm
    w, x, y, z = q
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def rotation_angle(r) -> float:
    """Geodesic rotation angle of r in [0, pi].

    Uses ||R - I||_F = 2*sqrt(2)*sin(theta/2), well conditioned near 0
    where the trace formula loses half the significant digits.
    """
    r = _as_mat3(r, "rotation")
    half_sin = np.linalg.norm(r - np.eye(3)) / (2.0 * math.sqrt(2.0))
    return 2.0 * math.asin(min(1.0, float(half_sin)))


def rotation_distance(r1, r2) -> float:
    """Geodesic angle between two rotations."""
    r1 = _as_mat3(r1, "r1")
    r2 = _as_mat3(r2, "r2")
    half_sin = np.linalg.norm(r1 - r2) / (2.0 * math.sqrt(2.0))
    return 2.0 * math.asin(min(1.0, float(half_sin)))


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """A rotation plus translation; element of SE(3).

    The same value type plays three semantic roles: an end-effector pose,
    a world-to-camera extrinsic, and a relative motion between two poses.
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", _as_mat3(self.rotation, "rotation"))
        object.__setattr__(self, "translation", _as_vec3(self.translation, "translation"))

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, m) -> "RigidTransform":
        m = np.asarray(m, dtype=np.float64)
        if m.shape != (4, 4):
            raise ValueError(f"homogeneous matrix must have shape (4, 4), got {m.shape}")
        if np.max(np.abs(m[3] - np.array([0.0, 0.0, 0.0, 1.0]))) > 1e-9:
            raise ValueError("last row of homogeneous matrix must be [0, 0, 0, 1]")
        return cls(m[:3, :3], m[:3, 3])

    @classmethod
    def from_quat_trans(cls, quat_wxyz, translation) -> "RigidTransform":
        return cls(rot_from_quat(quat_wxyz), translation)

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def as_quat_trans(self) -> tuple[np.ndarray, np.ndarray]:
        return quat_from_rot(self.rotation), self.translation.copy()

    def validate(self, tol: float = ORTHO_TOL) -> list[str]:
        """List of violated rigid-transform invariants (empty = valid)."""
        violations = []
        if rotation_drift(self.rotation) > tol:
            violations.append("rotation_not_orthonormal")
        elif np.linalg.det(self.rotation) < 0.0:
            violations.append("improper_rotation")
        elif abs(np.linalg.det(self.rotation) - 1.0) > tol:
            violations.append("rotation_determinant_off")
        return violations

    def allclose(self, other: "RigidTransform", atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.rotation, other.rotation, rtol=0.0, atol=atol)
            and np.allclose(self.translation, other.translation, rtol=0.0, atol=atol)
        )

    def __repr__(self) -> str:
        q = quat_from_rot(self.rotation) if is_rotation(self.rotation, 1e-6) else None
        quat_part = f"quat_wxyz={np.array2string(q, precision=6)}" if q is not None else "rotation=<non-unit>"
        return f"RigidTransform({quat_part}, t={np.array2string(self.translation, precision=6)})"


# Semantic aliases matching the three roles the type plays.
Pose = RigidTransform
Transform = RigidTransform
ActionMatrix = RigidTransform


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """Homogeneous product a @ b.

    Re-orthonormalizes the rotation only when accumulated drift exceeds
    ORTHO_TOL, so exact inputs stay bit-exact through short chains.
    """
    rotation = a.rotation @ b.rotation
    translation = a.rotation @ b.translation + a.translation
    if rotation_drift(rotation) > ORTHO_TOL:
        rotation = orthonormalize(rotation)
    return RigidTransform(rotation, translation)


def inverse(p: RigidTransform) -> RigidTransform:
    """Inverse transform: (R, t) -> (R^T, -R^T t)."""
    rt = p.rotation.T.copy()
    return RigidTransform(rt, -(rt @ p.translation))


def action_from_pose_pair(p1: RigidTransform, p2: RigidTransform) -> RigidTransform:
    """Relative motion taking pose p1 to pose p2: A = p2 @ p1^-1."""
    return compose(p2, inverse(p1))


def transform_pose(t: RigidTransform, p: RigidTransform) -> RigidTransform:
    """Express a pose in the frame defined by extrinsic t: t @ p."""
    return compose(t, p)


def conjugate_action(t: RigidTransform, a: RigidTransform) -> RigidTransform:
    """Re-express a relative motion in the camera frame: t @ a @ t^-1."""
    return compose(compose(t, a), inverse(t))


def inverse_conjugate_action(t: RigidTransform, a_cam: RigidTransform) -> RigidTransform:
    """Inverse of conjugate_action: t^-1 @ a_cam @ t (camera back to base)."""
    return compose(compose(inverse(t), a_cam), t)
