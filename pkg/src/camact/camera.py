"""Pinhole camera model: intrinsics, rigs, projection, rig validation.

Camera frame convention: +Z forward (into the scene), +X right, +Y down.
Projection is the ideal pinhole map

    u = fx * X / Z + cx
    v = fy * Y / Z + cy

with no distortion; the rig carries a distortion field reserved for future
coefficients but the model here never applies one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import se3

# Depths at or below this count as behind the camera.
MIN_DEPTH = 1e-9


class BehindCameraError(ValueError):
    """Point has non-positive depth in the camera frame."""


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole parameters in pixels plus sensor size."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def validate(self) -> list[str]:
        violations = []
        if not self.fx > 0.0:
            violations.append("fx_nonpositive")
        if not self.fy > 0.0:
            violations.append("fy_nonpositive")
        if not self.width > 0 or not self.height > 0:
            violations.append("size_nonpositive")
        else:
            if not 0.0 <= self.cx < self.width:
                violations.append("cx_out_of_frame")
            if not 0.0 <= self.cy < self.height:
                violations.append("cy_out_of_frame")
        return violations

    def to_json_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Intrinsics":
        return cls(
            fx=float(d["fx"]),
            fy=float(d["fy"]),
            cx=float(d["cx"]),
            cy=float(d["cy"]),
            width=int(d["width"]),
            height=int(d["height"]),
        )


@dataclass(frozen=True)
class CameraRig:
    """One third-person camera: id, pinhole intrinsics, world-to-camera extrinsic."""

    camera_id: str
    intrinsics: Intrinsics
    extrinsics: se3.RigidTransform
    # Reserved for lens distortion coefficients; always empty in this model.
    distortion: tuple[float, ...] = ()

    def to_json_dict(self) -> dict:
        quat, trans = self.extrinsics.as_quat_trans()
        return {
            "camera_id": self.camera_id,
            "intrinsics": self.intrinsics.to_json_dict(),
            "extrinsics": {
                "quat_wxyz": quat.tolist(),
                "translation_m": trans.tolist(),
            },
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CameraRig":
        ext = d["extrinsics"]
        return cls(
            camera_id=str(d["camera_id"]),
            intrinsics=Intrinsics.from_json_dict(d["intrinsics"]),
            extrinsics=se3.RigidTransform.from_quat_trans(
                ext["quat_wxyz"], ext["translation_m"]
            ),
        )


def project(k: Intrinsics, p_cam) -> tuple[float, float]:
    """Camera-frame point (meters) to pixel coordinates.

    No bounds clamping: the caller decides what off-frame pixels mean.
    """
    p = np.asarray(p_cam, dtype=np.float64)
    if p.shape != (3,):
        raise ValueError(f"point must have shape (3,), got {p.shape}")
    x, y, z = p
    if z <= MIN_DEPTH:
        raise BehindCameraError(f"point depth {z} is not in front of the camera")
    return k.fx * x / z + k.cx, k.fy * y / z + k.cy


def project_points(k: Intrinsics, pts_cam) -> np.ndarray:
    """Vectorized project over an (n, 3) array; raises if any point is behind."""
    pts = np.asarray(pts_cam, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
    z = pts[:, 2]
    if np.any(z <= MIN_DEPTH):
        raise BehindCameraError("at least one point is behind the camera")
    u = k.fx * pts[:, 0] / z + k.cx
    v = k.fy * pts[:, 1] / z + k.cy
    return np.stack([u, v], axis=1)


def unproject(k: Intrinsics, u: float, v: float, depth: float) -> np.ndarray:
    """Pixel plus depth back to a camera-frame point; inverse of project."""
    if not depth > 0.0:
        raise ValueError(f"depth must be positive, got {depth}")
    return np.array(
        [
            (u - k.cx) / k.fx * depth,
            (v - k.cy) / k.fy * depth,
            depth,
        ]
    )


def validate_rig(rig: CameraRig) -> list[str]:
    """All violated rig invariants by name; empty list means the rig is valid."""
    violations = []
    if not rig.camera_id:
        violations.append("camera_id_empty")
    violations.extend(rig.intrinsics.validate())
    violations.extend(rig.extrinsics.validate())
    return violations
