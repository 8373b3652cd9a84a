"""Pinhole model tests: projection, unprojection, rig validation."""

import numpy as np
import pytest

from camact import se3
from camact.camera import (
    BehindCameraError,
    CameraRig,
    Intrinsics,
    project,
    project_points,
    unproject,
    validate_rig,
)

K = Intrinsics(fx=100.0, fy=100.0, cx=64.0, cy=64.0, width=128, height=128)


class TestProject:
    def test_principal_point(self):
        assert project(K, [0.0, 0.0, 2.5]) == (64.0, 64.0)

    def test_spot_check(self):
        # u = 100 * 0.1 / 1 + 64, v = 100 * 0.2 / 1 + 64
        assert project(K, [0.1, 0.2, 1.0]) == (74.0, 84.0)

    def test_behind_camera(self):
        with pytest.raises(BehindCameraError):
            project(K, [0.1, 0.2, -0.5])

    def test_zero_depth(self):
        with pytest.raises(BehindCameraError):
            project(K, [0.1, 0.2, 0.0])

    def test_scale_invariant_along_rays(self, rng):
        for _ in range(100):
            p = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 5.0)])
            lam = rng.uniform(0.1, 10.0)
            u1, v1 = project(K, p)
            u2, v2 = project(K, lam * p)
            assert abs(u1 - u2) < 1e-9 and abs(v1 - v2) < 1e-9

    def test_vectorized_matches_scalar(self, rng):
        pts = np.column_stack(
            [rng.uniform(-1, 1, 50), rng.uniform(-1, 1, 50), rng.uniform(0.1, 5.0, 50)]
        )
        uv = project_points(K, pts)
        for i in range(50):
            assert tuple(uv[i]) == project(K, pts[i])


class TestUnproject:
    def test_principal_point_goes_to_axis(self):
        np.testing.assert_allclose(unproject(K, 64.0, 64.0, 2.0), [0.0, 0.0, 2.0], atol=0.0)

    def test_inverse_of_project_spot_check(self):
        np.testing.assert_allclose(unproject(K, 74.0, 84.0, 1.0), [0.1, 0.2, 1.0], atol=1e-15)

    def test_mutual_inverse_random(self, rng):
        for _ in range(200):
            u, v = rng.uniform(0, 128, size=2)
            depth = rng.uniform(1e-3, 10.0)
            uu, vv = project(K, unproject(K, u, v, depth))
            assert abs(uu - u) < 1e-9 and abs(vv - v) < 1e-9

    def test_rejects_nonpositive_depth(self):
        with pytest.raises(ValueError):
            unproject(K, 64.0, 64.0, 0.0)


class TestValidateRig:
    def make_rig(self, **over):
        fields = dict(fx=100.0, fy=100.0, cx=64.0, cy=64.0, width=128, height=128)
        fields.update(over)
        return CameraRig(
            camera_id=over.get("camera_id", "cam0"),
            intrinsics=Intrinsics(**{k: v for k, v in fields.items() if k != "camera_id"}),
            extrinsics=se3.RigidTransform(se3.rot_y(0.4), [0.0, 0.0, 1.0]),
        )

    def test_well_formed_rig_is_clean(self):
        assert validate_rig(self.make_rig()) == []

    def test_negative_fx(self):
        assert "fx_nonpositive" in validate_rig(self.make_rig(fx=-1.0))

    def test_principal_point_out_of_frame(self):
        assert "cx_out_of_frame" in validate_rig(self.make_rig(cx=130.0))

    def test_empty_camera_id(self):
        rig = CameraRig(
            camera_id="",
            intrinsics=K,
            extrinsics=se3.RigidTransform.identity(),
        )
        assert "camera_id_empty" in validate_rig(rig)

    def test_improper_rotation_flagged(self):
        # det = -1 reflection: determinant oracle says improper.
        bad = se3.RigidTransform.__new__(se3.RigidTransform)
        object.__setattr__(bad, "rotation", np.diag([1.0, 1.0, -1.0]))
        object.__setattr__(bad, "translation", np.zeros(3))
        assert np.linalg.det(bad.rotation) < 0
        rig = CameraRig(camera_id="cam0", intrinsics=K, extrinsics=bad)
        assert "improper_rotation" in validate_rig(rig)

    def test_json_roundtrip(self):
        rig = self.make_rig()
        back = CameraRig.from_json_dict(rig.to_json_dict())
        assert back.camera_id == rig.camera_id
        assert back.intrinsics == rig.intrinsics
        assert back.extrinsics.allclose(rig.extrinsics, atol=1e-15)
