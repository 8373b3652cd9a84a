"""Controlled multi-view benchmark: base-frame vs camera-frame targets.

Desk-scale stand-in for the full VLA experiment.  Synthetic reach
trajectories are observed from a pool of randomly placed third-person
cameras; two identical ridge regressors are trained on identical
observations, one predicting base-frame action vectors, one predicting
camera-frame action vectors (recovered to the base frame before scoring).
Validation MSE is reported on seen views, perturbed views, and disjoint
novel views.

The observation is a proxy for camera-aligned visual features: the
end-effector pose expressed in the observing camera's frame plus its
projected pixel, optionally view-id one-hot flags.  A learner that predicts
in the base frame must implicitly invert each camera's extrinsic from this
observation; a camera-frame learner does not.  The benchmark also exhibits
the ill-posedness directly: it constructs observation collisions (identical
observation, conflicting base-frame target) that cannot occur for
camera-frame targets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

from . import batch, codec, pipeline, se3
from .camera import BehindCameraError, CameraRig, Intrinsics, project


class FrustumError(ValueError):
    """Workspace is not fully visible from every requested camera."""


class DegenerateFitError(RuntimeError):
    """Normal equations are rank-deficient beyond the ridge term's remedy."""


class BenchArmError(RuntimeError):
    """One arm of the comparison failed to train; names seed and arm."""


DEFAULT_INTRINSICS = Intrinsics(fx=220.0, fy=220.0, cx=112.0, cy=112.0, width=224, height=224)

WORLD_UP = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class CameraPoolSpec:
    """Spherical-shell camera pool: every rig looks at a common point.

    The default radius band is deliberately thin: camera distance is not
    recoverable from the pose-plus-pixel observation the benchmark feeds
    its regressors (a real image reveals scene scale), so a wide band
    would add irreducible noise to both arms instead of testing the frame
    choice.
    """

    pool_size: int = 512
    radius_range: tuple[float, float] = (1.79, 1.81)
    elevation_range: tuple[float, float] = (0.25, 1.1)
    azimuth_range: tuple[float, float] = (-math.pi, math.pi)
    # In-plane rotation about the optical axis.  Ad-hoc camera mounts roll;
    # without this third rotational degree of freedom the pool's rotations
    # form a surface that a regressor can shortcut.
    roll_range: tuple[float, float] = (-math.pi, math.pi)
    look_at: tuple[float, float, float] = (0.0, 0.0, 0.25)
    seed: int = 0

    def validate(self) -> None:
        if self.pool_size < 1:
            raise ValueError(f"pool_size must be >= 1, got {self.pool_size}")
        for name, (lo, hi) in (
            ("radius_range", self.radius_range),
            ("elevation_range", self.elevation_range),
            ("azimuth_range", self.azimuth_range),
            ("roll_range", self.roll_range),
        ):
            if lo > hi:
                raise ValueError(f"{name} is empty: {lo} > {hi}")
        if self.radius_range[0] <= 0.0:
            raise ValueError("radius must be positive")
        if not (0.0 < self.elevation_range[0] and self.elevation_range[1] < math.pi / 2):
            raise ValueError("elevation range must lie inside (0, pi/2)")


def look_at_extrinsics(position, target) -> se3.RigidTransform:
    """World-to-camera transform for a camera at position looking at target.

    Vision convention: +Z points at the target, +X right, +Y down (world +Z
    is the up hint).
    """
    position = np.asarray(position, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    forward = target - position
    norm = np.linalg.norm(forward)
    if norm < 1e-12:
        raise ValueError("camera position coincides with the look-at point")
    z_axis = forward / norm
    x_axis = np.cross(z_axis, WORLD_UP)
    x_norm = np.linalg.norm(x_axis)
    if x_norm < 1e-12:
        raise ValueError("camera looks straight along the world up axis")
    x_axis /= x_norm
    y_axis = np.cross(z_axis, x_axis)
    rot_world_to_cam = np.stack([x_axis, y_axis, z_axis], axis=0)
    return se3.RigidTransform(rot_world_to_cam, -(rot_world_to_cam @ position))


def sample_camera_pool(
    spec: CameraPoolSpec, intrinsics: Intrinsics = DEFAULT_INTRINSICS
) -> list[CameraRig]:
    """Deterministically sample the camera pool described by spec."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    look_at = np.asarray(spec.look_at, dtype=np.float64)
    rigs = []
    for i in range(spec.pool_size):
        radius = rng.uniform(*spec.radius_range)
        elevation = rng.uniform(*spec.elevation_range)
        azimuth = rng.uniform(*spec.azimuth_range)
        roll = rng.uniform(*spec.roll_range)
        position = look_at + radius * np.array(
            [
                math.cos(elevation) * math.cos(azimuth),
                math.cos(elevation) * math.sin(azimuth),
                math.sin(elevation),
            ]
        )
        extrinsics = se3.compose(
            se3.RigidTransform(se3.rot_z(roll), np.zeros(3)),
            look_at_extrinsics(position, look_at),
        )
        rigs.append(
            CameraRig(
                camera_id=f"cam{i:05d}",
                intrinsics=intrinsics,
                extrinsics=extrinsics,
            )
        )
    return rigs


@dataclass(frozen=True)
class SyntheticTaskSpec:
    """Workspace box and motion family for synthetic trajectories.

    Trajectories servo from a random start pose toward a grasp target near
    the workspace center: the remaining offset shrinks by approach_rate per
    step, so the motion at any pose is (up to noise) determined by that
    pose.  goal_jitter spreads the per-episode target around the center;
    noise_scale adds per-step position jitter.
    """

    workspace_lo: tuple[float, float, float] = (-0.22, -0.22, 0.10)
    workspace_hi: tuple[float, float, float] = (0.22, 0.22, 0.40)
    n_steps: int = 16
    motion_family: str = "reach"
    noise_scale: float = 0.0005
    goal_jitter: float = 0.02
    approach_rate: float = 0.25
    # Per-episode wrist tilt amplitude in radians.  The default reach task
    # keeps the tool orientation fixed: with multi-meter extrinsic
    # translations, even small rotation deltas conjugate into large
    # translation components, which buries the translation signal.
    tilt_scale: float = 0.0
    lift_height: float = 0.12

    def validate(self) -> None:
        if self.n_steps < 3:
            raise ValueError(f"n_steps must be >= 3, got {self.n_steps}")
        lo = np.asarray(self.workspace_lo)
        hi = np.asarray(self.workspace_hi)
        if not np.all(lo < hi):
            raise ValueError("workspace_lo must be strictly below workspace_hi")
        if self.motion_family not in ("reach", "reach-grasp-lift"):
            raise ValueError(f"unknown motion family {self.motion_family!r}")
        if not 0.0 < self.approach_rate < 1.0:
            raise ValueError("approach_rate must be in (0, 1)")
        if self.tilt_scale < 0.0:
            raise ValueError("tilt_scale must be nonnegative")

    def corners(self) -> np.ndarray:
        lo = np.asarray(self.workspace_lo)
        hi = np.asarray(self.workspace_hi)
        return np.array(
            [[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])]
        )


def check_workspace_visible(task: SyntheticTaskSpec, rigs) -> None:
    """Raise FrustumError unless every workspace corner projects in-frame."""
    for rig in rigs:
        for corner in task.corners():
            p_cam = rig.extrinsics.rotation @ corner + rig.extrinsics.translation
            try:
                u, v = project(rig.intrinsics, p_cam)
            except BehindCameraError as exc:
                raise FrustumError(
                    f"workspace corner behind camera {rig.camera_id!r}"
                ) from exc
            if not (0.0 <= u < rig.intrinsics.width and 0.0 <= v < rig.intrinsics.height):
                raise FrustumError(
                    f"workspace corner projects outside camera {rig.camera_id!r} frame"
                )


def _slerp(q0: np.ndarray, q1: np.ndarray, fractions: np.ndarray) -> np.ndarray:
    """Spherical interpolation between two unit quaternions."""
    dot = float(np.dot(q0, q1))
    if dot < 0.0:
        q1 = -q1
        dot = -dot
    dot = min(1.0, dot)
    theta = math.acos(dot)
    if theta < 1e-9:
        out = q0[None, :] + fractions[:, None] * (q1 - q0)[None, :]
        return out / np.linalg.norm(out, axis=1, keepdims=True)
    sin_theta = math.sin(theta)
    w0 = np.sin((1.0 - fractions) * theta) / sin_theta
    w1 = np.sin(fractions * theta) / sin_theta
    return w0[:, None] * q0[None, :] + w1[:, None] * q1[None, :]


def _gripper_profile(family: str, n_steps: int) -> np.ndarray:
    """Scripted open/close schedule: 1 is open, 0 is closed."""
    if family == "reach":
        return np.ones(n_steps)
    grasp_at = max(2, int(math.ceil(0.6 * n_steps)))
    profile = np.ones(n_steps)
    close_span = min(2, n_steps - grasp_at) or 1
    for k in range(close_span):
        idx = grasp_at + k
        if idx < n_steps:
            profile[idx] = 1.0 - (k + 1) / close_span
    profile[grasp_at + close_span :] = 0.0
    return profile


def gen_trajectory(
    task: SyntheticTaskSpec,
    seed: int,
    cameras=(),
    episode_id: str | None = None,
) -> pipeline.TrajectoryEpisode:
    """One smooth synthetic episode inside the workspace box.

    Positions follow a natural cubic spline through waypoints sampled from
    the exponential approach toward the episode goal (with a small lateral
    bow); orientation decays geodesically from a random tilt toward the
    canonical downward grip; the gripper follows the family's scripted
    profile.  Deterministic for a fixed (task, seed).
    """
    task.validate()
    if cameras:
        check_workspace_visible(task, cameras)
    rng = np.random.default_rng(seed)
    lo = np.asarray(task.workspace_lo)
    hi = np.asarray(task.workspace_hi)
    center = 0.5 * (lo + hi)
    n = task.n_steps

    start = rng.uniform(lo, hi)
    goal = np.clip(center + rng.uniform(-task.goal_jitter, task.goal_jitter, size=3), lo, hi)
    grippers = _gripper_profile(task.motion_family, n)

    # Exact servo path: approach the phase target by approach_rate per step.
    # reach-grasp-lift retargets upward once the gripper has closed.
    exact = np.empty((n, 3))
    exact[0] = start
    lift_goal = np.clip(goal + np.array([0.0, 0.0, task.lift_height]), lo, hi)
    for k in range(1, n):
        target = goal if grippers[k - 1] > 0.0 else lift_goal
        exact[k] = exact[k - 1] + task.approach_rate * (target - exact[k - 1])

    # Cubic interpolation through waypoints on that path, with a small bow
    # on the interior knots.
    knot_idx = sorted({0, (n - 1) // 3, 2 * (n - 1) // 3, n - 1})
    waypoints = exact[knot_idx].copy()
    bow = rng.normal(scale=0.005, size=(len(knot_idx) - 2, 3))
    waypoints[1:-1] = np.clip(waypoints[1:-1] + bow, lo, hi)
    spline = CubicSpline(np.asarray(knot_idx, dtype=np.float64), waypoints, axis=0, bc_type="natural")
    positions = spline(np.arange(n, dtype=np.float64))
    if task.noise_scale > 0.0:
        positions = positions + rng.normal(scale=task.noise_scale, size=positions.shape)
    positions = np.clip(positions, lo, hi)

    # Tool orientation: random tilt of the downward grip, closing the
    # remaining rotation geodesically by approach_rate per step.
    down = se3.rot_x(math.pi)
    tilt = se3.rot_from_rpy(rng.uniform(-task.tilt_scale, task.tilt_scale, size=3))
    q_start = se3.quat_from_rot(down @ tilt)
    q_end = se3.quat_from_rot(down)
    fractions = 1.0 - (1.0 - task.approach_rate) ** np.arange(n, dtype=np.float64)
    quats = _slerp(q_start, q_end, fractions)
    steps = tuple(
        pipeline.TrajectoryStep(
            index=i,
            pose_base=se3.RigidTransform(se3.rot_from_quat(quats[i]), positions[i]),
            gripper=float(grippers[i]),
        )
        for i in range(task.n_steps)
    )
    return pipeline.TrajectoryEpisode(
        episode_id=episode_id if episode_id is not None else f"synthetic-{seed:08d}",
        task=task.motion_family,
        instruction=f"{task.motion_family} motion in the tabletop workspace",
        cameras=tuple(cameras),
        steps=steps,
    )


def build_observation(
    pose_world: se3.RigidTransform,
    rig: CameraRig,
    view_onehot: np.ndarray | None = None,
) -> np.ndarray:
    """Observation features for one step as seen by one camera.

    Camera-frame end-effector pose (translation + canonical quaternion)
    concatenated with the projected pixel normalized by image size, plus an
    optional view-id one-hot block.  Raises BehindCameraError when the
    end-effector is not in front of the camera.
    """
    p_cam = se3.transform_pose(rig.extrinsics, pose_world)
    u, v = project(rig.intrinsics, p_cam.translation)
    quat = se3.quat_from_rot(p_cam.rotation)
    parts = [
        p_cam.translation,
        quat,
        np.array([u / rig.intrinsics.width, v / rig.intrinsics.height]),
    ]
    if view_onehot is not None:
        parts.append(np.asarray(view_onehot, dtype=np.float64))
    return np.concatenate(parts)


OBSERVATION_DIM = 9


def poly2_features(x: np.ndarray) -> np.ndarray:
    """Degree-2 polynomial expansion: [1, x_i, x_i * x_j for i <= j].

    Column order is fixed (bias, linear terms, then upper-triangle products
    row by row) so fitted weights are portable.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"features expect a 2-d array, got shape {x.shape}")
    n, d = x.shape
    cols = [np.ones((n, 1)), x]
    for i in range(d):
        cols.append(x[:, i : i + 1] * x[:, i:])
    return np.concatenate(cols, axis=1)


def poly2_dim(input_dim: int) -> int:
    return 1 + input_dim + input_dim * (input_dim + 1) // 2


@dataclass(frozen=True)
class RegressorModel:
    """Closed-form ridge regression over standardized degree-2 features.

    Inputs are standardized with the training mean and scale before the
    polynomial expansion so the ridge penalty weighs all feature directions
    comparably; the bias column is not penalized differently, it simply
    absorbs the target means of the standardized problem.
    """

    weights: np.ndarray
    ridge_lambda: float
    input_dim: int
    feature_mean: np.ndarray
    feature_scale: np.ndarray

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[1] != self.input_dim:
            raise ValueError(f"expected {self.input_dim} input features, got {x.shape[1]}")
        z = (x - self.feature_mean) / self.feature_scale
        return poly2_features(z) @ self.weights


# Condition number beyond which the normal equations count as degenerate.
DEGENERATE_COND = 1e12


def train_regressor(x: np.ndarray, y: np.ndarray, ridge_lambda: float) -> RegressorModel:
    """Solve the ridge normal equations over standardized degree-2 features.

    Deterministic: same data and lambda give the same weights.  Raises
    DegenerateFitError when the regularized normal matrix is still nearly
    singular rather than returning a silently unstable solution.
    """
    if ridge_lambda <= 0.0:
        raise ValueError(f"ridge_lambda must be positive, got {ridge_lambda}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mean = np.mean(x, axis=0)
    scale = np.std(x, axis=0)
    scale = np.where(scale < 1e-12, 1.0, scale)
    phi = poly2_features((x - mean) / scale)
    if phi.shape[0] < phi.shape[1]:
        raise DegenerateFitError(
            f"need at least {phi.shape[1]} samples for {x.shape[1]} input features, got {phi.shape[0]}"
        )
    gram = phi.T @ phi + ridge_lambda * np.eye(phi.shape[1])
    cond = float(np.linalg.cond(gram))
    if not np.isfinite(cond) or cond > DEGENERATE_COND:
        raise DegenerateFitError(
            f"normal matrix condition number {cond:.3e} exceeds {DEGENERATE_COND:.0e}"
        )
    weights = np.linalg.solve(gram, phi.T @ y)
    return RegressorModel(
        weights=weights,
        ridge_lambda=ridge_lambda,
        input_dim=x.shape[1],
        feature_mean=mean,
        feature_scale=scale,
    )


@dataclass(frozen=True)
class BenchConfig:
    """Everything a benchmark run depends on; all fields defaulted.

    pool_size viewpoints are sampled per seed; n_train_views of them render
    the training episodes and n_novel_views disjoint ones form the novel
    condition.  Perturbed views jitter each training view by up to
    perturb_rot_deg degrees and perturb_trans_m meters (recalibrated, i.e.
    the jittered extrinsics are used for recovery).  view_onehot appends
    per-training-view indicator features to the observation.
    """

    pool_size: int = 512
    n_train_views: int = 16
    n_novel_views: int = 4
    n_train_episodes: int = 12
    n_val_episodes: int = 8
    n_seeds: int = 10
    base_seed: int = 0
    ridge_lambda: float = 0.1
    perturb_rot_deg: float = 2.0
    perturb_trans_m: float = 0.02
    view_onehot: bool = False
    collision_views: int = 4
    pool: CameraPoolSpec = field(default_factory=CameraPoolSpec)
    task: SyntheticTaskSpec = field(default_factory=SyntheticTaskSpec)
    control_workspace_shift: tuple[float, float, float] = (0.0, 0.0, 1.55)

    def to_json_dict(self) -> dict:
        return {
            "pool_size": self.pool_size,
            "n_train_views": self.n_train_views,
            "n_novel_views": self.n_novel_views,
            "n_train_episodes": self.n_train_episodes,
            "n_val_episodes": self.n_val_episodes,
            "n_seeds": self.n_seeds,
            "base_seed": self.base_seed,
            "ridge_lambda": self.ridge_lambda,
            "perturb_rot_deg": self.perturb_rot_deg,
            "perturb_trans_m": self.perturb_trans_m,
            "view_onehot": self.view_onehot,
            "collision_views": self.collision_views,
            "pool": {
                "radius_range": list(self.pool.radius_range),
                "elevation_range": list(self.pool.elevation_range),
                "azimuth_range": list(self.pool.azimuth_range),
                "look_at": list(self.pool.look_at),
            },
            "task": {
                "workspace_lo": list(self.task.workspace_lo),
                "workspace_hi": list(self.task.workspace_hi),
                "n_steps": self.task.n_steps,
                "motion_family": self.task.motion_family,
                "noise_scale": self.task.noise_scale,
                "goal_jitter": self.task.goal_jitter,
                "approach_rate": self.task.approach_rate,
                "tilt_scale": self.task.tilt_scale,
                "lift_height": self.task.lift_height,
            },
            "control_workspace_shift": list(self.control_workspace_shift),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "BenchConfig":
        kwargs = {}
        simple = (
            "pool_size",
            "n_train_views",
            "n_novel_views",
            "n_train_episodes",
            "n_val_episodes",
            "n_seeds",
            "base_seed",
            "ridge_lambda",
            "perturb_rot_deg",
            "perturb_trans_m",
            "view_onehot",
            "collision_views",
        )
        for key in simple:
            if key in d:
                kwargs[key] = d[key]
        pool_kwargs = {}
        for key in ("radius_range", "elevation_range", "azimuth_range", "look_at"):
            if key in d.get("pool", {}):
                pool_kwargs[key] = tuple(d["pool"][key])
        task_kwargs = {}
        for key in (
            "workspace_lo",
            "workspace_hi",
            "n_steps",
            "motion_family",
            "noise_scale",
            "goal_jitter",
            "approach_rate",
            "tilt_scale",
            "lift_height",
        ):
            if key in d.get("task", {}):
                value = d["task"][key]
                task_kwargs[key] = tuple(value) if isinstance(value, list) else value
        if pool_kwargs:
            kwargs["pool"] = replace(CameraPoolSpec(), **pool_kwargs)
        if task_kwargs:
            kwargs["task"] = replace(SyntheticTaskSpec(), **task_kwargs)
        if "control_workspace_shift" in d:
            kwargs["control_workspace_shift"] = tuple(d["control_workspace_shift"])
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path) -> "BenchConfig":
        from pathlib import Path

        return cls.from_json_dict(json.loads(Path(path).read_text()))


CONDITIONS = ("seen", "perturbed", "novel")
ARMS = ("base", "camera")


@dataclass(frozen=True)
class SeedResult:
    seed: int
    mse: dict  # condition -> {"base": float, "camera": float}


@dataclass(frozen=True)
class BenchReport:
    """Per-seed MSE table, win counts, identity control, collision witness."""

    config: BenchConfig
    results: tuple[SeedResult, ...]
    win_counts: dict
    control: dict
    witness: dict

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json_dict(),
            "seeds": [
                {"seed": r.seed, "mse": {c: dict(r.mse[c]) for c in CONDITIONS}}
                for r in self.results
            ],
            "win_counts": dict(self.win_counts),
            "n_seeds": len(self.results),
            "control": dict(self.control),
            "witness": dict(self.witness),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    def to_table(self) -> str:
        """Aligned plain-text summary of the per-seed MSE comparison."""
        header = f"{'seed':>6} " + " ".join(
            f"{c + '/' + a:>16}" for c in CONDITIONS for a in ARMS
        )
        lines = [header, "-" * len(header)]
        for r in self.results:
            cells = " ".join(f"{r.mse[c][a]:>16.6e}" for c in CONDITIONS for a in ARMS)
            lines.append(f"{r.seed:>6} {cells}")
        lines.append("-" * len(header))
        wins = ", ".join(
            f"{c}: camera wins {self.win_counts[c]}/{len(self.results)}" for c in CONDITIONS
        )
        lines.append(wins)
        lines.append(
            "control (single camera, identity extrinsics): "
            f"base={self.control['mse_base']:.6e} camera={self.control['mse_camera']:.6e} "
            f"|diff|={self.control['abs_diff']:.3e}"
        )
        lines.append(
            f"witness: base-frame collision pairs={self.witness['base_collision_pairs']} "
            f"camera-frame collision pairs={self.witness['camera_collision_pairs']} "
            f"(views={self.witness['views_used']})"
        )
        return "\n".join(lines) + "\n"


def _perturb_rig(rig: CameraRig, rng: np.random.Generator, rot_deg: float, trans_m: float) -> CameraRig:
    """Small extrinsic jitter: the camera moved slightly and was recalibrated."""
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    angle = math.radians(rng.uniform(-rot_deg, rot_deg))
    half = 0.5 * angle
    dq = np.concatenate([[math.cos(half)], math.sin(half) * axis])
    delta = se3.RigidTransform(
        se3.rot_from_quat(dq), rng.uniform(-trans_m, trans_m, size=3)
    )
    return replace(rig, extrinsics=se3.compose(delta, rig.extrinsics))


def _dataset_rows(episodes, rigs, onehot_for=None, n_onehot: int = 0):
    """Observations plus paired base/camera targets for episode x rig rows.

    Returns (observations, base_targets, camera_targets, rig_index) with one
    row per (episode, step, rig).  onehot_for maps camera_id to a one-hot
    slot; ids not in the map (novel views) get an all-zero block.
    """
    obs_rows, base_rows, cam_rows, rig_idx = [], [], [], []
    for episode in episodes:
        base_samples = pipeline.expand_to_camera_targets(episode, pipeline.FRAME_BASE)
        actions = {s.step_index: s.action7 for s in base_samples}
        for r, rig in enumerate(rigs):
            ext = rig.extrinsics
            for step_index, action7 in actions.items():
                pose = episode.steps[step_index].pose_base
                onehot = None
                if n_onehot:
                    onehot = np.zeros(n_onehot)
                    slot = onehot_for.get(rig.camera_id) if onehot_for else None
                    if slot is not None:
                        onehot[slot] = 1.0
                obs_rows.append(build_observation(pose, rig, onehot))
                base_rows.append(action7)
                motion, grip = codec.decode_action(action7)
                cam_rows.append(codec.encode_action(se3.conjugate_action(ext, motion), grip))
                rig_idx.append(r)
    return (
        np.asarray(obs_rows),
        np.asarray(base_rows),
        np.asarray(cam_rows),
        np.asarray(rig_idx, dtype=np.int64),
    )


def _recover_rows(cam_pred: np.ndarray, rigs, rig_idx: np.ndarray) -> np.ndarray:
    """Vectorized inference-direction recovery of predicted camera actions."""
    rot_cam, t_cam, grip = batch.decode_batch(cam_pred)
    ext_rot = np.stack([r.extrinsics.rotation for r in rigs])[rig_idx]
    ext_t = np.stack([r.extrinsics.translation for r in rigs])[rig_idx]
    rot_w, t_w = batch.inverse_conjugate_batch(ext_rot, ext_t, rot_cam, t_cam)
    return batch.encode_batch(rot_w, t_w, grip)


def make_collision_pair(
    rig_a: CameraRig,
    rig_b: CameraRig,
    pose_a: se3.RigidTransform,
    action_a: se3.RigidTransform,
) -> tuple[se3.RigidTransform, se3.RigidTransform]:
    """World pose/action that look identical from rig_b as (pose_a, action_a) do from rig_a.

    pose_b = T_b^-1 T_a pose_a gives byte-equal camera-frame poses, hence
    equal observations; the action is chosen so the camera-frame targets
    also agree, which forces the base-frame targets to disagree whenever
    the two extrinsics differ.
    """
    t_ab = se3.compose(se3.inverse(rig_b.extrinsics), rig_a.extrinsics)
    pose_b = se3.compose(t_ab, pose_a)
    action_b = se3.conjugate_action(t_ab, action_a)
    return pose_b, action_b


def observation_collision_report(
    observations: np.ndarray,
    targets: np.ndarray,
    bucket_decimals: int = 6,
    target_tol: float = 1e-6,
) -> list[tuple[int, int]]:
    """Pairs of rows with bucket-identical observations but differing targets."""
    buckets: dict[bytes, list[int]] = {}
    rounded = np.round(observations, bucket_decimals)
    for i in range(rounded.shape[0]):
        buckets.setdefault(rounded[i].tobytes(), []).append(i)
    collisions = []
    for rows in buckets.values():
        for a_pos in range(len(rows)):
            for b_pos in range(a_pos + 1, len(rows)):
                i, j = rows[a_pos], rows[b_pos]
                if np.max(np.abs(targets[i] - targets[j])) > target_tol:
                    collisions.append((i, j))
    return collisions


def _witness(config: BenchConfig, rigs, episode) -> dict:
    """Construct the ill-posedness witness over >= 4 distinct views.

    Takes a probe (pose, action) from a real episode, builds its collision
    partners across view pairs, and buckets observations against base- and
    camera-frame targets.  The base-frame dataset must show at least one
    conflicting pair; the camera-frame dataset none.
    """
    views = list(rigs[: config.collision_views])
    if len(views) < 4:
        raise ValueError("collision witness needs at least 4 views")
    probe_pose = episode.steps[0].pose_base
    probe_action, probe_grip = (
        se3.action_from_pose_pair(episode.steps[0].pose_base, episode.steps[1].pose_base),
        episode.steps[1].gripper,
    )

    obs_rows, base_rows, cam_rows = [], [], []

    def add(pose, action, rig):
        obs_rows.append(build_observation(pose, rig))
        base_rows.append(codec.encode_action(action, probe_grip))
        cam_rows.append(
            codec.encode_action(se3.conjugate_action(rig.extrinsics, action), probe_grip)
        )

    add(probe_pose, probe_action, views[0])
    for other in views[1:]:
        pose_b, action_b = make_collision_pair(views[0], other, probe_pose, probe_action)
        add(pose_b, action_b, other)
    # Plus ordinary rows so the camera-frame scan covers real data too.
    for rig in views:
        for step, nxt in zip(episode.steps, episode.steps[1:]):
            action = se3.action_from_pose_pair(step.pose_base, nxt.pose_base)
            add(step.pose_base, action, rig)

    obs = np.asarray(obs_rows)
    base_collisions = observation_collision_report(obs, np.asarray(base_rows))
    cam_collisions = observation_collision_report(obs, np.asarray(cam_rows))
    return {
        "base_collision_pairs": len(base_collisions),
        "camera_collision_pairs": len(cam_collisions),
        "views_used": len(views),
    }


def _mse(pred: np.ndarray, truth: np.ndarray) -> float:
    return float(np.mean((pred - truth) ** 2))


def run_seed(config: BenchConfig, seed: int) -> SeedResult:
    """One full comparison at one seed; see run_benchmark."""
    child = np.random.SeedSequence(seed).generate_state(8)
    pool = sample_camera_pool(replace(config.pool, pool_size=config.pool_size, seed=int(child[0])))
    rng = np.random.default_rng(int(child[1]))
    picked = rng.choice(config.pool_size, config.n_train_views + config.n_novel_views, replace=False)
    train_rigs = [pool[i] for i in picked[: config.n_train_views]]
    novel_rigs = [pool[i] for i in picked[config.n_train_views :]]

    check_workspace_visible(config.task, train_rigs + novel_rigs)

    episode_seeds = np.random.SeedSequence(int(child[2])).generate_state(
        config.n_train_episodes + config.n_val_episodes
    )
    episodes = [
        gen_trajectory(
            config.task, int(s), cameras=train_rigs, episode_id=f"bench-{seed}-{k:04d}"
        )
        for k, s in enumerate(episode_seeds)
    ]
    train_eps = episodes[: config.n_train_episodes]
    val_eps = episodes[config.n_train_episodes :]

    n_onehot = config.n_train_views if config.view_onehot else 0
    onehot_for = {rig.camera_id: i for i, rig in enumerate(train_rigs)} if n_onehot else None

    obs, y_base, y_cam, _ = _dataset_rows(train_eps, train_rigs, onehot_for, n_onehot)
    models = {}
    for arm, targets in (("base", y_base), ("camera", y_cam)):
        try:
            models[arm] = train_regressor(obs, targets, config.ridge_lambda)
        except DegenerateFitError as exc:
            raise BenchArmError(f"seed {seed}: {arm} arm failed to train: {exc}") from exc

    perturb_rng = np.random.default_rng(int(child[3]))
    perturbed_rigs = [
        _perturb_rig(r, perturb_rng, config.perturb_rot_deg, config.perturb_trans_m)
        for r in train_rigs
    ]
    conditions = {
        "seen": train_rigs,
        "perturbed": perturbed_rigs,
        "novel": novel_rigs,
    }
    mse: dict[str, dict[str, float]] = {}
    for name, rigs in conditions.items():
        v_obs, v_base, _, v_idx = _dataset_rows(val_eps, rigs, onehot_for, n_onehot)
        base_pred = models["base"].predict(v_obs)
        cam_pred = models["camera"].predict(v_obs)
        cam_world = _recover_rows(cam_pred, rigs, v_idx)
        mse[name] = {
            "base": _mse(base_pred, v_base),
            "camera": _mse(cam_world, v_base),
        }
    return SeedResult(seed=seed, mse=mse)


def run_identity_control(config: BenchConfig, seed: int) -> dict:
    """Single camera with identity extrinsics: both arms must coincide.

    The workspace is shifted in front of the identity camera so the scene
    stays inside the frustum; with T = I the camera-frame targets equal the
    base-frame targets, so models and MSEs agree to rounding.
    """
    shift = np.asarray(config.control_workspace_shift)
    task = replace(
        config.task,
        workspace_lo=tuple(np.asarray(config.task.workspace_lo) + shift),
        workspace_hi=tuple(np.asarray(config.task.workspace_hi) + shift),
    )
    rig = CameraRig(
        camera_id="identity",
        intrinsics=DEFAULT_INTRINSICS,
        extrinsics=se3.RigidTransform.identity(),
    )
    check_workspace_visible(task, [rig])
    episode_seeds = np.random.SeedSequence(seed).generate_state(
        config.n_train_episodes + config.n_val_episodes
    )
    episodes = [
        gen_trajectory(task, int(s), cameras=[rig], episode_id=f"control-{seed}-{k:04d}")
        for k, s in enumerate(episode_seeds)
    ]
    train_eps = episodes[: config.n_train_episodes]
    val_eps = episodes[config.n_train_episodes :]
    obs, y_base, y_cam, _ = _dataset_rows(train_eps, [rig])
    model_base = train_regressor(obs, y_base, config.ridge_lambda)
    model_cam = train_regressor(obs, y_cam, config.ridge_lambda)
    v_obs, v_base, _, v_idx = _dataset_rows(val_eps, [rig])
    base_pred = model_base.predict(v_obs)
    cam_world = _recover_rows(model_cam.predict(v_obs), [rig], v_idx)
    mse_base = _mse(base_pred, v_base)
    mse_cam = _mse(cam_world, v_base)
    return {
        "mse_base": mse_base,
        "mse_camera": mse_cam,
        "abs_diff": abs(mse_base - mse_cam),
    }


def run_benchmark(config: BenchConfig) -> BenchReport:
    """The full comparison: n_seeds independent runs plus control and witness."""
    seeds = [config.base_seed + k for k in range(config.n_seeds)]
    results = tuple(run_seed(config, s) for s in seeds)
    win_counts = {
        c: sum(1 for r in results if r.mse[c]["camera"] < r.mse[c]["base"]) for c in CONDITIONS
    }
    control = run_identity_control(config, config.base_seed)

    child = np.random.SeedSequence(config.base_seed).generate_state(8)
    pool = sample_camera_pool(replace(config.pool, pool_size=config.pool_size, seed=int(child[0])))
    witness_episode = gen_trajectory(
        config.task,
        int(child[5]),
        cameras=pool[: config.collision_views],
        episode_id="witness",
    )
    witness = _witness(config, pool, witness_episode)

    return BenchReport(
        config=config,
        results=results,
        win_counts=win_counts,
        control=control,
        witness=witness,
    )
