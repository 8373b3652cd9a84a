"""camact: camera-frame action toolkit.

Converts end-effector poses and delta actions between robot-base and
third-person camera coordinate frames, encodes them as continuous or
discretized 7-dof targets, batch-converts multi-view trajectory datasets,
and ships a controlled synthetic benchmark comparing base-frame against
camera-frame prediction targets.
"""

from .se3 import (
    ActionMatrix,
    Pose,
    RigidTransform,
    Transform,
    action_from_pose_pair,
    compose,
    conjugate_action,
    inverse,
    inverse_conjugate_action,
    quat_from_rot,
    rot_from_quat,
    rot_from_rpy,
    rpy_from_rot,
    transform_pose,
)
from .codec import (
    BinConfig,
    NormalizationStats,
    decode_action,
    denormalize,
    dequantize,
    encode_action,
    fit_normalization,
    normalize,
    quantize,
)
from .camera import BehindCameraError, CameraRig, Intrinsics, project, unproject, validate_rig
from .pipeline import (
    DatasetManifest,
    TrainingSample,
    TrajectoryEpisode,
    TrajectoryStep,
    balance_tasks,
    derive_world_actions,
    expand_to_camera_targets,
    load_episode,
    read_episode,
    recover_world_action,
    split_dataset,
    validate_episode,
    write_episode,
)
from .bench import BenchConfig, BenchReport, CameraPoolSpec, SyntheticTaskSpec, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "ActionMatrix",
    "BehindCameraError",
    "BenchConfig",
    "BenchReport",
    "BinConfig",
    "CameraPoolSpec",
    "CameraRig",
    "DatasetManifest",
    "Intrinsics",
    "NormalizationStats",
    "Pose",
    "RigidTransform",
    "SyntheticTaskSpec",
    "TrainingSample",
    "TrajectoryEpisode",
    "TrajectoryStep",
    "Transform",
    "action_from_pose_pair",
    "balance_tasks",
    "compose",
    "conjugate_action",
    "decode_action",
    "denormalize",
    "dequantize",
    "derive_world_actions",
    "encode_action",
    "expand_to_camera_targets",
    "fit_normalization",
    "inverse",
    "inverse_conjugate_action",
    "load_episode",
    "normalize",
    "project",
    "quantize",
    "quat_from_rot",
    "read_episode",
    "recover_world_action",
    "rot_from_quat",
    "rot_from_rpy",
    "rpy_from_rot",
    "run_benchmark",
    "split_dataset",
    "transform_pose",
    "unproject",
    "validate_episode",
    "validate_rig",
    "write_episode",
]
