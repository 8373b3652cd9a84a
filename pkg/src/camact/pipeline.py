"""Batch dataset engine for multi-view trajectory conversion.

Ingests robot-base-frame episodes, derives per-step delta actions, expands
them to per-camera camera-frame training targets (training direction),
recovers base-frame actions from camera-frame vectors (inference direction),
and manages dataset manifests: split and balance.

Episode file format (.jsonl), schema v1:
  line 1   {"type": "header", "episode_id", "task", "instruction",
            "cameras": [{"camera_id", "intrinsics": {fx, fy, cx, cy,
            width, height}, "extrinsics": {"quat_wxyz": [4],
            "translation_m": [3]}}]}
  line 2+  {"type": "step", "index", "pose_base": {"quat_wxyz": [4],
            "translation_m": [3]}, "gripper"}

Sample output is one TrainingSample JSON object per line; the manifest is a
single JSON document.  Floats serialize at full round-trip precision, and
conversion output is byte-identical for a given input regardless of worker
count: episodes are independent work units and ordering follows the input
list, never completion order.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import codec, se3
from .camera import CameraRig, validate_rig

FRAME_BASE = "base"
FRAME_CAMERA = "camera"
SPLIT_TRAIN = "train"
SPLIT_VAL = "val"


class EpisodeFormatError(ValueError):
    """Episode file failed to parse; message carries path and line number."""


class EpisodeValidationError(ValueError):
    """Episode parsed but violates invariants."""

    def __init__(self, episode_id: str, violations: list[str]):
        self.episode_id = episode_id
        self.violations = violations
        super().__init__(f"episode {episode_id!r} invalid: {', '.join(violations)}")


@dataclass(frozen=True)
class TrajectoryStep:
    index: int
    pose_base: se3.RigidTransform
    gripper: float


@dataclass(frozen=True)
class TrajectoryEpisode:
    """One demonstration: base-frame pose sequence plus its camera rigs."""

    episode_id: str
    task: str
    instruction: str
    cameras: tuple[CameraRig, ...]
    steps: tuple[TrajectoryStep, ...]


@dataclass(frozen=True)
class TrainingSample:
    """One (observation pointer, frame-tagged action target) record.

    camera_id is None for base-frame samples; tokens are present exactly
    when the sample was emitted in discrete mode.
    """

    episode_id: str
    camera_id: str | None
    step_index: int
    frame_tag: str
    action7: np.ndarray
    tokens: np.ndarray | None
    observation_ref: str

    def to_json_dict(self) -> dict:
        return {
            "episode_id": self.episode_id,
            "camera_id": self.camera_id,
            "step_index": self.step_index,
            "frame_tag": self.frame_tag,
            "action7": [float(x) for x in self.action7],
            "tokens": None if self.tokens is None else [int(t) for t in self.tokens],
            "observation_ref": self.observation_ref,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "TrainingSample":
        tokens = d.get("tokens")
        return cls(
            episode_id=str(d["episode_id"]),
            camera_id=d.get("camera_id"),
            step_index=int(d["step_index"]),
            frame_tag=str(d["frame_tag"]),
            action7=np.asarray(d["action7"], dtype=np.float64),
            tokens=None if tokens is None else np.asarray(tokens, dtype=np.int64),
            observation_ref=str(d["observation_ref"]),
        )


@dataclass(frozen=True)
class ManifestEntry:
    episode_id: str
    path: str
    task: str
    step_count: int
    camera_count: int

    @property
    def sample_count(self) -> int:
        """Camera-mode samples this episode contributes per replication."""
        return (self.step_count - 1) * self.camera_count


@dataclass(frozen=True)
class DatasetManifest:
    """Episode inventory plus split assignment and balancing replication."""

    entries: tuple[ManifestEntry, ...]
    split: dict[str, str] = field(default_factory=dict)
    replication: dict[str, int] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def episode_ids(self) -> list[str]:
        return [e.episode_id for e in self.entries]

    def entries_in_split(self, name: str) -> list[ManifestEntry]:
        return [e for e in self.entries if self.split.get(e.episode_id) == name]

    def to_json_dict(self) -> dict:
        return {
            "episodes": [
                {
                    "episode_id": e.episode_id,
                    "path": e.path,
                    "task": e.task,
                    "step_count": e.step_count,
                    "camera_count": e.camera_count,
                }
                for e in self.entries
            ],
            "split": {e.episode_id: self.split[e.episode_id] for e in self.entries if e.episode_id in self.split},
            "replication": {
                e.episode_id: self.replication[e.episode_id]
                for e in self.entries
                if e.episode_id in self.replication
            },
            "meta": self.meta,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DatasetManifest":
        entries = tuple(
            ManifestEntry(
                episode_id=str(e["episode_id"]),
                path=str(e["path"]),
                task=str(e["task"]),
                step_count=int(e["step_count"]),
                camera_count=int(e["camera_count"]),
            )
            for e in d["episodes"]
        )
        return cls(
            entries=entries,
            split=dict(d.get("split", {})),
            replication={k: int(v) for k, v in d.get("replication", {}).items()},
            meta=dict(d.get("meta", {})),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _pose_from_json(d: dict, where: str) -> se3.RigidTransform:
    try:
        quat = np.asarray(d["quat_wxyz"], dtype=np.float64)
        trans = np.asarray(d["translation_m"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise EpisodeFormatError(f"{where}: bad pose fields ({exc})") from exc
    if quat.shape != (4,):
        raise EpisodeFormatError(f"{where}: quat_wxyz must have 4 entries")
    if trans.shape != (3,):
        raise EpisodeFormatError(f"{where}: translation_m must have 3 entries")
    try:
        rot = se3.rot_from_quat(se3.canonical_quat(quat))
    except ValueError as exc:
        raise EpisodeFormatError(f"{where}: {exc}") from exc
    return se3.RigidTransform(rot, trans)


def _pose_to_json(p: se3.RigidTransform) -> dict:
    quat, trans = p.as_quat_trans()
    return {"quat_wxyz": quat.tolist(), "translation_m": trans.tolist()}


def read_episode(path) -> TrajectoryEpisode:
    """Parse a .jsonl episode file; quaternions are canonicalized on read.

    Raises EpisodeFormatError with the offending line number on malformed
    input.  Invariants are not checked here; see validate_episode.
    """
    path = Path(path)
    header = None
    steps: list[TrajectoryStep] = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise EpisodeFormatError(f"{where}: invalid JSON ({exc.msg})") from exc
            kind = record.get("type")
            if lineno == 1:
                if kind != "header":
                    raise EpisodeFormatError(f"{where}: first line must be the header record")
                try:
                    cameras = tuple(CameraRig.from_json_dict(c) for c in record["cameras"])
                    header = {
                        "episode_id": str(record["episode_id"]),
                        "task": str(record["task"]),
                        "instruction": str(record["instruction"]),
                        "cameras": cameras,
                    }
                except (KeyError, TypeError, ValueError) as exc:
                    raise EpisodeFormatError(f"{where}: bad header field ({exc})") from exc
            elif kind == "step":
                try:
                    index = int(record["index"])
                    gripper = float(record["gripper"])
                except (KeyError, TypeError, ValueError) as exc:
                    raise EpisodeFormatError(f"{where}: bad step field ({exc})") from exc
                pose = _pose_from_json(record.get("pose_base", {}), where)
                steps.append(TrajectoryStep(index=index, pose_base=pose, gripper=gripper))
            else:
                raise EpisodeFormatError(f"{where}: unknown record type {kind!r}")
    if header is None:
        raise EpisodeFormatError(f"{path}: empty file, expected a header record")
    return TrajectoryEpisode(steps=tuple(steps), **header)


def write_episode(path, episode: TrajectoryEpisode) -> None:
    """Serialize an episode to the .jsonl schema at full float precision."""
    lines = [
        json.dumps(
            {
                "type": "header",
                "episode_id": episode.episode_id,
                "task": episode.task,
                "instruction": episode.instruction,
                "cameras": [c.to_json_dict() for c in episode.cameras],
            }
        )
    ]
    for step in episode.steps:
        lines.append(
            json.dumps(
                {
                    "type": "step",
                    "index": step.index,
                    "pose_base": _pose_to_json(step.pose_base),
                    "gripper": step.gripper,
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def validate_episode(episode: TrajectoryEpisode) -> list[str]:
    """All violated episode invariants by name; empty list means valid."""
    violations = []
    if not episode.episode_id:
        violations.append("episode_id_empty")
    if len(episode.steps) < 2:
        violations.append("too_few_steps")
    if not episode.cameras:
        violations.append("no_cameras")
    seen_ids = set()
    for rig in episode.cameras:
        if rig.camera_id in seen_ids:
            violations.append(f"duplicate_camera_id:{rig.camera_id}")
        seen_ids.add(rig.camera_id)
        for bad in validate_rig(rig):
            violations.append(f"camera:{rig.camera_id}:{bad}")
    for position, step in enumerate(episode.steps):
        if step.index != position:
            violations.append(f"nonmonotone_step_index:{position}")
            break
    for step in episode.steps:
        if not 0.0 <= step.gripper <= 1.0:
            violations.append(f"gripper_out_of_range:{step.index}")
        for bad in step.pose_base.validate():
            violations.append(f"step:{step.index}:{bad}")
    return violations


def load_episode(path) -> TrajectoryEpisode:
    """read_episode + validate_episode, raising on any violation."""
    episode = read_episode(path)
    violations = validate_episode(episode)
    if violations:
        raise EpisodeValidationError(episode.episode_id, violations)
    return episode


def derive_world_actions(
    episode: TrajectoryEpisode,
) -> list[tuple[se3.RigidTransform, float]]:
    """Per-step base-frame delta actions: action[i] = pose[i+1] @ pose[i]^-1.

    N steps yield exactly N-1 actions.  action[i] carries step i+1's gripper
    (command the next state).
    """
    actions = []
    for current, nxt in zip(episode.steps, episode.steps[1:]):
        motion = se3.action_from_pose_pair(current.pose_base, nxt.pose_base)
        actions.append((motion, nxt.gripper))
    return actions


def _observation_ref(episode_id: str, camera_id: str | None, step_index: int) -> str:
    return f"{episode_id}/{camera_id if camera_id is not None else 'base'}/{step_index:06d}"


def expand_to_camera_targets(
    episode: TrajectoryEpisode,
    frame: str = FRAME_CAMERA,
    *,
    discrete: bool = False,
    stats: codec.NormalizationStats | None = None,
    bins: codec.BinConfig | None = None,
) -> list[TrainingSample]:
    """Expand an episode into frame-tagged training samples.

    Camera mode conjugates each world action into every rig's frame and
    emits (N-1)*K samples; base mode emits the N-1 world actions once.
    Discrete mode additionally attaches bin tokens, which requires stats.
    """
    if frame not in (FRAME_BASE, FRAME_CAMERA):
        raise ValueError(f"frame must be 'base' or 'camera', got {frame!r}")
    if discrete and stats is None:
        raise ValueError("discrete mode requires NormalizationStats")
    bin_config = bins if bins is not None else codec.BinConfig()

    actions = derive_world_actions(episode)
    samples: list[TrainingSample] = []

    def emit(camera_id: str | None, step_index: int, motion: se3.RigidTransform, gripper: float):
        action7 = codec.encode_action(motion, gripper)
        tokens = codec.tokenize_action(action7, stats, bin_config) if discrete else None
        samples.append(
            TrainingSample(
                episode_id=episode.episode_id,
                camera_id=camera_id,
                step_index=step_index,
                frame_tag=FRAME_CAMERA if camera_id is not None else FRAME_BASE,
                action7=action7,
                tokens=tokens,
                observation_ref=_observation_ref(episode.episode_id, camera_id, step_index),
            )
        )

    for step_index, (motion, gripper) in enumerate(actions):
        if frame == FRAME_BASE:
            emit(None, step_index, motion, gripper)
        else:
            for rig in episode.cameras:
                bad = rig.extrinsics.validate()
                if bad:
                    raise ValueError(f"rig {rig.camera_id!r} invalid: {', '.join(bad)}")
                emit(rig.camera_id, step_index, se3.conjugate_action(rig.extrinsics, motion), gripper)
    return samples


def recover_world_action(v_cam, t: se3.RigidTransform) -> np.ndarray:
    """Inference direction: camera-frame 7-vector back to the base frame."""
    motion, gripper = codec.decode_action(v_cam)
    return codec.encode_action(se3.inverse_conjugate_action(t, motion), gripper)


def write_samples(path, samples: list[TrainingSample]) -> None:
    lines = [json.dumps(s.to_json_dict()) for s in samples]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_samples(path) -> list[TrainingSample]:
    out = []
    with Path(path).open() as fh:
        for raw in fh:
            raw = raw.strip()
            if raw:
                out.append(TrainingSample.from_json_dict(json.loads(raw)))
    return out


def build_manifest(paths, validate: bool = True) -> DatasetManifest:
    """Scan episode files into a manifest, preserving the given order."""
    entries = []
    for path in paths:
        episode = load_episode(path) if validate else read_episode(path)
        entries.append(
            ManifestEntry(
                episode_id=episode.episode_id,
                path=str(path),
                task=episode.task,
                step_count=len(episode.steps),
                camera_count=len(episode.cameras),
            )
        )
    ids = [e.episode_id for e in entries]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate episode ids across files: {', '.join(dupes)}")
    return DatasetManifest(entries=tuple(entries))


def split_dataset(
    manifest: DatasetManifest,
    ratio: tuple[int, int] = (19, 1),
    seed: int = 0,
    stratify: bool = True,
) -> DatasetManifest:
    """Assign every episode to train or val at episode granularity.

    All views and steps of an episode share its split, so no trajectory
    leaks across the boundary.  With stratify, every task family with at
    least 2 episodes lands in both splits; single-episode tasks go to
    train.  Deterministic for a fixed seed.
    """
    train_part, val_part = ratio
    if train_part <= 0 or val_part <= 0:
        raise ValueError(f"ratio parts must be positive, got {ratio}")
    if len(manifest.entries) < 2:
        raise ValueError("cannot split fewer than 2 episodes")
    val_fraction = val_part / (train_part + val_part)
    rng = np.random.default_rng(seed)
    split: dict[str, str] = {}

    if stratify:
        by_task: dict[str, list[str]] = {}
        for entry in manifest.entries:
            by_task.setdefault(entry.task, []).append(entry.episode_id)
        groups = [by_task[task] for task in sorted(by_task)]
    else:
        groups = [[e.episode_id for e in manifest.entries]]

    for ids in groups:
        ids = sorted(ids)
        rng.shuffle(ids)
        n = len(ids)
        if n == 1:
            n_val = 0
        else:
            n_val = int(np.floor(n * val_fraction + 0.5))
            n_val = min(n - 1, max(1, n_val))
        for episode_id in ids[:n_val]:
            split[episode_id] = SPLIT_VAL
        for episode_id in ids[n_val:]:
            split[episode_id] = SPLIT_TRAIN

    meta = dict(manifest.meta)
    meta["split"] = {
        "ratio": [train_part, val_part],
        "seed": seed,
        "stratify": stratify,
    }
    return replace(manifest, split=split, meta=meta)


def balance_tasks(manifest: DatasetManifest) -> DatasetManifest:
    """Set per-episode replication so every task matches the largest task.

    Replication counts rise round-robin (episodes in id order) until a
    task's effective sample count reaches the maximum task's count; the
    overshoot stays below one episode's worth of samples.  Only train-split
    episodes are considered when a split assignment exists.
    """
    if not manifest.entries:
        raise ValueError("manifest has no episodes")
    considered = (
        [e for e in manifest.entries if manifest.split.get(e.episode_id) == SPLIT_TRAIN]
        if manifest.split
        else list(manifest.entries)
    )
    by_task: dict[str, list[ManifestEntry]] = {}
    for entry in considered:
        by_task.setdefault(entry.task, []).append(entry)

    replication = {e.episode_id: 1 for e in manifest.entries}
    if not by_task:
        return replace(manifest, replication=replication)

    totals = {task: sum(e.sample_count for e in entries) for task, entries in by_task.items()}
    target = max(totals.values())
    for task in sorted(by_task):
        entries = sorted(by_task[task], key=lambda e: e.episode_id)
        total = totals[task]
        cursor = 0
        while total < target:
            entry = entries[cursor % len(entries)]
            replication[entry.episode_id] += 1
            total += entry.sample_count
            cursor += 1
    meta = dict(manifest.meta)
    meta["balance"] = {"target_samples_per_task": target}
    return replace(manifest, replication=replication, meta=meta)


@dataclass(frozen=True)
class ConversionResult:
    episode_id: str
    samples_path: str
    sample_count: int
    sha256: str


def _convert_one(args) -> ConversionResult:
    episode_path, out_dir, frame, discrete, stats_dict, bins = args
    episode = load_episode(episode_path)
    stats = codec.NormalizationStats.from_json_dict(stats_dict) if stats_dict else None
    samples = expand_to_camera_targets(
        episode,
        frame,
        discrete=discrete,
        stats=stats,
        bins=codec.BinConfig(bins),
    )
    name = f"{episode.episode_id}.samples.jsonl"
    out_path = Path(out_dir) / name
    write_samples(out_path, samples)
    digest = hashlib.sha256(out_path.read_bytes()).hexdigest()
    return ConversionResult(
        episode_id=episode.episode_id,
        samples_path=name,
        sample_count=len(samples),
        sha256=digest,
    )


def collect_action_vectors(paths, frame: str) -> np.ndarray:
    """All frame-converted action 7-vectors across episodes, input order."""
    rows = []
    for path in paths:
        episode = load_episode(path)
        for sample in expand_to_camera_targets(episode, frame):
            rows.append(sample.action7)
    return np.asarray(rows, dtype=np.float64)


def convert_episodes(
    paths,
    out_dir,
    frame: str = FRAME_CAMERA,
    *,
    discrete: bool = False,
    stats: codec.NormalizationStats | None = None,
    fit_stats: bool = False,
    q_low: float = 0.01,
    q_high: float = 0.99,
    bins: int = 256,
    jobs: int = 1,
) -> dict:
    """Convert many episode files to per-episode sample files.

    Episodes are independent work units; with jobs > 1 they convert in a
    process pool.  Output bytes depend only on the inputs, never on the
    degree of parallelism.  Returns the conversion manifest (also written
    to out_dir/conversion.json); fitted stats land in out_dir/stats.json.
    """
    paths = [str(p) for p in paths]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if discrete and stats is None and not fit_stats:
        raise ValueError("discrete mode requires stats or fit_stats=True")

    stats_path = None
    if discrete and fit_stats:
        vectors = collect_action_vectors(paths, frame)
        if vectors.shape[0] < 2:
            raise ValueError("need at least 2 actions to fit normalization stats")
        stats = codec.fit_normalization(vectors, q_low=q_low, q_high=q_high, frame=frame)
        stats_path = out_dir / "stats.json"
        stats.save(stats_path)

    work = [
        (path, str(out_dir), frame, discrete, stats.to_json_dict() if stats else None, bins)
        for path in paths
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_convert_one, work))
    else:
        results = [_convert_one(w) for w in work]

    # Paths inside the manifest are relative to out_dir so identical inputs
    # give identical bytes no matter where the output lands.
    manifest = {
        "frame": frame,
        "discrete": discrete,
        "bins": bins if discrete else None,
        "stats_path": stats_path.name if stats_path else None,
        "episodes": [
            {
                "episode_id": r.episode_id,
                "samples_path": r.samples_path,
                "sample_count": r.sample_count,
                "sha256": r.sha256,
            }
            for r in results
        ],
    }
    (out_dir / "conversion.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
