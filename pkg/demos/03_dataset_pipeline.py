#!/usr/bin/env python3
"""End-to-end dataset pass: generate episodes, convert, split, balance.

Mirrors what the CLI does (`camact gen-synthetic | convert | split |
balance`) through the library API, in a temp directory.
"""

import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from camact import pipeline
from camact.bench import BenchConfig, CameraPoolSpec, gen_trajectory, sample_camera_pool

rng_pool = sample_camera_pool(CameraPoolSpec(pool_size=64, seed=11))
task_a = BenchConfig().task
task_b = replace(task_a, motion_family="reach-grasp-lift")

work = Path(tempfile.mkdtemp(prefix="camact-demo-"))
episode_dir = work / "episodes"
episode_dir.mkdir()

# 12 reach + 6 reach-grasp-lift episodes, each watched by 8 pool cameras.
chooser = np.random.default_rng(5)
paths = []
for k in range(18):
    rigs = [rng_pool[i] for i in sorted(chooser.choice(64, 8, replace=False))]
    task = task_a if k % 3 else task_b
    episode = gen_trajectory(task, seed=1000 + k, cameras=rigs, episode_id=f"demo-{k:03d}")
    path = episode_dir / f"{episode.episode_id}.jsonl"
    pipeline.write_episode(path, episode)
    paths.append(path)
print(f"wrote {len(paths)} episodes to {episode_dir}")

# Convert to camera-frame discrete training samples, fitting stats on the fly.
out_dir = work / "samples"
manifest = pipeline.convert_episodes(
    paths, out_dir, frame="camera", discrete=True, fit_stats=True, jobs=2
)
total = sum(e["sample_count"] for e in manifest["episodes"])
print(f"converted to {total} camera-frame samples "
      f"({manifest['episodes'][0]['sample_count']} per episode), stats at "
      f"{out_dir / manifest['stats_path']}")

one = pipeline.read_samples(out_dir / manifest["episodes"][0]["samples_path"])[0]
print("first sample:", one.episode_id, one.camera_id, one.step_index,
      "tokens:", one.tokens)

# Episode-level split: all views of a trajectory stay on one side.
dataset = pipeline.build_manifest(paths)
split = pipeline.split_dataset(dataset, ratio=(5, 1), seed=0)
train = split.entries_in_split("train")
val = split.entries_in_split("val")
print(f"\nsplit 5:1 -> {len(train)} train / {len(val)} val episodes")
for name in ("reach", "reach-grasp-lift"):
    both = {split.split[e.episode_id] for e in dataset.entries if e.task == name}
    print(f"  task {name!r} present in: {sorted(both)}")

# Balance the task families by replicating the minority's episodes.
balanced = pipeline.balance_tasks(split)
counts = {}
for entry in balanced.entries:
    if balanced.split[entry.episode_id] != "train":
        continue
    counts.setdefault(entry.task, 0)
    counts[entry.task] += entry.sample_count * balanced.replication[entry.episode_id]
print("\neffective train sample counts after balancing:", counts)

# Round trip: every camera-frame sample decodes back to one world action.
episode = pipeline.load_episode(paths[0])
rig_by_id = {r.camera_id: r for r in episode.cameras}
samples = pipeline.expand_to_camera_targets(episode, "camera")
base = {s.step_index: s.action7 for s in pipeline.expand_to_camera_targets(episode, "base")}
worst = 0.0
for sample in samples:
    world = pipeline.recover_world_action(sample.action7, rig_by_id[sample.camera_id].extrinsics)
    worst = max(worst, float(np.max(np.abs(world - base[sample.step_index]))))
print(f"\nmulti-view recovery spread across {len(samples)} samples: {worst:.2e}")
