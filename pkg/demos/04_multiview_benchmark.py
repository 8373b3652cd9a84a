#!/usr/bin/env python3
"""Run a reduced frame-comparison benchmark and print the table.

Two ridge regressors see identical observations (end-effector pose in the
observing camera's frame plus its pixel); one predicts base-frame actions,
the other camera-frame actions.  Camera-frame targets keep the mapping
observation -> action consistent across viewpoints, which shows up as
lower validation MSE, most visibly on camera views never seen in training.

The full-size run behind the acceptance criterion is
`camact bench --seed 0` (about ten seconds); this demo uses a smaller
configuration to stay snappy.
"""

from dataclasses import replace

from camact.bench import BenchConfig, run_benchmark

config = replace(
    BenchConfig(),
    pool_size=128,
    n_train_views=10,
    n_novel_views=3,
    n_train_episodes=8,
    n_val_episodes=4,
    n_seeds=5,
)

report = run_benchmark(config)
print(report.to_table())

print("reading the table:")
print(" - 'seen' scores validation trajectories from the training cameras;")
print(" - 'perturbed' jitters those cameras (recalibrated extrinsics);")
print(" - 'novel' uses held-out cameras.")
print()
print("the identity-extrinsic control shows both arms coincide when the")
print("camera frame IS the base frame, so the gap everywhere else comes")
print("from the choice of prediction frame, not from the machinery.")
print()
print("the witness rows certify the ill-posedness argument on data: the")
print("base-frame dataset contains identical observations with conflicting")
print("targets; the camera-frame dataset cannot.")
