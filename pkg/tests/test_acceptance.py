"""Acceptance suite: every release criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  Each test is independent and pins the tolerances explicitly.
"""

import hashlib
import json
import time
from dataclasses import replace

import numpy as np
import pytest

from camact import batch, bench, cli, codec, pipeline, se3
from camact.camera import BehindCameraError, Intrinsics, project, unproject


def report(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")


class TestTransformRoundtrip:
    def test_hundred_thousand_pairs_under_tolerance_and_time(self):
        # camera -> base -> camera over 1e5 random (action, extrinsic)
        # pairs: worst errors below 1e-9, wall clock below 5 s.
        start = time.perf_counter()
        result = batch.roundtrip_check(100_000, seed=2024, tolerance=1e-9)
        elapsed = time.perf_counter() - start
        passed = (
            result.max_translation_error < 1e-9
            and result.max_rotation_error < 1e-9
            and elapsed < 5.0
        )
        report(
            "transform-roundtrip",
            passed,
            f"trans {result.max_translation_error:.2e} m, rot "
            f"{result.max_rotation_error:.2e} rad, {elapsed:.2f} s",
        )
        assert result.max_translation_error < 1e-9
        assert result.max_rotation_error < 1e-9
        assert elapsed < 5.0


class TestConjugationEquivalence:
    def test_direct_path_equals_two_step_path(self):
        # T A T^-1 must match deriving the action from both poses mapped
        # into the camera frame first, within 1e-10 over 1e5 cases.
        rng = np.random.default_rng(7)
        n = 100_000
        rt, tt = batch.random_rigid_batch(rng, n, trans_scale=2.0)
        r1, t1 = batch.random_rigid_batch(rng, n, trans_scale=0.5)
        r2, t2 = batch.random_rigid_batch(rng, n, trans_scale=0.5)

        ri1, ti1 = batch.inverse_batch(r1, t1)
        ra, ta = batch.compose_batch(r2, t2, ri1, ti1)
        direct_r, direct_t = batch.conjugate_batch(rt, tt, ra, ta)

        rc1, tc1 = batch.compose_batch(rt, tt, r1, t1)
        rc2, tc2 = batch.compose_batch(rt, tt, r2, t2)
        rci, tci = batch.inverse_batch(rc1, tc1)
        two_r, two_t = batch.compose_batch(rc2, tc2, rci, tci)

        rot_err = float(np.max(batch.rotation_angle_batch(direct_r, two_r)))
        trans_err = float(np.max(np.linalg.norm(direct_t - two_t, axis=1)))
        passed = rot_err < 1e-10 and trans_err < 1e-10
        report(
            "conjugation-equivalence", passed, f"rot {rot_err:.2e}, trans {trans_err:.2e}"
        )
        assert rot_err < 1e-10
        assert trans_err < 1e-10


class TestMultiViewConsistency:
    def test_100_steps_20_cameras_1980_samples_agree(self):
        rigs = bench.sample_camera_pool(
            replace(bench.BenchConfig().pool, pool_size=20, seed=99)
        )
        task = replace(bench.BenchConfig().task, n_steps=100)
        episode = bench.gen_trajectory(task, seed=17, cameras=rigs)
        samples = pipeline.expand_to_camera_targets(episode, "camera")
        count_ok = len(samples) == 1980

        rig_by_id = {r.camera_id: r for r in rigs}
        recovered: dict[int, list[np.ndarray]] = {}
        for sample in samples:
            world = pipeline.recover_world_action(
                sample.action7, rig_by_id[sample.camera_id].extrinsics
            )
            recovered.setdefault(sample.step_index, []).append(world)
        spread = 0.0
        for vectors in recovered.values():
            stacked = np.stack(vectors)
            spread = max(spread, float(np.max(stacked.max(axis=0) - stacked.min(axis=0))))
        passed = count_ok and spread < 1e-8
        report("multi-view-consistency", passed, f"{len(samples)} samples, spread {spread:.2e}")
        assert count_ok
        assert spread < 1e-8


class TestCodecBounds:
    def test_quantization_sweep_and_encode_roundtrip(self):
        config = codec.BinConfig(256)
        grid = np.linspace(-1.0, 1.0, 10_000)
        sweep = np.stack([grid] * 7, axis=1)
        sweep_err = float(
            np.max(np.abs(codec.dequantize(codec.quantize(sweep, config), config) - sweep))
        )
        sweep_ok = sweep_err <= 1.0 / 256.0

        rng = np.random.default_rng(41)
        n = 100_000
        rot, trans = batch.random_rigid_batch(rng, n, trans_scale=0.5)
        grip = rng.uniform(size=n)
        encoded = batch.encode_batch(rot, trans, grip)
        rot_back, trans_back, grip_back = batch.decode_batch(encoded)
        matrix_err = float(np.max(np.abs(rot_back - rot)))
        trans_exact = np.array_equal(trans_back, trans)
        encode_ok = matrix_err < 1e-9 and trans_exact

        ext_r, ext_t = batch.random_rigid_batch(rng, n, trans_scale=2.0)
        cam_r, cam_t = batch.conjugate_batch(ext_r, ext_t, rot, trans)
        cam_v = batch.encode_batch(cam_r, cam_t, grip)
        dec_r, dec_t, dec_g = batch.decode_batch(cam_v)
        back_r, back_t = batch.inverse_conjugate_batch(ext_r, ext_t, dec_r, dec_t)
        final = batch.encode_batch(back_r, back_t, dec_g)
        gripper_ok = np.array_equal(final[:, 6], grip)

        passed = sweep_ok and encode_ok and gripper_ok
        report(
            "codec-bounds",
            passed,
            f"sweep {sweep_err:.2e} <= {1 / 256:.2e}, matrix {matrix_err:.2e}, "
            f"gripper bit-exact {gripper_ok}",
        )
        assert sweep_ok
        assert encode_ok
        assert gripper_ok


class TestPinholeSpotChecks:
    def test_project_unproject_and_edge_cases(self):
        k = Intrinsics(fx=100.0, fy=100.0, cx=64.0, cy=64.0, width=128, height=128)
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(1000):
            u, v = rng.uniform(0, 128, size=2)
            depth = rng.uniform(1e-3, 10.0)
            uu, vv = project(k, unproject(k, u, v, depth))
            worst = max(worst, abs(uu - u), abs(vv - v))
        inverse_ok = worst < 1e-9

        principal_ok = project(k, [0.0, 0.0, 1.0]) == (64.0, 64.0)
        spot_ok = project(k, [0.1, 0.2, 1.0]) == (74.0, 84.0)
        try:
            project(k, [0.1, 0.2, -0.5])
            behind_ok = False
        except BehindCameraError:
            behind_ok = True

        passed = inverse_ok and principal_ok and spot_ok and behind_ok
        report("pinhole-spot-checks", passed, f"roundtrip {worst:.2e}")
        assert passed


class TestSplitBalance:
    def test_ratio_leakage_and_balance(self, tmp_path):
        from test_pipeline import write_corpus

        paths = write_corpus(tmp_path / "eps", 20, tasks=("a", "b"))
        manifest = pipeline.build_manifest(paths)
        split = pipeline.split_dataset(manifest, ratio=(19, 1), seed=3)
        train = {e.episode_id for e in split.entries_in_split("train")}
        val = {e.episode_id for e in split.entries_in_split("val")}
        ratio_ok = len(train) == 18 and len(val) == 2  # stratified: 1 val per task
        leak_ok = not (train & val) and (train | val) == set(manifest.episode_ids())

        unbalanced = pipeline.build_manifest(
            write_corpus(tmp_path / "eps2", 15, tasks=("a",) * 10 + ("b",) * 5)
        )
        balanced = pipeline.balance_tasks(unbalanced)
        totals = {}
        per_episode = {}
        for entry in unbalanced.entries:
            totals[entry.task] = totals.get(entry.task, 0) + (
                entry.sample_count * balanced.replication[entry.episode_id]
            )
            per_episode[entry.task] = entry.sample_count
        target = max(
            sum(e.sample_count for e in unbalanced.entries if e.task == t) for t in totals
        )
        balance_ok = all(
            target <= total < target + per_episode[task] for task, total in totals.items()
        )

        # Unstratified split honors the exact 19:1 ratio.
        plain = pipeline.split_dataset(manifest, ratio=(19, 1), seed=3, stratify=False)
        plain_ok = len(plain.entries_in_split("train")) == 19

        passed = ratio_ok and leak_ok and balance_ok and plain_ok
        report(
            "split-balance",
            passed,
            f"train/val {len(train)}/{len(val)} stratified, 19/1 plain, balance {totals}",
        )
        assert ratio_ok and leak_ok and balance_ok and plain_ok


@pytest.fixture(scope="module")
def default_bench_report():
    start = time.perf_counter()
    result = bench.run_benchmark(bench.BenchConfig())
    return result, time.perf_counter() - start


class TestBenchmarkDirectionalClaim:
    def test_camera_arm_wins_novel_views(self, default_bench_report):
        # Robot-task success rates need real policies and simulators; the
        # desk-scale criterion is the directional claim plus the control.
        result, elapsed = default_bench_report
        wins = result.win_counts["novel"]
        control_ok = result.control["abs_diff"] < 1e-10
        time_ok = elapsed < 120.0
        passed = wins >= 9 and control_ok and time_ok
        report(
            "benchmark-directional-claim",
            passed,
            f"novel wins {wins}/10, control diff {result.control['abs_diff']:.1e}, "
            f"{elapsed:.1f} s",
        )
        assert wins >= 9
        assert control_ok
        assert time_ok


class TestWellPosednessWitness:
    def test_base_frame_collides_camera_frame_does_not(self, default_bench_report):
        result, _ = default_bench_report
        base_pairs = result.witness["base_collision_pairs"]
        cam_pairs = result.witness["camera_collision_pairs"]
        passed = base_pairs >= 1 and cam_pairs == 0
        report(
            "well-posedness-witness",
            passed,
            f"base collisions {base_pairs}, camera collisions {cam_pairs}",
        )
        assert base_pairs >= 1
        assert cam_pairs == 0


class TestDeterminism:
    def test_convert_jobs_and_seeded_commands_reproducible(self, tmp_path, capsys):
        data = tmp_path / "episodes"
        assert (
            cli.main(
                ["gen-synthetic", "--pool", "64", "--episodes", "10", "--views", "6",
                 "--seed", "12", "--out", str(data)]
            )
            == 0
        )
        out1, out8 = tmp_path / "jobs1", tmp_path / "jobs8"
        argv = ["convert", "--input", str(data), "--frame", "camera", "--discrete",
                "--fit-stats", "--bins", "256"]
        assert cli.main(argv + ["--out", str(out1), "--jobs", "1"]) == 0
        assert cli.main(argv + ["--out", str(out8), "--jobs", "8"]) == 0
        names1 = sorted(p.name for p in out1.iterdir())
        names8 = sorted(p.name for p in out8.iterdir())
        jobs_ok = names1 == names8 and all(
            (out1 / n).read_bytes() == (out8 / n).read_bytes() for n in names1
        )

        data2 = tmp_path / "episodes2"
        cli.main(
            ["gen-synthetic", "--pool", "64", "--episodes", "10", "--views", "6",
             "--seed", "12", "--out", str(data2)]
        )
        gen_ok = all(
            (data / p.name).read_bytes() == p.read_bytes() for p in data2.iterdir()
        )

        m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
        cli.main(["split", "--input", str(data), "--seed", "4", "--out", str(m1)])
        cli.main(["split", "--input", str(data), "--seed", "4", "--out", str(m2)])
        split_ok = m1.read_bytes() == m2.read_bytes()

        small = replace(
            bench.BenchConfig(),
            pool_size=48,
            n_train_views=6,
            n_novel_views=2,
            n_train_episodes=6,
            n_val_episodes=2,
            n_seeds=2,
        )
        bench_ok = bench.run_benchmark(small).to_json() == bench.run_benchmark(small).to_json()

        capsys.readouterr()  # drop accumulated CLI summaries
        passed = jobs_ok and gen_ok and split_ok and bench_ok
        report(
            "determinism",
            passed,
            f"convert jobs {jobs_ok}, gen {gen_ok}, split {split_ok}, bench {bench_ok}",
        )
        assert jobs_ok
        assert gen_ok
        assert split_ok
        assert bench_ok
