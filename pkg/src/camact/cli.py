"""Command-line surface for the dataset pipeline and benchmark.

Exit codes: 0 success, 1 validation or self-check failure, 2 usage error.
Logs go to stderr; stdout carries exactly one machine-readable JSON summary
line per invocation.  Every subcommand is deterministic for fixed inputs:
seeds are explicit flags (no wall-clock defaults) and the environment is
never consulted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import batch, bench, codec, pipeline
from .pipeline import EpisodeFormatError, EpisodeValidationError

log = logging.getLogger("camact")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _parse_ratio(text: str) -> tuple[int, int]:
    try:
        left, right = text.split(":")
        ratio = (int(left), int(right))
    except ValueError:
        raise argparse.ArgumentTypeError(f"ratio must look like 19:1, got {text!r}")
    if ratio[0] <= 0 or ratio[1] <= 0:
        raise argparse.ArgumentTypeError(f"ratio parts must be positive, got {text!r}")
    return ratio


def _episode_paths(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.jsonl")))
        elif p.exists():
            paths.append(p)
        else:
            raise FileNotFoundError(f"no such file or directory: {item}")
    if not paths:
        raise FileNotFoundError("no episode files found under the given inputs")
    return paths


def _emit(summary: dict) -> None:
    print(json.dumps(summary))


def _cmd_convert(args) -> int:
    paths = _episode_paths(args.input)
    stats = codec.NormalizationStats.load(args.stats) if args.stats else None
    manifest = pipeline.convert_episodes(
        paths,
        args.out,
        frame=args.frame,
        discrete=args.discrete,
        stats=stats,
        fit_stats=args.fit_stats,
        q_low=args.q_low,
        q_high=args.q_high,
        bins=args.bins,
        jobs=args.jobs,
    )
    total = sum(e["sample_count"] for e in manifest["episodes"])
    log.info("converted %d episodes to %d samples", len(manifest["episodes"]), total)
    _emit(
        {
            "command": "convert",
            "episodes": len(manifest["episodes"]),
            "samples": total,
            "frame": args.frame,
            "out": str(args.out),
        }
    )
    return EXIT_OK


def _cmd_validate(args) -> int:
    paths = _episode_paths(args.input)
    reports = []
    failures = 0
    for path in paths:
        try:
            episode = pipeline.read_episode(path)
            violations = pipeline.validate_episode(episode)
        except EpisodeFormatError as exc:
            reports.append({"path": str(path), "violations": [f"format:{exc}"]})
            failures += 1
            continue
        reports.append({"path": str(path), "violations": violations})
        if violations:
            failures += 1
    for report in reports:
        for violation in report["violations"]:
            log.warning("%s: %s", report["path"], violation)
    _emit(
        {
            "command": "validate",
            "files": len(reports),
            "invalid": failures,
            "reports": reports,
        }
    )
    return EXIT_OK if failures == 0 else EXIT_FAILURE


def _cmd_split(args) -> int:
    source = Path(args.input)
    if source.is_file() and source.suffix == ".json":
        manifest = pipeline.DatasetManifest.load(source)
    else:
        manifest = pipeline.build_manifest(_episode_paths([args.input]))
    result = pipeline.split_dataset(
        manifest, ratio=args.ratio, seed=args.seed, stratify=args.stratify
    )
    result.save(args.out)
    counts = {
        name: len(result.entries_in_split(name))
        for name in (pipeline.SPLIT_TRAIN, pipeline.SPLIT_VAL)
    }
    _emit({"command": "split", "out": str(args.out), **counts})
    return EXIT_OK


def _cmd_balance(args) -> int:
    manifest = pipeline.DatasetManifest.load(args.manifest)
    result = pipeline.balance_tasks(manifest)
    result.save(args.out)
    replicated = sum(1 for v in result.replication.values() if v > 1)
    _emit({"command": "balance", "out": str(args.out), "episodes_replicated": replicated})
    return EXIT_OK


def _cmd_roundtrip(args) -> int:
    report = batch.roundtrip_check(args.samples, seed=args.seed, tolerance=args.tol)
    _emit(
        {
            "command": "roundtrip",
            "samples": report.samples,
            "max_translation_error": report.max_translation_error,
            "max_rotation_error": report.max_rotation_error,
            "tolerance": report.tolerance,
            "passed": report.passed,
        }
    )
    if not report.passed:
        log.error(
            "round-trip exceeded tolerance %g (translation %g, rotation %g)",
            report.tolerance,
            report.max_translation_error,
            report.max_rotation_error,
        )
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = bench.BenchConfig.from_json_file(args.config) if args.config else bench.BenchConfig()
    config = replace(config, base_seed=args.seed)
    report = bench.run_benchmark(config)
    out = Path(args.out)
    out.write_text(report.to_json())
    table_path = out.with_suffix(".txt")
    table_path.write_text(report.to_table())
    log.info("benchmark table:\n%s", report.to_table())
    _emit(
        {
            "command": "bench",
            "out": str(out),
            "table": str(table_path),
            "win_counts": report.win_counts,
            "n_seeds": len(report.results),
            "control_abs_diff": report.control["abs_diff"],
        }
    )
    return EXIT_OK


def _cmd_gen_synthetic(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pool_spec = bench.CameraPoolSpec(pool_size=args.pool, seed=args.seed)
    pool = bench.sample_camera_pool(pool_spec)
    tasks = [t.strip() for t in args.tasks.split(",") if t.strip()]
    child = np.random.SeedSequence(args.seed).generate_state(2 * args.episodes + 1)
    written = []
    for k in range(args.episodes):
        rig_rng = np.random.default_rng(int(child[2 * k]))
        picked = rig_rng.choice(args.pool, min(args.views, args.pool), replace=False)
        task = bench.SyntheticTaskSpec(
            n_steps=args.steps, motion_family=tasks[k % len(tasks)], tilt_scale=args.tilt
        )
        episode = bench.gen_trajectory(
            task,
            int(child[2 * k + 1]),
            cameras=[pool[i] for i in sorted(picked)],
            episode_id=f"synthetic-{args.seed}-{k:05d}",
        )
        path = out_dir / f"{episode.episode_id}.jsonl"
        pipeline.write_episode(path, episode)
        written.append(str(path))
    _emit(
        {
            "command": "gen-synthetic",
            "episodes": len(written),
            "pool": args.pool,
            "views_per_episode": min(args.views, args.pool),
            "out": str(out_dir),
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camact",
        description="Convert end-effector actions between robot-base and camera frames, "
        "manage multi-view trajectory datasets, and run the frame-comparison benchmark.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="log more to stderr (repeatable)"
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser(
        "convert", formatter_class=fmt, help="episodes -> per-episode training sample files"
    )
    p.add_argument("--input", nargs="+", required=True, help="episode .jsonl files or directories")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--frame", choices=("base", "camera"), default="camera", help="target frame")
    p.add_argument("--discrete", action="store_true", help="attach bin tokens to every sample")
    p.add_argument("--bins", type=int, default=256, help="bins per dimension in discrete mode")
    p.add_argument("--stats", default=None, help="normalization stats JSON (discrete mode)")
    p.add_argument(
        "--fit-stats",
        action="store_true",
        help="fit normalization stats from the inputs instead of loading them",
    )
    p.add_argument("--q-low", type=float, default=0.01, help="lower fit quantile")
    p.add_argument("--q-high", type=float, default=0.99, help="upper fit quantile")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("validate", formatter_class=fmt, help="check episode files and rigs")
    p.add_argument("--input", nargs="+", required=True, help="episode .jsonl files or directories")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "split", formatter_class=fmt, help="assign episodes to train/val at episode granularity"
    )
    p.add_argument("--input", required=True, help="episode directory or manifest .json")
    p.add_argument("--ratio", type=_parse_ratio, default=(19, 1), help="train:val ratio, e.g. 19:1")
    p.add_argument("--seed", type=int, required=True, help="shuffle seed (required, no default)")
    p.add_argument(
        "--stratify",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="keep every task family represented in both splits",
    )
    p.add_argument("--out", required=True, help="output manifest path")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser(
        "balance", formatter_class=fmt, help="equalize per-task sample counts via replication"
    )
    p.add_argument("--manifest", required=True, help="input manifest .json")
    p.add_argument("--out", required=True, help="output manifest path")
    p.set_defaults(func=_cmd_balance)

    p = sub.add_parser(
        "roundtrip", formatter_class=fmt, help="transform round-trip self-check"
    )
    p.add_argument("--samples", type=int, default=100000, help="random (action, extrinsic) pairs")
    p.add_argument("--tol", type=float, default=1e-9, help="max allowed error")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.set_defaults(func=_cmd_roundtrip)

    p = sub.add_parser(
        "bench", formatter_class=fmt, help="base-frame vs camera-frame benchmark"
    )
    p.add_argument("--config", default=None, help="benchmark config JSON (all fields optional)")
    p.add_argument("--seed", type=int, required=True, help="base seed (required, no default)")
    p.add_argument("--out", default="bench_report.json", help="report JSON path")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser(
        "gen-synthetic", formatter_class=fmt, help="generate synthetic multi-view episodes"
    )
    p.add_argument("--pool", type=int, default=512, help="camera pool size")
    p.add_argument("--episodes", type=int, default=200, help="number of episodes")
    p.add_argument("--views", type=int, default=20, help="cameras sampled per episode")
    p.add_argument("--steps", type=int, default=16, help="steps per episode")
    p.add_argument("--tilt", type=float, default=0.2, help="wrist tilt amplitude in radians")
    p.add_argument(
        "--tasks",
        default="reach,reach-grasp-lift",
        help="comma-separated motion families to cycle through",
    )
    p.add_argument("--seed", type=int, required=True, help="generation seed (required, no default)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_gen_synthetic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.ERROR if args.quiet else max(logging.WARNING - 10 * args.verbose, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (
        EpisodeFormatError,
        EpisodeValidationError,
        FileNotFoundError,
        ValueError,
        bench.BenchArmError,
        bench.DegenerateFitError,
    ) as exc:
        log.error("%s", exc)
        print(json.dumps({"command": args.command, "error": str(exc)}))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
