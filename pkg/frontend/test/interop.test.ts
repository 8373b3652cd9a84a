/**
 * Interoperation with the dataset toolkit through its external surfaces:
 * the CLI generates and converts a corpus, and this package must
 * reproduce the converted targets from the raw episode files alone.
 *
 * Cross-implementation agreement is checked at 1e-9 (double precision,
 * same formulas; only libm rounding differs), tokens exactly.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { actionBatch, batchRecoverWorld, batchToCameraFrame, batchTokenize, transformBatch } from "../src/batch";
import { encodeAction } from "../src/codec";
import {
  Episode,
  readConversionManifest,
  readEpisodeFile,
  readSamplesFile,
  readStatsFile,
  TrainingSample,
} from "../src/files";
import { compose, fromQuatTrans, inverse } from "../src/se3";
import { maxAbsDiff } from "./helpers";

const CLI = ["python3", "-m", "camact.cli"];

function runCli(args: string[]): void {
  const [cmd, ...prefix] = CLI;
  const result = spawnSync(cmd, [...prefix, ...args], { encoding: "utf8" });
  if (result.status !== 0) {
    throw new Error(`CLI ${args[0]} failed (${result.status}): ${result.stderr}`);
  }
}

/** World-frame delta actions of an episode as an ActionBatch. */
function worldActions(episode: Episode) {
  const rows = episode.steps.length - 1;
  const data = new Float64Array(rows * 7);
  for (let i = 0; i < rows; i++) {
    const p1 = fromQuatTrans(episode.steps[i].quatWxyz, episode.steps[i].translationM);
    const p2 = fromQuatTrans(episode.steps[i + 1].quatWxyz, episode.steps[i + 1].translationM);
    const motion = compose(p2, inverse(p1));
    data.set(encodeAction(motion, episode.steps[i + 1].gripper), i * 7);
  }
  return actionBatch(data, rows);
}

let work: string;
let episodeDir: string;
let cameraDir: string;
let baseDir: string;

beforeAll(() => {
  work = mkdtempSync(join(tmpdir(), "camact-bindings-"));
  episodeDir = join(work, "episodes");
  cameraDir = join(work, "camera");
  baseDir = join(work, "base");
  runCli([
    "gen-synthetic", "--pool", "24", "--episodes", "3", "--views", "4",
    "--steps", "10", "--seed", "77", "--out", episodeDir,
  ]);
  runCli([
    "convert", "--input", episodeDir, "--out", cameraDir, "--frame", "camera",
    "--discrete", "--fit-stats", "--bins", "256",
  ]);
  runCli(["convert", "--input", episodeDir, "--out", baseDir, "--frame", "base"]);
}, 60_000);

function samplesByKey(samples: TrainingSample[]): Map<string, TrainingSample> {
  const map = new Map<string, TrainingSample>();
  for (const s of samples) map.set(`${s.cameraId}:${s.stepIndex}`, s);
  return map;
}

describe("reproducing the toolkit's conversion from its file formats", () => {
  it("camera-frame targets and tokens match per sample", () => {
    const manifest = readConversionManifest(join(cameraDir, "conversion.json"));
    expect(manifest.frame).toBe("camera");
    expect(manifest.stats_path).not.toBeNull();
    const stats = readStatsFile(join(cameraDir, manifest.stats_path!));

    for (const entry of manifest.episodes) {
      const episode = readEpisodeFile(join(episodeDir, `${entry.episode_id}.jsonl`));
      const samples = samplesByKey(readSamplesFile(join(cameraDir, entry.samples_path)));
      expect(entry.sample_count).toBe((episode.steps.length - 1) * episode.cameras.length);

      const world = worldActions(episode);
      for (const rig of episode.cameras) {
        const extrinsic = transformBatch(
          Float64Array.from([...rig.extrinsics.quat_wxyz, ...rig.extrinsics.translation_m]),
          1,
        );
        const cam = batchToCameraFrame(world, extrinsic);
        const tokens = batchTokenize(cam, stats, manifest.bins ?? 256);
        for (let step = 0; step < world.rows; step++) {
          const sample = samples.get(`${rig.camera_id}:${step}`);
          expect(sample, `missing sample ${rig.camera_id}:${step}`).toBeDefined();
          const row = cam.data.subarray(step * 7, step * 7 + 7);
          expect(maxAbsDiff(row, sample!.action7)).toBeLessThan(1e-9);
          expect(sample!.tokens).not.toBeNull();
          for (let d = 0; d < 7; d++) {
            expect(tokens.data[step * 7 + d]).toBe(sample!.tokens![d]);
          }
        }
      }
    }
  });

  it("recovering the toolkit's camera-frame samples yields its base-frame samples", () => {
    const camManifest = readConversionManifest(join(cameraDir, "conversion.json"));
    const baseManifest = readConversionManifest(join(baseDir, "conversion.json"));

    for (let e = 0; e < camManifest.episodes.length; e++) {
      const episode = readEpisodeFile(
        join(episodeDir, `${camManifest.episodes[e].episode_id}.jsonl`),
      );
      const camSamples = readSamplesFile(join(cameraDir, camManifest.episodes[e].samples_path));
      const baseSamples = readSamplesFile(join(baseDir, baseManifest.episodes[e].samples_path));
      const baseByStep = new Map(baseSamples.map((s) => [s.stepIndex, s.action7]));
      const rigByName = new Map(episode.cameras.map((c) => [c.camera_id, c]));

      for (const sample of camSamples) {
        const rig = rigByName.get(sample.cameraId!)!;
        const recovered = batchRecoverWorld(
          actionBatch(Float64Array.from(sample.action7), 1),
          transformBatch(
            Float64Array.from([...rig.extrinsics.quat_wxyz, ...rig.extrinsics.translation_m]),
            1,
          ),
        );
        expect(maxAbsDiff(recovered.data, baseByStep.get(sample.stepIndex)!)).toBeLessThan(1e-9);
      }
    }
  });

  it("episode files parse into consistent shapes", () => {
    const manifest = readConversionManifest(join(cameraDir, "conversion.json"));
    const episode = readEpisodeFile(
      join(episodeDir, `${manifest.episodes[0].episode_id}.jsonl`),
    );
    expect(episode.steps.length).toBe(10);
    expect(episode.cameras.length).toBe(4);
    for (const [i, step] of episode.steps.entries()) {
      expect(step.index).toBe(i);
      expect(step.quatWxyz.length).toBe(4);
      expect(step.translationM.length).toBe(3);
      expect(step.gripper).toBeGreaterThanOrEqual(0);
      expect(step.gripper).toBeLessThanOrEqual(1);
    }
  });
});
