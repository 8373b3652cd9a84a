/**
 * Readers for the dataset toolkit's file formats.
 *
 * Episode files are .jsonl with a header record then step records; sample
 * files are one TrainingSample object per line; normalization stats and
 * conversion inventories are single JSON documents.  See the toolkit
 * README for the full schema; field names here match it one to one.
 */

import { readFileSync } from "node:fs";

import { NormalizationStats } from "./codec";
import { BindingError } from "./errors";

export interface IntrinsicsJson {
  fx: number;
  fy: number;
  cx: number;
  cy: number;
  width: number;
  height: number;
}

export interface CameraRigJson {
  camera_id: string;
  intrinsics: IntrinsicsJson;
  extrinsics: { quat_wxyz: number[]; translation_m: number[] };
}

export interface EpisodeStep {
  index: number;
  quatWxyz: Float64Array;
  translationM: Float64Array;
  gripper: number;
}

export interface Episode {
  episodeId: string;
  task: string;
  instruction: string;
  cameras: CameraRigJson[];
  steps: EpisodeStep[];
}

export interface TrainingSample {
  episodeId: string;
  cameraId: string | null;
  stepIndex: number;
  frameTag: string;
  action7: Float64Array;
  tokens: Int32Array | null;
  observationRef: string;
}

export function readEpisodeFile(path: string): Episode {
  const lines = readFileSync(path, "utf8").split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new BindingError("bad_layout", `${path}: empty episode file`);
  }
  const header = JSON.parse(lines[0]);
  if (header.type !== "header") {
    throw new BindingError("bad_layout", `${path}:1: first record must be the header`);
  }
  const steps: EpisodeStep[] = [];
  for (let i = 1; i < lines.length; i++) {
    const record = JSON.parse(lines[i]);
    if (record.type !== "step") {
      throw new BindingError("bad_layout", `${path}:${i + 1}: expected a step record`);
    }
    steps.push({
      index: record.index,
      quatWxyz: Float64Array.from(record.pose_base.quat_wxyz),
      translationM: Float64Array.from(record.pose_base.translation_m),
      gripper: record.gripper,
    });
  }
  return {
    episodeId: header.episode_id,
    task: header.task,
    instruction: header.instruction,
    cameras: header.cameras,
    steps,
  };
}

export function readSamplesFile(path: string): TrainingSample[] {
  const lines = readFileSync(path, "utf8").split("\n").filter((l) => l.trim().length > 0);
  return lines.map((line) => {
    const record = JSON.parse(line);
    return {
      episodeId: record.episode_id,
      cameraId: record.camera_id ?? null,
      stepIndex: record.step_index,
      frameTag: record.frame_tag,
      action7: Float64Array.from(record.action7),
      tokens: record.tokens === null ? null : Int32Array.from(record.tokens),
      observationRef: record.observation_ref,
    };
  });
}

export function readStatsFile(path: string): NormalizationStats {
  const record = JSON.parse(readFileSync(path, "utf8"));
  const stats: NormalizationStats = {
    lower: Float64Array.from(record.lower),
    upper: Float64Array.from(record.upper),
    qLow: record.q_low,
    qHigh: record.q_high,
    sampleCount: record.sample_count,
    frame: record.frame,
  };
  if (stats.lower.length !== 7 || stats.upper.length !== 7) {
    throw new BindingError("bad_stats", `${path}: bounds must have 7 dimensions`);
  }
  return stats;
}

export interface ConversionEntry {
  episode_id: string;
  samples_path: string;
  sample_count: number;
  sha256: string;
}

export interface ConversionManifest {
  frame: string;
  discrete: boolean;
  bins: number | null;
  stats_path: string | null;
  episodes: ConversionEntry[];
}

export function readConversionManifest(path: string): ConversionManifest {
  return JSON.parse(readFileSync(path, "utf8")) as ConversionManifest;
}
