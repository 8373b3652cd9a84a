/**
 * 7-dim action vectors <x, y, z, roll, pitch, yaw, gripper> and the
 * discrete action space: per-dimension range normalization to [-1, 1]
 * followed by equal-width binning.  The gripper is an absolute position
 * whose bounds are pinned to [0, 1].
 */

import { BindingError } from "./errors";
import { RigidTransform, rotFromRpy, rpyFromRot } from "./se3";

export const ACTION_DIM = 7;
export const QUANTIZE_INPUT_TOL = 1e-9;

export interface NormalizationStats {
  /** per-dimension lower bounds, length 7. */
  lower: Float64Array;
  /** per-dimension upper bounds, length 7. */
  upper: Float64Array;
  qLow: number;
  qHigh: number;
  sampleCount: number;
  frame: string;
}

export function checkStats(stats: NormalizationStats): void {
  if (stats.lower.length !== ACTION_DIM || stats.upper.length !== ACTION_DIM) {
    throw new BindingError(
      "bad_stats",
      `stats bounds need ${ACTION_DIM} dimensions, got ${stats.lower.length}/${stats.upper.length}`,
    );
  }
  for (let d = 0; d < ACTION_DIM; d++) {
    if (!(stats.lower[d] < stats.upper[d])) {
      throw new BindingError("bad_stats", `stats dimension ${d} has lower >= upper`);
    }
  }
}

/** Pack a relative motion plus gripper position into a 7-vector. */
export function encodeAction(motion: RigidTransform, gripper: number): Float64Array {
  const rpy = rpyFromRot(motion.rotation);
  return new Float64Array([
    motion.translation[0], motion.translation[1], motion.translation[2],
    rpy[0], rpy[1], rpy[2],
    gripper,
  ]);
}

/** Unpack a 7-vector into (motion, gripper). */
export function decodeAction(v: ArrayLike<number>): { motion: RigidTransform; gripper: number } {
  return {
    motion: {
      rotation: rotFromRpy([v[3], v[4], v[5]]),
      translation: Float64Array.from([v[0], v[1], v[2]]),
    },
    gripper: v[6],
  };
}

/** Affine map of each dimension from [lower, upper] onto [-1, 1], clipping. */
export function normalizeInto(
  out: Float64Array, offset: number, v: ArrayLike<number>, base: number,
  stats: NormalizationStats,
): void {
  for (let d = 0; d < ACTION_DIM; d++) {
    const span = stats.upper[d] - stats.lower[d];
    const n = 2.0 * (v[base + d] - stats.lower[d]) / span - 1.0;
    out[offset + d] = n < -1.0 ? -1.0 : n > 1.0 ? 1.0 : n;
  }
}

/** bin = floor((n + 1) / 2 * bins), clamped to the top bin. */
export function quantizeInto(
  out: Int32Array, offset: number, n: ArrayLike<number>, base: number, bins: number,
): void {
  for (let d = 0; d < ACTION_DIM; d++) {
    const value = n[base + d];
    if (Math.abs(value) > 1.0 + QUANTIZE_INPUT_TOL) {
      throw new BindingError("out_of_range", `normalized component ${value} outside [-1, 1]`);
    }
    const clipped = value < -1.0 ? -1.0 : value > 1.0 ? 1.0 : value;
    const token = Math.floor((clipped + 1.0) * 0.5 * bins);
    out[offset + d] = token >= bins ? bins - 1 : token;
  }
}

/** Bin centers back in normalized space: -1 + (2 * token + 1) / bins. */
export function dequantize(tokens: ArrayLike<number>, bins: number): Float64Array {
  const out = new Float64Array(tokens.length);
  for (let k = 0; k < tokens.length; k++) {
    out[k] = -1.0 + (2.0 * tokens[k] + 1.0) / bins;
  }
  return out;
}
