/**
 * Batch API over flat buffers: the boundary ML data loaders call.
 *
 * Buffer layouts (documented to the byte, stable within major version):
 *
 *   ActionBatch     data: Float64Array, stride 7 per row
 *                   [x_m, y_m, z_m, roll_rad, pitch_rad, yaw_rad, gripper]
 *   TransformBatch  data: Float64Array, stride 7 per row
 *                   [qw, qx, qy, qz, tx_m, ty_m, tz_m]  (scalar-first
 *                   unit quaternion, then translation)
 *   TokenBatch      data: Int32Array, stride 7 per row, bin indices
 *
 * rows counts rows; data.length must equal rows * 7.  A TransformBatch of
 * one row broadcasts against any ActionBatch.  Row i of every output is
 * computed by the same scalar kernels a caller could loop themselves
 * (se3.conjugateAction + codec.encodeAction and friends), so batch and
 * looped results are bit-identical.  All failures raise BindingError with
 * a structured code and the offending row where applicable.
 */

import { ACTION_DIM, NormalizationStats, checkStats, decodeAction, encodeAction, normalizeInto, quantizeInto } from "./codec";
import { BindingError } from "./errors";
import { RigidTransform, conjugateAction, fromQuatTrans, inverseConjugateAction } from "./se3";

export interface ActionBatch {
  data: Float64Array;
  rows: number;
}

export interface TransformBatch {
  data: Float64Array;
  rows: number;
}

export interface TokenBatch {
  data: Int32Array;
  rows: number;
}

export const ACTION_STRIDE = 7;
export const TRANSFORM_STRIDE = 7;

function checkLayout(name: string, rows: number, length: number, stride: number): void {
  if (rows < 0 || length !== rows * stride) {
    throw new BindingError(
      "bad_layout",
      `${name}: expected rows * ${stride} = ${rows * stride} values, got ${length}`,
    );
  }
}

function checkPair(actions: ActionBatch, extrinsics: TransformBatch): void {
  checkLayout("actions", actions.rows, actions.data.length, ACTION_STRIDE);
  checkLayout("extrinsics", extrinsics.rows, extrinsics.data.length, TRANSFORM_STRIDE);
  if (extrinsics.rows !== actions.rows && extrinsics.rows !== 1) {
    throw new BindingError(
      "shape_mismatch",
      `extrinsics rows ${extrinsics.rows} must equal action rows ${actions.rows} or 1`,
    );
  }
}

function checkFiniteRow(data: Float64Array, base: number, stride: number, row: number): void {
  for (let k = 0; k < stride; k++) {
    if (!Number.isFinite(data[base + k])) {
      throw new BindingError("non_finite_row", "non-finite value in input", row);
    }
  }
}

function extrinsicAt(extrinsics: TransformBatch, row: number): RigidTransform {
  const base = (extrinsics.rows === 1 ? 0 : row) * TRANSFORM_STRIDE;
  checkFiniteRow(extrinsics.data, base, TRANSFORM_STRIDE, extrinsics.rows === 1 ? 0 : row);
  return fromQuatTrans(
    extrinsics.data.subarray(base, base + 4),
    extrinsics.data.subarray(base + 4, base + 7),
  );
}

function mapRows(
  actions: ActionBatch,
  extrinsics: TransformBatch,
  convert: (t: RigidTransform, a: RigidTransform) => RigidTransform,
): ActionBatch {
  checkPair(actions, extrinsics);
  const out = new Float64Array(actions.rows * ACTION_STRIDE);
  for (let row = 0; row < actions.rows; row++) {
    const base = row * ACTION_STRIDE;
    checkFiniteRow(actions.data, base, ACTION_STRIDE, row);
    const { motion, gripper } = decodeAction(actions.data.subarray(base, base + ACTION_STRIDE));
    const converted = convert(extrinsicAt(extrinsics, row), motion);
    out.set(encodeAction(converted, gripper), base);
  }
  return { data: out, rows: actions.rows };
}

/**
 * Training direction: world-frame action rows into each camera's frame
 * (A_cam = T A T^-1 per row, then re-encoded as 7-vectors).
 */
export function batchToCameraFrame(
  actionsWorld: ActionBatch,
  extrinsics: TransformBatch,
): ActionBatch {
  return mapRows(actionsWorld, extrinsics, conjugateAction);
}

/**
 * Inference direction: camera-frame action rows back into the base frame
 * (A_world = T^-1 A_cam T per row).  Inverse of batchToCameraFrame.
 */
export function batchRecoverWorld(
  actionsCam: ActionBatch,
  extrinsics: TransformBatch,
): ActionBatch {
  return mapRows(actionsCam, extrinsics, inverseConjugateAction);
}

/**
 * Row-wise discretization: normalize with the dataset's fitted bounds and
 * bucket into `bins` equal-width bins per dimension.
 */
export function batchTokenize(
  actions: ActionBatch,
  stats: NormalizationStats,
  bins: number = 256,
): TokenBatch {
  checkLayout("actions", actions.rows, actions.data.length, ACTION_STRIDE);
  checkStats(stats);
  if (!Number.isInteger(bins) || bins < 2) {
    throw new BindingError("bad_stats", `bins must be an integer >= 2, got ${bins}`);
  }
  const tokens = new Int32Array(actions.rows * ACTION_DIM);
  const normalized = new Float64Array(ACTION_DIM);
  for (let row = 0; row < actions.rows; row++) {
    const base = row * ACTION_STRIDE;
    checkFiniteRow(actions.data, base, ACTION_STRIDE, row);
    normalizeInto(normalized, 0, actions.data, base, stats);
    quantizeInto(tokens, row * ACTION_DIM, normalized, 0, bins);
  }
  return { data: tokens, rows: actions.rows };
}

/** Convenience constructor validating the layout contract. */
export function actionBatch(data: Float64Array, rows: number): ActionBatch {
  checkLayout("actions", rows, data.length, ACTION_STRIDE);
  return { data, rows };
}

/** Convenience constructor validating the layout contract. */
export function transformBatch(data: Float64Array, rows: number): TransformBatch {
  checkLayout("extrinsics", rows, data.length, TRANSFORM_STRIDE);
  return { data, rows };
}
