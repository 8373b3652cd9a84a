/**
 * Scalar rigid-transform kernels.
 *
 * Rotations are row-major Float64Array(9); translations Float64Array(3);
 * quaternions scalar-first [w, x, y, z] with canonical nonnegative-w sign.
 * Euler angles are roll/pitch/yaw in radians, extrinsic X-Y-Z order
 * (R = Rz(yaw) Ry(pitch) Rx(roll)).  These are the conventions of the
 * dataset toolkit this package binds to; formulas mirror it operation for
 * operation so agreement is limited only by libm rounding.
 */

import { BindingError } from "./errors";

export interface RigidTransform {
  /** 3x3 rotation, row-major. */
  rotation: Float64Array;
  /** translation in meters. */
  translation: Float64Array;
}

export const QUAT_NORM_EXACT = 1e-12;
export const QUAT_NORM_REJECT = 1e-6;
export const GIMBAL_EPS = 5e-10;

export function identity(): RigidTransform {
  return {
    rotation: new Float64Array([1, 0, 0, 0, 1, 0, 0, 0, 1]),
    translation: new Float64Array(3),
  };
}

export function rotFromQuat(q: ArrayLike<number>): Float64Array {
  if (q.length !== 4) {
    throw new BindingError("bad_quaternion", `quaternion needs 4 components, got ${q.length}`);
  }
  let w = q[0], x = q[1], y = q[2], z = q[3];
  const norm = Math.sqrt(w * w + x * x + y * y + z * z);
  if (!Number.isFinite(norm) || Math.abs(norm - 1.0) > QUAT_NORM_REJECT) {
    throw new BindingError("bad_quaternion", `quaternion norm ${norm} too far from 1`);
  }
  if (Math.abs(norm - 1.0) > QUAT_NORM_EXACT) {
    w /= norm; x /= norm; y /= norm; z /= norm;
  }
  return new Float64Array([
    1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
    2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
    2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y),
  ]);
}

export function canonicalQuat(q: Float64Array): Float64Array {
  for (let k = 0; k < 4; k++) {
    if (q[k] !== 0.0) {
      if (q[k] < 0.0) {
        return new Float64Array([-q[0], -q[1], -q[2], -q[3]]);
      }
      return q.slice();
    }
  }
  return q.slice();
}

export function quatFromRot(r: Float64Array): Float64Array {
  const trace = r[0] + r[4] + r[8];
  let q: Float64Array;
  if (trace > 0.0) {
    const s = Math.sqrt(trace + 1.0) * 2.0;
    q = new Float64Array([0.25 * s, (r[7] - r[5]) / s, (r[2] - r[6]) / s, (r[3] - r[1]) / s]);
  } else if (r[0] > r[4] && r[0] > r[8]) {
    const s = Math.sqrt(1.0 + r[0] - r[4] - r[8]) * 2.0;
    q = new Float64Array([(r[7] - r[5]) / s, 0.25 * s, (r[1] + r[3]) / s, (r[2] + r[6]) / s]);
  } else if (r[4] > r[8]) {
    const s = Math.sqrt(1.0 + r[4] - r[0] - r[8]) * 2.0;
    q = new Float64Array([(r[2] - r[6]) / s, (r[1] + r[3]) / s, 0.25 * s, (r[5] + r[7]) / s]);
  } else {
    const s = Math.sqrt(1.0 + r[8] - r[0] - r[4]) * 2.0;
    q = new Float64Array([(r[3] - r[1]) / s, (r[2] + r[6]) / s, (r[5] + r[7]) / s, 0.25 * s]);
  }
  const norm = Math.hypot(q[0], q[1], q[2], q[3]);
  for (let k = 0; k < 4; k++) q[k] /= norm;
  return canonicalQuat(q);
}

function wrapAngle(a: number): number {
  let out = (a + Math.PI) % (2.0 * Math.PI);
  if (out <= 0.0) out += 2.0 * Math.PI;
  return out - Math.PI;
}

/** (roll, pitch, yaw) from a rotation matrix; roll pinned to 0 at gimbal lock. */
export function rpyFromRot(r: Float64Array): Float64Array {
  const cosPitch = Math.hypot(r[0], r[3]);
  const pitch = Math.atan2(-r[6], cosPitch);
  let roll: number, yaw: number;
  if (cosPitch < GIMBAL_EPS) {
    roll = 0.0;
    yaw = Math.atan2(-r[1], r[4]);
  } else {
    roll = Math.atan2(r[7], r[8]);
    yaw = Math.atan2(r[3], r[0]);
  }
  return new Float64Array([wrapAngle(roll), pitch, wrapAngle(yaw)]);
}

export function rotFromRpy(rpy: ArrayLike<number>): Float64Array {
  const cr = Math.cos(rpy[0]), sr = Math.sin(rpy[0]);
  const cp = Math.cos(rpy[1]), sp = Math.sin(rpy[1]);
  const cy = Math.cos(rpy[2]), sy = Math.sin(rpy[2]);
  return new Float64Array([
    cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
    sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
    -sp, cp * sr, cp * cr,
  ]);
}

export function compose(a: RigidTransform, b: RigidTransform): RigidTransform {
  const ra = a.rotation, rb = b.rotation;
  const rotation = new Float64Array(9);
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      rotation[3 * i + j] =
        ra[3 * i] * rb[j] + ra[3 * i + 1] * rb[3 + j] + ra[3 * i + 2] * rb[6 + j];
    }
  }
  const tb = b.translation, ta = a.translation;
  const translation = new Float64Array(3);
  for (let i = 0; i < 3; i++) {
    translation[i] = ra[3 * i] * tb[0] + ra[3 * i + 1] * tb[1] + ra[3 * i + 2] * tb[2] + ta[i];
  }
  return { rotation, translation };
}

export function inverse(p: RigidTransform): RigidTransform {
  const r = p.rotation, t = p.translation;
  const rotation = new Float64Array([r[0], r[3], r[6], r[1], r[4], r[7], r[2], r[5], r[8]]);
  const translation = new Float64Array([
    -(rotation[0] * t[0] + rotation[1] * t[1] + rotation[2] * t[2]),
    -(rotation[3] * t[0] + rotation[4] * t[1] + rotation[5] * t[2]),
    -(rotation[6] * t[0] + rotation[7] * t[1] + rotation[8] * t[2]),
  ]);
  return { rotation, translation };
}

/** Training direction: re-express a relative motion in the camera frame. */
export function conjugateAction(t: RigidTransform, a: RigidTransform): RigidTransform {
  return compose(compose(t, a), inverse(t));
}

/** Inference direction: camera-frame motion back to the base frame. */
export function inverseConjugateAction(t: RigidTransform, aCam: RigidTransform): RigidTransform {
  return compose(compose(inverse(t), aCam), t);
}

export function fromQuatTrans(quatWxyz: ArrayLike<number>, translation: ArrayLike<number>): RigidTransform {
  return {
    rotation: rotFromQuat(quatWxyz),
    translation: Float64Array.from([translation[0], translation[1], translation[2]]),
  };
}
