/** Deterministic PRNG and random-input helpers for the test suites. */

import { ActionBatch, TransformBatch } from "../src/batch";
import { canonicalQuat } from "../src/se3";

/** mulberry32: tiny seedable generator, plenty for test data. */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function uniform(rng: () => number, lo: number, hi: number): number {
  return lo + (hi - lo) * rng();
}

export function randomUnitQuat(rng: () => number): Float64Array {
  // Box-Muller normals, normalized: uniform on the 3-sphere.
  const normals = new Float64Array(4);
  for (let k = 0; k < 4; k += 2) {
    const u1 = Math.max(rng(), 1e-12);
    const u2 = rng();
    const radius = Math.sqrt(-2.0 * Math.log(u1));
    normals[k] = radius * Math.cos(2.0 * Math.PI * u2);
    normals[k + 1] = radius * Math.sin(2.0 * Math.PI * u2);
  }
  const norm = Math.hypot(normals[0], normals[1], normals[2], normals[3]);
  for (let k = 0; k < 4; k++) normals[k] /= norm;
  return canonicalQuat(normals);
}

export function randomActionBatch(rng: () => number, rows: number, scale = 0.3): ActionBatch {
  const data = new Float64Array(rows * 7);
  for (let row = 0; row < rows; row++) {
    const base = row * 7;
    for (let k = 0; k < 3; k++) data[base + k] = uniform(rng, -scale, scale);
    data[base + 3] = uniform(rng, -Math.PI, Math.PI);
    data[base + 4] = uniform(rng, -Math.PI / 2, Math.PI / 2);
    data[base + 5] = uniform(rng, -Math.PI, Math.PI);
    data[base + 6] = uniform(rng, 0, 1);
  }
  return { data, rows };
}

export function randomTransformBatch(rng: () => number, rows: number, scale = 2.0): TransformBatch {
  const data = new Float64Array(rows * 7);
  for (let row = 0; row < rows; row++) {
    const base = row * 7;
    data.set(randomUnitQuat(rng), base);
    for (let k = 0; k < 3; k++) data[base + 4 + k] = uniform(rng, -scale, scale);
  }
  return { data, rows };
}

export function maxAbsDiff(a: ArrayLike<number>, b: ArrayLike<number>): number {
  let worst = 0.0;
  for (let k = 0; k < a.length; k++) {
    worst = Math.max(worst, Math.abs(a[k] - b[k]));
  }
  return worst;
}
