"""7-dim action codec: matrix <-> vector, range normalization, bin tokenization.

An action vector is <x, y, z, roll, pitch, yaw, gripper>: translation in
meters, extrinsic X-Y-Z euler angles in radians, gripper position in [0, 1].
The gripper is an absolute position, never a delta: it passes through every
frame change untouched and its normalization bounds are pinned to [0, 1]
rather than fitted.

Normalization maps each dimension affinely from fitted [lower, upper] bounds
onto [-1, 1] (values outside clip); quantization buckets [-1, 1] into
half-open equal-width bins, the top bin closed.

All array-in/array-out functions here accept leading batch dimensions:
shape (..., 7) works everywhere a single (7,) vector does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import se3

ACTION_DIM = 7
GRIPPER_DIM = 6
# Slack allowed on quantize inputs before rejecting as un-normalized.
QUANTIZE_INPUT_TOL = 1e-9
# Half-width added to each side of a degenerate (lower == upper) bound.
DEGENERATE_WIDEN = 1e-6

ACTION_FIELDS = ("x", "y", "z", "roll", "pitch", "yaw", "gripper")


def _as_action7(v, name: str = "action7") -> np.ndarray:
    out = np.asarray(v, dtype=np.float64)
    if out.shape[-1:] != (ACTION_DIM,):
        raise ValueError(f"{name} must have shape (..., 7), got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} has non-finite components")
    return out


def encode_action(action: se3.RigidTransform, gripper: float) -> np.ndarray:
    """Pack a relative motion plus gripper position into a 7-vector."""
    gripper = float(gripper)
    if not np.isfinite(gripper) or not 0.0 <= gripper <= 1.0:
        raise ValueError(f"gripper must be in [0, 1], got {gripper}")
    out = np.empty(ACTION_DIM)
    out[:3] = action.translation
    out[3:6] = se3.rpy_from_rot(action.rotation)
    out[GRIPPER_DIM] = gripper
    return out


def decode_action(v) -> tuple[se3.RigidTransform, float]:
    """Inverse of encode_action: 7-vector back to (motion, gripper)."""
    v = _as_action7(v)
    if v.ndim != 1:
        raise ValueError("decode_action takes a single (7,) vector")
    motion = se3.RigidTransform(se3.rot_from_rpy(v[3:6]), v[:3])
    return motion, float(v[GRIPPER_DIM])


@dataclass(frozen=True)
class NormalizationStats:
    """Per-dimension normalization bounds plus fitting provenance.

    frame records which coordinate frame the sample actions lived in when
    the quantiles were taken ("base" or "camera").  created is an optional
    caller-supplied timestamp; it is deliberately not auto-populated so
    that identical inputs serialize to identical bytes.
    """

    lower: np.ndarray
    upper: np.ndarray
    q_low: float
    q_high: float
    sample_count: int
    frame: str = "base"
    created: str | None = None

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        if lower.shape != (ACTION_DIM,) or upper.shape != (ACTION_DIM,):
            raise ValueError("bounds must have shape (7,)")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def to_json_dict(self) -> dict:
        return {
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "q_low": self.q_low,
            "q_high": self.q_high,
            "sample_count": self.sample_count,
            "frame": self.frame,
            "created": self.created,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "NormalizationStats":
        return cls(
            lower=np.asarray(d["lower"], dtype=np.float64),
            upper=np.asarray(d["upper"], dtype=np.float64),
            q_low=float(d["q_low"]),
            q_high=float(d["q_high"]),
            sample_count=int(d["sample_count"]),
            frame=str(d.get("frame", "base")),
            created=d.get("created"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "NormalizationStats":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class BinConfig:
    """Quantizer resolution: number of equal-width bins per dimension."""

    bins: int = 256

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")


def fit_normalization(
    samples,
    q_low: float = 0.01,
    q_high: float = 0.99,
    frame: str = "base",
    created: str | None = None,
) -> NormalizationStats:
    """Empirical per-dimension quantile bounds over a set of 7-vectors.

    Dimensions whose fitted span is below DEGENERATE_WIDEN count as
    degenerate (a constant dimension's span is rounding noise, and bounds
    that narrow would tokenize noise) and are widened symmetrically by
    DEGENERATE_WIDEN; the gripper dimension is always pinned to [0, 1].
    """
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != ACTION_DIM:
        raise ValueError(f"samples must have shape (n, 7), got {arr.shape}")
    if arr.shape[0] < 2:
        raise ValueError(f"need at least 2 samples to fit bounds, got {arr.shape[0]}")
    if not 0.0 <= q_low < q_high <= 1.0:
        raise ValueError(f"need 0 <= q_low < q_high <= 1, got ({q_low}, {q_high})")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples contain non-finite values")
    lower = np.quantile(arr, q_low, axis=0)
    upper = np.quantile(arr, q_high, axis=0)
    degenerate = (upper - lower) < DEGENERATE_WIDEN
    lower[degenerate] -= DEGENERATE_WIDEN
    upper[degenerate] += DEGENERATE_WIDEN
    lower[GRIPPER_DIM] = 0.0
    upper[GRIPPER_DIM] = 1.0
    return NormalizationStats(
        lower=lower,
        upper=upper,
        q_low=q_low,
        q_high=q_high,
        sample_count=arr.shape[0],
        frame=frame,
        created=created,
    )


def normalize(v, stats: NormalizationStats) -> np.ndarray:
    """Affine map of each dimension from [lower, upper] to [-1, 1], clipping."""
    v = _as_action7(v)
    span = stats.upper - stats.lower
    return np.clip(2.0 * (v - stats.lower) / span - 1.0, -1.0, 1.0)


def denormalize(n, stats: NormalizationStats) -> np.ndarray:
    """Exact inverse of normalize on the interior of the bounds."""
    n = _as_action7(n, "normalized")
    span = stats.upper - stats.lower
    return stats.lower + (n + 1.0) * 0.5 * span


def quantize(n, config: BinConfig = BinConfig()) -> np.ndarray:
    """Bucket normalized components into integer bins.

    bin = floor((n + 1) / 2 * bins), clamped to [0, bins - 1]: half-open
    intervals with the top bin closed.  Components outside [-1, 1] by more
    than QUANTIZE_INPUT_TOL are rejected (normalize first).
    """
    n = _as_action7(n, "normalized")
    if np.any(np.abs(n) > 1.0 + QUANTIZE_INPUT_TOL):
        worst = float(np.max(np.abs(n)))
        raise ValueError(f"normalized component {worst} outside [-1, 1]; normalize first")
    n = np.clip(n, -1.0, 1.0)
    tokens = np.floor((n + 1.0) * 0.5 * config.bins).astype(np.int64)
    return np.minimum(tokens, config.bins - 1)


def dequantize(tokens, config: BinConfig = BinConfig()) -> np.ndarray:
    """Map bin indices back to bin centers in normalized [-1, 1] space."""
    tokens = np.asarray(tokens)
    if tokens.shape[-1:] != (ACTION_DIM,):
        raise ValueError(f"tokens must have shape (..., 7), got {tokens.shape}")
    if np.any(tokens < 0) or np.any(tokens >= config.bins):
        raise ValueError(f"token outside [0, {config.bins - 1}]")
    return -1.0 + (2.0 * tokens.astype(np.float64) + 1.0) / config.bins


def tokenize_action(v, stats: NormalizationStats, config: BinConfig = BinConfig()) -> np.ndarray:
    """normalize then quantize in one step."""
    return quantize(normalize(v, stats), config)


def detokenize_action(tokens, stats: NormalizationStats, config: BinConfig = BinConfig()) -> np.ndarray:
    """dequantize then denormalize in one step."""
    return denormalize(dequantize(tokens, config), stats)
