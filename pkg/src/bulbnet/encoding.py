"""Sensor encoding: calibration, 16-level discretization, sparsification, occlusion.

A level vector is a plain int array of length ``num_columns`` with values in
0..15; level 0 means the sensor is silent for this sample.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UsageError

NUM_LEVELS = 16
DEGENERATE_EPS = 1.0  # raw units added to max when a sensor has zero spread


@dataclass(frozen=True)
class NoiseSpec:
    """Impulse-noise occlusion: fraction p of positions replaced by uniform levels."""

    p: float
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ConfigError("occlusion fraction must be in [0, 1]")


@dataclass(frozen=True)
class SensorCalibration:
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        if self.mins.shape != self.maxs.shape or self.mins.ndim != 1:
            raise ConfigError("calibration mins/maxs must be matching 1-D arrays")
        if not np.all(self.maxs > self.mins):
            raise ConfigError("calibration requires max > min for every sensor")

    @property
    def num_sensors(self) -> int:
        return self.mins.size


def calibrate(recordings) -> SensorCalibration:
    """Per-sensor min/max over every row of every recording.

    Sensors with zero spread get their max widened by one raw unit so the
    level mapping stays defined.
    """
    mats = [np.asarray(r, dtype=float) for r in recordings]
    if not mats:
        raise UsageError("calibrate needs at least one recording")
    width = mats[0].shape[1]
    for m in mats:
        if m.ndim != 2 or m.shape[1] != width:
            raise UsageError("all recordings must share the same sensor count")
    mins = np.min([m.min(axis=0) for m in mats], axis=0)
    maxs = np.max([m.max(axis=0) for m in mats], axis=0)
    flat = maxs <= mins
    maxs[flat] = mins[flat] + DEGENERATE_EPS
    return SensorCalibration(mins=mins, maxs=maxs)


def discretize(raw, cal: SensorCalibration, num_levels: int = NUM_LEVELS):
    """Map raw readings to integer levels 0..num_levels-1, clamped at the range ends."""
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (cal.num_sensors,):
        raise UsageError(f"expected {cal.num_sensors} readings, got {raw.shape}")
    frac = (raw - cal.mins) / (cal.maxs - cal.mins)
    levels = np.floor(frac * num_levels).astype(np.int64)
    return np.clip(levels, 0, num_levels - 1)


def sparsify(levels):
    """Zero the smallest half of the vector (ties zero the lower index first)."""
    levels = np.asarray(levels)
    out = levels.copy()
    order = np.argsort(levels, kind="stable")
    out[order[: levels.size // 2]] = 0
    return out


def occlusion_count(p: float, n: int) -> int:
    """Number of positions replaced: round-half-up of p*n."""
    return int(np.floor(p * n + 0.5))


def occlude(levels, p: float, rng: np.random.Generator, num_levels: int = NUM_LEVELS):
    """Replace a fraction p of positions with uniform random levels.

    Positions are drawn without replacement; replacement values may equal the
    original value (still counted as occluded).  The result is not
    re-sparsified.
    """
    if not (0.0 <= p <= 1.0):
        raise ConfigError("occlusion fraction must be in [0, 1]")
    levels = np.asarray(levels)
    out = levels.copy()
    k = occlusion_count(p, levels.size)
    if k == 0:
        return out
    idx = rng.choice(levels.size, size=k, replace=False)
    out[idx] = rng.integers(0, num_levels, size=k)
    return out


def occlude_with_spec(levels, spec: NoiseSpec):
    return occlude(levels, spec.p, np.random.default_rng(spec.rng_seed))
