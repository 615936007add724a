"""Threshold interventions: the descending search schedule and cortical priming.

Both act purely on granule-cell thresholds and restore or expose the exact
pre-call state, so recall experiments can interleave them freely with
plain classification.
"""
from dataclasses import dataclass

import numpy as np

from .config import to_milli, to_units
from .errors import ConfigError
from .library import OdorLibrary
from .network import Network
from .readout import DEFAULT_THRESHOLD, Classification, _pick, jaccard_similarity


@dataclass(frozen=True)
class NeuromodSchedule:
    """Threshold descent across sniffs: one scale factor per sniff."""

    scale_factors: tuple = (1.0, 0.9, 0.8, 0.7, 0.6)

    def __post_init__(self):
        f = self.scale_factors
        if len(f) != 5:
            raise ConfigError("schedule must have 5 entries")
        if f[0] != 1.0:
            raise ConfigError("schedule must start at 1.0")
        if any(not (0.0 < x <= 1.0) for x in f):
            raise ConfigError("scale factors must be in (0, 1]")
        if any(b > a for a, b in zip(f, f[1:])):
            raise ConfigError("schedule must be nonincreasing")


@dataclass(frozen=True)
class PrimingSpec:
    target_label: str
    fraction: float = 1.0
    primed_threshold: float = 2.0  # in we

    def __post_init__(self):
        if not (0.0 <= self.fraction <= 1.0):
            raise ConfigError("priming fraction must be in [0, 1]")
        if self.primed_threshold <= 0:
            raise ConfigError("primed threshold must be positive")


def _scaled(base: np.ndarray, factor: float) -> np.ndarray:
    milli = to_milli(factor)
    return (base * milli + 500) // 1000


def neuromodulated_identify(net: Network, sample, library: OdorLibrary,
                            sched: NeuromodSchedule = None,
                            threshold: float = DEFAULT_THRESHOLD) -> Classification:
    """Sniff the same sample once per schedule state and classify on the best.

    For each state, all GC thresholds are scaled by the state's factor and
    one test sniff runs; the odor score is the maximum of the five
    final-cycle similarities.  Thresholds are restored exactly afterward.
    """
    sched = sched or NeuromodSchedule()
    saved = net.gc_threshold.copy()
    per_state = {rec.label: [] for rec in library}
    try:
        for f in sched.scale_factors:
            net.gc_threshold[:] = _scaled(saved, f)
            resp = net.run_sniff(sample, "test")
            for rec in library:
                per_state[rec.label].append(
                    jaccard_similarity(resp.cycles[-1], rec.learned_pattern)
                )
    finally:
        net.gc_threshold[:] = saved
    best = {lab: max(sims) for lab, sims in per_state.items()}
    candidates = {lab for lab, s in best.items() if s > threshold}
    if not candidates:
        return Classification(None, max(best.values()), per_state)
    label, score = _pick(candidates, best, library.labels)
    return Classification(label, score, per_state)


def prime_gcs(net: Network, library: OdorLibrary, spec: PrimingSpec,
              rng: np.random.Generator):
    """Lower the thresholds of a sampled fraction of the target odor's tuned GCs."""
    rec = library.get(spec.target_label)
    tuned = rec.tuned_gcs
    k = int(np.floor(spec.fraction * tuned.size + 0.5))
    if k == 0:
        return np.empty(0, np.int32)
    chosen = rng.choice(tuned, size=k, replace=False)
    net.gc_threshold[chosen] = to_units(spec.primed_threshold)
    return np.sort(chosen)


def clear_priming(net: Network):
    """Restore every GC threshold to its unscaled, unprimed base value."""
    net.gc_threshold[:] = net.gc_threshold_base
