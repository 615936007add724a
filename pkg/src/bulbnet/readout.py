"""Similarity scores and classification over sniff responses."""
from dataclasses import dataclass, field

import numpy as np

from .config import GammaConfig
from .errors import UsageError
from .library import OdorLibrary
from .network import SniffResponse

DEFAULT_THRESHOLD = 0.75


def _as_pattern(x) -> np.ndarray:
    """Accept an int array of per-MC spike timesteps (-1 silent)."""
    a = np.asarray(x)
    if a.ndim != 1:
        raise UsageError("spike pattern must be a 1-D per-MC timestep array")
    return a


def jaccard_similarity(a, b) -> float:
    """|intersection| / |union| over (mc, timestep) spike sets; 0/0 -> 1."""
    a, b = _as_pattern(a), _as_pattern(b)
    if a.shape != b.shape:
        raise UsageError("patterns must cover the same columns")
    live_a, live_b = a >= 0, b >= 0
    inter = int(np.count_nonzero(live_a & live_b & (a == b)))
    union = int(np.count_nonzero(live_a)) + int(np.count_nonzero(live_b)) - inter
    if union == 0:
        return 1.0
    return inter / union


@dataclass
class Classification:
    label: str = None  # None means "unknown"
    best_similarity: float = 0.0
    per_cycle: dict = field(default_factory=dict)  # label -> list of per-cycle sims

    @property
    def is_unknown(self) -> bool:
        return self.label is None


def _pick(candidates, scores, order):
    """Highest score wins; ties go to the earliest-trained odor."""
    best, best_score = None, -1.0
    for lab in order:
        if lab in candidates and scores[lab] > best_score:
            best, best_score = lab, scores[lab]
    return best, best_score


def classify_sniff(resp: SniffResponse, library: OdorLibrary,
                   threshold: float = DEFAULT_THRESHOLD) -> Classification:
    """Classify by final-cycle similarity, thresholded.

    Candidates are odors whose fifth-cycle similarity exceeds the threshold;
    with several candidates the one with the greatest similarity across all
    five cycles wins (ties to the earliest-trained).  No candidate means
    unknown.
    """
    if len(library) == 0:
        raise UsageError("classify_sniff needs a non-empty library")
    per_cycle = {}
    for rec in library:
        per_cycle[rec.label] = [
            jaccard_similarity(c, rec.learned_pattern) for c in resp.cycles
        ]
    final = {lab: sims[-1] for lab, sims in per_cycle.items()}
    candidates = {lab for lab, s in final.items() if s > threshold}
    if not candidates:
        return Classification(None, max(final.values()), per_cycle)
    peak = {lab: max(per_cycle[lab]) for lab in candidates}
    label, score = _pick(candidates, peak, library.labels)
    return Classification(label, score, per_cycle)


def cycle_to_rank_vector(spikes, gamma: GammaConfig) -> np.ndarray:
    """Per-MC rank values (earlier spike, larger value), normalized to unit sum.

    The value ``permissive_len - spike_ts`` inverts the latency mapping, so a
    clean response round-trips to its (normalized) level vector exactly.  An
    all-silent cycle maps to the zero vector.
    """
    p = _as_pattern(spikes)
    vals = np.where(p >= 0, gamma.permissive_len - p, 0).astype(float)
    total = vals.sum()
    if total > 0:
        vals /= total
    return vals


def manhattan_similarity(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.shape != b.shape:
        raise UsageError("vectors must have matching dimension")
    return 1.0 / (1.0 + float(np.abs(a - b).sum()))


def manhattan_classify(test, train_vectors,
                       threshold: float = DEFAULT_THRESHOLD):
    """Nearest neighbor under 1/(1+Manhattan distance), thresholded.

    ``train_vectors`` is a list of (label, vector) in training order.
    Returns the winning label or None ("none of the above").
    """
    best, best_sim = None, -1.0
    for label, vec in train_vectors:
        s = manhattan_similarity(test, vec)
        if s > best_sim:
            best, best_sim = label, s
    if best_sim > threshold:
        return best
    return None
