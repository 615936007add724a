"""Learned-odor bookkeeping: per-odor records and the ordered library."""
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError


@dataclass
class OdorRecord:
    """What training one odor produced.

    learned_pattern is the fifth-cycle response to the clean sample with
    plasticity frozen (the stored attractor target), as an int16 array of
    per-MC spike timesteps (-1 = silent).  tuned_gcs are the ids of cohort
    GCs that spiked at least once during training.
    """

    label: str
    cohort_id: int
    learned_pattern: np.ndarray
    tuned_gcs: np.ndarray
    tuned_per_cycle: list = field(default_factory=list)
    final_cycle_alignment: tuple = (0, 0)  # (aligned, checked) release events

    def pattern_set(self) -> frozenset:
        return frozenset(
            (int(m), int(t)) for m, t in enumerate(self.learned_pattern) if t >= 0
        )


class OdorLibrary:
    """Learned representations in training order."""

    def __init__(self):
        self._records = []
        self._by_label = {}

    def add(self, record: OdorRecord):
        if record.label in self._by_label:
            raise UsageError(f"odor {record.label!r} already trained")
        self._records.append(record)
        self._by_label[record.label] = record

    def get(self, label: str) -> OdorRecord:
        try:
            return self._by_label[label]
        except KeyError:
            raise UsageError(f"unknown odor {label!r}") from None

    def __contains__(self, label: str) -> bool:
        return label in self._by_label

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    @property
    def records(self):
        return list(self._records)

    @property
    def labels(self):
        return [r.label for r in self._records]
