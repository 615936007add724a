"""Labeled derivation of RNG streams from one master seed.

Every source of randomness in an experiment draws from a stream derived as
``derive_rng(master, "purpose", label, index, ...)``.  Streams are independent
of each other and of how many sibling streams exist, so adding trials to an
experiment never perturbs the randomness of earlier trials.
"""
import hashlib

import numpy as np


def derive_seed(master_seed: int, *labels) -> int:
    """Map (master seed, label path) to a stable 64-bit seed."""
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for lab in labels:
        h.update(b"/")
        h.update(str(lab).encode())
    return int.from_bytes(h.digest()[:8], "little")


def derive_rng(master_seed: int, *labels) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *labels))
