"""Columnar spiking network: state, construction, and the gamma/theta dynamics.

The network is a set of columns, one mitral cell (MC) per column plus the
granule cells (GCs) that inhibit it.  Sensor levels drive MC apical
dendrites; MC spike latency within the permissive epoch encodes level
("stronger input, earlier spike").  GCs listen to MCs across the whole
network through delayed excitatory synapses, spike during the inhibitory
epoch, and each GC delays or suppresses its own column's MC on the next
cycle through a three-state inhibitory synapse whose learned blocking
period controls the MC's release time.

All mutable simulation state lives in flat numpy arrays so the per-cycle
update can run through either kernel backend unchanged.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .config import GammaConfig, NetworkConfig, WEIGHT_SCALE
from .errors import ConfigError, StateError, UsageError
from .seeding import derive_rng


def ad_initiation_time(level: int, gamma: GammaConfig):
    """Apical-dendrite initiation timestep for a sensor level, or None if silent.

    Level v >= 1 initiates at ``permissive_len - v``: the strongest level
    spikes earliest (ts 1), level 1 latest (ts 15), level 0 never.
    """
    level = int(level)
    if not (0 <= level <= gamma.permissive_len - 1):
        raise UsageError(f"level {level} outside 0..{gamma.permissive_len - 1}")
    if level == 0:
        return None
    return gamma.permissive_len - level


def levels_to_t_ad(levels, gamma: GammaConfig) -> np.ndarray:
    levels = np.asarray(levels)
    if np.any((levels < 0) | (levels > gamma.permissive_len - 1)):
        raise UsageError("levels outside the representable range")
    return np.where(levels > 0, gamma.permissive_len - levels, -1).astype(np.int16)


@dataclass
class SniffResponse:
    """Per-cycle MC spike sets: cycles[i][mc] = spike timestep or -1."""

    cycles: list

    @property
    def n_cycles(self) -> int:
        return len(self.cycles)

    def spike_set(self, i: int) -> frozenset:
        c = self.cycles[i]
        return frozenset((int(m), int(t)) for m, t in enumerate(c) if t >= 0)

    def spike_count(self, i: int) -> int:
        return int((self.cycles[i] >= 0).sum())

    def __eq__(self, other):
        if not isinstance(other, SniffResponse):
            return NotImplemented
        return len(self.cycles) == len(other.cycles) and all(
            np.array_equal(a, b) for a, b in zip(self.cycles, other.cycles)
        )


class Network:
    """Columnar network state plus the discrete-time simulation loop.

    Construction wires cohort 0: ``gcs_per_cohort`` immature GCs per column,
    each MC->GC pair connected independently with ``mc_to_gc_prob``, synapse
    delays drawn uniformly from the inhibitory-epoch-targeting range so every
    arrival (and therefore every GC spike) lands inside the inhibitory epoch,
    and one inhibitory synapse per GC onto its column's MC with blocking
    period 0.

    A Network is single-threaded during simulation; run one instance per
    worker for parallel experiments.
    """

    def __init__(self, cfg: NetworkConfig = None, gamma: GammaConfig = None):
        self.cfg = cfg or NetworkConfig()
        self.gamma = gamma or GammaConfig()
        if self.cfg.delay_spread > self.gamma.inhibitory_len - self.gamma.permissive_len:
            # ensures every arrival and GC spike lands inside the inhibitory epoch
            raise ConfigError(
                "delay_spread must not exceed inhibitory_len - permissive_len"
            )
        n = self.cfg.num_columns

        self.n_mc = n
        self.n_gc = 0
        self.n_cohorts = 0

        # granule cells
        self.gc_col = np.empty(0, np.int32)
        self.gc_cohort = np.empty(0, np.int32)
        self.gc_mature = np.empty(0, np.uint8)
        self.gc_threshold_base = np.empty(0, np.int64)
        self.gc_threshold = np.empty(0, np.int64)   # current (priming / modulation)
        self.inh_delta = np.empty(0, np.int16)      # blocking periods, one per GC

        # excitatory synapses, kept sorted by presynaptic MC (CSR)
        self.syn_pre = np.empty(0, np.int32)
        self.syn_gc = np.empty(0, np.int32)
        self.syn_w = np.empty(0, np.int64)
        self.syn_delay = np.empty(0, np.int16)
        self.syn_phase = np.empty(0, np.int16)      # learned arrival tag, -1 unset
        self.mc_ptr = np.zeros(n + 1, np.int64)
        self.gc_ptr = np.zeros(1, np.int64)
        self.gc_syn = np.empty(0, np.int64)

        # per-sniff transient state
        self.gc_refr_until = np.empty(0, np.int64)
        self.gc_pending = np.empty(0, np.uint8)
        self.gc_held = np.empty(0, np.int16)
        self.gc_inh_updated = np.empty(0, np.uint8)
        self._clock = 0  # cycles since the last state reset (continuous mode)

        self._run_cycle = _kernel.run_cycle
        self.add_cohort()

    # -- construction ------------------------------------------------------

    def add_cohort(self) -> int:
        """Add a fresh, plastic cohort of GCs to every column.

        Requires every existing cohort to be mature.  New GCs receive
        excitatory synapses from each MC with the configured probability and
        an inert (blocking period 0) inhibitory synapse onto their column.
        """
        if self.n_gc and not np.all(self.gc_mature[self.gc_cohort == self.n_cohorts - 1]):
            raise StateError("previous cohort is still immature")
        cid = self.n_cohorts
        self.n_cohorts += 1
        rng = derive_rng(self.cfg.rng_seed, "cohort", cid)

        per = self.cfg.gcs_per_cohort
        new = self.cfg.num_columns * per
        base = self.n_gc
        self.n_gc += new

        self.gc_col = np.concatenate(
            [self.gc_col, np.repeat(np.arange(self.cfg.num_columns, dtype=np.int32), per)]
        )
        self.gc_cohort = np.concatenate([self.gc_cohort, np.full(new, cid, np.int32)])
        self.gc_mature = np.concatenate([self.gc_mature, np.zeros(new, np.uint8)])
        theta = np.full(new, self.cfg.threshold_units, np.int64)
        self.gc_threshold_base = np.concatenate([self.gc_threshold_base, theta])
        self.gc_threshold = np.concatenate([self.gc_threshold, theta.copy()])
        self.inh_delta = np.concatenate([self.inh_delta, np.zeros(new, np.int16)])

        mask = rng.random((self.cfg.num_columns, new)) < self.cfg.mc_to_gc_prob
        pre, gc_local = np.nonzero(mask)
        d0 = self.gamma.permissive_len
        delays = rng.integers(d0, d0 + self.cfg.delay_spread, size=pre.size)
        self.syn_pre = np.concatenate([self.syn_pre, pre.astype(np.int32)])
        self.syn_gc = np.concatenate([self.syn_gc, (gc_local + base).astype(np.int32)])
        self.syn_w = np.concatenate([self.syn_w, np.full(pre.size, WEIGHT_SCALE, np.int64)])
        self.syn_delay = np.concatenate([self.syn_delay, delays.astype(np.int16)])
        self.syn_phase = np.concatenate([self.syn_phase, np.full(pre.size, -1, np.int16)])
        self._reindex()

        self.gc_refr_until = np.zeros(self.n_gc, np.int64)
        self.gc_pending = np.zeros(self.n_gc, np.uint8)
        self.gc_held = np.full(self.n_gc, -1, np.int16)
        self.gc_inh_updated = np.zeros(self.n_gc, np.uint8)
        return cid

    def _reindex(self):
        """Re-sort synapses by presynaptic MC and rebuild both CSR indexes."""
        order = np.argsort(self.syn_pre, kind="stable")
        for name in ("syn_pre", "syn_gc", "syn_w", "syn_delay", "syn_phase"):
            setattr(self, name, getattr(self, name)[order])
        self.mc_ptr = np.zeros(self.n_mc + 1, np.int64)
        np.add.at(self.mc_ptr, self.syn_pre + 1, 1)
        np.cumsum(self.mc_ptr, out=self.mc_ptr)
        gc_order = np.argsort(self.syn_gc, kind="stable")
        self.gc_syn = gc_order.astype(np.int64)
        self.gc_ptr = np.zeros(self.n_gc + 1, np.int64)
        np.add.at(self.gc_ptr, self.syn_gc.astype(np.int64) + 1, 1)
        np.cumsum(self.gc_ptr, out=self.gc_ptr)

    # -- introspection -----------------------------------------------------

    @property
    def n_exc_synapses(self) -> int:
        return self.syn_w.size

    def cohort_gcs(self, cohort_id: int) -> np.ndarray:
        return np.nonzero(self.gc_cohort == cohort_id)[0]

    def newest_cohort(self) -> int:
        return self.n_cohorts - 1

    def cohort_is_mature(self, cohort_id: int) -> bool:
        return bool(np.all(self.gc_mature[self.gc_cohort == cohort_id]))

    def synapses_of_gc(self, gc_id: int) -> np.ndarray:
        return self.gc_syn[self.gc_ptr[gc_id]:self.gc_ptr[gc_id + 1]]

    def cohort_weight_state(self, cohort_id: int):
        """Copies of all plastic state touching a cohort (for freeze checks)."""
        syn = np.nonzero(self.gc_cohort[self.syn_gc] == cohort_id)[0]
        gcs = self.gc_cohort == cohort_id
        return {
            "weights": self.syn_w[syn].copy(),
            "phases": self.syn_phase[syn].copy(),
            "deltas": self.inh_delta[gcs].copy(),
        }

    # -- simulation --------------------------------------------------------

    def reset_sniff_state(self):
        """Clear per-sniff transients (pending flags, refractoriness, holds)."""
        self.gc_refr_until[:] = 0
        self.gc_pending[:] = 0
        self.gc_inh_updated[:] = 0
        self.gc_held[:] = -1
        self._clock = 0

    def run_cycle(self, levels, cycle_index: int, mode: str = "test", _plast=None):
        """Advance one gamma cycle; returns (mc spike array, gc spike array).

        ``mode="train"`` suppresses somatic inhibition (MCs fire at their
        apical initiation time) and, when ``_plast`` carries an active
        plasticity context, applies both learning rules to the plastic
        cohort.  Weights are untouched otherwise.
        """
        if mode not in ("train", "test"):
            raise UsageError(f"mode must be 'train' or 'test', got {mode!r}")
        t_ad = levels_to_t_ad(levels, self.gamma)
        if t_ad.shape[0] != self.n_mc:
            raise UsageError(f"expected {self.n_mc} levels, got {t_ad.shape[0]}")
        mc_ts = np.empty(self.n_mc, np.int16)
        gc_ts = np.empty(self.n_gc, np.int16)
        train = mode == "train"
        plastic_cohort, do_exc, do_inh, dp, dd, eta_milli = -1, False, False, 0, 0, 0
        pot_exact = False
        if train and _plast is not None:
            plastic_cohort = _plast.cohort
            do_exc, do_inh = _plast.do_exc, _plast.do_inh
            dp, dd, eta_milli = _plast.dp, _plast.dd, _plast.eta_milli
            pot_exact = _plast.pot_exact
        self._run_cycle(
            t_ad,
            self.mc_ptr, self.syn_pre, self.syn_gc, self.syn_w, self.syn_delay,
            self.syn_phase,
            self.gc_ptr, self.gc_syn,
            self.gc_col, self.gc_cohort, self.gc_mature, self.gc_threshold,
            self.gc_refr_until, self.gc_pending, self.gc_held, self.gc_inh_updated,
            self.inh_delta,
            mc_ts, gc_ts,
            cycle_index, self.gamma.permissive_len, self.gamma.cycle_len,
            self.cfg.gc_refractory, self.cfg.phase_tolerance,
            train, plastic_cohort, do_exc, do_inh,
            dp, dd, self.cfg.weight_cap_units, eta_milli, pot_exact,
        )
        return mc_ts, gc_ts

    def run_sniff(self, levels, mode: str = "test", reset: bool = True) -> SniffResponse:
        """One sample presentation: the same input over cycles_per_sniff cycles.

        Per-sniff transient state is cleared first (pass ``reset=False`` for
        continuous back-to-back sampling: pending inhibition then carries
        seamlessly into the next sample's first cycle and the cycle clock
        keeps running).  Training-mode plasticity is not applied here; odor
        learning goes through the trainer, which drives cycles itself.
        """
        if reset:
            self.reset_sniff_state()
        cycles = []
        base = self._clock
        for c in range(self.gamma.cycles_per_sniff):
            mc_ts, _ = self.run_cycle(levels, base + c, mode)
            cycles.append(mc_ts)
        self._clock = base + self.gamma.cycles_per_sniff
        return SniffResponse(cycles=cycles)


def build_network(cfg: NetworkConfig = None, gamma: GammaConfig = None) -> Network:
    return Network(cfg, gamma)


def run_gamma_cycle(net: Network, levels, cycle_index: int, mode: str = "test"):
    """Single-cycle entry point; returns the MC spike array for the cycle."""
    mc_ts, _ = net.run_cycle(levels, cycle_index, mode)
    return mc_ts


def run_sniff(net: Network, levels, mode: str = "test") -> SniffResponse:
    return net.run_sniff(levels, mode)
