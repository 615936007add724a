"""Learning rules and odor-training orchestration.

Two rules act during training, both restricted to the newest (immature)
cohort:

* Heterosynaptic excitatory plasticity: when a plastic GC spikes, every
  synapse whose arrival preceded the spike within the current cycle is
  potentiated by delta_p (capped) and stamped with its arrival timestep;
  every other incoming synapse, including silent ones, is depressed by
  delta_d (floored at zero).  Over one sniff this collapses the GC's
  receptive field onto the coincident ensemble that drove it: with the
  default steps, five cycles take ensemble weights exactly to the cap and
  everything else exactly to zero.

* Blocking-period plasticity: a synapse that ran its block/release
  sequence this cycle moves its blocking period by
  round-away-from-zero(eta * (t_ad - t_release)), clamped to
  [0, permissive_len]; a silent apical dendrite pulls the period toward a
  full-epoch block.  With eta = 1 the release aligns with the apical
  initiation time after a single update.

Training mode suppresses somatic inhibition, so MC spike times equal the
input's initiation times throughout; granule cells learn against the raw
feedforward code while their inhibitory synapses learn its timing.
"""
from dataclasses import dataclass

import numpy as np

from .config import GammaConfig, to_milli, to_units
from .encoding import occlude
from .errors import ConfigError, StateError, UsageError
from .library import OdorLibrary, OdorRecord
from .network import Network, levels_to_t_ad
from .seeding import derive_rng


@dataclass(frozen=True)
class PlasticityConfig:
    delta_p: float = 0.05        # potentiation step, in we
    delta_d: float = 0.2         # depression step, in we
    eta: float = 1.0             # blocking-period learning rate
    training_sniffs: int = 1
    training_noise_p: float = 0.0
    excitatory_enabled: bool = True
    inhibitory_enabled: bool = True
    potentiation: str = "causal"  # "causal": arrivals <= spike-1; "exact": == spike-1

    def __post_init__(self):
        if self.delta_p <= 0 or self.delta_d <= 0:
            raise ConfigError("delta_p and delta_d must be positive")
        if not (0.0 < self.eta <= 1.0):
            raise ConfigError("eta must be in (0, 1]")
        if self.training_sniffs < 1:
            raise ConfigError("training_sniffs must be >= 1")
        if not (0.0 <= self.training_noise_p <= 1.0):
            raise ConfigError("training_noise_p must be in [0, 1]")
        if self.potentiation not in ("causal", "exact"):
            raise ConfigError("potentiation must be 'causal' or 'exact'")


# Networks trained by the gradual regime carry +-1 jitter in both their
# timing tags and blocking periods, so they consolidate at a wider matching
# tolerance than the exact one-shot regime.
FEW_SHOT_PHASE_TOLERANCE = 2


def few_shot_config(training_noise_p: float = 0.4, sniffs: int = 200,
                    rate: float = 0.005, eta: float = 0.1) -> PlasticityConfig:
    """Slow-learning preset for gradual adaptation over many noisy sniffs.

    The potentiation step equals ``rate`` (in we) and depression runs at
    1.75x that.  A genuine ensemble synapse stays coincident in a clear
    majority of training sniffs at moderate occlusion and keeps growing;
    chance coincidences decay.  The ratio sets where noise starts to
    dominate training: moderate occlusion of the training samples still
    yields a usable attractor, strong occlusion does not.  (The steep
    one-shot ratio would erode genuine members under any training noise.)

    Build the network with ``phase_tolerance=FEW_SHOT_PHASE_TOLERANCE`` for
    this regime.
    """
    return PlasticityConfig(
        delta_p=rate, delta_d=1.75 * rate, eta=eta,
        training_sniffs=sniffs, training_noise_p=training_noise_p,
    )


class _KernelPlasticity:
    """Quantized view of a PlasticityConfig as kernel scalars."""

    def __init__(self, cfg: PlasticityConfig, cohort: int):
        self.cohort = cohort
        self.do_exc = cfg.excitatory_enabled
        self.do_inh = cfg.inhibitory_enabled
        self.dp = to_units(cfg.delta_p)
        self.dd = to_units(cfg.delta_d)
        self.eta_milli = to_milli(cfg.eta)
        self.pot_exact = cfg.potentiation == "exact"


def excitatory_update(net: Network, gc_id: int, gc_spike_ts: int, arrivals: dict,
                      cfg: PlasticityConfig):
    """Apply the heterosynaptic rule to one GC spike.

    ``arrivals`` maps synapse index (into the network's synapse arrays) to
    the arrival timestep within the current cycle.  Synapses of other GCs in
    the map are rejected.
    """
    if net.gc_mature[gc_id]:
        raise UsageError("excitatory_update called on a mature granule cell")
    syn = net.synapses_of_gc(gc_id)
    for k in arrivals:
        if net.syn_gc[k] != gc_id:
            raise UsageError(f"synapse {k} is not an input of GC {gc_id}")
    dp, dd = to_units(cfg.delta_p), to_units(cfg.delta_d)
    cap = net.cfg.weight_cap_units
    for k in syn:
        a = arrivals.get(int(k), None)
        if cfg.potentiation == "exact":
            causal = a is not None and a == gc_spike_ts - 1
        else:
            causal = a is not None and a <= gc_spike_ts - 1
        if causal:
            net.syn_w[k] = min(net.syn_w[k] + dp, cap)
            if net.syn_phase[k] < 0:
                net.syn_phase[k] = a
            elif a != net.syn_phase[k]:
                net.syn_phase[k] += 1 if a > net.syn_phase[k] else -1
        else:
            net.syn_w[k] = max(net.syn_w[k] - dd, 0)


def inhibitory_update(net: Network, gc_id: int, t_ad, eta: float,
                      gamma: GammaConfig = None):
    """Move one blocking period toward the column's apical initiation time.

    ``t_ad`` is the initiation timestep of the cocolumnar MC this cycle, or
    None when its apical dendrite stayed silent (the period then grows
    toward a full-epoch block).  The release time equals the current
    blocking period.  Fractional updates round away from zero.
    """
    gamma = gamma or net.gamma
    plen = gamma.permissive_len
    ta = plen if t_ad is None else int(t_ad)
    tr = int(net.inh_delta[gc_id])
    raw = to_milli(eta) * (ta - tr)
    if raw > 0:
        db = (raw + 999) // 1000
    elif raw < 0:
        db = -((-raw + 999) // 1000)
    else:
        db = 0
    net.inh_delta[gc_id] = int(np.clip(tr + db, 0, plen))


def add_cohort(net: Network) -> int:
    """Neurogenesis step: add a fresh plastic cohort (see Network.add_cohort)."""
    return net.add_cohort()


def train_odor(net: Network, clean_sample, label: str, cfg: PlasticityConfig,
               library: OdorLibrary, noise_seed: int = None) -> OdorRecord:
    """Teach the newest cohort one odor and freeze it.

    Runs ``training_sniffs`` training-mode sniffs (each optionally occluded
    at ``training_noise_p`` with fresh noise per sniff), marks the cohort
    mature, stores the learned pattern (fifth-cycle clean response with
    plasticity frozen), and appends the record to the library.
    """
    if label in library:
        raise UsageError(f"odor {label!r} already trained")
    cid = net.newest_cohort()
    if net.cohort_is_mature(cid):
        raise StateError("no immature cohort; call add_cohort first")

    clean = np.asarray(clean_sample)
    kp = _KernelPlasticity(cfg, cid)
    noise_rng = None
    if cfg.training_noise_p > 0:
        noise_rng = derive_rng(
            net.cfg.rng_seed if noise_seed is None else noise_seed, "train-noise", label
        )

    cohort_mask = net.gc_cohort == cid
    spiked = np.zeros(net.n_gc, bool)
    tuned_per_cycle = []
    aligned = checked = 0
    plen = net.gamma.permissive_len
    last_cycle = net.gamma.cycles_per_sniff - 1

    for sniff in range(cfg.training_sniffs):
        sample = clean
        if noise_rng is not None:
            sample = occlude(clean, cfg.training_noise_p, noise_rng)
        t_ad = levels_to_t_ad(sample, net.gamma)
        net.reset_sniff_state()
        for c in range(net.gamma.cycles_per_sniff):
            if sniff == cfg.training_sniffs - 1 and c == last_cycle:
                # release events of the final training cycle, for convergence checks
                ran = (net.gc_pending.astype(bool)) & cohort_mask & (net.inh_delta >= 1)
                idx = np.nonzero(ran)[0]
                t_r = net.inh_delta[idx].astype(int)
                ta = t_ad[net.gc_col[idx]].astype(int)
                ta = np.where(ta >= 0, ta, plen)
                checked = int(idx.size)
                aligned = int(np.count_nonzero(t_r == ta))
            _, gc_ts = net.run_cycle(sample, c, "train", _plast=kp)
            spiked |= gc_ts >= 0
            if sniff == 0:
                tuned_per_cycle.append(int(np.count_nonzero(spiked & cohort_mask)))

    net.gc_mature[cohort_mask] = 1
    tuned = np.nonzero(spiked & cohort_mask)[0].astype(np.int32)
    pattern = net.run_sniff(clean, "test").cycles[-1]
    record = OdorRecord(
        label=label, cohort_id=cid, learned_pattern=pattern, tuned_gcs=tuned,
        tuned_per_cycle=tuned_per_cycle, final_cycle_alignment=(aligned, checked),
    )
    library.add(record)
    return record
