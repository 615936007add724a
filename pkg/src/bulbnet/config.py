"""Network and rhythm configuration.

Weight-unit quantities (thresholds, plasticity steps, caps) are handled
internally as int64 multiples of ``we / WEIGHT_SCALE`` where ``we`` is the
initial excitatory weight.  Integer arithmetic keeps every weight update,
threshold comparison and freeze check exact, independent of summation order,
and bit-identical between the compiled and pure-python kernels.
"""
from dataclasses import dataclass

from .errors import ConfigError

WEIGHT_SCALE = 1000  # integer weight units per we


def to_units(value_in_we: float) -> int:
    """Quantize a weight-unit quantity (expressed in we) to integer units."""
    return int(round(float(value_in_we) * WEIGHT_SCALE))


def to_milli(rate: float) -> int:
    """Quantize a dimensionless rate (learning rate, threshold scale) to 1/1000."""
    return int(round(float(rate) * 1000))


@dataclass(frozen=True)
class GammaConfig:
    """Timing of the fast processing rhythm.

    Each cycle is ``permissive_len`` timesteps in which mitral cells integrate
    sensor input and may spike, followed by ``inhibitory_len`` timesteps in
    which their activation is held at zero while granule cells integrate and
    spike.  ``permissive_len`` doubles as the number of sensor levels the
    latency code can represent.
    """

    permissive_len: int = 16
    inhibitory_len: int = 24
    cycles_per_sniff: int = 5

    def __post_init__(self):
        if self.permissive_len < 1 or self.inhibitory_len < 1:
            raise ConfigError("epoch lengths must be >= 1")
        if self.cycles_per_sniff < 1:
            raise ConfigError("cycles_per_sniff must be >= 1")

    @property
    def cycle_len(self) -> int:
        return self.permissive_len + self.inhibitory_len

    @property
    def num_levels(self) -> int:
        """Number of representable input levels (0 .. permissive_len - 1 latencies plus silence)."""
        return self.permissive_len


@dataclass(frozen=True)
class NetworkConfig:
    num_columns: int = 72
    gcs_per_cohort: int = 5
    mc_to_gc_prob: float = 0.2
    base_exc_weight: float = 1.0          # we, the weight unit
    gc_threshold_factor: float = 6.0      # theta = factor * we
    exc_weight_cap_factor: float = 1.25   # cap = factor * we
    gc_refractory: int = 20               # timesteps a GC cannot re-spike
    phase_tolerance: int = 1              # +/- ts a consolidated synapse accepts
    delay_spread: int = 8                 # delays drawn from {permissive .. permissive+spread-1}
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.mc_to_gc_prob <= 1.0):
            raise ConfigError("mc_to_gc_prob must be in (0, 1]")
        if self.base_exc_weight <= 0:
            raise ConfigError("base_exc_weight must be positive")
        if self.gc_threshold_factor <= 0:
            raise ConfigError("gc_threshold_factor must be positive")
        if self.exc_weight_cap_factor < 1:
            raise ConfigError("exc_weight_cap_factor must be >= 1")
        if self.num_columns < 1 or self.gcs_per_cohort < 1:
            raise ConfigError("num_columns and gcs_per_cohort must be >= 1")
        if self.gc_refractory < 0 or self.phase_tolerance < 0:
            raise ConfigError("gc_refractory and phase_tolerance must be >= 0")
        if self.delay_spread < 1:
            raise ConfigError("delay_spread must be >= 1")

    @property
    def threshold_units(self) -> int:
        return to_units(self.gc_threshold_factor)

    @property
    def weight_cap_units(self) -> int:
        return to_units(self.exc_weight_cap_factor)
