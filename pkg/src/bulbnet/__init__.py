"""bulbnet: columnar spiking network for one-shot odor learning and recall
under impulse noise, with classical denoising baselines and an experiment
harness."""

__version__ = "0.1.0"

from ._kernel import available_backends, backend_name
from .config import GammaConfig, NetworkConfig
from .encoding import calibrate, discretize, occlude, sparsify
from .library import OdorLibrary, OdorRecord
from .modulation import (
    NeuromodSchedule, PrimingSpec, clear_priming, neuromodulated_identify,
    prime_gcs,
)
from .network import (
    Network, SniffResponse, ad_initiation_time, build_network, run_gamma_cycle,
    run_sniff,
)
from .plasticity import (
    PlasticityConfig, add_cohort, excitatory_update, few_shot_config,
    inhibitory_update, train_odor,
)
from .readout import (
    Classification, classify_sniff, cycle_to_rank_vector, jaccard_similarity,
    manhattan_classify,
)

__all__ = [
    "GammaConfig", "NetworkConfig", "PlasticityConfig", "NeuromodSchedule",
    "PrimingSpec", "Network", "SniffResponse", "OdorLibrary", "OdorRecord",
    "Classification", "ad_initiation_time", "build_network", "run_gamma_cycle",
    "run_sniff", "add_cohort", "train_odor", "excitatory_update",
    "inhibitory_update", "few_shot_config", "calibrate", "discretize",
    "sparsify", "occlude", "jaccard_similarity", "classify_sniff",
    "cycle_to_rank_vector", "manhattan_classify", "neuromodulated_identify",
    "prime_gcs", "clear_priming", "backend_name", "available_backends",
]
