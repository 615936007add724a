"""The compiled and pure-python kernels must agree bit for bit."""
import numpy as np
import pytest

from bulbnet import GammaConfig, Network, NetworkConfig, OdorLibrary
from bulbnet._kernel import available_backends, get_backend
from bulbnet.encoding import occlude
from bulbnet.plasticity import PlasticityConfig, few_shot_config, train_odor
from bulbnet.seeding import derive_rng
from conftest import make_odor

needs_compiled = pytest.mark.skipif(
    "compiled" not in available_backends(), reason="compiled kernel not built"
)


def run_everything(backend, plast_cfg):
    rng = np.random.default_rng(31)
    odors = [make_odor(rng) for _ in range(3)]
    net = Network(NetworkConfig(rng_seed=17), GammaConfig())
    net._run_cycle = get_backend(backend)
    lib = OdorLibrary()
    for i, lv in enumerate(odors):
        if i:
            net.add_cohort()
        train_odor(net, lv, f"odor{i}", plast_cfg, lib, noise_seed=8)
    responses = []
    trial_rng = derive_rng(8, "parity-trials")
    for lv in odors:
        for p in (0.0, 0.4, 0.8):
            noisy = occlude(lv, p, trial_rng)
            responses.append(net.run_sniff(noisy, "test"))
    return net, responses


STATE_FIELDS = ("syn_w", "syn_phase", "inh_delta", "gc_refr_until",
                "gc_pending", "gc_held", "gc_inh_updated", "gc_mature")


@needs_compiled
@pytest.mark.parametrize("plast_cfg", [
    PlasticityConfig(),
    PlasticityConfig(inhibitory_enabled=False),
    PlasticityConfig(potentiation="exact"),
    few_shot_config(training_noise_p=0.3, sniffs=20),
], ids=["one-shot", "ablated", "exact", "few-shot"])
def test_backends_bit_identical(plast_cfg):
    net_py, resp_py = run_everything("python", plast_cfg)
    net_cy, resp_cy = run_everything("compiled", plast_cfg)
    for a, b in zip(resp_py, resp_cy):
        assert a == b
    for f in STATE_FIELDS:
        assert np.array_equal(getattr(net_py, f), getattr(net_cy, f)), f
