import numpy as np
import pytest

from bulbnet import GammaConfig, Network, NetworkConfig, OdorLibrary
from bulbnet.encoding import sparsify
from bulbnet.plasticity import PlasticityConfig, train_odor


def make_odor(rng, n=72, responsive=36):
    """Responsive-subset level vector: levels spread over the full 1..15 range."""
    lv = np.zeros(n, int)
    resp = rng.choice(n, responsive, replace=False)
    lv[resp] = rng.integers(1, 16, responsive)
    return sparsify(lv)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def gamma():
    return GammaConfig()


@pytest.fixture
def naive_net():
    return Network(NetworkConfig(rng_seed=7), GammaConfig())


@pytest.fixture
def odor(rng):
    return make_odor(rng)


@pytest.fixture
def trained_single(rng):
    """A network one-shot trained on a single odor, plus its library."""
    net = Network(NetworkConfig(rng_seed=11), GammaConfig())
    lib = OdorLibrary()
    levels = make_odor(rng)
    record = train_odor(net, levels, "target", PlasticityConfig(), lib)
    return net, lib, levels, record
