"""Benchmark the compiled cycle kernel against the pure numpy backend.

Usage:
    python -m bulbnet.bench_backends [--odors N] [--sniffs N] [--seed N]

Builds one multi-odor trained network per backend (identical state), times
training and occluded test sniffs on each, and verifies that both backends
produced bit-identical results while they were at it.
"""
import argparse
import time

import numpy as np

from ._kernel import available_backends, get_backend
from .config import GammaConfig, NetworkConfig
from .encoding import occlude
from .experiments import ExperimentConfig, prepare_data
from .library import OdorLibrary
from .network import Network
from .plasticity import PlasticityConfig, train_odor
from .seeding import derive_rng


def run_workload(backend, odors, sniffs, seed):
    net = Network(NetworkConfig(rng_seed=seed), GammaConfig())
    net._run_cycle = get_backend(backend)
    lib = OdorLibrary()
    t0 = time.perf_counter()
    for i, (label, levels) in enumerate(odors):
        if i:
            net.add_cohort()
        train_odor(net, levels, label, PlasticityConfig(), lib, noise_seed=seed)
    t_train = time.perf_counter() - t0
    rng = derive_rng(seed, "bench")
    responses = []
    t0 = time.perf_counter()
    for k in range(sniffs):
        label, levels = odors[k % len(odors)]
        noisy = occlude(levels, 0.6, rng)
        responses.append(net.run_sniff(noisy, "test"))
    t_test = time.perf_counter() - t0
    return net, responses, t_train, t_test


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--odors", type=int, default=10)
    ap.add_argument("--sniffs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    data = prepare_data(ExperimentConfig(num_odors=args.odors,
                                         master_seed=args.seed))
    results = {}
    for backend in available_backends():
        net, resp, t_train, t_test = run_workload(
            backend, data.odors, args.sniffs, args.seed
        )
        results[backend] = (net, resp, t_train, t_test)
        per_sniff = 1000 * t_test / args.sniffs
        print(f"{backend:9s}: train {args.odors} odors in {t_train:6.2f} s, "
              f"{args.sniffs} test sniffs in {t_test:6.2f} s "
              f"({per_sniff:.2f} ms/sniff)")

    if len(results) == 2:
        (n1, r1, *_), (n2, r2, *_) = results.values()
        same = all(a == b for a, b in zip(r1, r2)) and np.array_equal(n1.syn_w, n2.syn_w)
        print("backends bit-identical:", same)
        ts = [t for _, _, _, t in results.values()]
        print(f"speedup: {max(ts) / min(ts):.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
