"""Classical denoising baselines and the shared-classifier benchmark.

The comparison methods operate on the occluded 72-element level vector
(treated as a real signal over the sensor axis) and their outputs go
through the same normalized nearest-neighbor classifier as the spiking
network's rank-order readout, so methods differ only in their denoising.
"""
from dataclasses import dataclass, field

import numpy as np

from .encoding import occlude
from .errors import ConfigError, UsageError
from .readout import cycle_to_rank_vector, manhattan_classify
from .seeding import derive_rng


@dataclass(frozen=True)
class BaselineConfig:
    mf_window: int = 5
    tv_lambda: float = 0.5
    pca_components: int = 5

    def __post_init__(self):
        if self.mf_window < 1 or self.mf_window % 2 == 0:
            raise ConfigError("mf_window must be odd and >= 1")
        if self.tv_lambda < 0:
            raise ConfigError("tv_lambda must be >= 0")
        if self.pca_components < 1:
            raise ConfigError("pca_components must be >= 1")


def median_filter(v, window: int = 5) -> np.ndarray:
    """Sliding median over the sensor axis.

    Edge windows clamp their indices into the valid range (replicating the
    boundary values), so every window keeps its odd length.
    """
    if window % 2 == 0:
        raise ConfigError("median filter window must be odd")
    v = np.asarray(v, float)
    half = window // 2
    n = v.size
    out = np.empty(n)
    for i in range(n):
        idx = np.clip(np.arange(i - half, i + half + 1), 0, n - 1)
        out[i] = np.median(v[idx])
    return out


def tv_denoise_1d(v, lam: float) -> np.ndarray:
    """Exact minimizer of 0.5*||u - v||^2 + lam * sum |u[i+1] - u[i]|.

    Direct single-pass algorithm (taut-string family): walk the signal
    keeping tentative segment bounds and restart on violations.  Exactness
    is checked post hoc against the subgradient certificate.
    """
    v = np.asarray(v, float)
    n = v.size
    if lam < 0:
        raise ConfigError("tv regularization weight must be >= 0")
    if lam == 0 or n <= 1:
        return v.copy()
    out = np.empty(n)
    # Condat's direct method
    k = k0 = kminus = kplus = 0
    vmin = v[0] - lam
    vmax = v[0] + lam
    umin = lam
    umax = -lam
    while True:
        if k == n - 1:
            if umin < 0.0:
                out[k0:kminus + 1] = vmin
                k = k0 = kminus = kminus + 1
                vmin = v[k]
                umin = lam
                umax = vmin + lam - vmax
            elif umax > 0.0:
                out[k0:kplus + 1] = vmax
                k = k0 = kplus = kplus + 1
                vmax = v[k]
                umax = -lam
                umin = vmax - lam - vmin
            else:
                out[k0:] = vmin + umin / (k - k0 + 1)
                break
            if k == n - 1:
                out[k] = vmin + umin
                break
            continue
        umin += v[k + 1] - vmin
        if umin < -lam:
            out[k0:kminus + 1] = vmin
            k = k0 = kminus = kplus = kminus + 1
            vmin = v[k]
            vmax = v[k] + 2 * lam
            umin = lam
            umax = -lam
        else:
            umax += v[k + 1] - vmax
            if umax > lam:
                out[k0:kplus + 1] = vmax
                k = k0 = kminus = kplus = kplus + 1
                vmin = v[k] - 2 * lam
                vmax = v[k]
                umin = lam
                umax = -lam
            else:
                k += 1
                if umin >= lam:
                    kminus = k
                    vmin += (umin - lam) / (k - k0 + 1)
                    umin = lam
                if umax <= -lam:
                    kplus = k
                    vmax += (umax + lam) / (k - k0 + 1)
                    umax = -lam
    gap = tv_optimality_gap(v, out, lam)
    if gap > 1e-8 * max(1.0, float(np.abs(v).max())):
        raise AssertionError(f"tv denoiser produced a non-optimal solution (gap {gap:g})")
    return out


def tv_objective(v, u, lam: float) -> float:
    v, u = np.asarray(v, float), np.asarray(u, float)
    return 0.5 * float(((u - v) ** 2).sum()) + lam * float(np.abs(np.diff(u)).sum())


def tv_optimality_gap(v, u, lam: float) -> float:
    """How far u is from satisfying the exact optimality conditions.

    With z[i] = sum_{j<=i}(v[j] - u[j]), optimality requires |z[i]| <= lam
    everywhere, z[n-1] = 0, and z[i] pinned at +/-lam with the matching sign
    wherever u steps.  Returns the largest violation (0 for the minimizer).
    """
    v, u = np.asarray(v, float), np.asarray(u, float)
    z = np.cumsum(v - u)
    gap = max(float(np.abs(z).max() - lam), 0.0) if v.size else 0.0
    gap = max(gap, abs(float(z[-1])))
    d = np.diff(u)
    for i, step in enumerate(d):
        if step > 1e-12:
            gap = max(gap, abs(z[i] + lam))
        elif step < -1e-12:
            gap = max(gap, abs(z[i] - lam))
    return gap


def tv_denoise_dual_oracle(v, lam: float, iters: int = 200000) -> np.ndarray:
    """Independent slow solver: projected gradient on the dual box QP.

    Used only as a test oracle; converges to the same unique minimizer.
    """
    v = np.asarray(v, float)
    n = v.size
    if n <= 1 or lam == 0:
        return v.copy()
    z = np.zeros(n - 1)
    step = 0.25  # 1/||D D^T|| is >= 1/4
    for _ in range(iters):
        u = v + np.diff(np.concatenate([[0.0], z, [0.0]]))
        grad = -(u[1:] - u[:-1])
        z = np.clip(z - step * grad, -lam, lam)
    return v + np.diff(np.concatenate([[0.0], z, [0.0]]))


def pca_fit(train: np.ndarray):
    """Principal directions of the training rows: (mean, components[k, d])."""
    train = np.asarray(train, float)
    if train.ndim != 2 or train.shape[0] < 1:
        raise UsageError("pca_fit needs a 2-D matrix with at least one row")
    mean = train.mean(axis=0)
    centered = train - mean
    cov = centered.T @ centered / max(train.shape[0], 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    return mean, evecs[:, order].T, evals[order]


def pca_fit_denoise(train, test, k: int) -> np.ndarray:
    """Project a test vector onto the top-k training components and reconstruct.

    Components with (numerically) zero variance carry no signal and are
    dropped, so a constant training set reconstructs to its mean.
    """
    train = np.asarray(train, float)
    test = np.asarray(test, float)
    if k > min(train.shape[1], train.shape[0]):
        raise ConfigError(
            f"pca components {k} exceeds min(dim, rows) = "
            f"{min(train.shape[1], train.shape[0])}"
        )
    mean, comps, evals = pca_fit(train)
    eps = 1e-12 * max(float(evals[0]), 1.0)
    live = min(k, int(np.count_nonzero(evals > eps)))
    basis = comps[:live]
    coords = basis @ (test - mean)
    return mean + basis.T @ coords


# -- benchmark protocol -------------------------------------------------------

METHODS = ("network", "raw", "median", "tv", "pca")


@dataclass
class BenchmarkReport:
    trials: list = field(default_factory=list)  # dict rows

    def accuracy(self, method: str) -> float:
        rows = [r for r in self.trials if r["method"] == method]
        if not rows:
            return 0.0
        return sum(r["correct"] for r in rows) / len(rows)

    def accuracies(self) -> dict:
        return {m: self.accuracy(m) for m in sorted({r["method"] for r in self.trials})}

    def to_csv_rows(self):
        yield "method,odor,p,seed,predicted,correct"
        for r in self.trials:
            yield (
                f"{r['method']},{r['odor']},{r['p']:.6f},{r['seed']},"
                f"{r['predicted'] or 'unknown'},{int(r['correct'])}"
            )


def _unit_sum(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, float)
    t = v.sum()
    return v / t if t > 0 else v.copy()


def run_benchmark(net, library, training_levels, trials_per_odor: int = 100,
                  p_range=(0.2, 0.8), master_seed: int = 0,
                  cfg: BaselineConfig = None, methods=METHODS) -> BenchmarkReport:
    """Occluded-classification shootout through one shared classifier.

    ``training_levels`` is the list of (label, clean level vector) used for
    one-shot training, in training order.  Every method's output (and its
    clean training references) is normalized to unit sum and classified by
    nearest neighbor under the Manhattan-distance similarity with the 0.75
    threshold; misses and unknowns both count as failures.
    """
    cfg = cfg or BaselineConfig()
    labels = [lab for lab, _ in training_levels]
    clean = {lab: np.asarray(v, float) for lab, v in training_levels}
    train_mat = np.stack([clean[lab] for lab in labels])

    refs = {}
    if "raw" in methods:
        refs["raw"] = [(lab, _unit_sum(clean[lab])) for lab in labels]
    if "median" in methods:
        refs["median"] = [
            (lab, _unit_sum(median_filter(clean[lab], cfg.mf_window))) for lab in labels
        ]
    if "tv" in methods:
        refs["tv"] = [
            (lab, _unit_sum(tv_denoise_1d(clean[lab], cfg.tv_lambda))) for lab in labels
        ]
    if "pca" in methods:
        refs["pca"] = [
            (lab, _unit_sum(pca_fit_denoise(train_mat, clean[lab], cfg.pca_components)))
            for lab in labels
        ]
    if "network" in methods:
        refs["network"] = [
            (lab, _unit_sum(cycle_to_rank_vector(library.get(lab).learned_pattern, net.gamma)))
            for lab in labels
        ]

    report = BenchmarkReport()
    for lab in labels:
        for trial in range(trials_per_odor):
            rng = derive_rng(master_seed, "benchmark", lab, trial)
            p = float(rng.uniform(p_range[0], p_range[1]))
            seed = int(rng.integers(0, 2**63 - 1))
            trial_rng = np.random.default_rng(seed)
            noisy = occlude(clean[lab].astype(int), p, trial_rng)
            outputs = {}
            if "raw" in methods:
                outputs["raw"] = noisy.astype(float)
            if "median" in methods:
                outputs["median"] = median_filter(noisy, cfg.mf_window)
            if "tv" in methods:
                outputs["tv"] = tv_denoise_1d(noisy, cfg.tv_lambda)
            if "pca" in methods:
                outputs["pca"] = pca_fit_denoise(train_mat, noisy, cfg.pca_components)
            if "network" in methods:
                resp = net.run_sniff(noisy, "test")
                outputs["network"] = cycle_to_rank_vector(resp.cycles[-1], net.gamma)
            for method, out in outputs.items():
                predicted = manhattan_classify(_unit_sum(out), refs[method])
                report.trials.append({
                    "method": method, "odor": lab, "p": p, "seed": seed,
                    "predicted": predicted, "correct": predicted == lab,
                })
    return report
