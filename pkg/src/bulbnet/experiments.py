"""Experiment protocols: dataset preparation, training runs, sweeps, reports.

Every protocol is deterministic in (configuration, master seed): all
randomness flows through labeled streams derived from the master seed, and
reports carry no timestamps, so rerunning a command writes byte-identical
files.
"""
import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import BaselineConfig, run_benchmark
from .config import GammaConfig, NetworkConfig
from .dataset import (
    SyntheticSpec, load_recordings_from_manifest, synthesize_dataset,
    training_and_test_samples,
)
from .encoding import calibrate, discretize, occlude, sparsify
from .errors import UsageError
from .library import OdorLibrary
from .modulation import (
    NeuromodSchedule, PrimingSpec, clear_priming, neuromodulated_identify, prime_gcs,
)
from .network import Network
from .plasticity import (
    FEW_SHOT_PHASE_TOLERANCE, PlasticityConfig, few_shot_config, train_odor,
)
from .readout import classify_sniff, jaccard_similarity
from .seeding import derive_rng

COMMANDS = (
    "train-test", "sweep-noise", "neuromod", "prime", "benchmark",
    "continuous", "fewshot",
)


@dataclass
class ExperimentConfig:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    gamma: GammaConfig = field(default_factory=GammaConfig)
    plasticity: PlasticityConfig = field(default_factory=PlasticityConfig)
    schedule: NeuromodSchedule = field(default_factory=NeuromodSchedule)
    baselines: BaselineConfig = field(default_factory=BaselineConfig)
    dataset: str = "synthetic"          # manifest path, or "synthetic"
    num_odors: int = 10
    trials: int = 100
    noise_p: float = 0.6
    prime_fraction: float = None        # None sweeps {0, 0.25, 0.5, 0.75, 1}
    held_noise: bool = True
    master_seed: int = 0
    out_dir: str = "runs/out"
    trial_index: int = 0

    def config_hash(self) -> str:
        blob = json.dumps(_as_jsonable(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _as_jsonable(obj):
    if isinstance(obj, ExperimentConfig):
        return {k: _as_jsonable(v) for k, v in vars(obj).items()}
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _as_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, (list, tuple)):
        return [_as_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    return obj


def config_from_json(path) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON file of (nested) overrides."""
    with open(path) as f:
        raw = json.load(f)
    sub = {
        "network": NetworkConfig, "gamma": GammaConfig,
        "plasticity": PlasticityConfig, "baselines": BaselineConfig,
    }
    kwargs = {}
    for key, val in raw.items():
        if key in sub:
            kwargs[key] = sub[key](**val)
        elif key == "schedule":
            kwargs[key] = NeuromodSchedule(scale_factors=tuple(val))
        else:
            kwargs[key] = val
    return ExperimentConfig(**kwargs)


@dataclass
class RunReport:
    command: str
    config_hash: str
    master_seed: int
    tables: dict = field(default_factory=dict)   # name -> list of dict rows
    rasters: list = field(default_factory=list)  # dict rows (context, mc, ts)
    notes: dict = field(default_factory=dict)


# -- data preparation ---------------------------------------------------------

@dataclass
class PreparedData:
    odors: list            # (label, clean LevelVector) in training order
    test_grids: dict       # label -> list of LevelVectors (plume timepoints)
    recordings: list


def prepare_data(cfg: ExperimentConfig) -> PreparedData:
    """Load or synthesize recordings, calibrate, and encode all samples.

    Calibration uses the training recordings only; every sample goes through
    discretize + sparsify.  Occlusion happens later, per trial.
    """
    if cfg.dataset == "synthetic":
        spec = SyntheticSpec(num_odors=cfg.num_odors,
                             rng_seed=cfg.master_seed)
        recordings = synthesize_dataset(spec, cfg.network.num_columns)
    else:
        recordings = load_recordings_from_manifest(
            cfg.dataset, cfg.network.num_columns, cfg.trial_index
        )
        if cfg.num_odors and cfg.num_odors < len(recordings):
            recordings = recordings[: cfg.num_odors]
    cal = calibrate([r.samples for r in recordings])
    odors, grids = [], {}
    for rec in recordings:
        train_raw, test_raw = training_and_test_samples(rec)
        odors.append((rec.label, sparsify(discretize(train_raw, cal))))
        grids[rec.label] = [sparsify(discretize(t, cal)) for t in test_raw]
    return PreparedData(odors=odors, test_grids=grids, recordings=recordings)


def train_all(cfg: ExperimentConfig, odors) -> tuple:
    """One-shot train every odor in sequence, adding a cohort between odors."""
    net = Network(replace(cfg.network, rng_seed=cfg.master_seed), cfg.gamma)
    library = OdorLibrary()
    for i, (label, levels) in enumerate(odors):
        if i > 0:
            net.add_cohort()
        train_odor(net, levels, label, cfg.plasticity, library,
                   noise_seed=cfg.master_seed)
    return net, library


# -- protocols ----------------------------------------------------------------

def _classification_trial(net, library, levels, p, rng, threshold=0.75):
    noisy = occlude(levels, p, rng) if p > 0 else np.asarray(levels)
    resp = net.run_sniff(noisy, "test")
    return classify_sniff(resp, library, threshold), resp


def run_train_test(cfg: ExperimentConfig) -> RunReport:
    """Train all odors, then classify each plume-grid sample with and without noise."""
    data = prepare_data(cfg)
    net, library = train_all(cfg, data.odors)
    rows = []
    rasters = []
    for label, grid in data.test_grids.items():
        for noisy_run in (False, True):
            correct = 0
            for i, levels in enumerate(grid):
                rng = derive_rng(cfg.master_seed, "train-test", label, i, noisy_run)
                p = cfg.noise_p if noisy_run else 0.0
                result, resp = _classification_trial(net, library, levels, p, rng)
                correct += result.label == label
                if i == 0 and not noisy_run:
                    for c, cyc in enumerate(resp.cycles):
                        for mc, ts in enumerate(cyc):
                            if ts >= 0:
                                rasters.append(
                                    {"context": f"{label}/clean", "cycle": c,
                                     "mc": mc, "ts": int(ts)}
                                )
            rows.append({
                "odor": label, "noise_p": cfg.noise_p if noisy_run else 0.0,
                "trials": len(grid), "accuracy": correct / len(grid),
            })
    return RunReport("train-test", cfg.config_hash(), cfg.master_seed,
                     tables={"accuracy": rows}, rasters=rasters)


def run_sweep_noise(cfg: ExperimentConfig, with_schedule: bool = False) -> RunReport:
    """Accuracy versus occlusion level, optionally with the threshold schedule."""
    data = prepare_data(cfg)
    net, library = train_all(cfg, data.odors)
    rows = []
    for p_step in range(11):
        p = p_step / 10
        correct_single = 0
        correct_sched = 0
        total = 0
        for label, levels in data.odors:
            for t in range(cfg.trials):
                rng = derive_rng(cfg.master_seed, "sweep", label, p_step, t)
                noisy = occlude(levels, p, rng)
                result = classify_sniff(net.run_sniff(noisy, "test"), library)
                correct_single += result.label == label
                if with_schedule:
                    nm = neuromodulated_identify(net, noisy, library, cfg.schedule)
                    correct_sched += nm.label == label
                total += 1
        row = {"noise_p": p, "trials": total, "accuracy": correct_single / total}
        if with_schedule:
            row["accuracy_schedule"] = correct_sched / total
        rows.append(row)
    return RunReport("neuromod" if with_schedule else "sweep-noise",
                     cfg.config_hash(), cfg.master_seed,
                     tables={"accuracy_vs_p": rows})


def run_neuromod(cfg: ExperimentConfig) -> RunReport:
    return run_sweep_noise(cfg, with_schedule=True)


def run_prime(cfg: ExperimentConfig, fractions=None, p: float = 0.9) -> RunReport:
    """Priming sweep: lower thresholds of a fraction of the target's tuned GCs.

    Sweeps fractions {0, 0.25, 0.5, 0.75, 1} unless ``cfg.prime_fraction``
    pins a single one.
    """
    if fractions is None:
        if cfg.prime_fraction is not None:
            fractions = (cfg.prime_fraction,)
        else:
            fractions = (0.0, 0.25, 0.5, 0.75, 1.0)
    data = prepare_data(cfg)
    net, library = train_all(cfg, data.odors)
    rows = []
    for f in fractions:
        correct = total = 0
        for label, levels in data.odors:
            for t in range(cfg.trials):
                rng = derive_rng(cfg.master_seed, "prime", label, f, t)
                spec = PrimingSpec(target_label=label, fraction=f)
                prime_gcs(net, library, spec, rng)
                try:
                    noisy = occlude(levels, p, rng)
                    result = classify_sniff(net.run_sniff(noisy, "test"), library)
                finally:
                    clear_priming(net)
                correct += result.label == label
                total += 1
        rows.append({"fraction": f, "noise_p": p, "trials": total,
                     "accuracy": correct / total})
    return RunReport("prime", cfg.config_hash(), cfg.master_seed,
                     tables={"accuracy_vs_fraction": rows})


def run_benchmark_protocol(cfg: ExperimentConfig) -> RunReport:
    data = prepare_data(cfg)
    net, library = train_all(cfg, data.odors)
    report = run_benchmark(
        net, library, data.odors, trials_per_odor=cfg.trials,
        master_seed=cfg.master_seed, cfg=cfg.baselines,
    )
    acc_rows = [
        {"method": m, "accuracy": a} for m, a in sorted(report.accuracies().items())
    ]
    return RunReport("benchmark", cfg.config_hash(), cfg.master_seed,
                     tables={"benchmark_accuracy": acc_rows,
                             "benchmark_trials": report.trials})


def run_continuous(cfg: ExperimentConfig, num_samples: int = 8,
                   modes=None) -> RunReport:
    """Back-to-back samples without inter-sniff resets.

    Each successive sample is occluded either with one held noise pattern or
    with freshly drawn noise per sample (``cfg.held_noise`` selects which;
    pass ``modes=(True, False)`` to run both for comparison), and classified
    from its own five-cycle window.
    """
    data = prepare_data(cfg)
    net, library = train_all(cfg, data.odors)
    rows = []
    if modes is None:
        modes = (cfg.held_noise,)
    for label, grid in data.test_grids.items():
        samples = (grid * ((num_samples // len(grid)) + 1))[:num_samples]
        for held in modes:
            rng = derive_rng(cfg.master_seed, "continuous", label, held)
            held_noisy = occlude(samples[0], cfg.noise_p, rng)
            net.reset_sniff_state()
            outcomes = []
            for i, levels in enumerate(samples):
                if held:
                    noisy = held_noisy
                else:
                    noisy = occlude(levels, cfg.noise_p, rng)
                resp = net.run_sniff(noisy, "test", reset=False)
                outcomes.append(classify_sniff(resp, library).label or "unknown")
            rows.append({
                "odor": label, "held_noise": held,
                "outcomes": "|".join(outcomes),
                "accuracy": sum(o == label for o in outcomes) / num_samples,
            })
    return RunReport("continuous", cfg.config_hash(), cfg.master_seed,
                     tables={"continuous": rows})


def run_fewshot(cfg: ExperimentConfig, noise_levels=(0.4, 0.6)) -> RunReport:
    """Slow-learning regimen on occluded training samples.

    Trains a fresh single-odor network per training-noise level and reports
    the recall similarity: mean fifth-cycle similarity of occluded test
    samples (standard occlusion 0.6) to the network's stored pattern, i.e.
    whether a usable attractor formed despite the noisy training.
    """
    data = prepare_data(cfg)
    label, levels = data.odors[0]
    rows = []
    for p in noise_levels:
        net = Network(
            replace(cfg.network, rng_seed=cfg.master_seed,
                    phase_tolerance=FEW_SHOT_PHASE_TOLERANCE),
            cfg.gamma,
        )
        library = OdorLibrary()
        fs = few_shot_config(training_noise_p=p)
        record = train_odor(net, levels, label, fs, library,
                            noise_seed=cfg.master_seed)
        sims = []
        for t in range(max(cfg.trials, 1)):
            rng = derive_rng(cfg.master_seed, "fewshot", p, t)
            noisy = occlude(levels, 0.6, rng)
            recalled = net.run_sniff(noisy, "test").cycles[-1]
            sims.append(jaccard_similarity(recalled, record.learned_pattern))
        rows.append({
            "train_noise_p": p, "sniffs": fs.training_sniffs,
            "recall_similarity": float(np.mean(sims)),
        })
    return RunReport("fewshot", cfg.config_hash(), cfg.master_seed,
                     tables={"fewshot": rows})


def run_experiment(cfg: ExperimentConfig, command: str) -> RunReport:
    runners = {
        "train-test": run_train_test,
        "sweep-noise": run_sweep_noise,
        "neuromod": run_neuromod,
        "prime": lambda c: run_prime(c, p=c.noise_p),
        "benchmark": run_benchmark_protocol,
        "continuous": run_continuous,
        "fewshot": run_fewshot,
    }
    if command not in runners:
        raise UsageError(f"unknown command {command!r}; pick one of {COMMANDS}")
    return runners[command](cfg)


# -- report emission ----------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def write_report(report: RunReport, out_dir) -> list:
    """Emit metric tables, spike rasters, and the run manifest as text files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, rows in sorted(report.tables.items()):
        path = out / f"{name}.csv"
        with open(path, "w") as f:
            if rows:
                cols = list(rows[0].keys())
                f.write(",".join(cols) + "\n")
                for r in rows:
                    f.write(",".join(_fmt(r[c]) for c in cols) + "\n")
        written.append(path)
    if report.rasters:
        path = out / "rasters.csv"
        with open(path, "w") as f:
            f.write("context,cycle,mc,ts\n")
            for r in report.rasters:
                f.write(f"{r['context']},{r['cycle']},{r['mc']},{r['ts']}\n")
        written.append(path)
    manifest = out / "run_manifest.txt"
    with open(manifest, "w") as f:
        f.write(f"command: {report.command}\n")
        f.write(f"config_hash: {report.config_hash}\n")
        f.write(f"master_seed: {report.master_seed}\n")
        f.write(f"version: {__version__}\n")
        for k, v in sorted(report.notes.items()):
            f.write(f"{k}: {v}\n")
    written.append(manifest)
    return written
