"""Trial recordings: loading, sampling timepoints, and synthetic generation.

Two on-disk layouts are supported:

* raw delimited tables (one row per timestep: a time column in seconds
  followed by one column per sensor), the layout of the public wind-tunnel
  recordings this pipeline targets;
* the package's canonical trial format: a header line starting with ``#``
  carrying ``key=value`` pairs (label, rate_hz, metadata), then one
  tab-separated row of sensor readings per timestep.

A plain-text manifest (INI sections) maps odor labels to trial files plus
recording metadata, so the raw archive's file layout stays isolated from
the pipeline.
"""
import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataFormatError, ParseError, UsageError
from .seeding import derive_rng

DEFAULT_COLUMNS = 72
TRAIN_TIMEPOINT = 90.0
TEST_TIMEPOINTS = tuple(float(t) for t in range(30, 180, 5))  # 30 points


@dataclass
class TrialRecording:
    label: str
    samples: np.ndarray          # time x sensors
    times: np.ndarray            # seconds from trial onset
    sample_rate: float           # Hz
    metadata: dict = field(default_factory=dict)

    @property
    def duration(self) -> float:
        return float(self.times[-1]) if self.times.size else 0.0

    @property
    def num_sensors(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class SyntheticSpec:
    num_odors: int = 10
    base_sparsity: float = 0.5      # fraction of sensors responsive per odor
    plume_noise_sd: float = 0.02    # per-sensor smooth noise, raw units
    drift_amplitude: float = 0.08   # slow global amplitude modulation
    duration: float = 180.0
    sample_rate: float = 5.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_odors < 1:
            raise ConfigError("num_odors must be >= 1")
        if not (0.0 < self.base_sparsity <= 1.0):
            raise ConfigError("base_sparsity must be in (0, 1]")


ODOR_NAMES = (
    "acetone", "acetaldehyde", "ammonia", "butanol", "ethylene",
    "methane", "methanol", "carbon_monoxide", "benzene", "toluene",
)


def load_trial(path, expected_columns: int = DEFAULT_COLUMNS,
               label: str = "", metadata: dict = None) -> TrialRecording:
    """Parse a trial file (canonical or raw delimited)."""
    path = Path(path)
    with open(path) as f:
        first = f.readline()
        if not first.strip():
            raise ParseError(path, 1, "empty file")
        if first.lstrip().startswith("#"):
            return _load_canonical(path, first, f, expected_columns)
    return _load_raw(path, expected_columns, label, metadata or {})


def _parse_row(path, lineno, line):
    try:
        return [float(x) for x in line.replace(",", " ").split()]
    except ValueError:
        raise ParseError(path, lineno, f"non-numeric row: {line.strip()[:60]!r}")


def _load_raw(path, expected_columns, label, metadata):
    rows, times = [], []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            vals = _parse_row(path, lineno, line)
            if len(vals) != expected_columns + 1:
                raise DataFormatError(
                    f"{path}:{lineno}: expected time + {expected_columns} sensor "
                    f"columns, got {len(vals)} values"
                )
            times.append(vals[0])
            rows.append(vals[1:])
    if not rows:
        raise ParseError(path, 1, "no data rows")
    times = np.asarray(times, float)
    times -= times[0]
    dt = np.diff(times)
    rate = 1.0 / float(np.median(dt)) if dt.size and np.median(dt) > 0 else 0.0
    return TrialRecording(
        label=label or path.stem, samples=np.asarray(rows, float),
        times=times, sample_rate=rate, metadata=metadata,
    )


def _load_canonical(path, header, f, expected_columns):
    meta = {}
    for tok in header.lstrip("# \t").split("\t"):
        tok = tok.strip()
        if tok and "=" in tok:
            k, v = tok.split("=", 1)
            meta[k.strip()] = v.strip()
    label = meta.pop("label", path.stem)
    try:
        rate = float(meta.pop("rate_hz"))
    except KeyError:
        raise DataFormatError(f"{path}: canonical header missing rate_hz")
    rows = []
    for lineno, line in enumerate(f, start=2):
        if not line.strip():
            continue
        vals = _parse_row(path, lineno, line)
        if len(vals) != expected_columns:
            raise DataFormatError(
                f"{path}:{lineno}: expected {expected_columns} sensor columns, "
                f"got {len(vals)}"
            )
        rows.append(vals)
    if not rows:
        raise ParseError(path, 2, "no data rows")
    samples = np.asarray(rows, float)
    times = np.arange(samples.shape[0], dtype=float) / rate
    return TrialRecording(label=label, samples=samples, times=times,
                          sample_rate=rate, metadata=meta)


def write_trial(rec: TrialRecording, path):
    """Emit the canonical format; load_trial(write_trial(x)) round-trips exactly."""
    path = Path(path)
    meta = "\t".join(f"{k}={v}" for k, v in sorted(rec.metadata.items()))
    header = f"# label={rec.label}\trate_hz={rec.sample_rate!r}"
    if meta:
        header += "\t" + meta
    with open(path, "w") as f:
        f.write(header + "\n")
        for row in rec.samples:
            f.write("\t".join(repr(float(x)) for x in row) + "\n")


def extract_sample(rec: TrialRecording, t: float) -> np.ndarray:
    """The sensor row nearest to time t (ties to the earlier row)."""
    if not (0.0 <= t <= rec.duration):
        raise UsageError(f"timepoint {t} outside trial (0..{rec.duration:g} s)")
    idx = int(np.argmin(np.abs(rec.times - t)))
    return rec.samples[idx].copy()


def training_and_test_samples(rec: TrialRecording,
                              train_t: float = TRAIN_TIMEPOINT,
                              test_ts=TEST_TIMEPOINTS):
    """The one-shot training sample plus the 30-point test grid."""
    if rec.duration < max(max(test_ts), train_t):
        raise UsageError(
            f"trial too short ({rec.duration:g} s) for the sampling grid"
        )
    train = extract_sample(rec, train_t)
    tests = [extract_sample(rec, t) for t in test_ts]
    return train, tests


# -- synthetic data ---------------------------------------------------------

def _smooth_noise(n_steps, n_series, sd, rng):
    """Slowly varying noise: random walk low-pass filtered, zero mean."""
    raw = rng.normal(0.0, 1.0, (n_steps, n_series))
    out = np.empty_like(raw)
    acc = raw[0]
    alpha = 0.02
    for i in range(n_steps):
        acc = (1 - alpha) * acc + alpha * raw[i]
        out[i] = acc
    out -= out.mean(axis=0, keepdims=True)
    s = out.std(axis=0, keepdims=True)
    s[s == 0] = 1.0
    return out / s * sd


def synthesize_dataset(spec: SyntheticSpec, num_sensors: int = DEFAULT_COLUMNS):
    """Generate statistically plausible trial recordings for desk-scale runs.

    Each odor gets a responsive subset of sensors (about ``base_sparsity`` of
    the array) with response amplitudes spread across the full range, then a
    slow multiplicative plume-like drift plus gentle per-sensor noise over
    time.  Responsive sets are resampled until no pair overlaps more than
    60%, keeping the odor set separable.
    """
    rng = derive_rng(spec.rng_seed, "synthetic")
    n_resp = max(1, int(round(spec.base_sparsity * num_sensors)))
    bases, resp_sets = [], []
    for i in range(spec.num_odors):
        for _attempt in range(200):
            resp = rng.choice(num_sensors, size=n_resp, replace=False)
            ok = all(
                np.intersect1d(resp, prev).size <= 0.6 * n_resp
                for prev in resp_sets
            )
            if ok:
                break
        base = np.zeros(num_sensors)
        # full-range responses so the latency code uses the whole epoch
        base[resp] = rng.uniform(0.08, 1.0, n_resp)
        resp_sets.append(resp)
        bases.append(base)

    n_steps = int(round(spec.duration * spec.sample_rate)) + 1
    recordings = []
    for i, base in enumerate(bases):
        label = ODOR_NAMES[i] if i < len(ODOR_NAMES) else f"odor_{i:02d}"
        r = derive_rng(spec.rng_seed, "synthetic", label)
        t = np.arange(n_steps) / spec.sample_rate
        freqs = r.uniform(0.003, 0.02, 3)
        phases = r.uniform(0, 2 * np.pi, 3)
        drift = 1.0 + spec.drift_amplitude * np.mean(
            [np.sin(2 * np.pi * f * t + p) for f, p in zip(freqs, phases)], axis=0
        )
        noise = _smooth_noise(n_steps, num_sensors, spec.plume_noise_sd, r)
        samples = base[None, :] * drift[:, None] + noise
        samples = np.clip(samples, 0.0, None)
        samples[:, base == 0] *= 0.2  # non-responsive sensors stay near baseline
        recordings.append(
            TrialRecording(
                label=label, samples=samples, times=t,
                sample_rate=spec.sample_rate,
                metadata={"source": "synthetic", "seed": str(spec.rng_seed)},
            )
        )
    return recordings


# -- manifest ---------------------------------------------------------------

def load_manifest(path):
    """Read a manifest: one INI section per odor with a ``path`` entry.

    Returns a list of (label, trial_path, metadata) in file order.  Repeated
    labels are allowed (alternate trials); selection is up to the caller.
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"manifest not found: {path}")
    cp = configparser.ConfigParser()
    cp.read(path)
    entries = []
    for section in cp.sections():
        opts = dict(cp.items(section))
        if "path" not in opts:
            raise DataFormatError(f"{path}: section [{section}] lacks a path entry")
        trial_path = Path(opts.pop("path"))
        if not trial_path.is_absolute():
            trial_path = path.parent / trial_path
        entries.append((section.split(":", 1)[0], trial_path, opts))
    return entries


def load_recordings_from_manifest(path, expected_columns: int = DEFAULT_COLUMNS,
                                  trial_index: int = 0):
    """Load one recording per odor label, taking the trial_index-th entry."""
    groups = {}
    for label, trial_path, meta in load_manifest(path):
        groups.setdefault(label, []).append((trial_path, meta))
    recordings = []
    for label, trials in groups.items():
        if trial_index >= len(trials):
            raise UsageError(
                f"odor {label!r} has {len(trials)} trials, index {trial_index} requested"
            )
        trial_path, meta = trials[trial_index]
        recordings.append(load_trial(trial_path, expected_columns, label, meta))
    return recordings


def load_sensor_positions(path=None, num_sensors: int = DEFAULT_COLUMNS):
    """Column order mapping (tunnel position -> file column); identity default.

    The shipped data file can be replaced once the raw archive's exact
    board/sensor interleaving is pinned down; the rest of the pipeline only
    ever sees position order.
    """
    if path is None:
        path = Path(__file__).parent / "data" / "sensor_positions.tsv"
    order = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(path, lineno, "expected: position<TAB>file_column")
            order.append(int(parts[1]))
    if sorted(order) != list(range(num_sensors)):
        raise DataFormatError(f"{path}: not a permutation of 0..{num_sensors - 1}")
    return np.asarray(order, int)
