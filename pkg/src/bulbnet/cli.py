"""Command-line entry point.

Usage:
  bulbnet <command> [--config cfg.json] [--seed N] [--dataset manifest|synthetic]
          [--out DIR] [--noise-p F] [--trials N] [--odors N]
          [--held-noise 0|1] [--schedule F F F F F] [--prime-fraction F]

Commands: train-test, sweep-noise, neuromod, prime, benchmark, continuous,
fewshot.  Exit codes: 0 success, 1 usage error, 2 data/format error.
"""
import argparse
import sys
from dataclasses import replace

from .errors import BulbnetError, ConfigError, DataFormatError, UsageError
from .experiments import (
    COMMANDS, ExperimentConfig, config_from_json, run_experiment, write_report,
)
from .modulation import NeuromodSchedule


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse defaults to 2, reserved here for data errors)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="bulbnet",
        description="One-shot odor learning and noise-robust recall experiments",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file of configuration overrides")
    p.add_argument("--seed", type=int, help="master seed (derives all streams)")
    p.add_argument("--dataset", help="manifest path, or 'synthetic' (default)")
    p.add_argument("--out", help="output directory for report files")
    p.add_argument("--noise-p", type=float, help="occlusion fraction for relevant commands")
    p.add_argument("--trials", type=int, help="trials per odor")
    p.add_argument("--odors", type=int, help="number of odors to use")
    p.add_argument("--held-noise", type=int, choices=(0, 1),
                   help="continuous mode: hold one noise pattern across samples")
    p.add_argument("--schedule", type=float, nargs=5, metavar="F",
                   help="five threshold scale factors (nonincreasing, first 1.0)")
    p.add_argument("--prime-fraction", type=float, help="fraction of tuned GCs to prime")
    p.add_argument("--trial-index", type=int, help="which trial per odor from the manifest")
    return p


def config_from_args(args) -> ExperimentConfig:
    cfg = config_from_json(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.dataset is not None:
        overrides["dataset"] = args.dataset
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.noise_p is not None:
        overrides["noise_p"] = args.noise_p
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.odors is not None:
        overrides["num_odors"] = args.odors
    if args.held_noise is not None:
        overrides["held_noise"] = bool(args.held_noise)
    if args.schedule is not None:
        overrides["schedule"] = NeuromodSchedule(scale_factors=tuple(args.schedule))
    if args.prime_fraction is not None:
        overrides["prime_fraction"] = args.prime_fraction
    if args.trial_index is not None:
        overrides["trial_index"] = args.trial_index
    return replace(cfg, **overrides) if overrides else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "prime" and args.noise_p is None:
            cfg = replace(cfg, noise_p=0.9)  # the priming protocol's extreme level
        if cfg.num_odors < 1:
            raise UsageError("at least one odor is required")
        report = run_experiment(cfg, args.command)
        written = write_report(report, cfg.out_dir)
    except (UsageError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DataFormatError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except BulbnetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
