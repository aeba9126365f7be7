"""Command-line entry point.

Usage: nnha <experiment> --config <path> [--seed S] [--out DIR] [--shots M]
            [--threads T]

Experiments: maxcut-ensemble | kcut | mis-greedy | mis-cluster | optimize.
Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

import argparse
import sys

from .errors import ConfigError, DimensionError, FormatError, NumericalError, ParameterError, ResourceError
from .harness import EXPERIMENTS, ExperimentConfig, emit_outputs, run_experiment


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nnha",
        description="Hybrid quantum-classical combinatorial optimization experiments",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="key = value config file")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--out", default=None, help="override output directory")
    parser.add_argument("--shots", type=int, default=None, help="override shot count")
    parser.add_argument("--threads", type=int, default=None,
                        help="instance-level worker threads")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {
        "experiment": args.experiment,
        "seed": args.seed,
        "out": args.out,
        "shots": args.shots,
        "threads": args.threads,
    }
    try:
        config = ExperimentConfig.from_file(args.config, overrides)
        table = run_experiment(config)
        if config.out_dir:
            written = emit_outputs(table, config.out_dir, config)
            for name in sorted(written):
                print(f"wrote {written[name]}")
        else:
            sys.stdout.write(table.to_csv())
    except (ConfigError, ParameterError, DimensionError, FormatError,
            ResourceError, FileNotFoundError) as exc:
        print(f"nnha: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"nnha: numerical error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
