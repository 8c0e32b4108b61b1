#!/usr/bin/env python3
"""Sweep the local-epoch count E on a config and print the summary table.

Equivalent to `fedocsvm sweep --config <path> --epochs 5,10,20,30,40,50` but
prints the table directly and defaults to the bundled benchmark config.
"""

import argparse
from pathlib import Path

from fedocsvm.cli import ExperimentConfig, sweep

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "benchmark.json"
DEFAULT_EPOCHS = "5,10,20,30,40,50"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(DEFAULT_CONFIG))
    parser.add_argument("--epochs", default=DEFAULT_EPOCHS, help="comma-separated E values")
    args = parser.parse_args()

    cfg = ExperimentConfig.from_json(args.config)
    epochs_list = [int(s) for s in args.epochs.split(",") if s]
    reports = sweep(cfg, epochs_list)

    print(f"{'E':>4} {'mean F':>8} {'std F':>8}")
    for E, report in zip(epochs_list, reports):
        summary = report["summary"]
        print(f"{E:>4} {summary['mean_f']:>8.4f} {summary['std_f']:>8.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
