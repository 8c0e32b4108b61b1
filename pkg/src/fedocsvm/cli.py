"""Config-driven experiment runner: ingest, split, federated training,
optional personalization, and per-client evaluation."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Label, SynthConfig, fft_magnitude, load_events_csv, normalize, split_train_test, synth_generate
from .federated import AggregationPolicy, RoundConfig, history_csv, run_training
from .kernel import KernelConfig
from .metrics import confusion, f_score, precision, recall
from .ocsvm import TrainConfig, decision_batch
from .personalize import EdgeConfig, personalize_model


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


class TrainingError(Exception):
    pass


@dataclass
class ExperimentConfig:
    csv_path: str | None = None
    synth: SynthConfig | None = None
    sigma: float | None = None  # median heuristic when absent
    nu: float = 0.05
    eta: float = 0.05
    epsilon: float = 1e-5
    epochs: int = 50
    rounds: int = 40
    policy: AggregationPolicy = AggregationPolicy.CONDITIONAL_MEDIAN
    personalize: bool = True
    edge_k: int = 10
    edge_gamma: float = 0.05
    train_fraction: float = 0.8
    preprocess: bool = False
    seed: int = 0
    output_dir: str | None = None

    def __post_init__(self) -> None:
        if (self.csv_path is None) == (self.synth is None):
            raise ConfigError("exactly one of csv_path / synth must be given")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        try:
            if "policy" in raw:
                raw["policy"] = AggregationPolicy(raw["policy"])
            if raw.get("synth") is not None:
                synth = dict(raw["synth"])
                synth.setdefault("seed", raw.get("seed", 0))
                raw["synth"] = SynthConfig(**synth)
            return cls(**raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(raw)

    def echo(self) -> dict:
        out = {
            "csv_path": self.csv_path,
            "sigma": self.sigma,
            "nu": self.nu,
            "eta": self.eta,
            "epsilon": self.epsilon,
            "epochs": self.epochs,
            "rounds": self.rounds,
            "policy": self.policy.value,
            "personalize": self.personalize,
            "edge_k": self.edge_k,
            "edge_gamma": self.edge_gamma,
            "train_fraction": self.train_fraction,
            "preprocess": self.preprocess,
            "seed": self.seed,
        }
        if self.synth is not None:
            out["synth"] = {
                "clients": self.synth.clients,
                "per_client": self.synth.per_client,
                "dim": self.synth.dim,
                "healthy_centers": self.synth.healthy_centers.tolist(),
                "healthy_spread": self.synth.healthy_spread,
                "anomaly_count": self.synth.anomaly_count,
                "anomaly_offset": self.synth.anomaly_offset,
                "seed": self.synth.seed,
            }
        else:
            out["synth"] = None
        return out


def _load_events(cfg: ExperimentConfig):
    try:
        if cfg.csv_path is not None:
            events = load_events_csv(cfg.csv_path)
        else:
            events = synth_generate(cfg.synth)
    except (OSError, ValueError) as exc:
        raise DataError(f"ingest failed: {exc}") from exc
    if not events:
        raise DataError("no events loaded")
    if cfg.preprocess:
        try:
            for e in events:
                e.features = fft_magnitude(normalize(e.features))
        except ValueError as exc:
            raise DataError(f"preprocess failed: {exc}") from exc
    return events


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Full pipeline; returns the metrics report and, when output_dir is set,
    writes metrics.json and convergence.csv there."""
    events = _load_events(cfg)
    client_ids = sorted({e.client_id for e in events})
    splits = {}
    try:
        for cid in client_ids:
            own = [e for e in events if e.client_id == cid]
            splits[cid] = split_train_test(own, cfg.train_fraction, [cfg.seed, cid])
    except ValueError as exc:
        raise DataError(f"split failed: {exc}") from exc
    train_X = [np.array([e.features for e in splits[cid][0]]) for cid in client_ids]
    sizes = {x.shape[0] for x in train_X}
    if len(sizes) != 1:
        raise DataError(f"clients must hold equal training counts, got {sorted(sizes)}")
    n = train_X[0].shape[0]
    if cfg.personalize and cfg.edge_k >= n:
        raise ConfigError(f"edge_k={cfg.edge_k} must be below the per-client training count {n}")

    try:
        tcfg = TrainConfig(nu=cfg.nu, eta=cfg.eta, epsilon=cfg.epsilon)
        kcfg = KernelConfig(sigma=cfg.sigma) if cfg.sigma is not None else None
        rcfg = RoundConfig(epochs=cfg.epochs, rounds=cfg.rounds)
        ecfg = EdgeConfig(k=cfg.edge_k, gamma=cfg.edge_gamma) if cfg.personalize else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        models, server = run_training(train_X, kcfg, tcfg, rcfg, cfg.policy)
    except (ValueError, RuntimeError) as exc:
        raise TrainingError(f"training failed: {exc}") from exc

    per_client = []
    for pos, cid in enumerate(client_ids):
        model = models[pos]
        n_sv = model.support_points.shape[0]
        n_edge = n_sv
        if cfg.personalize:
            try:
                result = personalize_model(model, train_X[pos], ecfg, tcfg)
            except ValueError as exc:
                raise TrainingError(f"personalization failed for client {cid}: {exc}") from exc
            model = result.model
            n_edge = model.support_points.shape[0]
        test = splits[cid][1]
        scores = decision_batch(model, np.array([e.features for e in test]))
        preds = np.where(scores >= 0, 1, -1)
        c = confusion(preds, [e.label for e in test])
        per_client.append(
            {
                "client_id": cid,
                "f_score": f_score(c),
                "precision": precision(c),
                "recall": recall(c),
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
                "tn": c.tn,
                "n_support_vectors": n_sv,
                "n_edge_support_vectors": n_edge,
            }
        )
    fs = np.array([row["f_score"] for row in per_client])
    report = {
        "config_echo": cfg.echo(),
        "per_client": per_client,
        "summary": {"mean_f": float(fs.mean()), "std_f": float(fs.std())},
        "rounds_run": server.round,
    }
    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(report_json(report), encoding="utf-8")
        (out / "convergence.csv").write_text(history_csv(server), encoding="utf-8")
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def sweep(cfg: ExperimentConfig, epochs_list) -> list[dict]:
    """One run per local-epoch value; per-run outputs land in E_<epochs>/
    subdirectories and a summary table in sweep_summary.csv."""
    epochs_list = [int(e) for e in epochs_list]
    if not epochs_list:
        raise ConfigError("empty epochs list")
    reports = []
    for E in epochs_list:
        sub = dict(cfg.__dict__)
        sub["epochs"] = E
        sub["synth"] = cfg.synth
        if cfg.output_dir is not None:
            sub["output_dir"] = str(Path(cfg.output_dir) / f"E_{E}")
        run_cfg = ExperimentConfig(**sub)
        reports.append(run_experiment(run_cfg))
    if cfg.output_dir is not None:
        lines = ["epochs,mean_f,std_f"]
        for E, rep in zip(epochs_list, reports):
            lines.append(f"{E},{rep['summary']['mean_f']!r},{rep['summary']['std_f']!r}")
        Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
        (Path(cfg.output_dir) / "sweep_summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return reports


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedocsvm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("--config", required=True)
    sw = sub.add_parser("sweep", help="sweep the local-epoch count")
    sw.add_argument("--config", required=True)
    sw.add_argument("--epochs", required=True, help="comma-separated list, e.g. 5,10,20")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.from_json(args.config)
        if args.command == "run":
            report = run_experiment(cfg)
            print(report_json(report), end="")
        else:
            epochs_list = [s for s in args.epochs.split(",") if s]
            reports = sweep(cfg, epochs_list)
            for E, rep in zip(epochs_list, reports):
                s = rep["summary"]
                print(f"E={E}: mean_f={s['mean_f']:.4f} std_f={s['std_f']:.4f}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except TrainingError as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
