"""Event ingestion, signal preprocessing, splitting, and synthetic non-IID data."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np


class Label(enum.Enum):
    HEALTHY = "healthy"
    DAMAGED = "damaged"


@dataclass
class Event:
    client_id: int
    label: Label
    features: np.ndarray

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float)
        if self.features.size == 0:
            raise ValueError("features must be non-empty")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")


@dataclass
class SynthConfig:
    clients: int
    per_client: int  # healthy samples per client, equal across clients
    dim: int
    healthy_centers: np.ndarray  # (clients, dim)
    healthy_spread: float
    anomaly_count: int = 0
    anomaly_offset: float = 4.0
    seed: int = 0

    def __post_init__(self) -> None:
        self.healthy_centers = np.asarray(self.healthy_centers, dtype=float)
        if self.clients < 1 or self.per_client < 1 or self.dim < 1:
            raise ValueError("clients, per_client, and dim must be positive")
        if self.healthy_centers.shape != (self.clients, self.dim):
            raise ValueError("healthy_centers must have shape (clients, dim)")
        if not self.healthy_spread > 0:
            raise ValueError("healthy_spread must be positive")
        if self.anomaly_count < 0:
            raise ValueError("anomaly_count must be non-negative")
        if not self.anomaly_offset > 0:
            raise ValueError("anomaly_offset must be positive")


def normalize(signal) -> np.ndarray:
    """Shift/scale to zero mean and unit population standard deviation."""
    x = np.asarray(signal, dtype=float)
    if x.size < 2:
        raise ValueError("signal must have length >= 2")
    std = float(np.std(x))
    if std == 0:
        raise ValueError("constant signal cannot be normalized")
    return (x - np.mean(x)) / std


def fft_magnitude(signal) -> np.ndarray:
    """One-sided magnitude spectrum after zero-padding to the next power of two."""
    x = np.asarray(signal, dtype=float)
    if x.size < 2:
        raise ValueError("signal must have length >= 2")
    N = 1 << (int(x.size - 1)).bit_length()
    return np.abs(np.fft.fft(x, n=N)[: N // 2])


def split_train_test(events, train_fraction: float, seed) -> tuple[list[Event], list[Event]]:
    """Random healthy-only training split; the held-out healthy events plus
    every damaged event form the test set. Deterministic per seed."""
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    events = list(events)
    healthy = [i for i, e in enumerate(events) if e.label is Label.HEALTHY]
    if not healthy:
        raise ValueError("no healthy events to train on")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(healthy))
    n_train = int(round(train_fraction * len(healthy)))
    n_train = min(max(n_train, 1), len(healthy))
    chosen = {healthy[j] for j in perm[:n_train]}
    train = [events[i] for i in sorted(chosen)]
    test = [e for i, e in enumerate(events) if i not in chosen]
    return train, test


def synth_generate(cfg: SynthConfig) -> list[Event]:
    """Per-client Gaussian healthy blobs plus far-away damaged points.

    Damaged points are pushed out radially until they clear every healthy
    center by at least anomaly_offset * healthy_spread. Streams are keyed by
    (seed, client_id) so output is independent of client evaluation order."""
    events: list[Event] = []
    threshold = cfg.anomaly_offset * cfg.healthy_spread
    for c in range(cfg.clients):
        rng = np.random.default_rng([cfg.seed, c])
        center = cfg.healthy_centers[c]
        pts = center + cfg.healthy_spread * rng.standard_normal((cfg.per_client, cfg.dim))
        for p in pts:
            events.append(Event(client_id=c, label=Label.HEALTHY, features=p))
        for _ in range(cfg.anomaly_count):
            direction = rng.standard_normal(cfg.dim)
            direction /= max(np.linalg.norm(direction), 1e-12)
            r = threshold
            candidate = center + r * direction
            while np.min(np.linalg.norm(cfg.healthy_centers - candidate, axis=1)) < threshold:
                r *= 1.5
                candidate = center + r * direction
            events.append(Event(client_id=c, label=Label.DAMAGED, features=candidate))
    return events


def load_events_csv(path) -> list[Event]:
    """Read `client_id,label,f_0,...,f_{d-1}` rows; errors name the bad row."""
    events: list[Event] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 3 or header[:2] != ["client_id", "label"]:
            raise ValueError(f"{path}: expected header client_id,label,f_0,...")
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
            try:
                cid = int(row[0])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad client_id {row[0]!r}") from None
            try:
                label = Label(row[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: unknown label {row[1]!r}") from None
            try:
                feats = np.array([float(v) for v in row[2:]])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric feature value") from None
            events.append(Event(client_id=cid, label=label, features=feats))
    return events


def save_events_csv(events, path) -> None:
    events = list(events)
    if not events:
        raise ValueError("no events to write")
    d = events[0].features.size
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["client_id", "label"] + [f"f_{i}" for i in range(d)])
        for e in events:
            writer.writerow([e.client_id, e.label.value] + [repr(float(v)) for v in e.features])
