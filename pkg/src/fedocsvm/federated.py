"""Round-based federated simulation: client sweeps, loss reporting, and
conditional median-loss aggregation (with a plain-average baseline)."""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .kernel import KernelConfig, KernelMatrix, kernel_matrix, median_sigma
from .projection import project_box_simplex
from .ocsvm import (
    CoefficientVector,
    OcsvmModel,
    TrainConfig,
    box_cap,
    build_model,
    compute_w,
    init_alpha,
    local_loss,
)


class AggregationPolicy(enum.Enum):
    CONDITIONAL_MEDIAN = "conditional_median"
    PLAIN_AVERAGE = "plain_average"


@dataclass(frozen=True)
class RoundConfig:
    epochs: int  # local epochs per round (E)
    rounds: int  # communication rounds

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")


@dataclass
class ClientState:
    client_id: int
    X: np.ndarray
    K: KernelMatrix
    alpha: np.ndarray
    w: np.ndarray
    last_loss: float
    kernel: KernelConfig

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class RoundRecord:
    round: int
    losses: tuple[float, ...]
    selected: tuple[int, ...]
    mean_loss: float


@dataclass
class ServerState:
    round: int
    global_w: np.ndarray
    policy: AggregationPolicy
    history: list[RoundRecord] = field(default_factory=list)


def sweep_against(alpha: np.ndarray, drive: np.ndarray, eta: float, cap: float) -> np.ndarray:
    """One sweep of alpha_k <- clamp(alpha_k + eta (1 - drive_k)) with the
    driving coefficient vector held fixed."""
    return np.clip(alpha + eta * (1.0 - drive), 0.0, cap)


def client_update(
    client: ClientState, w_global: CoefficientVector, cfg: TrainConfig, epochs: int
) -> tuple[CoefficientVector, float]:
    """E local epochs: the first sweep is driven by the received global w
    (held fixed for the sweep), later sweeps by the locally recomputed w.
    After each sweep the multipliers are projected back onto the capped
    simplex (sum alpha = 1) so local models stay on the dual-feasible set.
    Mutates the client's alpha, w, and last_loss."""
    n = client.n
    if w_global.shape[0] != n:
        raise ValueError(f"global w length {w_global.shape[0]} != client n {n}")
    cap = box_cap(n, cfg.nu)
    a = np.array(client.alpha, dtype=float)
    drive = np.asarray(w_global, dtype=float)
    for _ in range(epochs):
        a = project_box_simplex(sweep_against(a, drive, cfg.eta, cap), cap)
        drive = compute_w(a, client.K)
    client.alpha = a
    client.w = drive
    client.last_loss = local_loss(a, client.K)
    return client.w, client.last_loss


def select_by_median(losses) -> list[int]:
    """Indices whose loss is at or below the median; ties all included."""
    losses = np.asarray(losses, dtype=float)
    if losses.size == 0:
        raise ValueError("need at least one loss")
    med = float(np.median(losses))
    return [int(i) for i in np.flatnonzero(losses <= med)]


def aggregate(ws, selected) -> CoefficientVector:
    """Coordinate-wise mean of the selected clients' coefficient vectors."""
    selected = list(selected)
    if not selected:
        raise ValueError("empty selection")
    ws = [np.asarray(ws[i], dtype=float) for i in selected]
    lengths = {w.shape[0] for w in ws}
    if len(lengths) != 1:
        raise ValueError("coefficient vectors differ in length")
    return np.mean(ws, axis=0)


def run_round(
    server: ServerState,
    clients: list[ClientState],
    cfg: TrainConfig,
    rcfg: RoundConfig,
) -> ServerState:
    """One protocol round: dispatch, local updates, filter, average."""
    sizes = {c.n for c in clients}
    if len(sizes) != 1:
        raise ValueError(f"all clients must hold the same sample count, got {sorted(sizes)}")
    ws, losses = [], []
    for client in clients:
        w, loss = client_update(client, server.global_w, cfg, rcfg.epochs)
        ws.append(w)
        losses.append(loss)
    if server.policy is AggregationPolicy.CONDITIONAL_MEDIAN:
        selected = select_by_median(losses)
    else:
        selected = list(range(len(clients)))
    server.global_w = aggregate(ws, selected)
    server.round += 1
    server.history.append(
        RoundRecord(
            round=server.round,
            losses=tuple(float(x) for x in losses),
            selected=tuple(selected),
            mean_loss=float(np.mean(losses)),
        )
    )
    return server


def make_clients(clients_data, kcfg: KernelConfig | None, cfg: TrainConfig) -> list[ClientState]:
    """Build per-client state; a missing kernel config falls back to the
    per-client median-heuristic bandwidth."""
    clients = []
    for cid, X in enumerate(clients_data):
        X = np.asarray(X, dtype=float)
        if X.size == 0:
            raise ValueError(f"client {cid} has no data")
        ck = kcfg if kcfg is not None else KernelConfig(sigma=median_sigma(X))
        K = kernel_matrix(X, ck)
        alpha = init_alpha(K.n, cfg)
        clients.append(
            ClientState(
                client_id=cid,
                X=X,
                K=K,
                alpha=alpha,
                w=compute_w(alpha, K),
                last_loss=local_loss(alpha, K),
                kernel=ck,
            )
        )
    return clients


def run_training(
    clients_data,
    kcfg: KernelConfig | None,
    cfg: TrainConfig,
    rcfg: RoundConfig,
    policy: AggregationPolicy,
    rounds: int | None = None,
) -> tuple[list[OcsvmModel], ServerState]:
    """Full protocol: `rounds` rounds, then one detector per client from its
    final local alpha. rounds=0 yields models built from the uniform init."""
    clients = make_clients(clients_data, kcfg, cfg)
    sizes = {c.n for c in clients}
    if len(sizes) != 1:
        raise ValueError(f"all clients must hold the same sample count, got {sorted(sizes)}")
    n = clients[0].n
    server = ServerState(round=0, global_w=np.zeros(n), policy=policy)
    total = rcfg.rounds if rounds is None else rounds
    for _ in range(total):
        run_round(server, clients, cfg, rcfg)
    models = [build_model(c.X, c.alpha, c.K, c.kernel, cfg) for c in clients]
    return models, server


def history_csv(server: ServerState) -> str:
    """Per-round history as `round,client_id,loss,selected` rows."""
    buf = io.StringIO()
    buf.write("round,client_id,loss,selected\n")
    for rec in server.history:
        chosen = set(rec.selected)
        for cid, loss in enumerate(rec.losses):
            buf.write(f"{rec.round},{cid},{loss!r},{1 if cid in chosen else 0}\n")
    return buf.getvalue()
