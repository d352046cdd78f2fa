"""Radio-unit hourly energy model: a small feed-forward network that outputs
the mean and standard deviation of a Gaussian over the measured energy.

The network is trained by minimizing the Gaussian negative log-likelihood
    l(y, mu, sigma) = log(sigma) + (y - mu)^2 / (2 sigma^2)
with adaptive-moment gradient descent and early stopping on a held-out
validation split. Targets are scaled to [0, 1] by the training maximum so the
sigmoid output layer can cover them; predictions are scaled back and the
sigma output is floored at a small fraction of the target scale.

Inputs are one vector per radio unit and hour: a one-hot over radio types
followed by fixed-width per-carrier slots (TRX count, transmission-mode code,
frequency, bandwidth, max transmit power, DL PRB load, shutdown fraction,
plus reserved zeros). Slots for carriers a radio does not have stay all-zero,
so one network serves radios with any carrier count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .datamodel import (
    Cell,
    CellKpiRecord,
    NetworkConfig,
    RadioEnergyRecord,
    RadioUnit,
)
from .errors import (
    EmptyTrainingSetError,
    NonPositiveSigmaError,
    TooManyCarriersError,
    UnknownRadioTypeError,
)

CARRIER_SLOT_WIDTH = 10
N_HIDDEN_1 = 40
N_HIDDEN_2 = 15
SIGMA_FLOOR_FRACTION = 1e-3

_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Loss


def nll_loss(y: float, mu: float, sigma: float) -> float:
    """Gaussian negative log-likelihood up to the constant log(sqrt(2 pi))."""
    if sigma <= 0:
        raise NonPositiveSigmaError(f"sigma must be positive, got {sigma}")
    return math.log(sigma) + (y - mu) ** 2 / (2.0 * sigma ** 2)


def nll_gradient(y: float, mu: float, sigma: float) -> tuple[float, float]:
    """Analytic (d l / d mu, d l / d sigma)."""
    if sigma <= 0:
        raise NonPositiveSigmaError(f"sigma must be positive, got {sigma}")
    dmu = (mu - y) / sigma ** 2
    dsigma = 1.0 / sigma - (y - mu) ** 2 / sigma ** 3
    return dmu, dsigma


# ---------------------------------------------------------------------------
# Feature encoding


def carrier_order(cells: Sequence[Cell]) -> list[Cell]:
    """Deterministic slot assignment: descending bandwidth, then cell id."""
    return sorted(cells, key=lambda c: (-c.bandwidth_mhz, c.id))


@dataclass(frozen=True)
class RadioHourSample:
    """One training/inference row: a radio unit with its per-carrier hourly
    DL PRB loads (in [0, 1]) and shutdown fractions (t_cs / 60)."""

    radio: RadioUnit
    cells: tuple[Cell, ...]
    dl_loads: Mapping[str, float]
    cs_fractions: Mapping[str, float]
    energy_wh: float = 0.0


@dataclass(frozen=True)
class EnergyFeatureSchema:
    """Categorical vocabularies plus per-position min/max scaling statistics."""

    radio_types: tuple[str, ...]
    tx_modes: tuple[str, ...]
    max_carriers: int
    lo: np.ndarray
    hi: np.ndarray

    @property
    def n_features(self) -> int:
        return len(self.radio_types) + CARRIER_SLOT_WIDTH * self.max_carriers


def _raw_block(radio: RadioUnit, cells: Sequence[Cell],
               dl_loads: Mapping[str, float], cs_fractions: Mapping[str, float],
               tx_modes: Sequence[str], max_carriers: int) -> np.ndarray:
    if len(cells) > max_carriers:
        raise TooManyCarriersError(
            f"radio {radio.id!r} has {len(cells)} carriers, schema allows "
            f"{max_carriers}")
    try:
        # 0 marks an absent carrier, so real modes are coded from 1
        mode_code = tx_modes.index(radio.carrier_tx_mode) + 1.0
    except ValueError:
        raise UnknownRadioTypeError(
            f"carrier transmission mode {radio.carrier_tx_mode!r} not seen "
            "at training")
    block = np.zeros(CARRIER_SLOT_WIDTH * max_carriers)
    for k, cell in enumerate(carrier_order(cells)):
        base = CARRIER_SLOT_WIDTH * k
        block[base + 0] = radio.n_trx
        block[base + 1] = mode_code
        block[base + 2] = cell.frequency_mhz
        block[base + 3] = cell.bandwidth_mhz
        block[base + 4] = cell.max_tx_power_dbm
        block[base + 5] = dl_loads.get(cell.id, 0.0)
        block[base + 6] = cs_fractions.get(cell.id, 0.0)
    return block


def fit_feature_schema(samples: Sequence[RadioHourSample],
                       max_carriers: int = 6) -> EnergyFeatureSchema:
    """Record categorical vocabularies and min/max statistics from training rows."""
    if not samples:
        raise EmptyTrainingSetError("no samples to fit a feature schema")
    radio_types = tuple(sorted({s.radio.radio_type for s in samples}))
    tx_modes = tuple(sorted({s.radio.carrier_tx_mode for s in samples}))
    blocks = np.stack([
        _raw_block(s.radio, s.cells, s.dl_loads, s.cs_fractions,
                   tx_modes, max_carriers)
        for s in samples])
    return EnergyFeatureSchema(radio_types=radio_types, tx_modes=tx_modes,
                               max_carriers=max_carriers,
                               lo=blocks.min(axis=0), hi=blocks.max(axis=0))


def encode_features(schema: EnergyFeatureSchema, radio: RadioUnit,
                    cells: Sequence[Cell], dl_loads: Mapping[str, float],
                    cs_fractions: Mapping[str, float]) -> np.ndarray:
    """One-hot radio type + min-max scaled carrier slots, absent slots zero."""
    if radio.radio_type not in schema.radio_types:
        raise UnknownRadioTypeError(
            f"radio type {radio.radio_type!r} not seen at training")
    onehot = np.zeros(len(schema.radio_types))
    onehot[schema.radio_types.index(radio.radio_type)] = 1.0
    block = _raw_block(radio, cells, dl_loads, cs_fractions,
                       schema.tx_modes, schema.max_carriers)
    span = schema.hi - schema.lo
    scaled = np.where(span > 0, (block - schema.lo) / np.where(span > 0, span, 1.0),
                      0.0)
    return np.concatenate([onehot, scaled])


def build_energy_samples(cfg: NetworkConfig, kpis: Sequence[CellKpiRecord],
                         energies: Sequence[RadioEnergyRecord],
                         ) -> list[RadioHourSample]:
    """Join KPI and energy rows into per-(radio, day, hour) training rows.

    Rows whose radio misses a cell KPI for that hour are dropped.
    """
    kpi_index = {(k.cell_id, k.day, k.hour): k for k in kpis}
    radios = {r.id: r for r in cfg.radio_units}
    samples = []
    for erec in energies:
        radio = radios[erec.radio_unit]
        cells = tuple(cfg.cell(cid) for cid in radio.cell_ids)
        loads: dict[str, float] = {}
        fractions: dict[str, float] = {}
        complete = True
        for cell in cells:
            k = kpi_index.get((cell.id, erec.day, erec.hour))
            if k is None:
                complete = False
                break
            loads[cell.id] = k.dl_prbs / cell.n_dl_prb
            fractions[cell.id] = k.cs_minutes / 60.0
        if complete:
            samples.append(RadioHourSample(radio=radio, cells=cells,
                                           dl_loads=loads,
                                           cs_fractions=fractions,
                                           energy_wh=erec.energy_wh))
    return samples


# ---------------------------------------------------------------------------
# Network


@dataclass
class EnergyModel:
    """Trained network weights plus everything needed to reuse them."""

    weights: list[np.ndarray]
    y_max: float
    sigma_floor_fraction: float = SIGMA_FLOOR_FRACTION
    schema: EnergyFeatureSchema | None = None
    history: list[tuple[int, float]] = field(default_factory=list)

    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[0]


@dataclass(frozen=True)
class EnergyHyper:
    learning_rate: float = 1e-3
    max_epochs: int = 2000
    patience: int = 200
    batch_size: int = 128
    val_fraction: float = 0.2
    seed: int = 0


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


def _forward(weights, X, floor):
    w1, b1, w2, b2, w3, b3 = weights
    z1 = X @ w1 + b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ w2 + b2
    h2 = np.maximum(z2, 0.0)
    z3 = h2 @ w3 + b3
    s = _sigmoid(z3)
    mu = s[:, 0]
    sigma = s[:, 1] + floor
    return mu, sigma, (X, h1, h2, s)


def _loss_value(weights, X, y, floor) -> float:
    mu, sigma, _ = _forward(weights, X, floor)
    return float(np.mean(np.log(sigma) + (y - mu) ** 2 / (2.0 * sigma ** 2)))


def _loss_and_grads(weights, X, y, floor):
    w1, b1, w2, b2, w3, b3 = weights
    mu, sigma, (X0, h1, h2, s) = _forward(weights, X, floor)
    n = len(y)
    loss = float(np.mean(np.log(sigma) + (y - mu) ** 2 / (2.0 * sigma ** 2)))
    dmu = (mu - y) / sigma ** 2 / n
    dsigma = (1.0 / sigma - (y - mu) ** 2 / sigma ** 3) / n
    dz3 = np.empty((n, 2))
    dz3[:, 0] = dmu * s[:, 0] * (1.0 - s[:, 0])
    dz3[:, 1] = dsigma * s[:, 1] * (1.0 - s[:, 1])
    gw3 = h2.T @ dz3
    gb3 = dz3.sum(axis=0)
    dh2 = dz3 @ w3.T
    dz2 = dh2 * (h2 > 0)
    gw2 = h1.T @ dz2
    gb2 = dz2.sum(axis=0)
    dh1 = dz2 @ w2.T
    dz1 = dh1 * (h1 > 0)
    gw1 = X0.T @ dz1
    gb1 = dz1.sum(axis=0)
    return loss, [gw1, gb1, gw2, gb2, gw3, gb3]


class _Adam:
    def __init__(self, shapes, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, weights, grads):
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for w, g, m, v in zip(weights, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            w -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def _init_weights(n_in: int, rng: np.random.Generator) -> list[np.ndarray]:
    def he(fan_in, fan_out):
        return rng.normal(0.0, math.sqrt(2.0 / fan_in), size=(fan_in, fan_out))

    return [he(n_in, N_HIDDEN_1), np.zeros(N_HIDDEN_1),
            he(N_HIDDEN_1, N_HIDDEN_2), np.zeros(N_HIDDEN_2),
            he(N_HIDDEN_2, 2), np.zeros(2)]


def train_energy_model(samples, hyper: EnergyHyper = EnergyHyper(),
                       schema: EnergyFeatureSchema | None = None) -> EnergyModel:
    """Fit the network on (feature vector, energy Wh) pairs.

    An internal random 80/20 train/validation split drives early stopping:
    training halts after `patience` epochs without validation improvement and
    the best-validation weights are kept. The chronological train/test split
    is the caller's job.
    """
    pairs = list(samples)
    if len(pairs) < 2:
        raise EmptyTrainingSetError("need at least two samples")
    X = np.stack([np.asarray(p[0], dtype=float) for p in pairs])
    y = np.array([float(p[1]) for p in pairs])
    y_max = float(y.max())
    if y_max <= 0:
        y_max = 1.0
    y_n = y / y_max
    floor = SIGMA_FLOOR_FRACTION

    rng = np.random.default_rng(hyper.seed)
    order = rng.permutation(len(y_n))
    n_val = max(1, int(round(hyper.val_fraction * len(y_n))))
    val_idx = order[:n_val]
    train_idx = order[n_val:]
    if len(train_idx) == 0:
        train_idx = val_idx
    X_tr, y_tr = X[train_idx], y_n[train_idx]
    X_val, y_val = X[val_idx], y_n[val_idx]

    weights = _init_weights(X.shape[1], rng)
    adam = _Adam([w.shape for w in weights], hyper.learning_rate)
    best = [math.inf, 0, [w.copy() for w in weights]]
    history: list[tuple[int, float]] = []
    n_tr = len(y_tr)
    for epoch in range(1, hyper.max_epochs + 1):
        perm = rng.permutation(n_tr)
        for start in range(0, n_tr, hyper.batch_size):
            batch = perm[start:start + hyper.batch_size]
            _, grads = _loss_and_grads(weights, X_tr[batch], y_tr[batch], floor)
            adam.step(weights, grads)
        val_loss = _loss_value(weights, X_val, y_val, floor)
        if val_loss < best[0]:
            best = [val_loss, epoch, [w.copy() for w in weights]]
            history.append((epoch, val_loss))
        elif epoch - best[1] >= hyper.patience:
            break
    return EnergyModel(weights=best[2], y_max=y_max,
                       sigma_floor_fraction=floor, schema=schema,
                       history=history)


def predict_energy(model: EnergyModel, features: np.ndarray,
                   ) -> tuple[float, float]:
    """Predicted (mu, sigma) in Wh; mu >= 0 and sigma >= floor * y_max.

    A (1 - alpha) confidence interval is mu +/- z_(alpha/2) * sigma.
    """
    X = np.asarray(features, dtype=float).reshape(1, -1)
    mu, sigma, _ = _forward(model.weights, X, model.sigma_floor_fraction)
    return float(mu[0] * model.y_max), float(sigma[0] * model.y_max)


def fit_radio_energy_model(cfg: NetworkConfig, kpis: Sequence[CellKpiRecord],
                           energies: Sequence[RadioEnergyRecord],
                           hyper: EnergyHyper = EnergyHyper()) -> EnergyModel:
    """End-to-end fit from parsed datasets: schema, encoding, training."""
    rows = build_energy_samples(cfg, kpis, energies)
    if not rows:
        raise EmptyTrainingSetError("no joinable radio energy rows")
    schema = fit_feature_schema(rows, max_carriers=cfg.max_carriers)
    pairs = [(encode_features(schema, r.radio, r.cells, r.dl_loads,
                              r.cs_fractions), r.energy_wh) for r in rows]
    return train_energy_model(pairs, hyper, schema=schema)


# ---------------------------------------------------------------------------
# Checkpoint file


def save_energy_model(path, model: EnergyModel) -> None:
    if model.schema is None:
        raise ValueError("cannot save a model without a feature schema")
    payload = {
        "version": _SCHEMA_VERSION,
        "layer_shapes": [list(w.shape) for w in model.weights],
        "weights": [w.tolist() for w in model.weights],
        "y_max": model.y_max,
        "sigma_floor_fraction": model.sigma_floor_fraction,
        "schema": {
            "radio_types": list(model.schema.radio_types),
            "tx_modes": list(model.schema.tx_modes),
            "max_carriers": model.schema.max_carriers,
            "lo": model.schema.lo.tolist(),
            "hi": model.schema.hi.tolist(),
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_energy_model(path) -> EnergyModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("version") != _SCHEMA_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')}")
    schema = EnergyFeatureSchema(
        radio_types=tuple(payload["schema"]["radio_types"]),
        tx_modes=tuple(payload["schema"]["tx_modes"]),
        max_carriers=payload["schema"]["max_carriers"],
        lo=np.array(payload["schema"]["lo"]),
        hi=np.array(payload["schema"]["hi"]),
    )
    weights = [np.array(w) for w in payload["weights"]]
    return EnergyModel(weights=weights, y_max=payload["y_max"],
                       sigma_floor_fraction=payload["sigma_floor_fraction"],
                       schema=schema)
