"""Per-cell UE downlink rate models: mean and 5%-tile rate as functions of
DL PRB load and RRC-connected UE count.

High-load behaviour (load >= 0.1 by default) is captured by gradient-boosted
regression trees (squared-error loss, stage-wise fit on residuals, 500 trees
of depth 4 with shrinkage 0.01). Low-load rates are too traffic-dependent to
regress, so they are modelled as a random variable with an empirical PMF
(1 Mbps histogram bins, uniform within a bin) learned from the low-load rows.

Ground-truth targets come from standard counters: the mean rate from the
RLC volume/time counters, the 5%-tile from the per-range sample counters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .datamodel import CellKpiRecord, NetworkConfig
from .errors import (
    EmptyCountersError,
    UnknownCellError,
    ZeroActiveTimeError,
)

LOW_LOAD_CUTOFF = 0.1
PMF_BIN_MBPS = 1.0
_SPLIT_GAIN_EPS = 1e-12
_BUNDLE_VERSION = 1


def default_bin_edges(n_bins: int = 15, first_edge: float = 0.5,
                      top_mbps: float = 300.0) -> tuple[float, ...]:
    """0 followed by geometrically spaced edges up to the top rate."""
    edges = [0.0] + list(np.geomspace(first_edge, top_mbps, n_bins))
    return tuple(float(e) for e in edges)


DEFAULT_BIN_EDGES = default_bin_edges()


# ---------------------------------------------------------------------------
# Ground-truth extraction from counters


def avg_rate_from_kpis(k: CellKpiRecord) -> float:
    """Mean UE DL rate in Mbps: bits outside buffer-emptying slots over the
    matching transmit time."""
    if k.dl_active_time_s <= 0:
        raise ZeroActiveTimeError(
            f"cell {k.cell_id} day {k.day} hour {k.hour}: zero active time")
    return (k.dl_bits - k.dl_bits_lastslot) / k.dl_active_time_s / 1e6


def p5_rate_from_bins(counters: Sequence[float],
                      edges: Sequence[float] = DEFAULT_BIN_EDGES) -> float:
    """Rate at the 5% cumulative fraction, linear within the containing bin."""
    if len(counters) != len(edges) - 1:
        raise ValueError(f"{len(counters)} counters need {len(counters) + 1} "
                         f"edges, got {len(edges)}")
    total = math.fsum(counters)
    if total <= 0:
        raise EmptyCountersError("all rate-bin counters are zero")
    target = 0.05 * total
    cum = 0.0
    for g, count in enumerate(counters):
        if cum + count >= target and count > 0:
            frac = (target - cum) / count
            return edges[g] + (edges[g + 1] - edges[g]) * frac
        cum += count
    return float(edges[-1])


# ---------------------------------------------------------------------------
# Regression trees and boosting


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    value: float = 0.0


class RegressionTree:
    """Exact-split CART regression tree; x <= threshold goes left."""

    def __init__(self, max_depth: int):
        self.max_depth = max_depth
        self.nodes: list[_Node] = []

    def fit(self, X: np.ndarray, r: np.ndarray) -> "RegressionTree":
        self.nodes = []
        self._grow(X, r, np.arange(len(r)), depth=0)
        return self

    def _grow(self, X, r, idx, depth) -> int:
        node_id = len(self.nodes)
        node = _Node(value=float(r[idx].mean()))
        self.nodes.append(node)
        if depth >= self.max_depth or len(idx) < 2:
            return node_id
        split = _best_split(X, r, idx)
        if split is None:
            return node_id
        feature, threshold = split
        mask = X[idx, feature] <= threshold
        node.feature = feature
        node.threshold = threshold
        node.left = self._grow(X, r, idx[mask], depth + 1)
        node.right = self._grow(X, r, idx[~mask], depth + 1)
        return node_id

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(len(X))
        stack = [(0, np.arange(len(X)))]
        while stack:
            node_id, idx = stack.pop()
            if len(idx) == 0:
                continue
            node = self.nodes[node_id]
            if node.feature < 0:
                out[idx] = node.value
                continue
            mask = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
        return out

    @property
    def n_leaves(self) -> int:
        return sum(1 for n in self.nodes if n.feature < 0)


def _best_split(X, r, idx):
    """Exhaustive best split by squared-error reduction.

    Candidate thresholds are midpoints between consecutive distinct values;
    ties break towards the lower feature index, then the lower threshold.
    """
    n = len(idx)
    total = r[idx].sum()
    base = total * total / n
    best_gain = _SPLIT_GAIN_EPS
    best = None
    for feature in range(X.shape[1]):
        xs = X[idx, feature]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        r_sorted = r[idx][order]
        boundaries = np.flatnonzero(xs_sorted[1:] != xs_sorted[:-1]) + 1
        if len(boundaries) == 0:
            continue
        csum = np.cumsum(r_sorted)
        left_sum = csum[boundaries - 1]
        left_n = boundaries
        right_sum = total - left_sum
        right_n = n - boundaries
        score = left_sum ** 2 / left_n + right_sum ** 2 / right_n
        k = int(np.argmax(score))
        gain = score[k] - base
        if gain > best_gain:
            best_gain = gain
            cut = boundaries[k]
            best = (feature, float((xs_sorted[cut - 1] + xs_sorted[cut]) / 2.0))
    return best


@dataclass
class BoostedEnsemble:
    """Stage-wise additive model: mean initial estimate plus shrunken trees."""

    init_value: float
    learning_rate: float
    trees: list[RegressionTree] = field(default_factory=list)
    train_mse: list[float] = field(default_factory=list)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.full(len(X), self.init_value)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out


@dataclass(frozen=True)
class RateHyper:
    n_estimators: int = 500
    max_depth: int = 4
    learning_rate: float = 0.01
    low_load_cutoff: float = LOW_LOAD_CUTOFF
    pmf_bin_mbps: float = PMF_BIN_MBPS


def fit_boosted(X: np.ndarray, y: np.ndarray,
                hyper: RateHyper = RateHyper()) -> BoostedEnsemble:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    ensemble = BoostedEnsemble(init_value=float(y.mean()),
                               learning_rate=hyper.learning_rate)
    pred = np.full(len(y), ensemble.init_value)
    for _ in range(hyper.n_estimators):
        residual = y - pred
        tree = RegressionTree(hyper.max_depth).fit(X, residual)
        pred = pred + hyper.learning_rate * tree.predict(X)
        ensemble.trees.append(tree)
        ensemble.train_mse.append(float(np.mean((y - pred) ** 2)))
    return ensemble


# ---------------------------------------------------------------------------
# Low-load PMF


@dataclass
class RatePmf:
    """Histogram of observed rates; sampling is uniform within a bin."""

    bin_mbps: float
    first_bin: int            # index of the lowest occupied bin
    counts: np.ndarray

    @classmethod
    def from_values(cls, values: Sequence[float],
                    bin_mbps: float = PMF_BIN_MBPS) -> "RatePmf":
        values = np.asarray(values, dtype=float)
        bins = np.floor(values / bin_mbps).astype(int)
        first = int(bins.min())
        counts = np.bincount(bins - first)
        return cls(bin_mbps=bin_mbps, first_bin=first,
                   counts=counts.astype(float))

    def sample(self, rng: np.random.Generator) -> float:
        cum = np.cumsum(self.counts / self.counts.sum())
        cum[-1] = 1.0
        k = int(np.searchsorted(cum, rng.random(), side="right"))
        k = min(k, len(self.counts) - 1)
        lo = (self.first_bin + k) * self.bin_mbps
        return lo + rng.random() * self.bin_mbps


# ---------------------------------------------------------------------------
# Per-cell model


@dataclass(frozen=True)
class RateSample:
    """One observed (load, UE count) -> rate row for one cell and hour."""

    cell_id: str
    hour: int
    dl_prb_load: float
    rrc_ues: float
    rate_mbps: float

    def __post_init__(self):
        if not 0.0 <= self.dl_prb_load <= 1.0:
            raise ValueError(f"load {self.dl_prb_load} outside [0, 1]")
        if self.rate_mbps < 0:
            raise ValueError("rate must be nonnegative")


@dataclass
class CellRateModel:
    ensemble: BoostedEnsemble | None
    pmf: RatePmf | None


@dataclass
class RateModel:
    """Per-cell mean-rate and 5%-tile models plus the load cutoff."""

    avg: dict[str, CellRateModel]
    ce: dict[str, CellRateModel]
    cutoff: float = LOW_LOAD_CUTOFF
    bin_edges: tuple[float, ...] = DEFAULT_BIN_EDGES

    @property
    def cells(self) -> set[str]:
        return set(self.avg) | set(self.ce)


def _fit_cell(samples: Sequence[RateSample], hyper: RateHyper) -> CellRateModel:
    high = [s for s in samples if s.dl_prb_load >= hyper.low_load_cutoff]
    low = [s for s in samples if s.dl_prb_load < hyper.low_load_cutoff]
    ensemble = None
    if high:
        X = np.array([[s.dl_prb_load, s.rrc_ues] for s in high])
        y = np.array([s.rate_mbps for s in high])
        ensemble = fit_boosted(X, y, hyper)
    pmf = RatePmf.from_values([s.rate_mbps for s in low],
                              hyper.pmf_bin_mbps) if low else None
    return CellRateModel(ensemble=ensemble, pmf=pmf)


def train_rate_model(avg_samples: Mapping[str, Sequence[RateSample]],
                     ce_samples: Mapping[str, Sequence[RateSample]],
                     hyper: RateHyper = RateHyper()) -> RateModel:
    """Fit both targets per cell. Cells whose rows all sit below the load
    cutoff end up PMF-only (no ensemble); that is a degraded mode, not an
    error."""
    model = RateModel(avg={}, ce={}, cutoff=hyper.low_load_cutoff)
    for cell in sorted(set(avg_samples) | set(ce_samples)):
        if avg_samples.get(cell):
            model.avg[cell] = _fit_cell(avg_samples[cell], hyper)
        if ce_samples.get(cell):
            model.ce[cell] = _fit_cell(ce_samples[cell], hyper)
    return model


def _predict_one(cell_model: CellRateModel, load: float, ues: float,
                 cutoff: float, rng: np.random.Generator) -> float:
    use_ensemble = load >= cutoff
    if use_ensemble and cell_model.ensemble is not None:
        value = float(cell_model.ensemble.predict([[load, ues]])[0])
        return max(value, 0.0)
    if cell_model.pmf is not None:
        return cell_model.pmf.sample(rng)
    if cell_model.ensemble is not None:
        return max(float(cell_model.ensemble.predict([[load, ues]])[0]), 0.0)
    return 0.0


def predict_rate(model: RateModel, cell: str, dl_prb_load: float,
                 rrc_ues: float, rng: np.random.Generator,
                 ) -> tuple[float, float]:
    """(mean rate, 5%-tile rate) in Mbps. Loads at or above the cutoff use
    the ensembles (clamped at 0); lower loads draw from the learned PMFs."""
    if not 0.0 <= dl_prb_load <= 1.0:
        raise ValueError(f"load {dl_prb_load} outside [0, 1]")
    if cell not in model.avg and cell not in model.ce:
        raise UnknownCellError(f"no rate model for cell {cell!r}")
    avg = _predict_one(model.avg[cell], dl_prb_load, rrc_ues, model.cutoff,
                       rng) if cell in model.avg else 0.0
    ce = _predict_one(model.ce[cell], dl_prb_load, rrc_ues, model.cutoff,
                      rng) if cell in model.ce else 0.0
    return avg, ce


def build_rate_samples(cfg: NetworkConfig, kpis: Sequence[CellKpiRecord],
                       edges: Sequence[float] = DEFAULT_BIN_EDGES,
                       ) -> tuple[dict[str, list[RateSample]],
                                  dict[str, list[RateSample]]]:
    """Extract per-cell training rows from KPI records.

    Rows without active transmit time (mean rate) or with empty bin counters
    (5%-tile) are skipped for the respective target.
    """
    avg: dict[str, list[RateSample]] = {}
    ce: dict[str, list[RateSample]] = {}
    for k in kpis:
        load = min(k.dl_prbs / cfg.cell(k.cell_id).n_dl_prb, 1.0)
        if k.dl_active_time_s > 0:
            avg.setdefault(k.cell_id, []).append(RateSample(
                cell_id=k.cell_id, hour=k.hour, dl_prb_load=load,
                rrc_ues=k.rrc_ues, rate_mbps=max(avg_rate_from_kpis(k), 0.0)))
        if math.fsum(k.rate_bins) > 0:
            ce.setdefault(k.cell_id, []).append(RateSample(
                cell_id=k.cell_id, hour=k.hour, dl_prb_load=load,
                rrc_ues=k.rrc_ues, rate_mbps=p5_rate_from_bins(k.rate_bins,
                                                               edges)))
    return avg, ce


def mean_rate_by_cell(avg_samples: Mapping[str, Sequence[RateSample]],
                      ) -> dict[str, float]:
    """The baseline 'mean estimator': training-set mean rate per cell."""
    return {cell: float(np.mean([s.rate_mbps for s in rows]))
            for cell, rows in avg_samples.items() if rows}


# ---------------------------------------------------------------------------
# Model bundle file


def _tree_payload(tree: RegressionTree):
    return {"max_depth": tree.max_depth,
            "nodes": [[n.feature, n.threshold, n.left, n.right, n.value]
                      for n in tree.nodes]}


def _tree_from_payload(payload) -> RegressionTree:
    tree = RegressionTree(payload["max_depth"])
    tree.nodes = [_Node(feature=f, threshold=t, left=l, right=r, value=v)
                  for f, t, l, r, v in payload["nodes"]]
    return tree


def _cell_payload(cm: CellRateModel):
    out = {}
    if cm.ensemble is not None:
        out["ensemble"] = {
            "init_value": cm.ensemble.init_value,
            "learning_rate": cm.ensemble.learning_rate,
            "trees": [_tree_payload(t) for t in cm.ensemble.trees],
        }
    if cm.pmf is not None:
        out["pmf"] = {"bin_mbps": cm.pmf.bin_mbps,
                      "first_bin": cm.pmf.first_bin,
                      "counts": cm.pmf.counts.tolist()}
    return out


def _cell_from_payload(payload) -> CellRateModel:
    ensemble = None
    if "ensemble" in payload:
        e = payload["ensemble"]
        ensemble = BoostedEnsemble(init_value=e["init_value"],
                                   learning_rate=e["learning_rate"],
                                   trees=[_tree_from_payload(t)
                                          for t in e["trees"]])
    pmf = None
    if "pmf" in payload:
        p = payload["pmf"]
        pmf = RatePmf(bin_mbps=p["bin_mbps"], first_bin=p["first_bin"],
                      counts=np.array(p["counts"]))
    return CellRateModel(ensemble=ensemble, pmf=pmf)


def save_rate_model(path, model: RateModel) -> None:
    payload = {
        "version": _BUNDLE_VERSION,
        "cutoff": model.cutoff,
        "bin_edges": list(model.bin_edges),
        "avg": {cell: _cell_payload(cm) for cell, cm in sorted(model.avg.items())},
        "ce": {cell: _cell_payload(cm) for cell, cm in sorted(model.ce.items())},
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_rate_model(path) -> RateModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("version") != _BUNDLE_VERSION:
        raise ValueError(f"unsupported bundle version {payload.get('version')}")
    return RateModel(
        avg={cell: _cell_from_payload(p) for cell, p in payload["avg"].items()},
        ce={cell: _cell_from_payload(p) for cell, p in payload["ce"].items()},
        cutoff=payload["cutoff"],
        bin_edges=tuple(payload["bin_edges"]),
    )
