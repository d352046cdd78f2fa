"""Stochastic agent-based carrier shutdown simulation and deterministic baseline.

Each Monte Carlo run draws hourly traffic for every cell, then walks the space
of shutdown configurations one cell flip at a time: eligibility rule checks,
margin-weighted agent selection, UE transfer on shutdown, exact state
restoration on reactivation. Every movement is logged so a run can be replayed
from its initial draw, and per-hour runs roll forward into the next hour.

State bookkeeping uses a per-host contribution ledger: a host cell's counters
are always rederived as its own drawn base plus the logged contributions it
currently hosts. Removing a contribution therefore restores the exact prior
value, which makes shutdown/reactivate round trips bit-identical.

Runs within an hour are independent given the previous hour's configuration
pool and use per-(seed, hour, run) RNG streams; a RunState is owned by its run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .datamodel import NetworkConfig, TrafficModel, draw_inputs
from .errors import EmptyCandidateSetError, InconsistentReplayError
from .rules import PROBABILITY_SUM_TOL, HandoverModel, check_shutdown_entry

HOURS = tuple(range(1, 25))
SHUTDOWN_MINUTES = 60.0


@dataclass(frozen=True)
class AbmConfig:
    """Monte Carlo budget: runs per hour, step cap per run, master seed."""

    runs: int = 100
    max_steps: int = 400
    seed: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


class SimNetwork:
    """Index arrays for one NetworkConfig, shared read-only by all runs."""

    def __init__(self, cfg: NetworkConfig):
        self.cfg = cfg
        self.cell_ids = tuple(c.id for c in cfg.cells)
        self.index = {cid: i for i, cid in enumerate(self.cell_ids)}
        self.n_cells = len(self.cell_ids)
        self.cap_ids = tuple(cid for cid in self.cell_ids
                             if cid in cfg.capacity_cells)
        self.cap_index = {cid: k for k, cid in enumerate(self.cap_ids)}
        self.n_cap = len(self.cap_ids)
        self.cap_global = np.array([self.index[c] for c in self.cap_ids],
                                   dtype=np.intp)
        self.paired_global = np.array(
            [self.index[cfg.pairing[c]] for c in self.cap_ids], dtype=np.intp)
        th = [cfg.energy_saving[c] for c in self.cap_ids]
        self.entry_ue = np.array([t.entry_ue for t in th])
        self.entry_dl = np.array([t.entry_dl_prb for t in th])
        self.entry_ul = np.array([t.entry_ul_prb for t in th])
        self.leave_ue = np.array([t.leave_ue for t in th])
        self.leave_dl = np.array([t.leave_dl_prb for t in th])
        self.leave_ul = np.array([t.leave_ul_prb for t in th])
        self.n_dl_prb = np.array([c.n_dl_prb for c in cfg.cells], dtype=float)
        self.is_capacity = np.zeros(self.n_cells, dtype=bool)
        self.is_capacity[self.cap_global] = True
        self.cap_of_global = np.full(self.n_cells, -1, dtype=np.intp)
        self.cap_of_global[self.cap_global] = np.arange(self.n_cap)


def build_transfer_table(net: SimNetwork, handover: HandoverModel, hour: int):
    """Per capacity cell: (target indices, cumulative PMF) or None if no
    feasible A4 target was observed for the hour."""
    table = []
    for cid in net.cap_ids:
        probs = handover.targets(cid, hour)
        items = sorted((j, p) for j, p in probs.items() if p > 0)
        if not items:
            table.append(None)
            continue
        total = sum(p for _, p in items)
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValueError(f"handover PMF for {cid!r} at hour {hour} "
                             f"sums to {total!r}")
        targets = np.array([net.index[j] for j, _ in items], dtype=np.intp)
        cum = np.cumsum([p for _, p in items])
        cum[-1] = 1.0
        table.append((targets, cum))
    return table


@dataclass
class ReplayLog:
    """Initial drawn state of a run plus the ordered list of state mutations.

    Events are ("sd", step, cap_idx, moves) with moves a tuple of
    (origin_cap_idx, target_cell_idx, ue_count, dl_amount, ul_amount),
    or ("ac", step, cap_idx). Replaying them from the initial state
    reproduces the live RunState field for field.
    """

    hour: int
    base_ue: np.ndarray
    base_dl: np.ndarray
    base_ul: np.ndarray
    events: list = field(default_factory=list)


class RunState:
    """Mutable per-run state: configuration vector, predicted counters,
    contribution ledger and replay log."""

    __slots__ = ("net", "hour", "x", "ue", "dl", "ul", "t_cs",
                 "base_ue", "base_dl", "base_ul", "sd_frozen",
                 "contribs", "origin_hosts", "replay")

    def __init__(self, net: SimNetwork, hour: int, base_ue, base_dl, base_ul,
                 replay: ReplayLog):
        self.net = net
        self.hour = hour
        self.x = np.ones(net.n_cap, dtype=bool)
        self.base_ue = base_ue
        self.base_dl = base_dl
        self.base_ul = base_ul
        self.ue = base_ue.copy()
        self.dl = base_dl.copy()
        self.ul = base_ul.copy()
        self.t_cs = np.zeros(net.n_cells)
        cap, paired = net.cap_global, net.paired_global
        self.sd_frozen = (
            (base_ue[cap] < net.entry_ue)
            & (base_dl[cap] + base_dl[paired] < net.entry_dl)
            & (base_ul[cap] + base_ul[paired] < net.entry_ul))
        self.contribs: list[list] = [[] for _ in range(net.n_cells)]
        self.origin_hosts: dict[int, set[int]] = {}
        self.replay = replay

    def fingerprint(self) -> tuple:
        """Byte-exact summary of the observable state."""
        return (self.x.tobytes(), self.ue.tobytes(), self.dl.tobytes(),
                self.ul.tobytes(), self.t_cs.tobytes())

    def totals(self) -> tuple[float, float, float]:
        return float(self.ue.sum()), float(self.dl.sum()), float(self.ul.sum())

    def _refold(self, g: int) -> None:
        ue = self.base_ue[g]
        dl = self.base_dl[g]
        ul = self.base_ul[g]
        for _, n, dla, ula in self.contribs[g]:
            ue += n
            dl += dla
            ul += ula
        if ue < 0 or dl < 0 or ul < 0:
            raise InconsistentReplayError(
                f"cell index {g} went negative during restore")
        self.ue[g] = ue
        self.dl[g] = dl
        self.ul[g] = ul


def _new_state(net: SimNetwork, tm: TrafficModel, hour: int,
               rng: np.random.Generator) -> RunState:
    draws = draw_inputs(tm, hour, rng, cfg=net.cfg)
    base_ue = np.array([float(draws[c].ues) for c in net.cell_ids])
    base_dl = np.array([draws[c].dl_prbs for c in net.cell_ids])
    base_ul = np.array([draws[c].ul_prbs for c in net.cell_ids])
    replay = ReplayLog(hour=hour, base_ue=base_ue.copy(),
                       base_dl=base_dl.copy(), base_ul=base_ul.copy())
    return RunState(net, hour, base_ue, base_dl, base_ul, replay)


# ---------------------------------------------------------------------------
# Core mutations


def _draw_moves(state: RunState, a: int, targets: np.ndarray, cum: np.ndarray,
                rng: np.random.Generator):
    """Draw a transfer target per departing UE, grouped by origin."""
    net = state.net
    g = net.cap_global[a]
    n_ue = int(round(state.ue[g]))
    if n_ue == 0:
        return []
    m_dl = state.dl[g] / n_ue
    m_ul = state.ul[g] / n_ue
    groups = [(a, int(round(state.base_ue[g])))]
    groups += [(origin, n) for origin, n, _, _ in state.contribs[g]]
    moves = []
    for origin, count in groups:
        if count == 0:
            continue
        picks = np.searchsorted(cum, rng.random(count), side="right")
        np.minimum(picks, len(targets) - 1, out=picks)
        counts = np.bincount(picks, minlength=len(targets))
        for slot in np.flatnonzero(counts):
            n = int(counts[slot])
            moves.append((origin, int(targets[slot]), n, n * m_dl, n * m_ul))
    return moves


def _apply_shutdown(state: RunState, a: int, moves, step: int) -> None:
    net = state.net
    g = net.cap_global[a]
    touched = set()
    for origin, target, n, dla, ula in moves:
        state.contribs[target].append((origin, n, dla, ula))
        state.origin_hosts.setdefault(origin, set()).add(target)
        touched.add(target)
    for target in touched:
        state._refold(target)
    # every UE left, including previously received foreign ones
    for origin, _, _, _ in state.contribs[g]:
        hosts = state.origin_hosts.get(origin)
        if hosts is not None:
            hosts.discard(g)
    state.contribs[g] = []
    state.ue[g] = 0.0
    state.dl[g] = 0.0
    state.ul[g] = 0.0
    state.t_cs[g] = SHUTDOWN_MINUTES
    state.x[a] = False
    state.replay.events.append(("sd", step, a, tuple(moves)))


def _transfer(state: RunState, a: int, table, rng: np.random.Generator,
              step: int) -> bool:
    """Shut down capacity cell `a`, handing its UEs to drawn targets.

    Returns False (state untouched) when no feasible target exists, i.e. the
    shutdown attempt is abandoned.
    """
    entry = table[a]
    if entry is None:
        return False
    targets, cum = entry
    is_cap = state.net.is_capacity[targets]
    if is_cap.any():
        # targets sharing the coverage frequency may themselves be shut down
        alive = ~is_cap | state.x[state.net.cap_of_global[targets]]
        if not alive.any():
            return False
        if not alive.all():
            kept = np.flatnonzero(alive)
            probs = np.diff(np.concatenate(([0.0], cum)))[kept]
            cum = np.cumsum(probs / probs.sum())
            cum[-1] = 1.0
            targets = targets[kept]
    moves = _draw_moves(state, a, targets, cum, rng)
    _apply_shutdown(state, a, moves, step)
    return True


def _reactivate(state: RunState, a: int, step: int) -> None:
    net = state.net
    g = net.cap_global[a]
    hosts = sorted(state.origin_hosts.pop(a, ()))
    for h in hosts:
        state.contribs[h] = [e for e in state.contribs[h] if e[0] != a]
        state._refold(h)
    state.x[a] = True
    state.t_cs[g] = 0.0
    state._refold(g)
    state.replay.events.append(("ac", step, a))


def _eligible_masks(state: RunState) -> tuple[np.ndarray, np.ndarray]:
    net = state.net
    paired = net.paired_global
    sd = state.x & state.sd_frozen
    ac = ~state.x & ((state.ue[paired] > net.leave_ue)
                     | (state.dl[paired] > net.leave_dl)
                     | (state.ul[paired] > net.leave_ul))
    return sd, ac


def _select(state: RunState, sd: np.ndarray, ac: np.ndarray,
            rng: np.random.Generator) -> int:
    net = state.net
    cap, paired = net.cap_global, net.paired_global
    d = np.zeros(net.n_cap)
    # shutdown margin on the frozen draws, wakeup margin on current counters
    d[sd] = net.entry_dl[sd] - (state.base_dl[cap] + state.base_dl[paired])[sd]
    d[ac] = state.dl[paired][ac] - net.leave_dl[ac]
    idx = np.flatnonzero(sd | ac)
    weights = np.maximum(d[idx], 0.0)
    total = weights.sum()
    if total <= 0.0:
        cum = np.arange(1, len(idx) + 1) / len(idx)
    else:
        cum = np.cumsum(weights / total)
    cum[-1] = 1.0
    k = int(np.searchsorted(cum, rng.random(), side="right"))
    return int(idx[min(k, len(idx) - 1)])


def replay_log(log: ReplayLog, net: SimNetwork) -> RunState:
    """Rebuild the RunState a log describes by reapplying every event."""
    fresh = ReplayLog(hour=log.hour, base_ue=log.base_ue.copy(),
                      base_dl=log.base_dl.copy(), base_ul=log.base_ul.copy())
    state = RunState(net, log.hour, fresh.base_ue, fresh.base_dl,
                     fresh.base_ul, fresh)
    for event in list(log.events):
        if event[0] == "sd":
            _, step, a, moves = event
            _apply_shutdown(state, a, list(moves), step)
        else:
            _, step, a = event
            _reactivate(state, a, step)
    return state


# ---------------------------------------------------------------------------
# Public operations (cell-id facade over the index-based core)


def eligible_sets(state: RunState) -> tuple[set[str], set[str]]:
    """Capacity cells currently allowed to shut down / to be reactivated."""
    sd, ac = _eligible_masks(state)
    ids = state.net.cap_ids
    return ({ids[k] for k in np.flatnonzero(sd)},
            {ids[k] for k in np.flatnonzero(ac)})


def select_agent(to_shutdown: Iterable[str], to_wakeup: Iterable[str],
                 loads: Mapping[str, float], thresholds: Mapping,
                 rng: np.random.Generator) -> str:
    """Pick the acting cell from the margin-weighted PMF.

    `loads` holds, per shutdown candidate, the combined drawn DL PRBs of the
    cell and its paired coverage cell; per wakeup candidate, the paired
    coverage cell's current DL PRBs. Negative margins are clamped to zero and
    an all-zero total falls back to a uniform choice.
    """
    entries = [(c, thresholds[c].entry_dl_prb - loads[c])
               for c in sorted(to_shutdown)]
    entries += [(c, loads[c] - thresholds[c].leave_dl_prb)
                for c in sorted(to_wakeup)]
    if not entries:
        raise EmptyCandidateSetError("no candidate cells")
    weights = np.maximum([w for _, w in entries], 0.0)
    total = weights.sum()
    if total <= 0.0:
        cum = np.arange(1, len(entries) + 1) / len(entries)
    else:
        cum = np.cumsum(weights / total)
    cum[-1] = 1.0
    k = int(np.searchsorted(cum, rng.random(), side="right"))
    return entries[min(k, len(entries) - 1)][0]


def transfer_users(cell_id: str, state: RunState, handover: HandoverModel,
                   hour: int, rng: np.random.Generator) -> bool:
    """Shut down `cell_id`, transferring its UEs per the handover PMF.

    Returns False and leaves the state untouched when every transfer
    probability is zero (the shutdown is abandoned, not an error).
    """
    a = state.net.cap_index[cell_id]
    if not state.x[a]:
        raise ValueError(f"{cell_id!r} is already shut down")
    table = [None] * state.net.n_cap
    probs = handover.targets(cell_id, hour)
    items = sorted((j, p) for j, p in probs.items() if p > 0)
    if items:
        total = sum(p for _, p in items)
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValueError(f"handover PMF for {cell_id!r} sums to {total!r}")
        targets = np.array([state.net.index[j] for j, _ in items],
                           dtype=np.intp)
        cum = np.cumsum([p for _, p in items])
        cum[-1] = 1.0
        table[a] = (targets, cum)
    return _transfer(state, a, table, rng, step=len(state.replay.events) + 1)


def reactivate(cell_id: str, state: RunState) -> RunState:
    """Restore `cell_id` to its drawn initial state, reclaiming its UEs and
    PRBs from the cells currently hosting them."""
    a = state.net.cap_index[cell_id]
    if state.x[a]:
        raise ValueError(f"{cell_id!r} is not shut down")
    _reactivate(state, a, step=len(state.replay.events) + 1)
    return state


@dataclass(frozen=True)
class RunResult:
    state: RunState
    steps: int
    stable: bool


def _coerce_start(net: SimNetwork, starting_x) -> np.ndarray:
    if starting_x is None:
        return np.ones(net.n_cap, dtype=bool)
    if isinstance(starting_x, Mapping):
        return np.array([bool(starting_x.get(c, True)) for c in net.cap_ids])
    arr = np.asarray(starting_x, dtype=bool)
    if arr.shape != (net.n_cap,):
        raise ValueError("starting configuration has wrong length")
    return arr


def run_monte_carlo(tm: TrafficModel, cfg: NetworkConfig,
                    handover: HandoverModel, abm_cfg: AbmConfig,
                    starting_x, hour: int, rng: np.random.Generator,
                    on_step: Callable[[RunState, int], None] | None = None,
                    _net: SimNetwork | None = None,
                    _table=None) -> RunResult:
    """One Monte Carlo run: draw traffic, roll to the starting configuration,
    then iterate rule checks / selection / transfer until stable or capped.

    The roll-in replays the shutdown path from all-active to `starting_x`
    (ascending cell order, UE transfers included) without rule checks or
    agent randomness.
    """
    net = _net if _net is not None else SimNetwork(cfg)
    table = _table if _table is not None else build_transfer_table(
        net, handover, hour)
    start = _coerce_start(net, starting_x)
    state = _new_state(net, tm, hour, rng)
    for a in np.flatnonzero(~start):
        _transfer(state, int(a), table, rng, step=0)
    for t in range(1, abm_cfg.max_steps + 1):
        sd, ac = _eligible_masks(state)
        if not sd.any() and not ac.any():
            return RunResult(state, t, True)
        a = _select(state, sd, ac, rng)
        if state.x[a]:
            _transfer(state, a, table, rng, step=t)
        else:
            _reactivate(state, a, step=t)
        if on_step is not None:
            on_step(state, t)
    return RunResult(state, abm_cfg.max_steps, False)


@dataclass(frozen=True)
class HourlyOutputs:
    """Empirical per-cell distributions over the R runs of one hour."""

    hour: int
    cells: tuple[str, ...]
    ues: np.ndarray          # shape (runs, n_cells)
    dl_prbs: np.ndarray
    cs_minutes: np.ndarray
    ul_prbs: np.ndarray | None = None

    @property
    def runs(self) -> int:
        return self.ues.shape[0]

    @property
    def mean_ues(self) -> np.ndarray:
        return self.ues.mean(axis=0)

    @property
    def mean_dl_prbs(self) -> np.ndarray:
        return self.dl_prbs.mean(axis=0)

    @property
    def mean_cs_minutes(self) -> np.ndarray:
        return self.cs_minutes.mean(axis=0)


def _run_rng(seed: int, hour: int, run: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(hour, run)))


def simulate_day(tm: TrafficModel, cfg: NetworkConfig,
                 handover: HandoverModel, abm_cfg: AbmConfig,
                 on_step: Callable[[RunState, int], None] | None = None,
                 ) -> list[HourlyOutputs]:
    """Run the full 24-hour simulation.

    Hour 1 starts every run from the all-active configuration; each run of a
    later hour starts from a uniformly drawn final configuration of the
    previous hour, reached by replaying the shutdown path with fresh draws.
    """
    net = SimNetwork(cfg)
    outputs = []
    pool: list[np.ndarray] | None = None
    for hour in HOURS:
        table = build_transfer_table(net, handover, hour)
        ues = np.empty((abm_cfg.runs, net.n_cells))
        dls = np.empty((abm_cfg.runs, net.n_cells))
        uls = np.empty((abm_cfg.runs, net.n_cells))
        css = np.empty((abm_cfg.runs, net.n_cells))
        next_pool = []
        for run in range(abm_cfg.runs):
            rng = _run_rng(abm_cfg.seed, hour, run)
            start = None if pool is None else pool[int(rng.integers(len(pool)))]
            result = run_monte_carlo(tm, cfg, handover, abm_cfg, start, hour,
                                     rng, on_step=on_step, _net=net,
                                     _table=table)
            ues[run] = result.state.ue
            dls[run] = result.state.dl
            uls[run] = result.state.ul
            css[run] = result.state.t_cs
            next_pool.append(result.state.x.copy())
        outputs.append(HourlyOutputs(hour=hour, cells=net.cell_ids,
                                     ues=ues, dl_prbs=dls, cs_minutes=css,
                                     ul_prbs=uls))
        pool = next_pool
    return outputs


# ---------------------------------------------------------------------------
# Deterministic expert baseline


@dataclass(frozen=True)
class PointOutputs:
    """Single per-cell estimate for one hour (no distribution)."""

    hour: int
    cells: tuple[str, ...]
    ues: np.ndarray
    dl_prbs: np.ndarray
    cs_minutes: np.ndarray


def run_benchmark(tm: TrafficModel, cfg: NetworkConfig,
                  handover: HandoverModel) -> list[PointOutputs]:
    """One-pass deterministic estimate per hour.

    Every hour starts all-active from the Gaussian means. Capacity cells are
    visited in descending entry-margin order; each cell that satisfies the
    entry rule on the evolving means is shut down with expected-value
    (fractional) UE/PRB movement proportional to the handover PMF. No RNG is
    consumed, so repeated calls are bit-identical.
    """
    net = SimNetwork(cfg)
    outputs = []
    for hour in HOURS:
        ue = np.array([tm.at(c, hour).ues.mean for c in net.cell_ids])
        dl = np.array([tm.at(c, hour).dl_prbs.mean for c in net.cell_ids])
        ul = np.array([tm.at(c, hour).ul_prbs.mean for c in net.cell_ids])
        np.clip(dl, 0.0, net.n_dl_prb, out=dl)
        cs = np.zeros(net.n_cells)
        cap, paired = net.cap_global, net.paired_global
        margins = net.entry_dl - (dl[cap] + dl[paired])
        order = np.argsort(-margins, kind="stable")
        for a in order:
            g = cap[a]
            p = paired[a]
            th = cfg.energy_saving[net.cap_ids[a]]
            if not check_shutdown_entry(ue[g], dl[g], dl[p], ul[g], ul[p], th):
                continue
            probs = handover.targets(net.cap_ids[a], hour)
            items = sorted((j, q) for j, q in probs.items() if q > 0)
            if not items:
                continue
            for j, q in items:
                t = net.index[j]
                ue[t] += ue[g] * q
                dl[t] += dl[g] * q
                ul[t] += ul[g] * q
            ue[g] = dl[g] = ul[g] = 0.0
            cs[g] = SHUTDOWN_MINUTES
        outputs.append(PointOutputs(hour=hour, cells=net.cell_ids,
                                    ues=ue, dl_prbs=dl, cs_minutes=cs))
    return outputs


# ---------------------------------------------------------------------------
# Report files


_MEAN_COLUMNS = ["cell_id", "hour", "ue_mean", "ue_std", "dl_prb_mean",
                 "dl_prb_std", "dl_load_mean", "cs_min_mean", "cs_min_std"]


def write_hourly_report(path, outputs: Sequence[HourlyOutputs],
                        cfg: NetworkConfig) -> None:
    """Per-cell hourly means and stds (population std over the R runs)."""
    caps = {c.id: float(c.n_dl_prb) for c in cfg.cells}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_MEAN_COLUMNS)
        for out in outputs:
            ue_m, ue_s = out.ues.mean(axis=0), out.ues.std(axis=0)
            dl_m, dl_s = out.dl_prbs.mean(axis=0), out.dl_prbs.std(axis=0)
            cs_m, cs_s = out.cs_minutes.mean(axis=0), out.cs_minutes.std(axis=0)
            for i, cell in enumerate(out.cells):
                writer.writerow([
                    cell, out.hour, repr(float(ue_m[i])), repr(float(ue_s[i])),
                    repr(float(dl_m[i])), repr(float(dl_s[i])),
                    repr(float(dl_m[i] / caps[cell])),
                    repr(float(cs_m[i])), repr(float(cs_s[i]))])


def write_point_report(path, outputs: Sequence[PointOutputs],
                       cfg: NetworkConfig) -> None:
    caps = {c.id: float(c.n_dl_prb) for c in cfg.cells}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_MEAN_COLUMNS)
        for out in outputs:
            for i, cell in enumerate(out.cells):
                writer.writerow([
                    cell, out.hour, repr(float(out.ues[i])), repr(0.0),
                    repr(float(out.dl_prbs[i])), repr(0.0),
                    repr(float(out.dl_prbs[i] / caps[cell])),
                    repr(float(out.cs_minutes[i])), repr(0.0)])


def write_run_dump(path, outputs: Sequence[HourlyOutputs]) -> None:
    """Raw per-run values for distribution inspection."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hour", "run", "cell_id", "ues", "dl_prbs",
                         "cs_minutes"])
        for out in outputs:
            for run in range(out.runs):
                for i, cell in enumerate(out.cells):
                    writer.writerow([
                        out.hour, run, cell, repr(float(out.ues[run, i])),
                        repr(float(out.dl_prbs[run, i])),
                        repr(float(out.cs_minutes[run, i]))])


def read_mean_report(path) -> dict[str, dict[tuple[str, int], float]]:
    """Read a report written by write_hourly_report/write_point_report into
    {kpi: {(cell, hour): value}} tables (ue, dl_prbs, dl_load, cs_minutes)."""
    tables: dict[str, dict[tuple[str, int], float]] = {
        "ue": {}, "dl_prbs": {}, "dl_load": {}, "cs_minutes": {}}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["cell_id"], int(row["hour"]))
            tables["ue"][key] = float(row["ue_mean"])
            tables["dl_prbs"][key] = float(row["dl_prb_mean"])
            tables["dl_load"][key] = float(row["dl_load_mean"])
            tables["cs_minutes"][key] = float(row["cs_min_mean"])
    return tables
