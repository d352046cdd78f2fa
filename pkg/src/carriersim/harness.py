"""Synthetic scenarios with known ground-truth laws, plus evaluation metrics.

Real operator data is proprietary, so the harness closes the loop itself: it
generates a network whose traffic, energy and rate behaviour follow known
parametric laws, emits the dataset files the pipeline consumes, and produces
reference ("measured") post-activation KPIs by running a high-budget
simulation against those laws. Estimators are then scored with MAE/MAPE
against that reference.

The synthetic energy law is piecewise linear in DL PRB load with one slope
per maximum-transmit-power tier and an idle offset, and cells in shutdown
draw a flat sleep power; the rate law decreases monotonically in load.
Traffic follows a diurnal profile (single evening peak) with Gaussian noise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .abm import AbmConfig, HourlyOutputs, simulate_day
from .datamodel import (
    A4Params,
    Cell,
    CellHourTraffic,
    CellKpiRecord,
    HourlyGaussian,
    MeasurementReport,
    NetworkConfig,
    RadioEnergyRecord,
    RadioUnit,
    ShutdownThresholds,
    TrafficModel,
    write_datasets,
    write_energy,
    write_kpis,
)
from .errors import (
    EmptySeriesError,
    InvalidSpecError,
    KeyMismatchError,
    LengthMismatchError,
)
from .ratemodel import DEFAULT_BIN_EDGES

REFERENCE_RUNS_FACTOR = 10
REFERENCE_SEED_OFFSET = 1_000_003

KpiTable = dict[tuple[str, int], float]


# ---------------------------------------------------------------------------
# Ground-truth laws


@dataclass(frozen=True)
class EnergyLaw:
    """Radio energy in Wh for one hour, summed over its carriers."""

    idle_wh: Mapping[str, float]      # per radio type
    sleep_wh: float
    slope_by_pmax: Mapping[float, float]

    def carrier_energy(self, cell: Cell, dl_load: float,
                       cs_fraction: float, radio_type: str) -> float:
        active = (self.idle_wh[radio_type]
                  + self.slope_by_pmax[cell.max_tx_power_dbm] * dl_load)
        return (1.0 - cs_fraction) * active + cs_fraction * self.sleep_wh

    def radio_energy(self, radio_type: str, cells: Sequence[Cell],
                     dl_loads: Mapping[str, float],
                     cs_fractions: Mapping[str, float]) -> float:
        return sum(self.carrier_energy(c, dl_loads.get(c.id, 0.0),
                                       cs_fractions.get(c.id, 0.0), radio_type)
                   for c in cells)


@dataclass(frozen=True)
class RateLaw:
    """Mean UE DL rate in Mbps, monotone decreasing in load."""

    max_mbps: float = 80.0
    load_slope: float = 0.7
    ue_drag: float = 0.05
    ce_fraction: float = 0.42

    def mean_rate(self, dl_load: float, ues: float) -> float:
        return self.max_mbps * (1.0 - self.load_slope * dl_load) \
            / (1.0 + self.ue_drag * max(ues, 0.0))

    def edge_rate(self, dl_load: float, ues: float) -> float:
        return self.ce_fraction * self.mean_rate(dl_load, ues)


def diurnal_profile(hour: int, trough: float = 0.18) -> float:
    """Single-peak daily shape in (0, 1]: minimum around 04:00, peak at 16:00."""
    swing = 0.5 - 0.5 * math.cos(2.0 * math.pi * (hour - 4) / 24.0)
    return trough + (1.0 - trough) * swing ** 1.3


# ---------------------------------------------------------------------------
# Scenario


@dataclass(frozen=True)
class ScenarioSpec:
    n_capacity: int = 8
    n_coverage: int = 4
    n_days: int = 5
    peak_capacity_ues: float = 20.0
    peak_capacity_load: float = 0.5
    peak_coverage_load: float = 0.5
    traffic_noise: float = 0.12
    reports_per_cell_hour: int = 20
    entry_ue: float = 12.0
    entry_dl_prb: float = 95.0
    entry_ul_prb: float = 55.0
    leave_ue: float = 60.0
    leave_dl_prb: float = 92.0
    leave_ul_prb: float = 70.0
    a4_threshold_dbm: float = -100.0
    a4_hysteresis_db: float = 2.0
    energy_noise_wh: float = 3.0
    rate_noise_fraction: float = 0.03


@dataclass(frozen=True)
class SyntheticScenario:
    cfg: NetworkConfig
    traffic: TrafficModel           # the true generating distributions
    energy_law: EnergyLaw
    rate_law: RateLaw
    mrs: tuple[MeasurementReport, ...]
    seed: int
    spec: ScenarioSpec


_PMAX_TIERS = (40.0, 43.0, 46.0)
_CAP_TYPES = {40.0: "aau-n35-a", 43.0: "aau-n35-b", 46.0: "aau-n35-c"}
_CAP_TRX = {40.0: 32, 43.0: 32, 46.0: 64}
_CAP_MODE = {40.0: "32T32R", 43.0: "32T32R", 46.0: "64T64R"}


def _build_network(spec: ScenarioSpec) -> NetworkConfig:
    cells, radios = [], []
    capacity, coverage = [], []
    pairing, mobility, thresholds = {}, {}, {}
    for i in range(spec.n_coverage):
        cid = f"cov{i + 1:03d}"
        coverage.append(cid)
        cells.append(Cell(id=cid, radio_unit=f"ru-{cid}", frequency_mhz=800.0,
                          bandwidth_mhz=20.0, max_tx_power_dbm=43.0,
                          n_dl_prb=100, n_ul_prb=100))
        radios.append(RadioUnit(id=f"ru-{cid}", radio_type="rru-l08",
                                n_trx=4, carrier_tx_mode="4T4R",
                                cell_ids=(cid,)))
        mobility[cid] = A4Params(threshold_dbm=spec.a4_threshold_dbm,
                                 hysteresis_db=spec.a4_hysteresis_db)
    for i in range(spec.n_capacity):
        cid = f"cap{i + 1:03d}"
        capacity.append(cid)
        pmax = _PMAX_TIERS[i % 3]
        cells.append(Cell(id=cid, radio_unit=f"ru-{cid}", frequency_mhz=3500.0,
                          bandwidth_mhz=100.0, max_tx_power_dbm=pmax,
                          n_dl_prb=270, n_ul_prb=135))
        radios.append(RadioUnit(id=f"ru-{cid}", radio_type=_CAP_TYPES[pmax],
                                n_trx=_CAP_TRX[pmax],
                                carrier_tx_mode=_CAP_MODE[pmax],
                                cell_ids=(cid,)))
        pairing[cid] = f"cov{(i % spec.n_coverage) + 1:03d}"
        mobility[cid] = A4Params(threshold_dbm=spec.a4_threshold_dbm,
                                 hysteresis_db=spec.a4_hysteresis_db)
        thresholds[cid] = ShutdownThresholds(
            entry_ue=spec.entry_ue, entry_dl_prb=spec.entry_dl_prb,
            entry_ul_prb=spec.entry_ul_prb, leave_ue=spec.leave_ue,
            leave_dl_prb=spec.leave_dl_prb, leave_ul_prb=spec.leave_ul_prb)
    return NetworkConfig(radio_units=tuple(radios), cells=tuple(cells),
                         capacity_cells=frozenset(capacity),
                         coverage_cells=frozenset(coverage),
                         pairing=pairing, mobility=mobility,
                         energy_saving=thresholds)


def _build_true_traffic(cfg: NetworkConfig, spec: ScenarioSpec,
                        rng: np.random.Generator) -> TrafficModel:
    per = {}
    cells = tuple(c.id for c in cfg.cells)
    factors = {cid: rng.uniform(0.75, 1.25) for cid in cells}
    for cell in cfg.cells:
        is_cap = cell.id in cfg.capacity_cells
        peak_load = spec.peak_capacity_load if is_cap else spec.peak_coverage_load
        peak_ues = spec.peak_capacity_ues if is_cap else spec.peak_capacity_ues * 1.2
        f = factors[cell.id]
        for hour in range(1, 25):
            p = diurnal_profile(hour)
            mu_u = peak_ues * p * f
            mu_dl = peak_load * cell.n_dl_prb * p * f
            mu_ul = 0.4 * peak_load * cell.n_ul_prb * p * f
            per[(cell.id, hour)] = CellHourTraffic(
                ues=HourlyGaussian(mu_u, max(spec.traffic_noise * mu_u, 0.3)),
                dl_prbs=HourlyGaussian(mu_dl, max(spec.traffic_noise * mu_dl, 0.5)),
                ul_prbs=HourlyGaussian(mu_ul, max(spec.traffic_noise * mu_ul, 0.3)))
    return TrafficModel(per_cell_hour=per, cells=cells)


def _default_energy_law() -> EnergyLaw:
    return EnergyLaw(
        idle_wh={"rru-l08": 180.0, "aau-n35-a": 240.0, "aau-n35-b": 260.0,
                 "aau-n35-c": 290.0},
        sleep_wh=90.0,
        slope_by_pmax={40.0: 90.0, 43.0: 130.0, 46.0: 170.0},
    )


def _generate_mrs(cfg: NetworkConfig, spec: ScenarioSpec,
                  rng: np.random.Generator) -> list[MeasurementReport]:
    coverage = sorted(cfg.coverage_cells)
    reports: list[MeasurementReport] = []
    qualifying_floor = spec.a4_threshold_dbm + spec.a4_hysteresis_db
    for cap in sorted(cfg.capacity_cells):
        paired = cfg.pairing[cap]
        others = [c for c in coverage if c != paired]
        for hour in range(1, 25):
            got_qualifier = False
            first_index = len(reports)
            for k in range(spec.reports_per_cell_hour):
                rsrp = {cap: float(rng.normal(-85.0, 3.0)),
                        paired: float(rng.normal(-95.0, 4.0))}
                # UEs report only a handful of neighbours
                if others:
                    n_extra = int(rng.integers(0, min(3, len(others)) + 1))
                    for j in rng.choice(len(others), size=n_extra,
                                        replace=False):
                        rsrp[others[int(j)]] = float(rng.normal(-104.0, 5.0))
                stamp = (f"2024-04-{1 + (k % 28):02d}T{hour - 1:02d}:"
                         f"{rng.integers(0, 60):02d}:00")
                reports.append(MeasurementReport(
                    timestamp=stamp, ue_id=f"ue-{cap}-{hour}-{k}",
                    serving_cell=cap, neighbor_rsrp_dbm=rsrp))
                if any(v > qualifying_floor for c, v in rsrp.items()
                       if c != cap):
                    got_qualifier = True
            if not got_qualifier:
                # guarantee a feasible transfer target for every cell and hour
                fixed = dict(reports[first_index].neighbor_rsrp_dbm)
                fixed[paired] = qualifying_floor + 10.0
                reports[first_index] = MeasurementReport(
                    timestamp=reports[first_index].timestamp,
                    ue_id=reports[first_index].ue_id,
                    serving_cell=cap, neighbor_rsrp_dbm=fixed)
    return reports


def _kpi_row(cfg: NetworkConfig, rate_law: RateLaw, spec: ScenarioSpec,
             rng: np.random.Generator, cell_id: str, day: int, hour: int,
             ues: float, dl: float, ul: float, cs_minutes: float,
             ) -> CellKpiRecord:
    cell = cfg.cell(cell_id)
    load = min(dl / cell.n_dl_prb, 1.0)
    shut = cs_minutes >= 60.0
    if shut or ues <= 0:
        return CellKpiRecord(
            cell_id=cell_id, day=day, hour=hour, rrc_ues=0.0 if shut else ues,
            dl_prbs=0.0 if shut else dl, ul_prbs=0.0 if shut else ul,
            dl_bits=0.0, dl_bits_lastslot=0.0, dl_active_time_s=0.0,
            rate_bins=tuple([0.0] * 15), cs_minutes=cs_minutes)
    true_rate = rate_law.mean_rate(load, ues)
    rate = max(true_rate * (1.0 + rng.normal(0.0, spec.rate_noise_fraction)),
               0.1)
    t_active = 1800.0 * load + 30.0
    v_minus = 0.1e6 * t_active
    v_total = rate * 1e6 * t_active + v_minus
    per_ue = np.maximum(rng.normal(rate, 0.45 * rate, size=100), 0.05)
    counts, _ = np.histogram(per_ue, bins=np.asarray(DEFAULT_BIN_EDGES))
    counts[-1] += len(per_ue) - counts.sum()  # rates above the top edge
    return CellKpiRecord(
        cell_id=cell_id, day=day, hour=hour, rrc_ues=ues, dl_prbs=dl,
        ul_prbs=ul, dl_bits=v_total, dl_bits_lastslot=v_minus,
        dl_active_time_s=t_active, rate_bins=tuple(float(c) for c in counts),
        cs_minutes=cs_minutes, dl_total_time_s=t_active * 1.1,
        ul_bits=v_total * 0.3, ul_time_s=t_active)


def _unbiased_campaign(cfg, traffic, energy_law, rate_law, spec, rng):
    kpis, energies = [], []
    radios = {r.id: r for r in cfg.radio_units}
    for day in range(1, spec.n_days + 1):
        day_values = {}
        for cell in cfg.cells:
            for hour in range(1, 25):
                g = traffic.at(cell.id, hour)
                ues = max(rng.normal(g.ues.mean, g.ues.std), 0.0)
                dl = min(max(rng.normal(g.dl_prbs.mean, g.dl_prbs.std), 0.0),
                         cell.n_dl_prb)
                ul = min(max(rng.normal(g.ul_prbs.mean, g.ul_prbs.std), 0.0),
                         cell.n_ul_prb)
                day_values[(cell.id, hour)] = (ues, dl, ul)
                kpis.append(_kpi_row(cfg, rate_law, spec, rng, cell.id, day,
                                     hour, ues, dl, ul, cs_minutes=0.0))
        for radio in radios.values():
            cells = [cfg.cell(cid) for cid in radio.cell_ids]
            for hour in range(1, 25):
                loads = {c.id: day_values[(c.id, hour)][1] / c.n_dl_prb
                         for c in cells}
                true_e = energy_law.radio_energy(radio.radio_type, cells,
                                                 loads, {})
                energies.append(RadioEnergyRecord(
                    radio_unit=radio.id, day=day, hour=hour,
                    energy_wh=max(true_e + rng.normal(0, spec.energy_noise_wh),
                                  0.0)))
    return kpis, energies


def _biased_campaign(cfg, traffic, energy_law, rate_law, spec, handover, rng):
    """A second measurement campaign with carrier shutdown active: one
    simulated realization per day against the true laws."""
    kpis, energies = [], []
    radios = {r.id: r for r in cfg.radio_units}
    for day in range(1, spec.n_days + 1):
        day_seed = int(rng.integers(0, 2 ** 31 - 1))
        outputs = simulate_day(traffic, cfg, handover,
                               AbmConfig(runs=1, max_steps=400, seed=day_seed))
        values = {}
        for out in outputs:
            for i, cell_id in enumerate(out.cells):
                values[(cell_id, out.hour)] = (
                    float(out.ues[0, i]), float(out.dl_prbs[0, i]),
                    float(out.ul_prbs[0, i]), float(out.cs_minutes[0, i]))
        for cell in cfg.cells:
            for hour in range(1, 25):
                ues, dl, ul, cs = values[(cell.id, hour)]
                kpis.append(_kpi_row(cfg, rate_law, spec, rng, cell.id, day,
                                     hour, ues, dl, ul, cs_minutes=cs))
        for radio in radios.values():
            cells = [cfg.cell(cid) for cid in radio.cell_ids]
            for hour in range(1, 25):
                loads = {c.id: values[(c.id, hour)][1] / c.n_dl_prb
                         for c in cells}
                fractions = {c.id: values[(c.id, hour)][3] / 60.0
                             for c in cells}
                true_e = energy_law.radio_energy(radio.radio_type, cells,
                                                 loads, fractions)
                energies.append(RadioEnergyRecord(
                    radio_unit=radio.id, day=day, hour=hour,
                    energy_wh=max(true_e + rng.normal(0, spec.energy_noise_wh),
                                  0.0)))
    return kpis, energies


def generate_scenario(spec: ScenarioSpec, out_dir, seed: int,
                      ) -> SyntheticScenario:
    """Build a synthetic network and write every dataset file into `out_dir`:
    the unbiased campaign (engineering/kpi/energy/mr) plus a shutdown-active
    campaign (kpi_biased/energy_biased) for ML training. The true laws stay
    on the returned scenario for oracle checks."""
    if spec.n_capacity < 1 or spec.n_coverage < 1:
        raise InvalidSpecError("need at least one capacity and one coverage cell")
    if spec.n_days < 1:
        raise InvalidSpecError("need at least one day")
    from .rules import build_handover_model_for_hours

    rng = np.random.default_rng(seed)
    cfg = _build_network(spec)
    traffic = _build_true_traffic(cfg, spec, rng)
    energy_law = _default_energy_law()
    rate_law = RateLaw()
    mrs = _generate_mrs(cfg, spec, rng)
    kpis, energies = _unbiased_campaign(cfg, traffic, energy_law, rate_law,
                                        spec, rng)
    out = Path(out_dir)
    write_datasets(out, cfg, kpis, energies, mrs)
    handover = build_handover_model_for_hours(cfg, mrs)
    kpis_b, energies_b = _biased_campaign(cfg, traffic, energy_law, rate_law,
                                          spec, handover, rng)
    write_kpis(out / "kpi_biased.csv", kpis_b)
    write_energy(out / "energy_biased.csv", energies_b)
    (out / "scenario.json").write_text(json.dumps({
        "seed": seed, "n_capacity": spec.n_capacity,
        "n_coverage": spec.n_coverage, "n_days": spec.n_days,
    }, sort_keys=True), encoding="utf-8")
    return SyntheticScenario(cfg=cfg, traffic=traffic, energy_law=energy_law,
                             rate_law=rate_law, mrs=tuple(mrs), seed=seed,
                             spec=spec)


# ---------------------------------------------------------------------------
# Ground-truth replay


def ground_truth_replay(scenario: SyntheticScenario, abm_cfg: AbmConfig,
                        handover=None) -> dict[str, KpiTable]:
    """Reference post-activation KPIs: a simulation pass at ten times the
    configured run budget (decorrelated seed) with energies and rates
    evaluated through the true laws."""
    from .rules import build_handover_model_for_hours

    cfg = scenario.cfg
    if handover is None:
        handover = build_handover_model_for_hours(cfg, scenario.mrs)
    ref_cfg = AbmConfig(runs=REFERENCE_RUNS_FACTOR * abm_cfg.runs,
                        max_steps=abm_cfg.max_steps,
                        seed=abm_cfg.seed + REFERENCE_SEED_OFFSET)
    outputs = simulate_day(scenario.traffic, cfg, handover, ref_cfg)
    return truth_tables_from_outputs(scenario, outputs)


def truth_tables_from_outputs(scenario: SyntheticScenario,
                              outputs: Sequence[HourlyOutputs],
                              ) -> dict[str, KpiTable]:
    cfg = scenario.cfg
    radios = {r.id: r for r in cfg.radio_units}
    caps = {c.id: float(c.n_dl_prb) for c in cfg.cells}
    tables: dict[str, KpiTable] = {"cs_minutes": {}, "dl_load": {}, "ue": {},
                                   "energy_wh": {}, "rate_mbps": {}}
    for out in outputs:
        index = {cell: i for i, cell in enumerate(out.cells)}
        for cell, i in index.items():
            tables["cs_minutes"][(cell, out.hour)] = float(
                out.cs_minutes[:, i].mean())
            tables["dl_load"][(cell, out.hour)] = float(
                out.dl_prbs[:, i].mean() / caps[cell])
            tables["ue"][(cell, out.hour)] = float(out.ues[:, i].mean())
        for radio in radios.values():
            cells = [cfg.cell(cid) for cid in radio.cell_ids]
            per_run = []
            for r in range(out.runs):
                loads = {c.id: out.dl_prbs[r, index[c.id]] / caps[c.id]
                         for c in cells}
                fractions = {c.id: out.cs_minutes[r, index[c.id]] / 60.0
                             for c in cells}
                per_run.append(scenario.energy_law.radio_energy(
                    radio.radio_type, cells, loads, fractions))
            tables["energy_wh"][(radio.id, out.hour)] = float(
                np.mean(per_run))
        for cell, i in index.items():
            active = out.cs_minutes[:, i] < 60.0
            if not active.any():
                continue
            rates = [scenario.rate_law.mean_rate(
                out.dl_prbs[r, i] / caps[cell], out.ues[r, i])
                for r in np.flatnonzero(active)]
            tables["rate_mbps"][(cell, out.hour)] = float(np.mean(rates))
    return tables


_TRUTH_COLUMNS = ["kpi", "entity", "hour", "value"]


def write_truth(path, tables: Mapping[str, KpiTable]) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_TRUTH_COLUMNS)
        for kpi in sorted(tables):
            for (entity, hour), value in sorted(tables[kpi].items()):
                writer.writerow([kpi, entity, hour, repr(float(value))])


def read_truth(path) -> dict[str, KpiTable]:
    import csv

    tables: dict[str, KpiTable] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            tables.setdefault(row["kpi"], {})[(row["entity"],
                                               int(row["hour"]))] = \
                float(row["value"])
    return tables


# ---------------------------------------------------------------------------
# Metrics


@dataclass(frozen=True)
class MaeMape:
    """MAE in the KPI's unit; MAPE in percent over nonzero-truth entries,
    with the number of skipped zero-truth entries reported."""

    mae: float
    mape: float
    skipped: int


def mae_mape(pred: Sequence[float], truth: Sequence[float]) -> MaeMape:
    pred = list(pred)
    truth = list(truth)
    if len(pred) != len(truth):
        raise LengthMismatchError(f"{len(pred)} predictions vs {len(truth)} "
                                  "truths")
    if not pred:
        raise EmptySeriesError("empty series")
    abs_err = [abs(p - t) for p, t in zip(pred, truth)]
    mae = math.fsum(abs_err) / len(abs_err)
    ratios = [e / abs(t) for e, t in zip(abs_err, truth) if t != 0]
    skipped = len(truth) - len(ratios)
    mape = 100.0 * math.fsum(ratios) / len(ratios) if ratios else 0.0
    return MaeMape(mae=mae, mape=mape, skipped=skipped)


@dataclass(frozen=True)
class KpiEval:
    abm: MaeMape
    benchmark: MaeMape
    gain_mae: float | None
    gain_mape: float | None


@dataclass(frozen=True)
class EvalReport:
    """Per-KPI accuracy of both estimators plus hourly profile series."""

    kpis: dict[str, KpiEval]
    profiles: dict[str, list[tuple[int, float, float, float]]]


def _gain(bench_err: float, abm_err: float) -> float | None:
    if bench_err <= 0:
        return None
    return (bench_err - abm_err) / bench_err


def compare(abm_tables: Mapping[str, KpiTable],
            bench_tables: Mapping[str, KpiTable],
            truth_tables: Mapping[str, KpiTable]) -> EvalReport:
    """Score both estimators against ground truth on the KPIs the truth
    defines. All three tables must cover identical keys per KPI."""
    kpis: dict[str, KpiEval] = {}
    profiles: dict[str, list[tuple[int, float, float, float]]] = {}
    for kpi in sorted(truth_tables):
        truth = truth_tables[kpi]
        if kpi not in abm_tables or kpi not in bench_tables:
            raise KeyMismatchError(f"estimator missing KPI {kpi!r}")
        for name, table in (("abm", abm_tables[kpi]),
                            ("benchmark", bench_tables[kpi])):
            if set(table) != set(truth):
                raise KeyMismatchError(
                    f"{name} keys differ from truth for KPI {kpi!r}")
        keys = sorted(truth)
        t = [truth[k] for k in keys]
        a = [abm_tables[kpi][k] for k in keys]
        b = [bench_tables[kpi][k] for k in keys]
        abm_err = mae_mape(a, t)
        bench_err = mae_mape(b, t)
        kpis[kpi] = KpiEval(abm=abm_err, benchmark=bench_err,
                            gain_mae=_gain(bench_err.mae, abm_err.mae),
                            gain_mape=_gain(bench_err.mape, abm_err.mape))
        by_hour: dict[int, list[tuple[float, float, float]]] = {}
        for k, tv, av, bv in zip(keys, t, a, b):
            by_hour.setdefault(k[1], []).append((tv, av, bv))
        profiles[kpi] = [
            (hour,
             float(np.mean([v[0] for v in vals])),
             float(np.mean([v[1] for v in vals])),
             float(np.mean([v[2] for v in vals])))
            for hour, vals in sorted(by_hour.items())]
    return EvalReport(kpis=kpis, profiles=profiles)


def write_eval_report(directory, report: EvalReport) -> None:
    """report.json with the per-KPI scores and profiles.csv for plotting."""
    import csv

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = {}
    for kpi, ev in sorted(report.kpis.items()):
        payload[kpi] = {
            "abm": {"mae": ev.abm.mae, "mape_percent": ev.abm.mape,
                    "mape_skipped": ev.abm.skipped},
            "benchmark": {"mae": ev.benchmark.mae,
                          "mape_percent": ev.benchmark.mape,
                          "mape_skipped": ev.benchmark.skipped},
            "accuracy_gain_mae": ev.gain_mae,
            "accuracy_gain_mape": ev.gain_mape,
        }
    (directory / "report.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2), encoding="utf-8")
    with open(directory / "profiles.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kpi", "hour", "truth_mean", "abm_mean",
                         "benchmark_mean"])
        for kpi, rows in sorted(report.profiles.items()):
            for hour, tv, av, bv in rows:
                writer.writerow([kpi, hour, repr(tv), repr(av), repr(bv)])
