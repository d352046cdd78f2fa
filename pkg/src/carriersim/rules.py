"""Shutdown entry/leaving predicates, the A4 trigger and UE transfer targets.

All predicates are pure functions; HandoverModel is immutable after build and
safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .datamodel import A4Params, MeasurementReport, NetworkConfig, ShutdownThresholds

PROBABILITY_SUM_TOL = 1e-9


def check_shutdown_entry(ues: float, dl_prbs: float, dl_prbs_paired: float,
                         ul_prbs: float, ul_prbs_paired: float,
                         th: ShutdownThresholds) -> bool:
    """A capacity cell may shut down only if all three loads sit strictly
    below the entry thresholds (own UE count, combined DL PRBs, combined UL
    PRBs with the paired coverage cell)."""
    return (ues < th.entry_ue
            and dl_prbs + dl_prbs_paired < th.entry_dl_prb
            and ul_prbs + ul_prbs_paired < th.entry_ul_prb)


def check_wakeup(paired_ues: float, paired_dl_prbs: float, paired_ul_prbs: float,
                 th: ShutdownThresholds) -> bool:
    """The paired coverage cell requests reactivation as soon as any of its
    own counters rises strictly above the leaving thresholds."""
    return (paired_ues > th.leave_ue
            or paired_dl_prbs > th.leave_dl_prb
            or paired_ul_prbs > th.leave_ul_prb)


def a4_qualifies(rsrp_dbm: float, a4: A4Params, neighbor: str) -> bool:
    """Biased-RSRP trigger: rsrp + freq offset + cell offset - hysteresis
    must exceed the serving cell's threshold (strictly)."""
    biased = (rsrp_dbm
              + a4.freq_offset_db.get(neighbor, 0.0)
              + a4.cell_offset_db.get(neighbor, 0.0)
              - a4.hysteresis_db)
    return biased > a4.threshold_dbm


@dataclass(frozen=True)
class HandoverModel:
    """Per capacity cell and hour: PMF over transfer target cells.

    A missing or all-zero entry means no feasible A4 target was observed, in
    which case a shutdown attempt is abandoned.
    """

    probabilities: Mapping[tuple[str, int], Mapping[str, float]]

    def targets(self, capacity_cell: str, hour: int) -> Mapping[str, float]:
        return self.probabilities.get((capacity_cell, hour), {})

    def merged(self, other: "HandoverModel") -> "HandoverModel":
        table = dict(self.probabilities)
        table.update(other.probabilities)
        return HandoverModel(probabilities=table)


def transfer_candidates(cfg: NetworkConfig, capacity_cell: str) -> list[str]:
    """Cells on the paired coverage cell's frequency, the A4 target layer."""
    paired = cfg.pairing[capacity_cell]
    freq = cfg.cell(paired).frequency_mhz
    return [c for c in cfg.cells_on_frequency(freq) if c != capacity_cell]


def build_handover_model(cfg: NetworkConfig, mrs: Iterable[MeasurementReport],
                         hour: int) -> HandoverModel:
    """Estimate transfer probabilities for one hour from measurement reports.

    The caller supplies reports already filtered to the hour. Each report
    served by a capacity cell votes for its strongest A4-qualifying neighbour
    on the paired coverage frequency (ties broken towards the lowest cell id);
    votes are normalized per cell. Cells with no qualifying report get an
    all-zero map.
    """
    candidates = {c: transfer_candidates(cfg, c) for c in cfg.capacity_cells}
    candidate_sets = {c: set(cands) for c, cands in candidates.items()}
    counts: dict[str, dict[str, int]] = {c: {} for c in cfg.capacity_cells}
    for report in mrs:
        serving = report.serving_cell
        if serving not in counts:
            continue
        a4 = cfg.mobility[serving]
        eligible = candidate_sets[serving]
        best: str | None = None
        best_rsrp = -float("inf")
        for neighbor, rsrp in report.neighbor_rsrp_dbm.items():
            if neighbor not in eligible or not a4_qualifies(rsrp, a4, neighbor):
                continue
            if rsrp > best_rsrp or (rsrp == best_rsrp and neighbor < best):
                best = neighbor
                best_rsrp = rsrp
        if best is not None:
            counts[serving][best] = counts[serving].get(best, 0) + 1
    table: dict[tuple[str, int], dict[str, float]] = {}
    for cell in sorted(cfg.capacity_cells):
        votes = counts[cell]
        total = sum(votes.values())
        if total == 0:
            table[(cell, hour)] = {j: 0.0 for j in candidates[cell]}
        else:
            table[(cell, hour)] = {j: votes.get(j, 0) / total
                                   for j in candidates[cell]}
    return HandoverModel(probabilities=table)


def build_handover_model_for_hours(cfg: NetworkConfig,
                                   mrs: Iterable[MeasurementReport],
                                   hours: Iterable[int] = range(1, 25),
                                   ) -> HandoverModel:
    """Group reports by hour-of-day and build the per-hour models in one pass."""
    by_hour: dict[int, list[MeasurementReport]] = {}
    for report in mrs:
        by_hour.setdefault(report.hour, []).append(report)
    model = HandoverModel(probabilities={})
    for hour in hours:
        model = model.merged(build_handover_model(cfg, by_hour.get(hour, []), hour))
    return model
