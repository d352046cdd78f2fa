"""Network configuration, dataset files and per-cell traffic distributions.

Dataset files are UTF-8, comma-separated with a header row and `.` decimals.
Unknown columns are ignored so operator exports with extra counters parse as-is.

engineering.csv -- one row per cell:
    cell_id, radio_unit, radio_type, n_trx, carrier_tx_mode, frequency_mhz,
    bandwidth_mhz, max_tx_power_dbm, n_dl_prb, n_ul_prb, role,
    paired_coverage_cell, a4_threshold_dbm, a4_hysteresis_db,
    a4_freq_offsets_db, a4_cell_offsets_db,
    entry_ue, entry_dl_prb, entry_ul_prb, leave_ue, leave_dl_prb, leave_ul_prb
  `role` is "capacity" or "coverage". Pairing and shutdown thresholds are
  required on capacity rows and must be blank on coverage rows. The A4 offset
  fields hold `cell:value` pairs joined by `|` (blank means no per-neighbour
  offsets; missing entries read as 0).

kpi.csv -- one row per cell, day and hour:
    cell_id, day, hour, rrc_ues, dl_prbs_used, ul_prbs_used, dl_bits,
    dl_bits_lastslot, dl_active_time_s, ul_bits, dl_total_time_s, ul_time_s,
    rate_bin_01 .. rate_bin_15, cs_minutes
  `dl_active_time_s` excludes the buffer-emptying slots whose bits are counted
  in `dl_bits_lastslot`. The UL volume/time columns are parsed but unused
  downstream.

energy.csv -- one row per radio unit, day and hour:
    radio_unit, day, hour, energy_wh

mr.csv -- one row per UE measurement report:
    timestamp, ue_id, serving_cell, rsrp_dbm
  `timestamp` is ISO-8601 (`YYYY-MM-DDTHH:MM:SS`); `rsrp_dbm` holds
  `cell:value` pairs joined by `|` and must include the serving cell.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    BadReferenceError,
    ConfigError,
    MalformedRowError,
    MissingColumnError,
    NoSamplesError,
)

N_RATE_BINS = 15
DEFAULT_MAX_CARRIERS = 6
DEFAULT_SIGMA_FLOOR = 1e-6


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class Cell:
    id: str
    radio_unit: str
    frequency_mhz: float
    bandwidth_mhz: float
    max_tx_power_dbm: float
    n_dl_prb: int
    n_ul_prb: int

    def __post_init__(self):
        if self.bandwidth_mhz <= 0:
            raise ConfigError(f"cell {self.id}: bandwidth must be positive")
        if self.n_dl_prb <= 0 or self.n_ul_prb <= 0:
            raise ConfigError(f"cell {self.id}: PRB counts must be positive")


@dataclass(frozen=True)
class RadioUnit:
    id: str
    radio_type: str
    n_trx: int
    carrier_tx_mode: str
    cell_ids: tuple[str, ...]


@dataclass(frozen=True)
class A4Params:
    """Inter-frequency handover trigger configuration of one serving cell."""

    threshold_dbm: float
    hysteresis_db: float = 0.0
    freq_offset_db: Mapping[str, float] = field(default_factory=dict)
    cell_offset_db: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.hysteresis_db < 0:
            raise ConfigError("A4 hysteresis must be nonnegative")


@dataclass(frozen=True)
class ShutdownThresholds:
    """Entry (all must hold) and leaving (any may hold) thresholds."""

    entry_ue: float
    entry_dl_prb: float
    entry_ul_prb: float
    leave_ue: float
    leave_dl_prb: float
    leave_ul_prb: float

    def __post_init__(self):
        for name in ("entry_ue", "entry_dl_prb", "entry_ul_prb",
                     "leave_ue", "leave_dl_prb", "leave_ul_prb"):
            if getattr(self, name) < 0:
                raise ConfigError(f"shutdown threshold {name} must be nonnegative")


@dataclass(frozen=True)
class NetworkConfig:
    """Engineering parameters: cells, radios, pairing, thresholds, mobility.

    Immutable after construction and safe to share across threads.
    """

    radio_units: tuple[RadioUnit, ...]
    cells: tuple[Cell, ...]
    capacity_cells: frozenset[str]
    coverage_cells: frozenset[str]
    pairing: Mapping[str, str]
    mobility: Mapping[str, A4Params]
    energy_saving: Mapping[str, ShutdownThresholds]
    max_carriers: int = DEFAULT_MAX_CARRIERS

    def __post_init__(self):
        ids = [c.id for c in self.cells]
        known = set(ids)
        if len(ids) != len(known):
            raise ConfigError("duplicate cell ids")
        if self.capacity_cells & self.coverage_cells:
            raise ConfigError("capacity and coverage cell sets overlap")
        if (self.capacity_cells | self.coverage_cells) != known:
            raise ConfigError("capacity and coverage sets must partition the cells")
        for c in self.capacity_cells:
            if c not in self.pairing:
                raise BadReferenceError(f"capacity cell {c!r} has no pairing entry")
        for c, b in self.pairing.items():
            if c not in known:
                raise BadReferenceError(f"pairing source {c!r} is not a known cell")
            if c not in self.capacity_cells:
                raise BadReferenceError(f"pairing source {c!r} is not a capacity cell")
            if b not in self.coverage_cells:
                raise BadReferenceError(
                    f"pairing of {c!r} references {b!r}, not a coverage cell")
        for c in self.mobility:
            if c not in known:
                raise BadReferenceError(f"mobility entry for unknown cell {c!r}")
        for c in self.energy_saving:
            if c not in known:
                raise BadReferenceError(f"thresholds for unknown cell {c!r}")
        for c in self.capacity_cells:
            if c not in self.energy_saving:
                raise ConfigError(f"capacity cell {c!r} has no shutdown thresholds")
        by_radio: dict[str, list[str]] = {}
        for cell in self.cells:
            by_radio.setdefault(cell.radio_unit, []).append(cell.id)
        declared = {r.id: r for r in self.radio_units}
        if set(by_radio) != set(declared):
            raise BadReferenceError("cells and radio units are inconsistent")
        for rid, members in by_radio.items():
            if not 1 <= len(members) <= self.max_carriers:
                raise ConfigError(
                    f"radio unit {rid!r} carries {len(members)} cells, "
                    f"allowed 1..{self.max_carriers}")
            if set(declared[rid].cell_ids) != set(members):
                raise BadReferenceError(f"radio unit {rid!r} cell list is stale")

    def cell(self, cell_id: str) -> Cell:
        return self._cell_index[cell_id]

    @property
    def _cell_index(self) -> dict[str, Cell]:
        idx = getattr(self, "_cell_index_cache", None)
        if idx is None:
            idx = {c.id: c for c in self.cells}
            object.__setattr__(self, "_cell_index_cache", idx)
        return idx

    def cells_on_frequency(self, frequency_mhz: float) -> list[str]:
        return [c.id for c in self.cells if c.frequency_mhz == frequency_mhz]


@dataclass(frozen=True)
class CellKpiRecord:
    """Hourly cell counters from one day of measurements."""

    cell_id: str
    day: int
    hour: int
    rrc_ues: float
    dl_prbs: float
    ul_prbs: float
    dl_bits: float
    dl_bits_lastslot: float
    dl_active_time_s: float
    rate_bins: tuple[float, ...]
    cs_minutes: float
    ul_bits: float = 0.0
    dl_total_time_s: float = 0.0
    ul_time_s: float = 0.0


@dataclass(frozen=True)
class RadioEnergyRecord:
    radio_unit: str
    day: int
    hour: int
    energy_wh: float


@dataclass(frozen=True)
class MeasurementReport:
    timestamp: str
    ue_id: str
    serving_cell: str
    neighbor_rsrp_dbm: Mapping[str, float]

    @property
    def hour(self) -> int:
        """Hour-of-day index in 1..24 derived from the ISO timestamp."""
        return int(self.timestamp[11:13]) + 1


@dataclass(frozen=True)
class HourlyGaussian:
    mean: float
    std: float

    def __post_init__(self):
        if self.std <= 0:
            raise ConfigError("HourlyGaussian std must be positive")


@dataclass(frozen=True)
class CellHourTraffic:
    ues: HourlyGaussian
    dl_prbs: HourlyGaussian
    ul_prbs: HourlyGaussian


@dataclass(frozen=True)
class TrafficModel:
    """Unbiased per-cell, per-hour Gaussians of UE count and PRB usage."""

    per_cell_hour: Mapping[tuple[str, int], CellHourTraffic]
    cells: tuple[str, ...]

    def at(self, cell_id: str, hour: int) -> CellHourTraffic:
        return self.per_cell_hour[(cell_id, hour)]


@dataclass(frozen=True)
class CellDraw:
    """One random realization of a cell's hourly traffic."""

    ues: int
    dl_prbs: float
    ul_prbs: float


@dataclass(frozen=True)
class DatasetPaths:
    engineering: Path
    kpi: Path
    energy: Path
    mr: Path

    @classmethod
    def in_dir(cls, directory) -> "DatasetPaths":
        d = Path(directory)
        return cls(d / "engineering.csv", d / "kpi.csv",
                   d / "energy.csv", d / "mr.csv")


# ---------------------------------------------------------------------------
# Parsing helpers


def _require(header: list[str], columns: Iterable[str], path) -> None:
    missing = [c for c in columns if c not in header]
    if missing:
        raise MissingColumnError(f"{path}: missing column(s) {', '.join(missing)}")


def _parse_pairs(text: str, path, row_index: int) -> dict[str, float]:
    pairs: dict[str, float] = {}
    text = text.strip()
    if not text:
        return pairs
    for chunk in text.split("|"):
        try:
            cell, value = chunk.split(":")
            pairs[cell.strip()] = float(value)
        except ValueError:
            raise MalformedRowError(path, row_index, f"bad pair field {chunk!r}")
    return pairs


def _format_pairs(pairs: Mapping[str, float]) -> str:
    return "|".join(f"{cell}:{value!r}" for cell, value in sorted(pairs.items()))


def _rows(path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MissingColumnError(f"{path}: empty file")
        return list(reader.fieldnames), list(reader)


_ENGINEERING_COLUMNS = [
    "cell_id", "radio_unit", "radio_type", "n_trx", "carrier_tx_mode",
    "frequency_mhz", "bandwidth_mhz", "max_tx_power_dbm", "n_dl_prb",
    "n_ul_prb", "role", "paired_coverage_cell", "a4_threshold_dbm",
    "a4_hysteresis_db", "a4_freq_offsets_db", "a4_cell_offsets_db",
    "entry_ue", "entry_dl_prb", "entry_ul_prb",
    "leave_ue", "leave_dl_prb", "leave_ul_prb",
]

_KPI_COLUMNS = [
    "cell_id", "day", "hour", "rrc_ues", "dl_prbs_used", "ul_prbs_used",
    "dl_bits", "dl_bits_lastslot", "dl_active_time_s", "ul_bits",
    "dl_total_time_s", "ul_time_s",
] + [f"rate_bin_{g:02d}" for g in range(1, N_RATE_BINS + 1)] + ["cs_minutes"]

_ENERGY_COLUMNS = ["radio_unit", "day", "hour", "energy_wh"]

_MR_COLUMNS = ["timestamp", "ue_id", "serving_cell", "rsrp_dbm"]


def parse_engineering(path, max_carriers: int = DEFAULT_MAX_CARRIERS) -> NetworkConfig:
    header, rows = _rows(path)
    _require(header, _ENGINEERING_COLUMNS, path)
    cells = []
    capacity: set[str] = set()
    coverage: set[str] = set()
    pairing: dict[str, str] = {}
    mobility: dict[str, A4Params] = {}
    thresholds: dict[str, ShutdownThresholds] = {}
    radio_info: dict[str, tuple[str, int, str]] = {}
    radio_cells: dict[str, list[str]] = {}
    for i, row in enumerate(rows, start=1):
        try:
            cell = Cell(
                id=row["cell_id"],
                radio_unit=row["radio_unit"],
                frequency_mhz=float(row["frequency_mhz"]),
                bandwidth_mhz=float(row["bandwidth_mhz"]),
                max_tx_power_dbm=float(row["max_tx_power_dbm"]),
                n_dl_prb=int(row["n_dl_prb"]),
                n_ul_prb=int(row["n_ul_prb"]),
            )
        except (ValueError, ConfigError) as exc:
            raise MalformedRowError(path, i, str(exc))
        cells.append(cell)
        role = row["role"].strip().lower()
        if role == "capacity":
            capacity.add(cell.id)
            paired = row["paired_coverage_cell"].strip()
            if not paired:
                raise MalformedRowError(path, i, "capacity cell without pairing")
            pairing[cell.id] = paired
            try:
                thresholds[cell.id] = ShutdownThresholds(
                    entry_ue=float(row["entry_ue"]),
                    entry_dl_prb=float(row["entry_dl_prb"]),
                    entry_ul_prb=float(row["entry_ul_prb"]),
                    leave_ue=float(row["leave_ue"]),
                    leave_dl_prb=float(row["leave_dl_prb"]),
                    leave_ul_prb=float(row["leave_ul_prb"]),
                )
            except (ValueError, ConfigError) as exc:
                raise MalformedRowError(path, i, str(exc))
        elif role == "coverage":
            coverage.add(cell.id)
        else:
            raise MalformedRowError(path, i, f"unknown role {row['role']!r}")
        try:
            mobility[cell.id] = A4Params(
                threshold_dbm=float(row["a4_threshold_dbm"]),
                hysteresis_db=float(row["a4_hysteresis_db"]),
                freq_offset_db=_parse_pairs(row["a4_freq_offsets_db"], path, i),
                cell_offset_db=_parse_pairs(row["a4_cell_offsets_db"], path, i),
            )
        except (ValueError, ConfigError) as exc:
            raise MalformedRowError(path, i, str(exc))
        info = (row["radio_type"], int(row["n_trx"]), row["carrier_tx_mode"])
        prior = radio_info.setdefault(cell.radio_unit, info)
        if prior != info:
            raise MalformedRowError(
                path, i, f"radio unit {cell.radio_unit!r} described inconsistently")
        radio_cells.setdefault(cell.radio_unit, []).append(cell.id)
    radios = tuple(
        RadioUnit(id=rid, radio_type=t, n_trx=n, carrier_tx_mode=m,
                  cell_ids=tuple(radio_cells[rid]))
        for rid, (t, n, m) in radio_info.items()
    )
    return NetworkConfig(
        radio_units=radios,
        cells=tuple(cells),
        capacity_cells=frozenset(capacity),
        coverage_cells=frozenset(coverage),
        pairing=pairing,
        mobility=mobility,
        energy_saving=thresholds,
        max_carriers=max_carriers,
    )


def parse_kpis(path) -> list[CellKpiRecord]:
    header, rows = _rows(path)
    _require(header, _KPI_COLUMNS, path)
    records = []
    for i, row in enumerate(rows, start=1):
        try:
            rec = CellKpiRecord(
                cell_id=row["cell_id"],
                day=int(row["day"]),
                hour=int(row["hour"]),
                rrc_ues=float(row["rrc_ues"]),
                dl_prbs=float(row["dl_prbs_used"]),
                ul_prbs=float(row["ul_prbs_used"]),
                dl_bits=float(row["dl_bits"]),
                dl_bits_lastslot=float(row["dl_bits_lastslot"]),
                dl_active_time_s=float(row["dl_active_time_s"]),
                ul_bits=float(row["ul_bits"]),
                dl_total_time_s=float(row["dl_total_time_s"]),
                ul_time_s=float(row["ul_time_s"]),
                rate_bins=tuple(
                    float(row[f"rate_bin_{g:02d}"]) for g in range(1, N_RATE_BINS + 1)),
                cs_minutes=float(row["cs_minutes"]),
            )
        except ValueError as exc:
            raise MalformedRowError(path, i, str(exc))
        _validate_kpi(rec, path, i)
        records.append(rec)
    return records


def _validate_kpi(rec: CellKpiRecord, path, row_index: int) -> None:
    if not 1 <= rec.hour <= 24:
        raise MalformedRowError(path, row_index, f"hour {rec.hour} outside 1..24")
    if rec.dl_bits_lastslot < 0 or rec.dl_bits < rec.dl_bits_lastslot:
        raise MalformedRowError(
            path, row_index, "dl_bits must be >= dl_bits_lastslot >= 0")
    if not 0 <= rec.cs_minutes <= 60:
        raise MalformedRowError(path, row_index, "cs_minutes outside [0, 60]")
    counters = (rec.rrc_ues, rec.dl_prbs, rec.ul_prbs, rec.dl_active_time_s,
                rec.ul_bits, rec.dl_total_time_s, rec.ul_time_s) + rec.rate_bins
    if any(v < 0 for v in counters):
        raise MalformedRowError(path, row_index, "negative counter")


def parse_energy(path) -> list[RadioEnergyRecord]:
    header, rows = _rows(path)
    _require(header, _ENERGY_COLUMNS, path)
    records = []
    for i, row in enumerate(rows, start=1):
        try:
            rec = RadioEnergyRecord(
                radio_unit=row["radio_unit"],
                day=int(row["day"]),
                hour=int(row["hour"]),
                energy_wh=float(row["energy_wh"]),
            )
        except ValueError as exc:
            raise MalformedRowError(path, i, str(exc))
        if rec.energy_wh < 0:
            raise MalformedRowError(path, i, "negative energy")
        records.append(rec)
    return records


def parse_mrs(path) -> list[MeasurementReport]:
    header, rows = _rows(path)
    _require(header, _MR_COLUMNS, path)
    reports = []
    for i, row in enumerate(rows, start=1):
        rsrp = _parse_pairs(row["rsrp_dbm"], path, i)
        rec = MeasurementReport(
            timestamp=row["timestamp"],
            ue_id=row["ue_id"],
            serving_cell=row["serving_cell"],
            neighbor_rsrp_dbm=rsrp,
        )
        if rec.serving_cell not in rsrp:
            raise MalformedRowError(path, i, "serving cell has no RSRP entry")
        reports.append(rec)
    return reports


def parse_datasets(paths) -> tuple[NetworkConfig, list[CellKpiRecord],
                                   list[RadioEnergyRecord], list[MeasurementReport]]:
    """Parse the four dataset files; `paths` is a directory or DatasetPaths."""
    if not isinstance(paths, DatasetPaths):
        paths = DatasetPaths.in_dir(paths)
    cfg = parse_engineering(paths.engineering)
    kpis = parse_kpis(paths.kpi)
    energies = parse_energy(paths.energy)
    mrs = parse_mrs(paths.mr)
    known = {c.id for c in cfg.cells}
    for rec in kpis:
        if rec.cell_id not in known:
            raise BadReferenceError(f"KPI row references unknown cell {rec.cell_id!r}")
    radios = {r.id for r in cfg.radio_units}
    for erec in energies:
        if erec.radio_unit not in radios:
            raise BadReferenceError(
                f"energy row references unknown radio unit {erec.radio_unit!r}")
    return cfg, kpis, energies, mrs


# ---------------------------------------------------------------------------
# Serialization (inverse of the parsers; used by the scenario generator)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_engineering(path, cfg: NetworkConfig) -> None:
    radio = {r.id: r for r in cfg.radio_units}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ENGINEERING_COLUMNS)
        for cell in cfg.cells:
            r = radio[cell.radio_unit]
            a4 = cfg.mobility[cell.id]
            is_cap = cell.id in cfg.capacity_cells
            th = cfg.energy_saving.get(cell.id)
            writer.writerow([
                cell.id, cell.radio_unit, r.radio_type, r.n_trx,
                r.carrier_tx_mode, _fmt(cell.frequency_mhz),
                _fmt(cell.bandwidth_mhz), _fmt(cell.max_tx_power_dbm),
                cell.n_dl_prb, cell.n_ul_prb,
                "capacity" if is_cap else "coverage",
                cfg.pairing.get(cell.id, ""),
                _fmt(a4.threshold_dbm), _fmt(a4.hysteresis_db),
                _format_pairs(a4.freq_offset_db), _format_pairs(a4.cell_offset_db),
                _fmt(th.entry_ue) if th else "", _fmt(th.entry_dl_prb) if th else "",
                _fmt(th.entry_ul_prb) if th else "",
                _fmt(th.leave_ue) if th else "", _fmt(th.leave_dl_prb) if th else "",
                _fmt(th.leave_ul_prb) if th else "",
            ])


def write_kpis(path, records: Iterable[CellKpiRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_KPI_COLUMNS)
        for rec in records:
            writer.writerow([
                rec.cell_id, rec.day, rec.hour, _fmt(rec.rrc_ues),
                _fmt(rec.dl_prbs), _fmt(rec.ul_prbs), _fmt(rec.dl_bits),
                _fmt(rec.dl_bits_lastslot), _fmt(rec.dl_active_time_s),
                _fmt(rec.ul_bits), _fmt(rec.dl_total_time_s), _fmt(rec.ul_time_s),
                *[_fmt(v) for v in rec.rate_bins], _fmt(rec.cs_minutes),
            ])


def write_energy(path, records: Iterable[RadioEnergyRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ENERGY_COLUMNS)
        for rec in records:
            writer.writerow([rec.radio_unit, rec.day, rec.hour, _fmt(rec.energy_wh)])


def write_mrs(path, reports: Iterable[MeasurementReport]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_MR_COLUMNS)
        for rec in reports:
            writer.writerow([
                rec.timestamp, rec.ue_id, rec.serving_cell,
                _format_pairs(rec.neighbor_rsrp_dbm),
            ])


def write_datasets(directory, cfg, kpis, energies, mrs) -> DatasetPaths:
    paths = DatasetPaths.in_dir(directory)
    Path(directory).mkdir(parents=True, exist_ok=True)
    write_engineering(paths.engineering, cfg)
    write_kpis(paths.kpi, kpis)
    write_energy(paths.energy, energies)
    write_mrs(paths.mr, mrs)
    return paths


# ---------------------------------------------------------------------------
# Traffic model


def apply_overrides(cfg: NetworkConfig, overrides: Mapping) -> NetworkConfig:
    """Return a copy of the configuration with per-cell shutdown-threshold
    and A4 parameter patches applied.

    `overrides` holds optional "thresholds" and "a4" maps keyed by cell id;
    values are partial field updates (e.g. {"entry_dl_prb": 120.0} or
    {"threshold_dbm": -95.0}). Unknown cells or fields are errors.
    """
    import dataclasses

    thresholds = dict(cfg.energy_saving)
    for cell_id, patch in overrides.get("thresholds", {}).items():
        if cell_id not in thresholds:
            raise BadReferenceError(
                f"threshold override for unknown capacity cell {cell_id!r}")
        try:
            thresholds[cell_id] = dataclasses.replace(thresholds[cell_id],
                                                      **patch)
        except TypeError:
            raise ConfigError(f"bad threshold override fields for {cell_id!r}")
    mobility = dict(cfg.mobility)
    for cell_id, patch in overrides.get("a4", {}).items():
        if cell_id not in mobility:
            raise BadReferenceError(
                f"A4 override for unknown cell {cell_id!r}")
        try:
            mobility[cell_id] = dataclasses.replace(mobility[cell_id], **patch)
        except TypeError:
            raise ConfigError(f"bad A4 override fields for {cell_id!r}")
    return dataclasses.replace(cfg, energy_saving=thresholds,
                               mobility=mobility)


def fit_traffic_model(kpis: Iterable[CellKpiRecord],
                      sigma_floor: float = DEFAULT_SIGMA_FLOOR) -> TrafficModel:
    """Fit per (cell, hour) Gaussians from working-day KPI records.

    Means are arithmetic sample means; stds use the n-1 denominator and are
    floored at `sigma_floor` (a single sample gives std == sigma_floor).
    Raises NoSamplesError if any observed cell misses an hour entirely.
    """
    grouped: dict[tuple[str, int], list[CellKpiRecord]] = {}
    seen: set[str] = set()
    cells: list[str] = []
    for rec in kpis:
        if rec.cell_id not in seen:
            seen.add(rec.cell_id)
            cells.append(rec.cell_id)
        grouped.setdefault((rec.cell_id, rec.hour), []).append(rec)
    table: dict[tuple[str, int], CellHourTraffic] = {}
    for cell in cells:
        for hour in range(1, 25):
            samples = grouped.get((cell, hour))
            if not samples:
                raise NoSamplesError(cell, hour)
            table[(cell, hour)] = CellHourTraffic(
                ues=_fit_gaussian([s.rrc_ues for s in samples], sigma_floor),
                dl_prbs=_fit_gaussian([s.dl_prbs for s in samples], sigma_floor),
                ul_prbs=_fit_gaussian([s.ul_prbs for s in samples], sigma_floor),
            )
    return TrafficModel(per_cell_hour=table, cells=tuple(cells))


def _fit_gaussian(values: list[float], sigma_floor: float) -> HourlyGaussian:
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return HourlyGaussian(mean=mean, std=max(std, sigma_floor))


def draw_inputs(tm: TrafficModel, hour: int, rng: np.random.Generator,
                cfg: NetworkConfig | None = None) -> dict[str, CellDraw]:
    """Draw one traffic realization per cell for the given hour.

    Gaussian draws are truncated at 0; the UE count is rounded to the nearest
    nonnegative integer and PRB draws are clamped to the cell's PRB capacity
    when a NetworkConfig is supplied. The caller owns the RNG.
    """
    if not 1 <= hour <= 24:
        raise ValueError(f"hour {hour} outside 1..24")
    draws: dict[str, CellDraw] = {}
    for cell in tm.cells:
        traffic = tm.at(cell, hour)
        ues = max(0.0, rng.normal(traffic.ues.mean, traffic.ues.std))
        dl = max(0.0, rng.normal(traffic.dl_prbs.mean, traffic.dl_prbs.std))
        ul = max(0.0, rng.normal(traffic.ul_prbs.mean, traffic.ul_prbs.std))
        if cfg is not None:
            spec = cfg.cell(cell)
            dl = min(dl, float(spec.n_dl_prb))
            ul = min(ul, float(spec.n_ul_prb))
        draws[cell] = CellDraw(ues=int(np.rint(ues)), dl_prbs=dl, ul_prbs=ul)
    return draws
