"""Command-line pipeline: generate | train | simulate | benchmark | compare.

Global flags (--seed, --runs, --max-steps) may also come from a JSON config
file given with --config or the CARRIERSIM_CONFIG environment variable;
explicit flags win. Every command is deterministic given its inputs and seed.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .abm import (
    AbmConfig,
    read_mean_report,
    run_benchmark,
    simulate_day,
    write_hourly_report,
    write_point_report,
    write_run_dump,
)
from .datamodel import (
    apply_overrides,
    fit_traffic_model,
    parse_datasets,
    parse_energy,
    parse_kpis,
)
from .energymodel import (
    EnergyHyper,
    encode_features,
    fit_radio_energy_model,
    load_energy_model,
    predict_energy,
    save_energy_model,
)
from .errors import KeyMismatchError, SimulatorError
from .harness import (
    ScenarioSpec,
    compare,
    generate_scenario,
    ground_truth_replay,
    mae_mape,
    read_truth,
    write_eval_report,
    write_truth,
)
from .ratemodel import (
    RateHyper,
    build_rate_samples,
    load_rate_model,
    mean_rate_by_cell,
    predict_rate,
    save_rate_model,
    train_rate_model,
)
from .rules import build_handover_model_for_hours

_DEFAULTS = {"seed": 0, "runs": 100, "max_steps": 400}


def _resolve_settings(ctx_params, config_path):
    settings = dict(_DEFAULTS)
    if config_path:
        settings.update({k: v for k, v in
                         json.loads(Path(config_path).read_text()).items()
                         if k in _DEFAULTS})
    for key in _DEFAULTS:
        if ctx_params.get(key) is not None:
            settings[key] = ctx_params[key]
    return settings


@click.group()
@click.version_option(__version__)
@click.option("--seed", type=int, default=None, help="Master RNG seed.")
@click.option("--runs", type=int, default=None,
              help="Monte Carlo runs per hour.")
@click.option("--max-steps", type=int, default=None,
              help="Step cap per Monte Carlo run.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              envvar="CARRIERSIM_CONFIG", default=None,
              help="JSON file with default settings (flags win).")
@click.pass_context
def main(ctx, seed, runs, max_steps, config):
    """Carrier-shutdown energy/throughput modelling pipeline."""
    ctx.obj = _resolve_settings(
        {"seed": seed, "runs": runs, "max_steps": max_steps}, config)


def _abm_config(settings) -> AbmConfig:
    return AbmConfig(runs=settings["runs"], max_steps=settings["max_steps"],
                     seed=settings["seed"])


def _fail(exc) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True,
                                                     dir_okay=False),
              default=None, help="JSON file with scenario sizes/knobs.")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--truth/--no-truth", default=True,
              help="Also write reference post-activation KPIs (truth.csv).")
@click.pass_obj
def generate(settings, spec_path, out, truth):
    """Generate a synthetic scenario with known ground-truth laws."""
    fields = json.loads(Path(spec_path).read_text()) if spec_path else {}
    try:
        spec = ScenarioSpec(**fields)
    except TypeError as exc:
        _fail(f"bad scenario spec: {exc}")
    try:
        scenario = generate_scenario(spec, out, seed=settings["seed"])
        if truth:
            tables = ground_truth_replay(scenario, _abm_config(settings))
            write_truth(Path(out) / "truth.csv", tables)
    except SimulatorError as exc:
        _fail(exc)
    click.echo(f"scenario written to {out}")


def _load_training_data(data_dir):
    data = Path(data_dir)
    cfg, kpis, energies, mrs = parse_datasets(data)
    # prefer the shutdown-active campaign for ML training when present
    biased_kpi = data / "kpi_biased.csv"
    biased_energy = data / "energy_biased.csv"
    train_kpis = parse_kpis(biased_kpi) if biased_kpi.exists() else kpis
    train_energies = (parse_energy(biased_energy) if biased_energy.exists()
                      else energies)
    return cfg, kpis, mrs, train_kpis, train_energies


def _chronological_split(records, fraction=0.8):
    days = sorted({r.day for r in records})
    cut = max(1, int(round(fraction * len(days))))
    train_days = set(days[:cut])
    return ([r for r in records if r.day in train_days],
            [r for r in records if r.day not in train_days])


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True,
                                                       file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.pass_obj
def train(settings, data, out):
    """Train the energy and rate models from a dataset directory."""
    try:
        cfg, _, _, train_kpis, train_energies = _load_training_data(data)
        kpi_train, kpi_test = _chronological_split(train_kpis)
        energy_train, energy_test = _chronological_split(train_energies)
        energy_model = fit_radio_energy_model(
            cfg, kpi_train, energy_train,
            EnergyHyper(seed=settings["seed"]))
        avg_samples, ce_samples = build_rate_samples(cfg, kpi_train)
        rate_model = train_rate_model(avg_samples, ce_samples, RateHyper())
    except SimulatorError as exc:
        _fail(exc)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_energy_model(out_dir / "energy_model.json", energy_model)
    save_rate_model(out_dir / "rate_model.json", rate_model)
    metrics = _test_metrics(cfg, energy_model, rate_model, kpi_test,
                            energy_test)
    (out_dir / "train_metrics.json").write_text(
        json.dumps(metrics, sort_keys=True, indent=2), encoding="utf-8")
    click.echo(f"models written to {out}")
    for name, value in metrics.items():
        if value is not None:
            click.echo(f"  {name}: {value:.4f}")


def _test_metrics(cfg, energy_model, rate_model, kpi_test, energy_test):
    metrics = {"energy_test_mae_wh": None, "energy_test_mape_percent": None,
               "rate_test_mae_mbps": None}
    if energy_test:
        from .energymodel import build_energy_samples

        rows = build_energy_samples(cfg, kpi_test, energy_test)
        if rows:
            preds, truths = [], []
            for row in rows:
                vec = encode_features(energy_model.schema, row.radio,
                                      row.cells, row.dl_loads,
                                      row.cs_fractions)
                preds.append(predict_energy(energy_model, vec)[0])
                truths.append(row.energy_wh)
            r = mae_mape(preds, truths)
            metrics["energy_test_mae_wh"] = r.mae
            metrics["energy_test_mape_percent"] = r.mape
    if kpi_test:
        avg_samples, _ = build_rate_samples(cfg, kpi_test)
        rng = np.random.default_rng(0)
        preds, truths = [], []
        for cell, rows in sorted(avg_samples.items()):
            if cell not in rate_model.cells:
                continue
            for s in rows:
                value, _ = predict_rate(rate_model, cell, s.dl_prb_load,
                                        s.rrc_ues, rng)
                preds.append(value)
                truths.append(s.rate_mbps)
        if preds:
            metrics["rate_test_mae_mbps"] = mae_mape(preds, truths).mae
    return metrics


def _load_overrides(path):
    if path is None:
        return None
    return json.loads(Path(path).read_text())


def _prepare_network(data_dir, overrides_path):
    cfg, kpis, _, mrs = parse_datasets(data_dir)
    overrides = _load_overrides(overrides_path)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    tm = fit_traffic_model(kpis)
    handover = build_handover_model_for_hours(cfg, mrs)
    return cfg, tm, handover


def _predictions(cfg, tables, energy_model, rate_model, seed):
    """Model-based energy and rate predictions from per-cell mean outputs."""
    rng = np.random.default_rng([seed, 0x51])
    out = {"energy_wh": {}, "rate_mbps": {}}
    caps = {c.id: float(c.n_dl_prb) for c in cfg.cells}
    for (cell, hour), load in sorted(tables["dl_load"].items()):
        load = min(max(load, 0.0), 1.0)
        if cell not in rate_model.cells:
            continue
        value, _ = predict_rate(rate_model, cell, load,
                                tables["ue"][(cell, hour)], rng)
        out["rate_mbps"][(cell, hour)] = value
    for radio in cfg.radio_units:
        cells = [cfg.cell(cid) for cid in radio.cell_ids]
        for hour in range(1, 25):
            loads = {c.id: min(max(tables["dl_load"][(c.id, hour)], 0.0), 1.0)
                     for c in cells}
            fractions = {c.id: tables["cs_minutes"][(c.id, hour)] / 60.0
                         for c in cells}
            vec = encode_features(energy_model.schema, radio, cells, loads,
                                  fractions)
            mu, _ = predict_energy(energy_model, vec)
            out["energy_wh"][(radio.id, hour)] = mu
    return out


def _write_tables(path, tables):
    write_truth(path, tables)


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True,
                                                       file_okay=False))
@click.option("--models", required=True, type=click.Path(exists=True,
                                                         file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--overrides", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON with per-cell threshold/A4 patches.")
@click.pass_obj
def simulate(settings, data, models, out, overrides):
    """Run the stochastic simulation and predict energy/rates."""
    try:
        cfg, tm, handover = _prepare_network(data, overrides)
        energy_model = load_energy_model(Path(models) / "energy_model.json")
        rate_model = load_rate_model(Path(models) / "rate_model.json")
        outputs = simulate_day(tm, cfg, handover, _abm_config(settings))
    except SimulatorError as exc:
        _fail(exc)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_hourly_report(out_dir / "abm_outputs.csv", outputs, cfg)
    write_run_dump(out_dir / "abm_runs.csv", outputs)
    tables = read_mean_report(out_dir / "abm_outputs.csv")
    preds = _predictions(cfg, tables, energy_model, rate_model,
                         settings["seed"])
    _write_tables(out_dir / "predictions.csv", preds)
    click.echo(f"simulation outputs written to {out}")


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True,
                                                       file_okay=False))
@click.option("--models", required=True, type=click.Path(exists=True,
                                                         file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--overrides", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.pass_obj
def benchmark(settings, data, models, out, overrides):
    """Run the deterministic expert baseline and predict energy/rates.

    Rates use the mean estimator (per-cell training mean), energies the
    trained model on the baseline's point estimates.
    """
    try:
        cfg, tm, handover = _prepare_network(data, overrides)
        energy_model = load_energy_model(Path(models) / "energy_model.json")
        outputs = run_benchmark(tm, cfg, handover)
        _, _, _, train_kpis, _ = _load_training_data(data)
        avg_samples, _ = build_rate_samples(cfg, train_kpis)
        mean_rates = mean_rate_by_cell(avg_samples)
    except SimulatorError as exc:
        _fail(exc)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_point_report(out_dir / "benchmark_outputs.csv", outputs, cfg)
    tables = read_mean_report(out_dir / "benchmark_outputs.csv")
    preds = {"energy_wh": {}, "rate_mbps": {}}
    for (cell, hour) in sorted(tables["dl_load"]):
        if cell in mean_rates:
            preds["rate_mbps"][(cell, hour)] = mean_rates[cell]
    for radio in cfg.radio_units:
        cells = [cfg.cell(cid) for cid in radio.cell_ids]
        for hour in range(1, 25):
            loads = {c.id: min(max(tables["dl_load"][(c.id, hour)], 0.0), 1.0)
                     for c in cells}
            fractions = {c.id: tables["cs_minutes"][(c.id, hour)] / 60.0
                         for c in cells}
            vec = encode_features(energy_model.schema, radio, cells, loads,
                                  fractions)
            preds["energy_wh"][(radio.id, hour)] = predict_energy(
                energy_model, vec)[0]
    _write_tables(out_dir / "predictions.csv", preds)
    click.echo(f"benchmark outputs written to {out}")


def _estimator_tables(directory, outputs_name):
    d = Path(directory)
    tables = dict(read_mean_report(d / outputs_name))
    predictions = d / "predictions.csv"
    if predictions.exists():
        tables.update(read_truth(predictions))
    return tables


@main.command(name="compare")
@click.option("--abm", "abm_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--benchmark", "bench_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--truth", "truth_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
def compare_cmd(abm_dir, bench_dir, truth_path, out):
    """Score simulation and baseline against reference KPIs."""
    try:
        abm_tables = _estimator_tables(abm_dir, "abm_outputs.csv")
        bench_tables = _estimator_tables(bench_dir, "benchmark_outputs.csv")
        truth_tables = read_truth(truth_path)
        aligned_abm, aligned_bench, aligned_truth = {}, {}, {}
        for kpi, truth in truth_tables.items():
            if kpi not in abm_tables or kpi not in bench_tables:
                continue
            keys = set(truth) & set(abm_tables[kpi]) & set(bench_tables[kpi])
            if not keys:
                raise KeyMismatchError(
                    f"no overlapping keys for KPI {kpi!r}")
            aligned_truth[kpi] = {k: truth[k] for k in keys}
            aligned_abm[kpi] = {k: abm_tables[kpi][k] for k in keys}
            aligned_bench[kpi] = {k: bench_tables[kpi][k] for k in keys}
        report = compare(aligned_abm, aligned_bench, aligned_truth)
    except SimulatorError as exc:
        _fail(exc)
    write_eval_report(out, report)
    click.echo(f"evaluation written to {out}")
    for kpi, ev in sorted(report.kpis.items()):
        gain = ("n/a" if ev.gain_mae is None
                else f"{100.0 * ev.gain_mae:.1f}%")
        click.echo(f"  {kpi}: abm mae={ev.abm.mae:.4f} "
                   f"benchmark mae={ev.benchmark.mae:.4f} gain={gain}")


if __name__ == "__main__":
    main()
