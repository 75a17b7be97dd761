"""Batch command line: ingest -> correlate/rank -> score -> train -> evaluate
-> predict -> report, plus `serve` for the HTTP API and `synth` for the
bundled synthetic dataset.

All artifacts land under the output directory with fixed names (panel.csv,
correlations.csv, rankings.csv, aqi_model.json, model.json, eval.csv,
metrics.json, ...) and are byte-deterministic for a given configuration;
wall-clock timestamps go only to the run.log sidecar.  Options may come from
a flat key=value config file via --config; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import aqi_pca, ingest, model as model_mod, reference, scenario, stats, synth
from .errors import AqilensError
from .persist import (
    dump_json,
    fingerprint_file,
    load_aqi_model,
    load_regression_model,
    regression_model_payload,
    save_aqi_model,
    scenario_result_json,
)

ADOPTION_VARIABLES = (
    "total_afv", "education_pct", "population", "population_change",
    "poverty_pct", "poverty_lower", "poverty_upper", "unemployment_rate",
    "median_household_income",
)
AQI_VARIABLES = (
    "year", "population", "unemployment_rate", "median_household_income",
    "poverty_pct", "total_afv", "aqi_score",
)


@dataclass
class RunConfig:
    afv: str = ""
    socio: str = ""
    aqi: str = ""
    out: str = "artifacts"
    learning_rate: float = 0.01
    max_iterations: int = 10000
    convergence_threshold: float = 1e-9
    seed: int = 42
    split: str = "random"  # "random" | "temporal"
    train_fraction: float = 0.8
    cutoff_year: int = 2019
    features: str = ",".join(model_mod.DEFAULT_FEATURES)

    def feature_names(self) -> tuple[str, ...]:
        return tuple(n.strip() for n in self.features.split(",") if n.strip())

    def training_config(self) -> model_mod.TrainingConfig:
        return model_mod.TrainingConfig(
            learning_rate=self.learning_rate,
            max_iterations=self.max_iterations,
            convergence_threshold=self.convergence_threshold,
            seed=self.seed,
        )


def save_config(cfg: RunConfig, path: str | Path) -> None:
    lines = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_config(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file values fill in anything the flags left unset."""
    file_values = load_config(args.config) if getattr(args, "config", None) else {}
    cfg = RunConfig()
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            setattr(cfg, f.name, flag)
        elif f.name in file_values:
            setattr(cfg, f.name, _coerce(file_values[f.name], getattr(cfg, f.name)))
    return cfg


def _coerce(raw: str, template):
    if isinstance(template, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(template, int):
        return int(raw)
    if isinstance(template, float):
        return float(raw)
    return raw


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _log(out: Path, message: str) -> None:
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    with open(out / "run.log", "a", encoding="utf-8") as fh:
        fh.write(f"{stamp} {message}\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


# ---------------------------------------------------------------- commands

def cmd_ingest(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    afv = ingest.parse_afv_csv(cfg.afv)
    socio = ingest.parse_socio_csv(cfg.socio)
    aqi = ingest.parse_aqi_csv(cfg.aqi)
    panel = ingest.build_panel(afv, socio, aqi)
    problems = ingest.validate_panel(panel)
    if problems:
        raise AqilensError("panel failed validation: " + "; ".join(problems))
    ingest.write_panel_csv(panel, out / "panel.csv")
    for note in panel.dropped:
        print(f"dropped ({note.county}, {note.year}): {note.reason}", file=sys.stderr)
    _log(out, f"ingest afv={cfg.afv} socio={cfg.socio} aqi={cfg.aqi} rows={len(panel.rows)}")
    print(f"panel.csv written: {len(panel.rows)} rows, {len(panel.dropped)} dropped")
    return 0


def cmd_correlate(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    panel = ingest.read_panel_csv(args.panel or out / "panel.csv")
    if args.variables:
        variables = tuple(v.strip() for v in args.variables.split(","))
    else:
        variables = AQI_VARIABLES if args.with_aqi else ADOPTION_VARIABLES
    matrix = stats.correlation_matrix(panel, variables)
    _write_csv(out / "correlations.csv", ["variable_a", "variable_b", "r"],
               [[a, b, _fmt(r)] for a, b, r in matrix.triples()])
    dump_json({"variables": list(matrix.variables),
               "matrix": [list(row) for row in matrix.values]},
              out / "correlations.json")
    _log(out, f"correlate variables={','.join(variables)}")
    print(f"correlations.csv written: {len(variables)} variables")
    return 0


def _rank_rows(rows) -> tuple[stats.CountyRanking, stats.CountyRanking, list[list]]:
    afv_ranking = stats.rank_desc([(r.county, float(r.total_afv)) for r in rows])
    se_ranking = stats.se_rank(rows)
    se_points = {e.county: e.metric_value for e in se_ranking.entries}
    by_county = {r.county: r for r in rows}
    table = [
        [entry.county, by_county[entry.county].total_afv, entry.rank,
         _fmt(se_points[entry.county]), se_ranking.rank_of(entry.county)]
        for entry in afv_ranking.entries
    ]
    return afv_ranking, se_ranking, table


def cmd_rank(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    if args.reference:
        rows = reference.baseline_rows()
        year = None
    else:
        panel = ingest.read_panel_csv(args.panel or out / "panel.csv")
        year = args.year or max(panel.years())
        rows = panel.year_slice(year)
    afv_ranking, se_ranking, table = _rank_rows(rows)
    _write_csv(out / "rankings.csv",
               ["county", "total_afv", "afv_rank", "se_points", "se_rank"], table)
    agreement = stats.rank_agreement(se_ranking, afv_ranking)
    dump_json({"year": year, "rank_agreement_spearman": agreement},
              out / "rank_agreement.json")
    _log(out, f"rank year={year} reference={args.reference}")
    print(f"rankings.csv written ({len(table)} counties), "
          f"SE/AFV Spearman agreement {agreement:.4f}")
    return 0


def cmd_score(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    panel_path = Path(args.panel or out / "panel.csv")
    panel = ingest.read_panel_csv(panel_path)
    aqi_model = aqi_pca.fit_aqi_model(panel)
    save_aqi_model(aqi_model, out / "aqi_model.json")
    scores, clamped = aqi_pca.score_panel(aqi_model, panel)
    scored = ingest.with_scores(panel, scores)
    ingest.write_panel_csv(scored, out / "panel.csv")
    ratios = aqi_pca.explained_variance(aqi_model)
    _log(out, f"score rows={len(scores)} clamped={clamped}")
    print(f"aqi_model.json written; PC1 explains {ratios[0]:.1%} of pollutant variance")
    return 0


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    panel = ingest.read_panel_csv(args.panel or out / "panel.csv")
    if cfg.split == "temporal":
        train, test = model_mod.split_temporal(panel.rows, cfg.cutoff_year)
        split_meta = {"mode": "temporal", "cutoff_year": cfg.cutoff_year}
    else:
        train, test = model_mod.split_train_test(panel.rows, cfg.train_fraction, cfg.seed)
        split_meta = {"mode": "random", "seed": cfg.seed, "fraction": cfg.train_fraction}
    spec = model_mod.FeatureSpec(names=cfg.feature_names())
    fitted = model_mod.fit_gd(train, spec, cfg.training_config())
    payload = regression_model_payload(fitted)
    payload["split"] = split_meta
    payload["target"] = model_mod.TARGET
    dump_json(payload, out / "model.json")
    _log(out, f"train rows={len(train)} iterations={len(fitted.history)} "
              f"converged_at={fitted.converged_at}")
    print(f"model.json written: {len(train)} train rows, "
          f"final loss {fitted.history[-1]:.3e}, converged_at={fitted.converged_at}")
    return 0


def _recover_split(panel, model_path: Path):
    doc = json.loads(model_path.read_text(encoding="utf-8"))
    split_meta = doc.get("split", {"mode": "random", "seed": 42, "fraction": 0.8})
    if split_meta["mode"] == "temporal":
        return model_mod.split_temporal(panel.rows, int(split_meta["cutoff_year"]))
    return model_mod.split_train_test(panel.rows, float(split_meta["fraction"]),
                                      int(split_meta["seed"]))


def cmd_evaluate(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    panel = ingest.read_panel_csv(args.panel or out / "panel.csv")
    model_path = Path(args.model or out / "model.json")
    fitted = load_regression_model(model_path)
    train, test = _recover_split(panel, model_path)
    report = model_mod.evaluate(fitted, test)
    train_report = model_mod.evaluate(fitted, train)
    _write_csv(out / "eval.csv", ["county", "period", "actual", "predicted"],
               [[e.county, e.year, _fmt(e.actual), _fmt(e.predicted)] for e in report.rows])
    dump_json({
        "r2": report.r2, "mse": report.mse,
        "r2_train": train_report.r2, "mse_train": train_report.mse,
        "n_train": len(train), "n_test": len(test),
    }, out / "metrics.json")
    _log(out, f"evaluate n_test={len(test)} r2={report.r2} mse={report.mse}")
    r2_text = "undefined" if report.r2 is None else f"{report.r2:.4f}"
    print(f"eval.csv + metrics.json written: test R2 {r2_text}, MSE {report.mse:.6f}")
    return 0


def _parse_overrides(sets: list[str], multiplies: list[str]) -> dict[str, scenario.Override]:
    overrides: dict[str, scenario.Override] = {}
    for raw, kind in [(s, "value") for s in sets] + [(m, "multiply") for m in multiplies]:
        if "=" not in raw:
            raise ValueError(f"override {raw!r} must look like name=number")
        name, _, val = raw.partition("=")
        overrides[name.strip()] = (scenario.Override(value=float(val)) if kind == "value"
                                   else scenario.Override(multiply=float(val)))
    return overrides


def cmd_predict(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    panel = ingest.read_panel_csv(args.panel or out / "panel.csv")
    model_path = Path(args.model or out / "model.json")
    fitted = load_regression_model(model_path)
    if args.county is None:
        # batch mode: predictions for every panel row
        rows = []
        for r in panel.rows:
            rows.append([r.county, r.year, _fmt(r.aqi_score),
                         _fmt(model_mod.predict(fitted, r))])
        _write_csv(out / "predictions.csv", ["county", "year", "actual", "predicted"], rows)
        _log(out, f"predict batch rows={len(rows)}")
        print(f"predictions.csv written: {len(rows)} rows")
        return 0
    request = scenario.ScenarioRequest(
        county=args.county,
        base_year=args.year if args.year is not None else max(panel.years()),
        overrides=_parse_overrides(args.set or [], args.multiply or []),
    )
    result = scenario.run_scenario(request, panel, fitted)
    body = scenario_result_json(result, fingerprint_file(model_path))
    if args.scenario_out:
        Path(args.scenario_out).write_bytes(body.encode("utf-8"))
        print(f"scenario written to {args.scenario_out}: "
              f"baseline {result.baseline_aqi:.3f} -> scenario {result.scenario_aqi:.3f} "
              f"(delta {result.delta:+.3f})")
    else:
        sys.stdout.write(body + "\n")
    _log(out, f"predict scenario county={args.county}")
    return 0


def cmd_report(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    wrote = []
    if args.reference:
        pairs = [(p.county, p.year, p.actual, p.predicted) for p in reference.EVAL_PAIRS]
        _write_table2(out, pairs)
        wrote += ["table2.csv", "table2_metrics.json"]
        _, _, table = _rank_rows(reference.baseline_rows())
        _write_csv(out / "rankings.csv",
                   ["county", "total_afv", "afv_rank", "se_points", "se_rank"], table)
        wrote.append("rankings.csv")
    elif args.eval:
        pairs = []
        with open(args.eval, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                pairs.append((row["county"], int(row["period"]),
                              float(row["actual"]), float(row["predicted"])))
        _write_table2(out, pairs)
        wrote += ["table2.csv", "table2_metrics.json"]
    if cfg.afv:
        growth = stats.growth_by_type(ingest.parse_afv_csv(cfg.afv))
        _write_csv(out / "growth.csv",
                   ["vehicle_type", "first_period", "first_count",
                    "last_period", "last_count", "growth_pct_of_first_total_fleet"],
                   [[e.vehicle_type,
                     f"{growth.first_period[0]}H{growth.first_period[1]}", e.first_count,
                     f"{growth.last_period[0]}H{growth.last_period[1]}", e.last_count,
                     _fmt(e.growth_pct)] for e in growth.entries])
        dump_json({"formula": growth.formula,
                   "first_period": list(growth.first_period),
                   "last_period": list(growth.last_period),
                   "fleet_total_first": growth.fleet_total_first,
                   "growth_pct": {e.vehicle_type: e.growth_pct for e in growth.entries}},
                  out / "growth.json")
        wrote += ["growth.csv", "growth.json"]
    if not wrote:
        raise AqilensError("nothing to report: pass --reference, --eval, or --afv")
    _log(out, f"report wrote={','.join(wrote)}")
    print("report written: " + ", ".join(wrote))
    return 0


def _write_table2(out: Path, pairs: list[tuple[str, int, float, float]]) -> None:
    formatted = [[county, year, f"{actual:.3f}", f"{predicted:.3f}"]
                 for county, year, actual, predicted in pairs]
    _write_csv(out / "table2.csv",
               ["county", "period", "actual_aqi", "predicted_aqi"], formatted)
    # metrics recomputed from the printed (3-decimal) values, not internal ones
    printed = [(float(a), float(p)) for _, _, a, p in formatted]
    r2, mse = model_mod.metrics_from_pairs(printed)
    dump_json({"mse": mse, "r2": r2, "n": len(printed),
               "formula": "mse = mean((actual_aqi - predicted_aqi)^2) over table2.csv rows"},
              out / "table2_metrics.json")


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_state

    cfg = resolve_config(args)
    out = _out_dir(cfg)
    state = load_state(
        args.panel or out / "panel.csv",
        args.model or out / "model.json",
        aqi_model_path=args.aqi_model or _existing(out / "aqi_model.json"),
        metrics_path=args.metrics or _existing(out / "metrics.json"),
    )
    app = create_app(state, cors_origin=args.cors_origin, ui_dir=args.ui_dir)
    import os
    port = args.port or int(os.environ.get("AQILENS_PORT", "8000"))
    print(f"serving on :{port} (model {state.fingerprint[:12]})")
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def _existing(path: Path) -> str | None:
    return str(path) if path.exists() else None


def cmd_synth(args) -> int:
    cfg = resolve_config(args)
    out = _out_dir(cfg)
    truth = synth.generate(out, seed=cfg.seed, noise_sigma=args.noise)
    _log(out, f"synth seed={cfg.seed} noise={args.noise}")
    print(f"synthetic dataset written to {out} ({truth['n_rows']} county-years)")
    return 0


# ------------------------------------------------------------------ parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags win")
    p.add_argument("--out", help="output directory (default: artifacts)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqilens",
        description="County panel toolkit: AFV adoption, socioeconomics, and "
                    "air-quality scoring/prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and join the three source CSVs")
    _add_common(p)
    p.add_argument("--afv", help="AFV registrations CSV")
    p.add_argument("--socio", help="socioeconomic census CSV")
    p.add_argument("--aqi", help="pollutant monitor CSV")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("correlate", help="pairwise Pearson correlation report")
    _add_common(p)
    p.add_argument("--panel", help="panel CSV (default: <out>/panel.csv)")
    p.add_argument("--variables", help="comma-separated variable list")
    p.add_argument("--with-aqi", action="store_true",
                   help="use the scored-panel variable set including aqi_score")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("rank", help="adoption and socioeconomic county rankings")
    _add_common(p)
    p.add_argument("--panel", help="panel CSV (default: <out>/panel.csv)")
    p.add_argument("--year", type=int, help="year slice (default: latest)")
    p.add_argument("--reference", action="store_true",
                   help="rank the bundled NJ reference table instead of a panel")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("score", help="fit the pollutant PCA and score the panel")
    _add_common(p)
    p.add_argument("--panel", help="panel CSV (default: <out>/panel.csv)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train", help="fit the prediction model by gradient descent")
    _add_common(p)
    p.add_argument("--panel", help="scored panel CSV (default: <out>/panel.csv)")
    p.add_argument("--features", help="comma-separated covariate list")
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--max-iterations", dest="max_iterations", type=int)
    p.add_argument("--convergence-threshold", dest="convergence_threshold", type=float)
    p.add_argument("--seed", type=int, help="split shuffle seed")
    p.add_argument("--split", choices=["random", "temporal"])
    p.add_argument("--train-fraction", dest="train_fraction", type=float)
    p.add_argument("--cutoff-year", dest="cutoff_year", type=int,
                   help="last training year for --split temporal")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="held-out metrics for a trained model")
    _add_common(p)
    p.add_argument("--panel", help="scored panel CSV (default: <out>/panel.csv)")
    p.add_argument("--model", help="model JSON (default: <out>/model.json)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="batch predictions, or one what-if scenario")
    _add_common(p)
    p.add_argument("--panel", help="scored panel CSV (default: <out>/panel.csv)")
    p.add_argument("--model", help="model JSON (default: <out>/model.json)")
    p.add_argument("--county", help="scenario mode: county name")
    p.add_argument("--year", type=int, help="scenario base year (default: latest)")
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="override a covariate with an absolute value")
    p.add_argument("--multiply", action="append", metavar="NAME=FACTOR",
                   help="scale a covariate relative to its baseline")
    p.add_argument("--scenario-out", help="write the scenario JSON to this file")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="growth, ranking, and evaluation tables")
    _add_common(p)
    p.add_argument("--afv", help="AFV registrations CSV for the growth table")
    p.add_argument("--eval", help="eval.csv to reshape into the score table")
    p.add_argument("--reference", action="store_true",
                   help="emit tables from the bundled NJ reference data")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the read-only HTTP API")
    _add_common(p)
    p.add_argument("--panel", help="scored panel CSV (default: <out>/panel.csv)")
    p.add_argument("--model", help="model JSON (default: <out>/model.json)")
    p.add_argument("--aqi-model", dest="aqi_model", help="scoring model JSON")
    p.add_argument("--metrics", help="metrics JSON echoed by /api/model")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, help="default: $AQILENS_PORT or 8000")
    p.add_argument("--ui-dir", dest="ui_dir", help="static frontend directory to mount")
    p.add_argument("--cors-origin", dest="cors_origin",
                   help="allow this origin via CORS ('*' for any)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate the bundled synthetic dataset")
    _add_common(p)
    p.add_argument("--seed", type=int, help="generator seed")
    p.add_argument("--noise", type=float, default=0.01,
                   help="latent noise sigma (default 0.01)")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AqilensError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error[cli.io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
