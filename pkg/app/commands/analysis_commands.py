# app/commands/analysis_commands.py
import logging

from app.commands.base import CommandResult, add_command, add_flag, build_panel, load_panel, output_path, write_json, write_text
from app.core.config import RunConfig
from app.services import econometrics_service, report_service, timeseries_service

logger = logging.getLogger(__name__)


def _add_panel_flags(parser) -> None:
    add_flag(parser, "--panel", help="panel CSV from normalize")
    add_flag(parser, "--mood", help="mood CSV (with --prices and --zscore-k instead of --panel)")
    add_flag(parser, "--prices", help="Yahoo-format price CSV")
    add_flag(parser, "--zscore-k", dest="zscore_k", type=int, help="z-score window half-width in days")
    add_flag(parser, "--causal-zscore", dest="causal_zscore", action="store_true", help="use the window [t-2k, t]")
    add_flag(parser, "--start", help="first panel date to analyse (YYYY-MM-DD)")
    add_flag(parser, "--end", help="last panel date to analyse (YYYY-MM-DD)")


def normalize(cfg: RunConfig) -> CommandResult:
    cfg.require("mood", "prices", "zscore_k")
    panel = build_panel(cfg)
    path = output_path(cfg, "panel.csv")
    timeseries_service.write_panel_csv(path, panel)
    payload = {
        "rows": len(panel),
        "first": panel.index[0].strftime("%Y-%m-%d"),
        "last": panel.index[-1].strftime("%Y-%m-%d"),
        "zscore_k": cfg.zscore_k,
        "causal": cfg.causal_zscore,
        "path": path,
    }
    text = f"Panel: {payload['rows']} trading days from {payload['first']} to {payload['last']}\n"
    return CommandResult(payload=payload, text=text, inputs=[cfg.mood, cfg.prices], outputs=[path])


def granger(cfg: RunConfig) -> CommandResult:
    panel, inputs = load_panel(cfg)
    report = econometrics_service.EconometricsService(cfg.lags, cfg.n_lags).granger(panel)
    payload = {
        "rows": len(panel),
        "lags": cfg.lags,
        "granger": {name: [row.model_dump(mode="json") for row in rows] for name, rows in report.results.items()},
        "nested_f_test": report.nested.model_dump(mode="json"),
    }
    outputs = [write_text(cfg, "granger.txt", report.text), write_json(cfg, "granger.json", payload)]
    return CommandResult(payload=payload, text=report.text, inputs=inputs, outputs=outputs)


def regress(cfg: RunConfig) -> CommandResult:
    panel, inputs = load_panel(cfg)
    fit, text = econometrics_service.EconometricsService(cfg.lags, cfg.n_lags).regress(panel)
    payload = {"rows": len(panel), "fit": fit.model_dump(mode="json")}
    outputs = [write_text(cfg, "regression.txt", text), write_json(cfg, "regression.json", payload)]
    return CommandResult(payload=payload, text=text, inputs=inputs, outputs=outputs)


def report(cfg: RunConfig) -> CommandResult:
    panel, inputs = load_panel(cfg)
    charts = report_service.ReportService(cfg.lag, cfg.split_date).render(panel, cfg.out)
    payload = {"charts": charts, "lag": cfg.lag}
    return CommandResult(payload=payload, text=f"Charts written: {', '.join(charts)}\n", inputs=inputs,
                         outputs=charts)


def register(subparsers) -> None:
    parser = add_command(subparsers, "normalize", normalize, "z-score mood series and align them with trading days")
    _add_panel_flags(parser)

    parser = add_command(subparsers, "granger", granger, "bivariate Granger causality of mood series on DJIA deltas")
    _add_panel_flags(parser)
    add_flag(parser, "--lags", help="lags to test, e.g. 1..7 or 1,3,5")
    add_flag(parser, "--n-lags", dest="n_lags", type=int, help="lags used by the Calm+Happy nested F-test")

    parser = add_command(subparsers, "regress", regress, "regress the OF series on the six GPOMS dimensions")
    _add_panel_flags(parser)

    parser = add_command(subparsers, "report", report, "render DJIA, mood and lagged Calm vs DJIA delta charts as SVG")
    _add_panel_flags(parser)
    add_flag(parser, "--lag", type=int, help="trading-day lag applied to Calm in the overlay")
    add_flag(parser, "--split-date", dest="split_date", help="shade the test period from this date on")
