# app/commands/forecast_commands.py
import logging

from pydantic import ValidationError

from app.commands.base import CommandResult, add_command, add_flag, load_panel, output_path, write_json, write_text
from app.core.config import RunConfig
from app.core.exceptions import UsageError
from app.models.forecast_models import SPEC_NAMES, InputSpec
from app.models.sofnn_models import SofnnParams
from app.services import forecast_service, sofnn_service

logger = logging.getLogger(__name__)


def sofnn_params(cfg: RunConfig) -> SofnnParams:
    try:
        return SofnnParams(delta=cfg.delta, sigma0=cfg.sigma0, k_rmse=cfg.k_rmse, k_d=cfg.k_d,
                           width_rule=cfg.width_rule, epochs=cfg.epochs,
                           rows_per_parameter=cfg.rows_per_parameter)
    except ValidationError as e:
        first = e.errors()[0]
        raise UsageError(f"Invalid SOFNN parameter '{first['loc'][0]}': {first['msg']}")


def input_specs(cfg: RunConfig, default=SPEC_NAMES):
    names = cfg.specs or list(default)
    try:
        return [InputSpec.named(name, cfg.n_lags) for name in names]
    except ValueError as e:
        raise UsageError(str(e))


def train(cfg: RunConfig) -> CommandResult:
    """Fit one SOFNN on every panel row before --split-date (all rows when omitted)"""
    panel, inputs = load_panel(cfg)
    spec = input_specs(cfg, default=("I1",))[0]
    model, log, ds = forecast_service.ForecastService(sofnn_params(cfg)).train(panel, spec, cfg.split_date)
    model_path = output_path(cfg, "model.json")
    sofnn_service.save_model(model, model_path)
    payload = {
        "spec": spec.name,
        "features": forecast_service.feature_names(spec),
        "ranges": {column: list(bounds) for column, bounds in ds.ranges.items()},
        "samples": len(ds.train_y),
        "neurons": model.n_neurons,
        "log": log.model_dump(mode="json"),
    }
    log_path = write_json(cfg, "training_log.json", payload)
    text = (f"{spec.name}: {model.n_neurons} neurons on {len(ds.train_y)} samples, "
            f"training RMSE {log.final_rmse:.4f} after {log.epochs_run} epoch(s)\n")
    summary = {key: value for key, value in payload.items() if key != "log"}
    summary["final_rmse"] = log.final_rmse
    return CommandResult(payload=summary, text=text, inputs=inputs, outputs=[model_path, log_path])


def evaluate(cfg: RunConfig) -> CommandResult:
    cfg.require("split_date")
    panel, inputs = load_panel(cfg)
    service = forecast_service.ForecastService(sofnn_params(cfg), rolling=cfg.rolling, n_periods=cfg.n_periods)
    report = service.evaluate(panel, input_specs(cfg), cfg.split_date)
    text = forecast_service.render_forecast_table(report)
    payload = report.model_dump(mode="json")
    outputs = [write_text(cfg, "forecast.txt", text), write_json(cfg, "forecast.json", payload)]
    return CommandResult(payload=payload, text=text, inputs=inputs, outputs=outputs)


def _add_sofnn_flags(parser) -> None:
    add_flag(parser, "--panel", help="panel CSV from normalize")
    add_flag(parser, "--mood")
    add_flag(parser, "--prices")
    add_flag(parser, "--zscore-k", dest="zscore_k", type=int)
    add_flag(parser, "--causal-zscore", dest="causal_zscore", action="store_true")
    add_flag(parser, "--specs", help=f"comma-separated input specs ({', '.join(SPEC_NAMES)})")
    add_flag(parser, "--n-lags", dest="n_lags", type=int, help="days of lagged inputs per column")
    add_flag(parser, "--split-date", dest="split_date", help="first test date (YYYY-MM-DD)")
    add_flag(parser, "--delta", type=float, help="per-sample error criterion")
    add_flag(parser, "--sigma0", type=float, help="initial membership width")
    add_flag(parser, "--k-rmse", dest="k_rmse", type=float, help="target training RMSE")
    add_flag(parser, "--k-d", dest="k_d", help="if-part distance threshold(s), comma-separated")
    add_flag(parser, "--width-rule", dest="width_rule", choices=["nearest", "fixed"])
    add_flag(parser, "--epochs", type=int, help="maximum training passes")
    add_flag(parser, "--rows-per-parameter", dest="rows_per_parameter", type=float,
             help="neuron cap: training rows per consequent parameter (0 disables)")


def register(subparsers) -> None:
    parser = add_command(subparsers, "train", train, "train a SOFNN for one input spec and save it")
    _add_sofnn_flags(parser)

    parser = add_command(subparsers, "evaluate", evaluate, "train and test every input spec on one split")
    _add_sofnn_flags(parser)
    add_flag(parser, "--rolling", action="store_true", help="retrain before every test day")
    add_flag(parser, "--n-periods", dest="n_periods", type=float, help="windows for the binomial significance")
