# app/commands/base.py
import argparse
import logging
import os
from typing import Callable, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field

from app.core.config import RunConfig
from app.core.manifest import dump_json
from app.services import timeseries_service

logger = logging.getLogger(__name__)


class CommandResult(BaseModel):
    """What a subcommand hands back to the entry point"""

    payload: Dict[str, object] = Field(default_factory=dict)
    text: str = ""
    inputs: List[str] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)


Handler = Callable[[RunConfig], CommandResult]


def add_command(subparsers, name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
    """Create a subcommand parser carrying the flags every command accepts"""
    parser = subparsers.add_parser(name, help=help_text, description=help_text)
    parser.add_argument("--config", dest="config_path", help="key=value run-config file")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--json", dest="json_output", action="store_true", default=None,
                        help="print machine-readable JSON on stdout")
    parser.add_argument("--verbose", action="store_true", default=False, help="debug logging")
    parser.set_defaults(handler=handler, command=name)
    return parser


def add_flag(parser: argparse.ArgumentParser, *names: str, **kwargs) -> None:
    """Flags default to None so config-file values are only overridden when given"""
    kwargs.setdefault("default", None)
    parser.add_argument(*names, **kwargs)


def output_path(cfg: RunConfig, filename: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, filename)


def write_json(cfg: RunConfig, filename: str, payload) -> str:
    path = output_path(cfg, filename)
    dump_json(payload, path)
    return path


def write_text(cfg: RunConfig, filename: str, text: str) -> str:
    path = output_path(cfg, filename)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    return path


def load_panel(cfg: RunConfig) -> tuple:
    """Read --panel, or build the panel from --mood and --prices; returns (panel, input paths)"""
    if cfg.panel:
        panel = timeseries_service.read_panel_csv(cfg.panel)
        inputs = [cfg.panel]
    else:
        cfg.require("mood", "prices", "zscore_k")
        panel = build_panel(cfg)
        inputs = [cfg.mood, cfg.prices]
    return timeseries_service.restrict_period(panel, cfg.start, cfg.end), inputs


def build_panel(cfg: RunConfig) -> pd.DataFrame:
    return timeseries_service.PanelService(cfg.zscore_k, causal=cfg.causal_zscore).from_files(cfg.mood, cfg.prices)


def optional(value: Optional[str]) -> List[str]:
    return [value] if value else []
