# app/main.py
import argparse
import json
import logging
import sys
from typing import List, Optional

from app.commands import analysis_commands, corpus_commands, forecast_commands, synth_commands
from app.core.config import resolve_run_config, settings
from app.core.exceptions import MoodcastError, UsageError
from app.core.manifest import write_manifest

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
META_ARGS = {"handler", "command", "config_path", "verbose"}

logger = logging.getLogger(__name__)


class CliParser(argparse.ArgumentParser):
    """argparse reports usage problems as UsageError instead of exiting with status 2"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="moodcast", description=f"{settings.APP_NAME} {settings.APP_VERSION}")
    parser.add_argument("--version", action="version", version=settings.APP_VERSION)
    subparsers = parser.add_subparsers(dest="command", parser_class=CliParser, required=True)
    corpus_commands.register(subparsers)
    analysis_commands.register(subparsers)
    forecast_commands.register(subparsers)
    synth_commands.register(subparsers)
    return parser


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def _emit_error(error: MoodcastError, json_output: bool) -> int:
    if json_output:
        print(json.dumps(error.to_dict(), sort_keys=True))
    else:
        print(f"Error: {error.detail}", file=sys.stderr)
    return error.exit_code


def run(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    json_requested = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        configure_logging()
        logger.error(f"❌ {e.detail}")
        return _emit_error(e, json_requested)

    configure_logging(args.verbose)
    flags = {key: value for key, value in vars(args).items() if key not in META_ARGS}
    try:
        cfg = resolve_run_config(args.command, flags, args.config_path)
        logger.info(f"🚀 moodcast {cfg.command} started")
        result = args.handler(cfg)
        write_manifest(cfg.out, cfg.command, cfg.parameters(), result.inputs, result.outputs)
    except MoodcastError as e:
        logger.error(f"❌ {type(e).__name__}: {e.detail}")
        return _emit_error(e, json_requested)
    except Exception as e:
        logger.exception(f"❌ Unexpected failure: {e}")
        return _emit_error(MoodcastError(f"unexpected failure: {e}"), json_requested)

    if cfg.json_output:
        print(json.dumps(result.payload, indent=2, sort_keys=True))
    else:
        sys.stdout.write(result.text)
    logger.info(f"✅ moodcast {cfg.command} completed")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
