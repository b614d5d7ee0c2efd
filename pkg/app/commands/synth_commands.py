# app/commands/synth_commands.py
import logging

from pydantic import ValidationError

from app.commands.base import CommandResult, add_command, add_flag, optional
from app.core.config import RunConfig
from app.core.exceptions import UsageError
from app.models.synth_models import Coupling, GenConfig
from app.services import lexicon_service, synth_service

logger = logging.getLogger(__name__)


def gen_config(cfg: RunConfig) -> GenConfig:
    try:
        coupling = Coupling(dimension=cfg.coupling_dimension.capitalize(), lag=cfg.coupling_lag,
                            strength=cfg.coupling_strength)
        return GenConfig(seed=cfg.seed, n_days=cfg.n_days, tweets_per_day=cfg.tweets_per_day,
                         coupling=coupling, noise_std=cfg.noise_std)
    except ValidationError as e:
        raise UsageError(f"Invalid generator setting: {e.errors()[0]['msg']}")


def synth(cfg: RunConfig) -> CommandResult:
    gen = gen_config(cfg)
    lexicons = lexicon_service.LexiconService(cfg.poms_base, cfg.of_lexicon)
    run = synth_service.SynthService(gen).write(cfg.out, lexicons.base, lexicons.gpoms(cfg.gpoms_lexicon),
                                                lexicons.of_lexicon)
    payload = {
        "seed": gen.seed,
        "days": gen.n_days,
        "tweets": run.tweets,
        "trading_days": run.trading_days,
        "coupling": gen.coupling.model_dump(),
        "files": run.files,
    }
    text = (f"Synthetic corpus: {run.tweets} tweets over {gen.n_days} days, {run.trading_days} trading days, "
            f"{gen.coupling.dimension} coupled at lag {gen.coupling.lag}\n")
    return CommandResult(payload=payload, text=text,
                         inputs=[cfg.poms_base, cfg.of_lexicon, *optional(cfg.gpoms_lexicon)],
                         outputs=run.files)


def register(subparsers) -> None:
    parser = add_command(subparsers, "synth", synth, "generate a seeded tweet corpus, n-gram counts and prices")
    add_flag(parser, "--seed", type=int)
    add_flag(parser, "--n-days", dest="n_days", type=int)
    add_flag(parser, "--tweets-per-day", dest="tweets_per_day", type=int)
    add_flag(parser, "--coupling-dimension", dest="coupling_dimension", help="mood dimension driving prices")
    add_flag(parser, "--coupling-lag", dest="coupling_lag", type=int, help="coupling lag in trading days")
    add_flag(parser, "--coupling-strength", dest="coupling_strength", type=float)
    add_flag(parser, "--noise-std", dest="noise_std", type=float)
    add_flag(parser, "--poms-base", dest="poms_base")
    add_flag(parser, "--of-lexicon", dest="of_lexicon")
    add_flag(parser, "--gpoms-lexicon", dest="gpoms_lexicon")
