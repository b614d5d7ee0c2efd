# app/commands/corpus_commands.py
import logging

from app.commands.base import CommandResult, add_command, add_flag, optional, write_json, output_path
from app.core.config import RunConfig
from app.models.lexicon_models import DIMENSIONS
from app.services import corpus_service, lexicon_service, mood_service

logger = logging.getLogger(__name__)


def ingest(cfg: RunConfig) -> CommandResult:
    cfg.require("corpus")
    stopwords = corpus_service.load_stopwords(cfg.stopwords)
    days, report = corpus_service.CorpusService(stopwords).ingest(cfg.corpus)
    documents = output_path(cfg, "documents.jsonl")
    corpus_service.write_documents(documents, days)
    payload = {"days": len(days), "report": report.model_dump()}
    report_path = write_json(cfg, "ingest_report.json", payload)
    counts = report.counts()
    text = "\n".join(f"{key:<18}{value:>10}" for key, value in counts.items()) + f"\n{'days':<18}{len(days):>10}\n"
    return CommandResult(payload=payload, text=text, inputs=[*cfg.corpus, cfg.stopwords],
                         outputs=[documents, report_path])


def build_lexicon(cfg: RunConfig) -> CommandResult:
    cfg.require("ngrams")
    lexicons = lexicon_service.LexiconService(cfg.poms_base, cfg.of_lexicon)
    lexicon = lexicons.build(cfg.ngrams, cfg.min_weight, cfg.max_terms)
    base = lexicons.base
    path = output_path(cfg, "gpoms_lexicon.json")
    lexicon_service.save_gpoms_lexicon(lexicon, path)
    per_dimension = {dim: sum(1 for links in lexicon.entries.values() if any(l.dimension == dim for l in links))
                     for dim in DIMENSIONS}
    payload = {"terms": len(lexicon), "base_terms": len(base), "per_dimension": per_dimension, "path": path}
    text = f"GPOMS lexicon: {len(lexicon)} terms ({len(base)} base)\n" + "".join(
        f"  {dim:<6}{count:>6}\n" for dim, count in per_dimension.items())
    return CommandResult(payload=payload, text=text, inputs=[cfg.poms_base, cfg.ngrams], outputs=[path])


def score(cfg: RunConfig) -> CommandResult:
    cfg.require("documents")
    lexicons = lexicon_service.LexiconService(cfg.poms_base, cfg.of_lexicon)
    scorer = mood_service.MoodService(lexicons.of_lexicon, lexicons.gpoms(cfg.gpoms_lexicon), raw_sums=cfg.raw_sums)
    path = output_path(cfg, "mood.csv")
    moods = scorer.score_file(cfg.documents, path)
    payload = {
        "days": len(moods),
        "missing_of": [m.date.isoformat() for m in moods if m.of_ratio is None],
        "zero_match": [m.date.isoformat() for m in moods if m.zero_match],
        "path": path,
    }
    text = (f"Scored {len(moods)} day(s): {len(payload['missing_of'])} without OF ratio, "
            f"{len(payload['zero_match'])} without GPOMS match\n")
    inputs = [cfg.documents, cfg.of_lexicon, *optional(cfg.gpoms_lexicon)]
    if not cfg.gpoms_lexicon:
        inputs.append(cfg.poms_base)
    return CommandResult(payload=payload, text=text, inputs=inputs, outputs=[path])


def register(subparsers) -> None:
    parser = add_command(subparsers, "ingest", ingest, "filter mood tweets and group them by day")
    add_flag(parser, "--corpus", nargs="+", help="tweet file(s): id<TAB>timestamp<TAB>text")
    add_flag(parser, "--stopwords", help="stop-word list (default: bundled English list)")

    parser = add_command(subparsers, "build-lexicon", build_lexicon, "expand the POMS base terms via n-gram co-occurrence")
    add_flag(parser, "--ngrams", help="n-gram count file: tokens<TAB>count")
    add_flag(parser, "--poms-base", dest="poms_base", help="base term file: term<TAB>dimension<TAB>+1|-1")
    add_flag(parser, "--min-weight", dest="min_weight", type=float)
    add_flag(parser, "--max-terms", dest="max_terms", type=int)

    parser = add_command(subparsers, "score", score, "score daily OF ratio and GPOMS mood vectors")
    add_flag(parser, "--documents", help="daily documents from ingest")
    add_flag(parser, "--of-lexicon", dest="of_lexicon")
    add_flag(parser, "--gpoms-lexicon", dest="gpoms_lexicon")
    add_flag(parser, "--poms-base", dest="poms_base")
    add_flag(parser, "--raw-sums", dest="raw_sums", action="store_true", help="disable per-day volume normalization")
