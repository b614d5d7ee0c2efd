# app/services/mood_service.py
import logging
from typing import Dict, List, Tuple

import pandas as pd

from app.core.exceptions import DataError, NoNegativeEvidence
from app.models.corpus_models import DailyDocuments
from app.models.lexicon_models import DIMENSIONS, GpomsLexicon, OfLexicon
from app.models.mood_models import DailyMood
from app.services.corpus_service import read_documents

logger = logging.getLogger(__name__)

MOOD_CSV_COLUMNS = ["date", "of_ratio"] + [dim.lower() for dim in DIMENSIONS]


def score_of_day(docs: DailyDocuments, lex: OfLexicon) -> float:
    """Ratio of positive to negative term occurrences over the day's documents"""
    if not len(lex):
        raise ValueError("OF lexicon is empty")
    positive = negative = 0
    for doc in docs.documents:
        for token in doc:
            if token in lex.positive:
                positive += 1
            elif token in lex.negative:
                negative += 1
    if negative == 0:
        raise NoNegativeEvidence(docs.date.isoformat())
    return positive / negative


def score_gpoms_day(docs: DailyDocuments, lex: GpomsLexicon, raw_sums: bool = False) -> Tuple[Dict[str, float], bool]:
    """Weighted mood sums per dimension, divided by matched occurrences unless raw_sums.

    Returns the six-dimension vector and a flag set when nothing matched that day.
    """
    if not len(lex):
        raise ValueError("GPOMS lexicon is empty")
    sums = {dim: 0.0 for dim in DIMENSIONS}
    matched = 0
    for doc in docs.documents:
        for token in doc:
            links = lex.entries.get(token)
            if not links:
                continue
            matched += 1
            for link in links:
                sums[link.dimension] += link.weight * link.polarity
    if matched == 0:
        return sums, True
    if raw_sums:
        return sums, False
    return {dim: value / matched for dim, value in sums.items()}, False


def score_days(days: List[DailyDocuments], of_lex: OfLexicon, gpoms_lex: GpomsLexicon,
               raw_sums: bool = False) -> List[DailyMood]:
    moods: List[DailyMood] = []
    missing_of: List[str] = []
    zero_match: List[str] = []
    for day in days:
        try:
            of_ratio = score_of_day(day, of_lex)
        except NoNegativeEvidence:
            of_ratio = None
            missing_of.append(day.date.isoformat())
        gpoms, flagged = score_gpoms_day(day, gpoms_lex, raw_sums=raw_sums)
        if flagged:
            zero_match.append(day.date.isoformat())
        moods.append(DailyMood(date=day.date, of_ratio=of_ratio, gpoms=gpoms, zero_match=flagged))

    if missing_of:
        logger.warning(f"⚠️ {len(missing_of)} day(s) without negative OF evidence left empty: {', '.join(missing_of[:5])}")
    if zero_match:
        logger.warning(f"⚠️ {len(zero_match)} day(s) with no GPOMS match scored as zero: {', '.join(zero_match[:5])}")
    logger.info(f"📈 Scored {len(moods)} day(s) ({'raw sums' if raw_sums else 'volume normalized'})")
    return moods


def moods_to_frame(moods: List[DailyMood]) -> pd.DataFrame:
    """Date-indexed frame with columns OF, Calm .. Happy"""
    records = [{"date": pd.Timestamp(m.date), "OF": m.of_ratio, **m.gpoms} for m in moods]
    frame = pd.DataFrame.from_records(records, columns=["date", "OF", *DIMENSIONS])
    return frame.set_index("date").astype(float)


def write_mood_csv(path: str, moods: List[DailyMood]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(MOOD_CSV_COLUMNS) + "\n")
        for mood in moods:
            of_field = "" if mood.of_ratio is None else repr(mood.of_ratio)
            values = [repr(mood.gpoms[dim]) for dim in DIMENSIONS]
            handle.write(",".join([mood.date.isoformat(), of_field, *values]) + "\n")


def read_mood_csv(path: str) -> List[DailyMood]:
    try:
        frame = pd.read_csv(path, dtype={"date": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Cannot read mood file {path}: {e}")
    if list(frame.columns) != MOOD_CSV_COLUMNS:
        raise DataError(f"Mood file {path} must have header '{','.join(MOOD_CSV_COLUMNS)}'")
    moods: List[DailyMood] = []
    for row in frame.itertuples(index=False):
        try:
            day = pd.Timestamp(row.date).date()
        except ValueError:
            raise DataError(f"Mood file {path}: unparseable date {row.date!r}")
        of_ratio = None if pd.isna(row.of_ratio) else float(row.of_ratio)
        gpoms = {dim: float(getattr(row, dim.lower())) for dim in DIMENSIONS}
        moods.append(DailyMood(date=day, of_ratio=of_ratio, gpoms=gpoms))
    return moods


class MoodService:

    def __init__(self, of_lexicon: OfLexicon, gpoms: GpomsLexicon, raw_sums: bool = False):
        self.of_lexicon = of_lexicon
        self.gpoms = gpoms
        self.raw_sums = raw_sums

    def score(self, days: List[DailyDocuments]) -> List[DailyMood]:
        """OF ratio and GPOMS vector for every day, in input order"""
        return score_days(days, self.of_lexicon, self.gpoms, raw_sums=self.raw_sums)

    def score_file(self, documents_path: str, mood_path: str) -> List[DailyMood]:
        """Score a documents file written by ingest and save the mood CSV"""
        moods = self.score(read_documents(documents_path))
        write_mood_csv(mood_path, moods)
        return moods
