# app/services/corpus_service.py
import json
import logging
import re
from datetime import datetime
from itertools import groupby
from typing import Iterable, List, Optional, Set, Tuple

from pydantic import ValidationError

from app.core.exceptions import CorpusFormatError
from app.models.corpus_models import DailyDocuments, IngestReport, RawTweet, RecordError

logger = logging.getLogger(__name__)

MOOD_PHRASES = ("i feel", "i am feeling", "i'm feeling", "i dont feel", "i'm", "im", "i am", "makes me")
TWEET_LENGTH_LIMIT = 140
MAX_REPORTED_ERRORS = 100

_APOSTROPHE = "['\u2019]"


def _phrase_pattern(phrase: str) -> str:
    words = [re.escape(word).replace("'", _APOSTROPHE) for word in phrase.split()]
    return r"\s+".join(words)


# longest phrases first so alternation prefers the full expression
_PHRASE_RE = re.compile(
    r"(?<!\w)(?:" + "|".join(_phrase_pattern(p) for p in sorted(MOOD_PHRASES, key=len, reverse=True)) + r")(?!\w)",
    re.IGNORECASE,
)
_URL_RE = re.compile(r"http:|www\.", re.IGNORECASE)
_NON_TOKEN_RE = re.compile(r"[^\w\s]|_")
_UNESCAPE_RE = re.compile(r"\\([tn\\])")
_UNESCAPES = {"t": "\t", "n": "\n", "\\": "\\"}


def has_url(text: str) -> bool:
    return _URL_RE.search(text) is not None


def has_mood_phrase(text: str) -> bool:
    return _PHRASE_RE.search(text) is not None


def filter_reason(text: str) -> Optional[str]:
    """Return why a tweet is dropped ("url" or "no_phrase"), None when it is kept"""
    if has_url(text):
        return "url"
    if not has_mood_phrase(text):
        return "no_phrase"
    return None


def filter_mood_tweets(tweets: Iterable[RawTweet]) -> List[RawTweet]:
    return [tweet for tweet in tweets if filter_reason(tweet.text) is None]


def normalize_text(text: str, stopwords: Set[str]) -> List[str]:
    cleaned = _NON_TOKEN_RE.sub(" ", text.lower())
    return [token for token in cleaned.split() if token not in stopwords]


def _id_key(tweet_id: str) -> Tuple[int, int, str]:
    # numeric ids order by value, others after them lexically
    return (0, int(tweet_id), "") if tweet_id.isdecimal() else (1, 0, tweet_id)


def group_by_day(tweets: Iterable[RawTweet], stopwords: Set[str]) -> List[DailyDocuments]:
    """Group tweets by GMT+0 calendar day; merge order is (date, tweet id)"""
    ordered = sorted(tweets, key=lambda tweet: (tweet.day, _id_key(tweet.id)))
    return [
        DailyDocuments(date=day, documents=[normalize_text(tweet.text, stopwords) for tweet in group])
        for day, group in groupby(ordered, key=lambda tweet: tweet.day)
    ]


def escape_text(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_text(text: str) -> str:
    return _UNESCAPE_RE.sub(lambda match: _UNESCAPES[match.group(1)], text)


def parse_timestamp(value: str) -> datetime:
    value = value.strip()
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    return datetime.fromisoformat(value)


def load_stopwords(path: str) -> Set[str]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            words = {line.strip().lower() for line in handle}
    except OSError as e:
        raise CorpusFormatError(f"Cannot read stop-word file {path}: {e}")
    return {word for word in words if word and not word.startswith("#")}


def read_tweets(path: str) -> Tuple[List[RawTweet], IngestReport]:
    """Read one tab-separated tweet file; bad records are reported and skipped"""
    tweets: List[RawTweet] = []
    report = IngestReport()
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise CorpusFormatError(f"Cannot read corpus file {path}: {e}")

    with handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            report.read += 1
            fields = line.split("\t")
            if len(fields) != 3:
                report.unparseable += 1
                _record_error(report, path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
                continue
            tweet_id, stamp, text = fields
            try:
                tweet = RawTweet(id=tweet_id, timestamp=parse_timestamp(stamp), text=unescape_text(text))
            except (ValueError, ValidationError) as e:
                report.unparseable += 1
                _record_error(report, path, line_no, _first_reason(e))
                continue
            if len(tweet.text) > TWEET_LENGTH_LIMIT:
                report.over_140 += 1
            tweets.append(tweet)
    return tweets, report


def write_tweets(path: str, tweets: Iterable[RawTweet]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for tweet in tweets:
            stamp = tweet.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ")
            handle.write(f"{tweet.id}\t{stamp}\t{escape_text(tweet.text)}\n")
            count += 1
    return count


def write_documents(path: str, days: Iterable[DailyDocuments]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for day in days:
            handle.write(json.dumps({"date": day.date.isoformat(), "documents": day.documents}) + "\n")


def read_documents(path: str) -> List[DailyDocuments]:
    days: List[DailyDocuments] = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    days.append(DailyDocuments.model_validate_json(line))
                except ValidationError as e:
                    raise CorpusFormatError(f"{path}:{line_no}: invalid daily documents record ({_first_reason(e)})")
    except OSError as e:
        raise CorpusFormatError(f"Cannot read documents file {path}: {e}")
    return days


def _record_error(report: IngestReport, path: str, line_no: int, reason: str) -> None:
    if len(report.errors) < MAX_REPORTED_ERRORS:
        report.errors.append(RecordError(file=path, line=line_no, reason=reason))


def _first_reason(error: Exception) -> str:
    if isinstance(error, ValidationError):
        first = error.errors()[0]
        return f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}"
    return str(error)


class CorpusService:

    def __init__(self, stopwords: Set[str]):
        self.stopwords = stopwords

    def ingest(self, paths: List[str]) -> Tuple[List[DailyDocuments], IngestReport]:
        """Read (possibly sharded) corpus files, filter mood statements and group by day"""
        logger.info(f"📥 Ingesting {len(paths)} corpus file(s)")
        tweets: List[RawTweet] = []
        report = IngestReport()
        for path in paths:
            shard, shard_report = read_tweets(path)
            tweets.extend(shard)
            report = report.merge(shard_report, max_errors=MAX_REPORTED_ERRORS)
            logger.info(f"✅ {path}: {shard_report.read} read, {shard_report.unparseable} unparseable")

        kept: List[RawTweet] = []
        for tweet in tweets:
            reason = filter_reason(tweet.text)
            if reason == "url":
                report.dropped_url += 1
            elif reason == "no_phrase":
                report.dropped_no_phrase += 1
            else:
                kept.append(tweet)
        report.filtered_in = len(kept)

        if report.over_140:
            logger.warning(f"⚠️ {report.over_140} tweet(s) exceed {TWEET_LENGTH_LIMIT} characters (accepted)")
        if report.unparseable:
            logger.warning(f"⚠️ {report.unparseable} record(s) skipped as unparseable")

        days = group_by_day(kept, self.stopwords)
        logger.info(f"🗓️ {report.filtered_in} mood tweets grouped into {len(days)} day(s)")
        return days, report
