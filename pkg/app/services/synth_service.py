# app/services/synth_service.py
import logging
import os
from datetime import datetime, time, timedelta, timezone
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import expit

from app.models.corpus_models import RawTweet
from app.models.lexicon_models import DIMENSIONS, GpomsLexicon, OfLexicon, PomsBase
from app.models.synth_models import GenConfig
from app.services.corpus_service import MOOD_PHRASES, write_tweets

logger = logging.getLogger(__name__)

# independent random streams so that e.g. prices do not depend on tweet volume
LATENT_STREAM, NGRAM_STREAM, CORPUS_STREAM, PRICE_STREAM = range(4)
DIMS_PER_TWEET = 3

DEFAULT_ASSOCIATES: Dict[str, Tuple[str, ...]] = {
    "calm": ("serene", "relaxed", "peaceful"),
    "anxious": ("nervous", "worried", "uneasy"),
    "alert": ("attentive", "focused", "awake"),
    "confused": ("puzzled", "bewildered", "muddled"),
    "sure": ("confident", "certain", "assured"),
    "unsure": ("doubtful", "hesitant", "uncertain"),
    "energetic": ("lively", "vigorous", "active"),
    "tired": ("exhausted", "sleepy", "weary"),
    "kind": ("friendly", "caring", "generous"),
    "hostile": ("angry", "aggressive", "bitter"),
    "happy": ("joyful", "cheerful", "delighted"),
    "sad": ("gloomy", "miserable", "depressed"),
}
FILLERS = ("today", "tonight", "morning", "weekend", "coffee", "people", "life", "work", "really", "honestly")


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def calendar_dates(cfg: GenConfig) -> pd.DatetimeIndex:
    return pd.date_range(pd.Timestamp(cfg.start_date), periods=cfg.n_days, freq="D", name="date")


def generate_latent(cfg: GenConfig) -> pd.DataFrame:
    """Six stationary AR(1) mood series with unit variance, one row per calendar day"""
    rng = _rng(cfg.seed, LATENT_STREAM)
    shocks = rng.standard_normal((cfg.n_days, len(DIMENSIONS))) * np.sqrt(1.0 - cfg.ar_coef ** 2)
    values = np.empty_like(shocks)
    values[0] = rng.standard_normal(len(DIMENSIONS))
    for t in range(1, cfg.n_days):
        values[t] = cfg.ar_coef * values[t - 1] + shocks[t]
    return pd.DataFrame(values, index=calendar_dates(cfg), columns=list(DIMENSIONS))


def generate_ngrams(cfg: GenConfig, base: PomsBase,
                    associates: Optional[Dict[str, Sequence[str]]] = None) -> List[Tuple[Tuple[str, ...], int]]:
    """n-gram counts where each associate co-occurs with one base term and fillers with all of them"""
    associates = DEFAULT_ASSOCIATES if associates is None else associates
    rng = _rng(cfg.seed, NGRAM_STREAM)
    ngrams: List[Tuple[Tuple[str, ...], int]] = []
    for entry in base.entries:
        for word in associates.get(entry.term, ()):
            ngrams.append(((word, entry.term, "feel"), int(rng.integers(50, 500))))
            ngrams.append(((word, "and", entry.term), int(rng.integers(10, 100))))
            # rarer appearances away from the base term keep weights below one
            first, second = rng.choice(len(FILLERS), size=2, replace=False)
            ngrams.append(((word, FILLERS[first], FILLERS[second]), int(rng.integers(1, 10))))
        for filler in FILLERS:
            ngrams.append(((filler, entry.term, "feel"), int(rng.integers(10, 100))))
    return ngrams


def write_ngrams(path: str, ngrams: Sequence[Tuple[Tuple[str, ...], int]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for tokens, count in ngrams:
            handle.write(f"{' '.join(tokens)}\t{count}\n")


def _timestamp(day: pd.Timestamp, seconds: int) -> datetime:
    midnight = datetime.combine(day.date(), time(0, 0), tzinfo=timezone.utc)
    return midnight + timedelta(seconds=seconds)


def generate_corpus(cfg: GenConfig, gpoms: GpomsLexicon, of_lexicon: OfLexicon,
                    latent: Optional[pd.DataFrame] = None) -> Tuple[List[RawTweet], pd.DataFrame]:
    """Mood statements whose term polarities follow the latent mood of their day.

    Every tweet mentions three random dimensions; each term is positive with
    probability sigmoid(latent value). The OF term follows the Happy dimension.
    A share of URL spam and phrase-less chatter is mixed in.
    """
    latent = generate_latent(cfg) if latent is None else latent
    rng = _rng(cfg.seed, CORPUS_STREAM)
    pools = {(dim, pol): gpoms.pool(dim, pol) for dim in DIMENSIONS for pol in (1, -1)}
    empty = sorted(f"{dim}{'+' if pol > 0 else '-'}" for (dim, pol), pool in pools.items() if not pool)
    if empty:
        raise ValueError(f"GPOMS lexicon has no single-dimension terms for {', '.join(empty)}")
    of_pools = {1: sorted(of_lexicon.positive), -1: sorted(of_lexicon.negative)}

    def pick(words: Sequence[str]) -> str:
        return words[int(rng.integers(len(words)))]

    tweets: List[RawTweet] = []
    for day_index, (day, mood) in enumerate(latent.iterrows()):
        happy_p = float(expit(mood["Happy"]))
        for j in range(cfg.tweets_per_day):
            tweet_id = f"{day_index:05d}{j:05d}"
            stamp = _timestamp(day, int(rng.integers(0, 86400)))
            kind = rng.random()
            of_term = pick(of_pools[1] if rng.random() < happy_p else of_pools[-1])
            if kind < cfg.spam_share:
                text = f"{pick(MOOD_PHRASES)} {of_term} deals at http://example.com/{tweet_id}"
            elif kind < cfg.spam_share + cfg.chatter_share:
                text = f"{pick(FILLERS)} {pick(FILLERS)} {of_term}"
            else:
                dims = rng.choice(len(DIMENSIONS), size=DIMS_PER_TWEET, replace=False)
                words = []
                for d in sorted(dims):
                    dim = DIMENSIONS[d]
                    polarity = 1 if rng.random() < expit(mood[dim]) else -1
                    words.append(pick(pools[(dim, polarity)]))
                text = f"{pick(MOOD_PHRASES)} {' '.join(words)} {pick(FILLERS)} {of_term}"
            tweets.append(RawTweet(id=tweet_id, timestamp=stamp, text=text))
    logger.info(f"🧪 Generated {len(tweets)} tweets over {len(latent)} days (seed {cfg.seed})")
    return tweets, latent


def generate_prices(cfg: GenConfig, latent: pd.DataFrame) -> pd.DataFrame:
    """Yahoo-format weekday prices; the close moves with the coupled latent mood `lag` trading days earlier"""
    rng = _rng(cfg.seed, PRICE_STREAM)
    trading = latent[latent.index.dayofweek < 5]
    driver = trading[cfg.coupling.dimension].to_numpy()
    lag = cfg.coupling.lag
    noise = rng.normal(0.0, cfg.noise_std, size=len(trading))
    closes = np.empty(len(trading))
    previous = cfg.start_close
    for t in range(len(trading)):
        coupled = cfg.coupling.strength * driver[t - lag] if t >= lag else 0.0
        closes[t] = previous + coupled + noise[t]
        previous = closes[t]
    opens = np.concatenate([[cfg.start_close], closes[:-1]])
    spread = np.abs(rng.normal(0.0, cfg.noise_std, size=len(trading)))
    frame = pd.DataFrame({
        "Date": trading.index.strftime("%Y-%m-%d"),
        "Open": opens,
        "High": np.maximum(opens, closes) + spread,
        "Low": np.minimum(opens, closes) - spread,
        "Close": closes,
        "Adj Close": closes,
        "Volume": rng.integers(1_000_000, 5_000_000, size=len(trading)),
    })
    logger.info(f"💹 Generated {len(frame)} trading days, {cfg.coupling.dimension} coupled at lag {lag} "
                f"with strength {cfg.coupling.strength}")
    return frame


def write_prices(path: str, frame: pd.DataFrame) -> None:
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")


def write_latent_csv(path: str, latent: pd.DataFrame) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(["date", *(dim.lower() for dim in DIMENSIONS)]) + "\n")
        for day, row in latent.iterrows():
            handle.write(",".join([day.strftime("%Y-%m-%d"), *(repr(float(v)) for v in row)]) + "\n")


def read_latent_csv(path: str) -> pd.DataFrame:
    frame = pd.read_csv(path, index_col="date", parse_dates=["date"])
    frame.columns = [column.capitalize() for column in frame.columns]
    return frame


class SynthRun(NamedTuple):
    tweets: int
    trading_days: int
    files: List[str]


class SynthService:
    """Writes one seeded synthetic data set: tweets, latent moods, prices and n-gram counts"""

    def __init__(self, cfg: GenConfig):
        self.cfg = cfg

    def write(self, directory: str, base: PomsBase, gpoms: GpomsLexicon, of_lexicon: OfLexicon) -> SynthRun:
        os.makedirs(directory, exist_ok=True)
        tweets_path, latent_path, prices_path, ngrams_path = (
            os.path.join(directory, name) for name in ("tweets.tsv", "latent.csv", "prices.csv", "ngrams.tsv"))
        write_ngrams(ngrams_path, generate_ngrams(self.cfg, base))
        tweets, latent = generate_corpus(self.cfg, gpoms, of_lexicon)
        write_tweets(tweets_path, tweets)
        write_latent_csv(latent_path, latent)
        prices = generate_prices(self.cfg, latent)
        write_prices(prices_path, prices)
        return SynthRun(len(tweets), len(prices), [tweets_path, latent_path, prices_path, ngrams_path])
