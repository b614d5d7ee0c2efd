# tests/test_synth_service.py
import numpy as np
import pandas as pd
import pytest

from app.models.lexicon_models import DIMENSIONS
from app.models.synth_models import Coupling, GenConfig
from app.services import corpus_service, econometrics_service, lexicon_service, mood_service, synth_service
from app.services import timeseries_service


def gen(seed=1, n_days=60, tweets_per_day=50, strength=3.0, dimension="Calm", lag=3):
    return GenConfig(seed=seed, n_days=n_days, tweets_per_day=tweets_per_day,
                     coupling=Coupling(dimension=dimension, lag=lag, strength=strength))


def trading_panel(cfg):
    """D and the latent moods on trading days, as the panel would hold them"""
    latent = synth_service.generate_latent(cfg)
    prices = synth_service.generate_prices(cfg, latent)
    closes = pd.Series(prices["Close"].to_numpy(), index=pd.DatetimeIndex(prices["Date"]))
    delta = timeseries_service.index_delta(closes)
    return pd.concat([delta, latent.loc[delta.index]], axis=1)


class TestConfig:

    def test_short_runs_are_rejected(self):
        with pytest.raises(ValueError):
            gen(n_days=13, lag=3)

    def test_fifteen_days_have_at_most_eleven_trading_rows(self):
        cfg = gen(n_days=15)
        prices = synth_service.generate_prices(cfg, synth_service.generate_latent(cfg))
        assert len(prices) <= 11
        assert list(prices.columns) == timeseries_service.PRICE_HEADER
        assert (pd.to_datetime(prices["Date"]).dt.dayofweek < 5).all()


class TestDeterminism:

    def test_same_seed_same_files(self, base_gpoms, of_lexicon, tmp_path):
        for name in ("a", "b"):
            cfg = gen(seed=5)
            tweets, latent = synth_service.generate_corpus(cfg, base_gpoms, of_lexicon)
            corpus_service.write_tweets(str(tmp_path / f"{name}.tsv"), tweets)
            synth_service.write_prices(str(tmp_path / f"{name}.csv"), synth_service.generate_prices(cfg, latent))
        assert (tmp_path / "a.tsv").read_bytes() == (tmp_path / "b.tsv").read_bytes()
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_prices_do_not_depend_on_tweet_volume(self):
        small, large = gen(tweets_per_day=1), gen(tweets_per_day=500)
        pd.testing.assert_frame_equal(
            synth_service.generate_prices(small, synth_service.generate_latent(small)),
            synth_service.generate_prices(large, synth_service.generate_latent(large)),
        )

    def test_latent_file(self, tmp_path):
        latent = synth_service.generate_latent(gen())
        path = str(tmp_path / "latent.csv")
        synth_service.write_latent_csv(path, latent)
        pd.testing.assert_frame_equal(synth_service.read_latent_csv(path), latent, check_freq=False)

    def test_price_file_loads(self, tmp_path):
        cfg = gen()
        path = str(tmp_path / "prices.csv")
        synth_service.write_prices(path, synth_service.generate_prices(cfg, synth_service.generate_latent(cfg)))
        assert len(timeseries_service.load_prices(path)) > 0

    def test_service_writes_a_full_data_set(self, poms_base, base_gpoms, of_lexicon, tmp_path):
        run = synth_service.SynthService(gen(seed=5, n_days=20, tweets_per_day=10)).write(
            str(tmp_path / "data"), poms_base, base_gpoms, of_lexicon)
        assert [path.rsplit("/", 1)[-1] for path in run.files] == ["tweets.tsv", "latent.csv", "prices.csv", "ngrams.tsv"]
        assert run.tweets == 200
        assert run.trading_days == len(timeseries_service.load_prices(run.files[2]))
        tweets, _ = corpus_service.read_tweets(run.files[0])
        assert len(tweets) == run.tweets


class TestCorpus:

    def test_empty_corpus(self, base_gpoms, of_lexicon):
        tweets, latent = synth_service.generate_corpus(gen(tweets_per_day=0), base_gpoms, of_lexicon)
        assert tweets == []
        assert len(latent) == 60

    def test_both_filters_are_exercised(self, base_gpoms, of_lexicon, stopwords, tmp_path):
        tweets, _ = synth_service.generate_corpus(gen(), base_gpoms, of_lexicon)
        path = str(tmp_path / "tweets.tsv")
        corpus_service.write_tweets(path, tweets)
        _, report = corpus_service.CorpusService(stopwords).ingest([path])
        assert report.read == 3000
        assert report.dropped_url > 0
        assert report.dropped_no_phrase > 0
        assert report.unparseable == 0

    def test_scores_recover_latent_mood(self, base_gpoms, of_lexicon, stopwords):
        tweets, latent = synth_service.generate_corpus(gen(n_days=60, tweets_per_day=200), base_gpoms, of_lexicon)
        days = corpus_service.group_by_day(corpus_service.filter_mood_tweets(tweets), stopwords)
        moods = mood_service.moods_to_frame(mood_service.score_days(days, of_lexicon, base_gpoms))
        for dim in DIMENSIONS:
            r = np.corrcoef(moods[dim].to_numpy(), latent[dim].to_numpy())[0, 1]
            assert r > 0.8, f"{dim}: r={r:.3f}"

    def test_ngrams_expand_the_base(self, poms_base, tmp_path):
        path = str(tmp_path / "ngrams.tsv")
        synth_service.write_ngrams(path, synth_service.generate_ngrams(gen(), poms_base))
        lex = lexicon_service.build_gpoms_lexicon(poms_base, path, min_weight=0.5, max_terms=964)
        assert len(lex) == len(poms_base) + 3 * len(poms_base)
        assert [link.base_term for link in lex.entries["serene"]] == ["calm"]
        assert "today" not in lex
        assert lex.pool("Calm", 1) == ["calm", "peaceful", "relaxed", "serene"]


class TestPlantedCoupling:

    def test_lag_three_is_detected(self):
        detected = 0
        for seed in range(100):
            panel = trading_panel(gen(seed=seed, n_days=700, tweets_per_day=0))
            row, = econometrics_service.granger_bivariate(panel["D"], panel["Calm"], [3])
            detected += row.p_value < 0.01
        assert detected >= 90

    def test_null_coupling_false_positive_rate(self):
        false_positives = 0
        for seed in range(100):
            panel = trading_panel(gen(seed=seed, n_days=700, tweets_per_day=0, strength=0.0))
            row, = econometrics_service.granger_bivariate(panel["D"], panel["Calm"], [3])
            false_positives += row.p_value < 0.05
        assert false_positives <= 10

    def test_null_coupling_is_uncorrelated(self):
        small = 0
        for seed in range(5):
            panel = trading_panel(gen(seed=seed, n_days=200, tweets_per_day=0, strength=0.0))
            r = np.corrcoef(panel["D"].iloc[3:].to_numpy(), panel["Calm"].iloc[:-3].to_numpy())[0, 1]
            small += abs(r) < 0.2
        assert small >= 3

    def test_coupling_can_target_any_dimension(self):
        panel = trading_panel(gen(seed=3, n_days=400, tweets_per_day=0, dimension="Happy", lag=2))
        happy, = econometrics_service.granger_bivariate(panel["D"], panel["Happy"], [2])
        assert happy.p_value < 0.01
