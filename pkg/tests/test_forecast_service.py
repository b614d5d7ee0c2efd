# tests/test_forecast_service.py
from datetime import date

import numpy as np
import pandas as pd
import pytest

from app.core.exceptions import InsufficientDataError, NumericalError
from app.models.forecast_models import EvalReport, InputSpec, SpecResult
from app.models.sofnn_models import SofnnParams
from app.models.synth_models import GenConfig
from app.services import corpus_service, forecast_service, lexicon_service, synth_service
from app.services.econometrics_service import binomial_significance
from app.services.forecast_service import ForecastService
from app.services.mood_service import MoodService
from app.services.timeseries_service import PanelService
from tests.conftest import golden_text

SPLIT = "2008-07-01"


def params():
    return SofnnParams(delta=0.04, sigma0=0.01, k_rmse=0.05, k_d=[0.1])


class TestInputSpecs:

    def test_named_specs(self):
        assert InputSpec.named("I0").columns == ["DJIA"]
        assert InputSpec.named("IOF").columns == ["DJIA", "OF"]
        assert InputSpec.named("I1").columns == ["DJIA", "Calm"]
        assert InputSpec.named("I1_6").columns == ["DJIA", "Calm", "Happy"]
        assert InputSpec.named("I1_6").label == "I_1,6"
        assert InputSpec.named("IOF").label == "I_OF"

    @pytest.mark.parametrize("name", ["I2", "I1_1", "I1_7", "foo"])
    def test_unknown_spec(self, name):
        with pytest.raises(ValueError):
            InputSpec.named(name)


class TestDataset:

    def test_features_are_lagged_and_scaled(self, panel):
        spec = InputSpec.named("I1", n_lags=3)
        ds = forecast_service.build_dataset(panel, spec, SPLIT)
        assert forecast_service.feature_names(spec) == [
            "DJIA_t-3", "DJIA_t-2", "DJIA_t-1", "Calm_t-3", "Calm_t-2", "Calm_t-1",
        ]
        train_rows = int((panel.index < SPLIT).sum())
        assert len(ds.train_y) == train_rows - 3
        assert len(ds.test_y) == len(panel) - train_rows
        assert ds.train_X.min() >= 0.0 and ds.train_X.max() <= 1.0

        lo, hi = ds.ranges["DJIA"]
        closes = panel["DJIA"].to_numpy()
        assert (lo, hi) == (closes[:train_rows].min(), closes[:train_rows].max())
        np.testing.assert_allclose(ds.train_X[0, :3], (closes[:3] - lo) / (hi - lo))
        assert ds.train_y[0] == pytest.approx((closes[3] - lo) / (hi - lo))
        assert ds.test_previous[0] == closes[train_rows - 1]
        assert ds.test_dates[0] == panel.index[train_rows].date()

    def test_split_leaves_no_test_rows(self, panel):
        with pytest.raises(InsufficientDataError):
            forecast_service.build_dataset(panel, InputSpec.named("I0"), "2012-01-01")

    def test_split_before_panel(self, panel):
        with pytest.raises(InsufficientDataError):
            forecast_service.build_dataset(panel, InputSpec.named("I0"), "2000-01-01")

    def test_test_rows_extrapolate_beyond_training_range(self, panel):
        shifted = panel.copy()
        late = shifted.index >= SPLIT
        shifted.loc[late, "DJIA"] += 5000.0
        ds = forecast_service.build_dataset(shifted, InputSpec.named("I0", n_lags=2), SPLIT)
        lo, hi = ds.ranges["DJIA"]
        assert ds.train_X.max() <= 1.0
        assert ds.test_y.max() > 1.0
        np.testing.assert_allclose(ds.test_y * (hi - lo) + lo, ds.test_actual)
        assert ds.extrapolated > 0


class TestMetrics:

    def test_mape(self):
        assert forecast_service.mape([110.0, 95.0], [100.0, 100.0]) == pytest.approx(7.5)
        with pytest.raises(NumericalError):
            forecast_service.mape([1.0], [0.0])

    def test_direction_ties_count_as_up(self):
        hits = forecast_service.direction_hits(
            predicted=[100.0, 99.0, 102.0],
            actual=[101.0, 100.0, 98.0],
            previous=[100.0, 100.0, 100.0],
        )
        # flat prediction on an up day hits, down call on a flat day misses
        assert hits == 1
        assert forecast_service.direction_accuracy([101.0], [102.0], [100.0]) == 100.0


class TestExperiment:

    def test_report_covers_every_spec(self, panel):
        specs = [InputSpec.named(name, n_lags=2) for name in ("I0", "I1", "IOF")]
        report = forecast_service.run_experiment(panel, specs, params(), SPLIT)
        assert [row.name for row in report.rows] == ["I0", "I1", "IOF"]
        n_test = int((panel.index >= SPLIT).sum())
        assert all(row.n_test == n_test for row in report.rows)
        assert all(len(row.predictions) == n_test for row in report.rows)
        assert report.significance_spec == report.best_direction[0]
        assert report.significance.trials == n_test
        best = min(row.mape_pct for row in report.rows)
        assert [row.name for row in report.rows if row.mape_pct == best] == report.best_mape

    def test_rolling_evaluation(self, panel):
        spec = InputSpec.named("I0", n_lags=2)
        result = forecast_service.evaluate_spec(panel.iloc[:90], spec, params(), "2008-06-16", rolling=True)
        assert result.n_test == len(result.predictions)
        assert np.isfinite([row.predicted for row in result.predictions]).all()

    def test_first_rolling_step_matches_static_fit(self, panel):
        spec = InputSpec.named("I1", n_lags=2)
        static = forecast_service.evaluate_spec(panel, spec, params(), SPLIT)
        rolling = forecast_service.evaluate_spec(panel.iloc[:int((panel.index < SPLIT).sum()) + 3], spec, params(),
                                                 SPLIT, rolling=True)
        assert rolling.predictions[0].predicted == pytest.approx(static.predictions[0].predicted, rel=1e-12)
        assert rolling.n_test == 3

    def test_table_layout(self):
        def row(name, mape_pct, hits):
            spec = InputSpec.named(name)
            return SpecResult(name=name, label=spec.label, mape_pct=mape_pct, direction_pct=100.0 * hits / 15,
                              hits=hits, n_test=15, n_train=100, neurons=5, train_rmse=0.01, predictions=[])

        report = EvalReport(
            split_date=date(2008, 12, 1),
            rows=[row("IOF", 1.95, 11), row("I0", 1.94, 11), row("I1", 1.83, 13)],
            best_mape=["I1"],
            best_direction=["I1"],
            significance=binomial_significance(13, 15),
            significance_spec="I1",
        )
        assert forecast_service.render_forecast_table(report) == golden_text("forecast_table.txt")


class TestForecastService:

    def test_evaluate_matches_run_experiment(self, panel):
        specs = [InputSpec.named(name, n_lags=2) for name in ("I0", "I1")]
        report = ForecastService(params(), n_periods=2.0).evaluate(panel, specs, SPLIT)
        assert report == forecast_service.run_experiment(panel, specs, params(), SPLIT, n_periods=2.0)
        assert report.significance.n_periods == 2.0

    def test_train_without_split_uses_every_row(self, panel):
        model, log, ds = ForecastService(params()).train(panel, InputSpec.named("I0", n_lags=2))
        assert len(ds.train_y) == len(panel) - 2
        assert len(ds.test_y) == 0
        assert model.n_neurons >= 1
        assert log.epochs_run == 1


def planted_panel(seed, poms_base, of_lexicon, stopwords, tmp_path):
    """Panel built from a 200-day synthetic corpus whose closes follow Calm three trading days earlier"""
    cfg = GenConfig(seed=seed, n_days=200, tweets_per_day=100)
    ngrams = str(tmp_path / f"ngrams_{seed}.tsv")
    synth_service.write_ngrams(ngrams, synth_service.generate_ngrams(cfg, poms_base))
    gpoms = lexicon_service.build_gpoms_lexicon(poms_base, ngrams, min_weight=0.5, max_terms=964)
    tweets, latent = synth_service.generate_corpus(cfg, gpoms, of_lexicon)
    days = corpus_service.group_by_day(corpus_service.filter_mood_tweets(tweets), stopwords)
    moods = MoodService(of_lexicon, gpoms).score(days)
    prices = synth_service.generate_prices(cfg, latent)
    closes = pd.Series(prices["Close"].to_numpy(), index=pd.DatetimeIndex(prices["Date"], name="date"))
    return PanelService(60).build(moods, closes)


class TestPlantedCalmSignal:

    def test_calm_inputs_improve_direction(self, poms_base, of_lexicon, stopwords, tmp_path):
        specs = [InputSpec.named("I0", n_lags=3), InputSpec.named("I1", n_lags=3)]
        gaps = []
        for seed in range(5):
            panel = planted_panel(seed, poms_base, of_lexicon, stopwords, tmp_path)
            report = forecast_service.run_experiment(panel, specs, params(), "2008-06-02")
            i0, i1 = report.rows
            assert i1.n_test >= 70
            gaps.append(i1.direction_pct - i0.direction_pct)
        assert sum(gap >= 10.0 for gap in gaps) >= 3, gaps
