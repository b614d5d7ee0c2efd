# app/services/forecast_service.py
import logging
from datetime import date
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
import pandas as pd

from app.core.exceptions import InsufficientDataError, NumericalError
from app.models.forecast_models import EvalReport, InputSpec, PredictionRow, SpecResult
from app.models.sofnn_models import SofnnParams
from app.services import sofnn_service
from app.services.econometrics_service import binomial_significance, render_binomial
from app.services.timeseries_service import inverse_scale_unit, scale_unit

logger = logging.getLogger(__name__)


class Dataset(NamedTuple):
    train_X: np.ndarray
    train_y: np.ndarray
    test_X: np.ndarray
    test_y: np.ndarray
    ranges: Dict[str, Tuple[float, float]]
    test_dates: List[date]
    test_actual: np.ndarray
    test_previous: np.ndarray
    extrapolated: int


def feature_names(spec: InputSpec) -> List[str]:
    return [f"{column}_t-{lag}" for column in spec.columns for lag in range(spec.n_lags, 0, -1)]


def _lagged(values: np.ndarray, n_lags: int) -> np.ndarray:
    """Row t holds values[t-n_lags] .. values[t-1], for t = n_lags .. len - 1"""
    T = len(values)
    return np.column_stack([values[n_lags - lag:T - lag] for lag in range(n_lags, 0, -1)])


def build_dataset(panel: pd.DataFrame, spec: InputSpec, split_date, require_test: bool = True) -> Dataset:
    """Lagged samples scaled by ranges fitted on the rows before split_date.

    Training rows lie in [0, 1]; test rows reuse the training ranges without
    clipping, so values beyond them extrapolate.
    """
    split = pd.Timestamp(split_date)
    if len(panel) <= spec.n_lags:
        raise InsufficientDataError(f"{spec.name}: panel has {len(panel)} rows, need more than {spec.n_lags}")
    fit_rows = panel.index < split
    if not fit_rows.any():
        raise InsufficientDataError(f"{spec.name}: no panel rows before the split date {split.date()}")

    ranges: Dict[str, Tuple[float, float]] = {}
    blocks = []
    extrapolated = 0
    for column in spec.columns:
        values = panel[column].to_numpy(dtype=float)
        ranges[column] = scale_unit(values[fit_rows]).fit_range
        scaled = scale_unit(values, ranges[column], clip=False)
        extrapolated += scaled.outside
        blocks.append(_lagged(scaled.values, spec.n_lags))
        if column == "DJIA":
            target = scaled.values[spec.n_lags:]

    X = np.column_stack(blocks)
    dates = panel.index[spec.n_lags:]
    train = dates < split
    test = ~train
    if not train.any() or (require_test and not test.any()):
        raise InsufficientDataError(
            f"{spec.name}: split at {split.date()} leaves {int(train.sum())} training and {int(test.sum())} test samples"
        )
    if extrapolated:
        logger.info(f"ℹ️ {spec.name}: {extrapolated} test value(s) outside the training range")

    closes = panel["DJIA"].to_numpy(dtype=float)
    positions = np.arange(spec.n_lags, len(panel))[test]
    return Dataset(
        train_X=X[train], train_y=target[train],
        test_X=X[test], test_y=target[test],
        ranges=ranges,
        test_dates=[d.date() for d in dates[test]],
        test_actual=closes[positions],
        test_previous=closes[positions - 1],
        extrapolated=extrapolated,
    )


def mape(predicted: Sequence[float], actual: Sequence[float]) -> float:
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if len(predicted) != len(actual) or len(actual) == 0:
        raise ValueError("mape needs two non-empty vectors of equal length")
    if np.any(actual == 0):
        raise NumericalError("MAPE is undefined when an actual value is zero")
    return float(100.0 * np.mean(np.abs(predicted - actual) / np.abs(actual)))


def direction_hits(predicted: Sequence[float], actual: Sequence[float], previous: Sequence[float]) -> int:
    """Days on which the predicted move and the actual move from the previous close agree; no move counts as up"""
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    previous = np.asarray(previous, dtype=float)
    if not len(predicted) == len(actual) == len(previous) or len(actual) == 0:
        raise ValueError("direction accuracy needs three non-empty vectors of equal length")
    return int(np.count_nonzero((predicted - previous >= 0) == (actual - previous >= 0)))


def direction_accuracy(predicted: Sequence[float], actual: Sequence[float], previous: Sequence[float]) -> float:
    return 100.0 * direction_hits(predicted, actual, previous) / len(actual)


def _predict_rolling(panel: pd.DataFrame, spec: InputSpec, params: SofnnParams,
                     ds: Dataset) -> Tuple[np.ndarray, sofnn_service.SofnnModel, float]:
    """One-step-ahead closes; each test day retrains on, and rescales by, every earlier row"""
    predictions = np.empty(len(ds.test_dates))
    for i, day in enumerate(ds.test_dates):
        stamp = pd.Timestamp(day)
        step = build_dataset(panel[panel.index <= stamp], spec, stamp)
        model, log = sofnn_service.train(step.train_X, step.train_y, params)
        predictions[i] = inverse_scale_unit(model.predict_many(step.test_X), step.ranges["DJIA"])[0]
    return predictions, model, log.final_rmse


def evaluate_spec(panel: pd.DataFrame, spec: InputSpec, params: SofnnParams, split_date,
                  rolling: bool = False) -> SpecResult:
    ds = build_dataset(panel, spec, split_date)
    if rolling:
        predicted, model, train_rmse = _predict_rolling(panel, spec, params, ds)
    else:
        model, log = sofnn_service.train(ds.train_X, ds.train_y, params)
        predicted = inverse_scale_unit(model.predict_many(ds.test_X), ds.ranges["DJIA"])
        train_rmse = log.final_rmse
    if not np.all(np.isfinite(predicted)):
        raise NumericalError(f"{spec.name}: model produced non-finite predictions")

    hits = direction_hits(predicted, ds.test_actual, ds.test_previous)
    n_test = len(ds.test_y)
    result = SpecResult(
        name=spec.name,
        label=spec.label,
        mape_pct=mape(predicted, ds.test_actual),
        direction_pct=100.0 * hits / n_test,
        hits=hits,
        n_test=n_test,
        n_train=len(ds.train_y),
        neurons=model.n_neurons,
        train_rmse=train_rmse,
        predictions=[
            PredictionRow(date=d, predicted=float(p), actual=float(a), previous=float(b))
            for d, p, a, b in zip(ds.test_dates, predicted, ds.test_actual, ds.test_previous)
        ],
    )
    logger.info(f"📊 {spec.name}: MAPE {result.mape_pct:.2f}%, direction {result.direction_pct:.1f}% "
                f"({hits}/{n_test}), {result.neurons} neurons")
    return result


def run_experiment(panel: pd.DataFrame, specs: List[InputSpec], params: SofnnParams, split_date,
                   rolling: bool = False, n_periods: float = 1.0) -> EvalReport:
    """Train and score every input spec with the same SOFNN parameters"""
    if not specs:
        raise ValueError("at least one input spec is required")
    logger.info(f"🚀 Evaluating {len(specs)} input spec(s), split at {split_date}{' (rolling)' if rolling else ''}")
    rows = [evaluate_spec(panel, spec, params, split_date, rolling=rolling) for spec in specs]

    lowest = min(row.mape_pct for row in rows)
    highest = max(row.direction_pct for row in rows)
    best_mape = [row.name for row in rows if row.mape_pct == lowest]
    best_direction = [row.name for row in rows if row.direction_pct == highest]
    winner = next(row for row in rows if row.name == best_direction[0])
    significance = binomial_significance(winner.hits, winner.n_test, 0.5, n_periods)
    return EvalReport(
        split_date=pd.Timestamp(split_date).date(),
        rows=rows,
        best_mape=best_mape,
        best_direction=best_direction,
        significance=significance,
        significance_spec=winner.name,
    )


def render_forecast_table(report: EvalReport) -> str:
    def cell(text: str, best: bool) -> str:
        return f"{text}{'*' if best else ' '}".rjust(9)

    lines = [
        "DJIA DAILY PREDICTION USING SOFNN",
        f"{'Evaluation':<14}" + "".join(f"{row.label:>8} " for row in report.rows).rstrip(),
        (f"{'MAPE (%)':<14}" + "".join(cell(f"{row.mape_pct:.2f}", row.name in report.best_mape)
                                       for row in report.rows)).rstrip(),
        (f"{'Direction (%)':<14}" + "".join(cell(f"{row.direction_pct:.1f}", row.name in report.best_direction)
                                            for row in report.rows)).rstrip(),
    ]
    text = "\n".join(lines) + "\n"
    if report.significance is not None:
        text += f"\nBest direction: {report.significance_spec}\n" + render_binomial(report.significance)
    return text


class ForecastService:
    """Trains and scores SOFNN forecasters that share one parameter set"""

    def __init__(self, params: SofnnParams, rolling: bool = False, n_periods: float = 1.0):
        self.params = params
        self.rolling = rolling
        self.n_periods = n_periods

    def train(self, panel: pd.DataFrame, spec: InputSpec, split_date=None):
        """Fit on the rows before split_date (every row when omitted); returns model, log and dataset"""
        if split_date is None:
            split_date = panel.index[-1] + pd.Timedelta(days=1)
        ds = build_dataset(panel, spec, split_date, require_test=False)
        model, log = sofnn_service.train(ds.train_X, ds.train_y, self.params)
        return model, log, ds

    def evaluate(self, panel: pd.DataFrame, specs: List[InputSpec], split_date) -> EvalReport:
        return run_experiment(panel, specs, self.params, split_date, rolling=self.rolling, n_periods=self.n_periods)
