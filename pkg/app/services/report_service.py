# app/services/report_service.py
import logging
import os
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

from app.core.exceptions import InsufficientDataError
from app.services.timeseries_service import MOOD_COLUMNS

logger = logging.getLogger(__name__)

# fixed ids and no creation date keep reruns byte-identical
matplotlib.rcParams["svg.hashsalt"] = "moodcast"
SVG_METADATA = {"Date": None}


def _standardize(values: pd.Series) -> pd.Series:
    std = values.std(ddof=1)
    if not std > 0:
        return values * 0.0
    return (values - values.mean()) / std


def _save(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"🖼️ Chart written to {path}")


def plot_mood_series(panel: pd.DataFrame, path: str) -> None:
    """One stacked line chart per mood series"""
    fig, axes = plt.subplots(len(MOOD_COLUMNS), 1, figsize=(10, 1.6 * len(MOOD_COLUMNS)), sharex=True)
    for ax, column in zip(axes, MOOD_COLUMNS):
        ax.plot(panel.index, panel[column], linewidth=0.9)
        ax.axhline(0.0, color="grey", linewidth=0.5)
        ax.set_ylabel(column, rotation=0, ha="right")
    axes[0].set_title("Tracking public mood states")
    axes[-1].set_xlabel("date")
    fig.tight_layout()
    _save(fig, path)


def plot_calm_vs_delta(panel: pd.DataFrame, lag: int, path: str) -> None:
    """Standardised index delta against Calm shifted forward by `lag` trading days"""
    if len(panel) <= lag + 1:
        raise InsufficientDataError(f"panel has {len(panel)} rows; cannot lag Calm by {lag}")
    delta = _standardize(panel["D"])
    calm = _standardize(panel["Calm"]).shift(lag)

    fig, (overlay, top, bottom) = plt.subplots(3, 1, figsize=(10, 7), sharex=True)
    overlay.plot(panel.index, delta, label="DJIA delta (z)", color="tab:blue", linewidth=0.9)
    overlay.plot(panel.index, calm, label=f"Calm lagged {lag} days (z)", color="tab:red", linewidth=0.9)
    overlay.legend(loc="upper left")
    overlay.set_title(f"DJIA delta vs. Calm lagged by {lag} days")
    top.bar(panel.index, delta, color="tab:blue")
    top.set_ylabel("DJIA delta")
    bottom.plot(panel.index, calm, color="tab:red", linewidth=0.9)
    bottom.set_ylabel("Calm")
    bottom.set_xlabel("date")
    fig.tight_layout()
    _save(fig, path)


def plot_djia_levels(panel: pd.DataFrame, path: str, split_date=None) -> None:
    """Daily DJIA closes; rows from split_date on are shaded as the test period"""
    if panel.empty:
        raise InsufficientDataError("panel has no rows to chart")
    fig, ax = plt.subplots(figsize=(10, 3.5))
    ax.plot(panel.index, panel["DJIA"], color="black", linewidth=0.9)
    if split_date is not None:
        split = pd.Timestamp(split_date)
        if split <= panel.index[-1]:
            ax.axvspan(max(split, panel.index[0]), panel.index[-1], color="tab:orange", alpha=0.2, label="test period")
            ax.legend(loc="upper right")
    ax.set_title("Daily Dow Jones Industrial Average closes")
    ax.set_ylabel("DJIA close")
    ax.set_xlabel("date")
    fig.tight_layout()
    _save(fig, path)


class ReportService:
    """Writes the DJIA, mood and lagged-Calm charts into one directory"""

    CHARTS = ("djia_levels.svg", "mood_series.svg", "calm_vs_delta.svg")

    def __init__(self, lag: int = 3, split_date=None):
        self.lag = lag
        self.split_date = split_date

    def render(self, panel: pd.DataFrame, directory: str) -> List[str]:
        os.makedirs(directory, exist_ok=True)
        levels, series, overlay = (os.path.join(directory, name) for name in self.CHARTS)
        plot_djia_levels(panel, levels, self.split_date)
        plot_mood_series(panel, series)
        plot_calm_vs_delta(panel, self.lag, overlay)
        return [levels, series, overlay]
