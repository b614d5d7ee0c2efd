# app/services/timeseries_service.py
import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.core.exceptions import DataError, InsufficientDataError, NumericalError, PriceFileError
from app.models.lexicon_models import DIMENSIONS
from app.models.mood_models import DailyMood
from app.services.mood_service import moods_to_frame, read_mood_csv

logger = logging.getLogger(__name__)

ZERO_STD = 1e-12
MOOD_COLUMNS = ["OF", *DIMENSIONS]
PANEL_COLUMNS = ["D", *MOOD_COLUMNS]
PRICE_HEADER = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"]


class ZScored(NamedTuple):
    series: pd.Series
    flagged: List[pd.Timestamp]


class ScaleResult(NamedTuple):
    values: np.ndarray
    fit_range: Tuple[float, float]
    outside: int


def validate_series(s: pd.Series, name: str = "series") -> pd.Series:
    if not s.index.is_monotonic_increasing or s.index.has_duplicates:
        raise DataError(f"{name}: dates must be strictly increasing")
    if not np.all(np.isfinite(s.to_numpy(dtype=float))):
        raise DataError(f"{name}: values must be finite")
    return s


def zscore_local(s: pd.Series, k: int, causal: bool = False) -> ZScored:
    """Standardise each point by the mean and sample std of its surrounding window.

    Window [t-k, t+k] by default, [t-2k, t] when causal; windows are truncated at
    the series ends. Points whose window std is below 1e-12 become 0 and are flagged.
    """
    if k < 1:
        raise ValueError(f"z-score half-width k must be >= 1, got {k}")
    if len(s) < 2:
        raise InsufficientDataError(f"z-score needs at least 2 points, got {len(s)}")
    values = s.to_numpy(dtype=float)
    n = len(values)
    out = np.zeros(n)
    flagged: List[pd.Timestamp] = []
    for t in range(n):
        if causal:
            lo, hi = max(0, t - 2 * k), t + 1
        else:
            lo, hi = max(0, t - k), min(n, t + k + 1)
        window = values[lo:hi]
        std = np.std(window, ddof=1) if len(window) > 1 else 0.0
        if std < ZERO_STD:
            flagged.append(s.index[t])
            continue
        out[t] = (values[t] - np.mean(window)) / std
    if flagged:
        logger.warning(f"⚠️ {s.name or 'series'}: {len(flagged)} zero-variance window(s) set to 0")
    return ZScored(pd.Series(out, index=s.index, name=s.name), flagged)


def index_delta(closes: pd.Series) -> pd.Series:
    """D_t = close_t - close_{t-1}, dated at the later day"""
    if len(closes) < 2:
        raise InsufficientDataError(f"index delta needs at least 2 closes, got {len(closes)}")
    return closes.diff().iloc[1:].rename("D")


def normalize_moods(moods: pd.DataFrame, k: int, causal: bool = False) -> pd.DataFrame:
    """z-score every mood column over the days on which it is defined"""
    normalized = {}
    for column in moods.columns:
        defined = moods[column].dropna()
        if len(defined) < 2:
            raise InsufficientDataError(f"mood column {column} has fewer than 2 defined days")
        normalized[column] = zscore_local(defined.rename(column), k, causal=causal).series
    return pd.DataFrame(normalized, index=moods.index)[list(moods.columns)]


def align_panel(mood: Union[List[DailyMood], pd.DataFrame], closes: pd.Series) -> pd.DataFrame:
    """Join mood rows with trading days; first close and days with any undefined mood are dropped"""
    if isinstance(mood, list):
        mood = moods_to_frame(mood)
    if mood.empty or closes.empty:
        raise InsufficientDataError("align_panel needs non-empty mood and price inputs")
    delta = index_delta(closes)
    frame = pd.DataFrame({"D": delta, "DJIA": closes.loc[delta.index]})
    panel = frame.join(mood[MOOD_COLUMNS], how="inner").dropna()
    if panel.empty:
        raise InsufficientDataError("mood dates and trading days do not intersect")
    panel.index.name = "date"
    dropped = len(mood) - len(panel)
    logger.info(f"🔗 Panel aligned: {len(panel)} trading day(s), {dropped} mood row(s) dropped")
    return panel[["D", *MOOD_COLUMNS, "DJIA"]]


def restrict_period(panel: pd.DataFrame, start: Optional[str] = None, end: Optional[str] = None) -> pd.DataFrame:
    restricted = panel
    if start:
        restricted = restricted[restricted.index >= pd.Timestamp(start)]
    if end:
        restricted = restricted[restricted.index <= pd.Timestamp(end)]
    if restricted.empty:
        raise InsufficientDataError(f"No panel rows between {start or 'start'} and {end or 'end'}")
    return restricted


def scale_unit(values: Sequence[float], fit_range: Optional[Tuple[float, float]] = None,
               clip: bool = True) -> ScaleResult:
    """Map to [0, 1]; ranges are fitted when not given.

    With an applied range, values outside it are clipped unless clip=False, in
    which case they extrapolate linearly. Either way `outside` counts them.
    """
    array = np.asarray(values, dtype=float)
    if fit_range is None:
        if array.size == 0:
            raise InsufficientDataError("cannot fit a scaling range on no values")
        lo, hi = float(np.min(array)), float(np.max(array))
        if hi == lo:
            raise NumericalError(f"cannot scale a constant column (min = max = {lo})")
    else:
        lo, hi = float(fit_range[0]), float(fit_range[1])
        if not hi > lo:
            raise ValueError(f"scaling range requires max > min, got ({lo}, {hi})")
    scaled = (array - lo) / (hi - lo)
    outside = int(np.count_nonzero((scaled < 0.0) | (scaled > 1.0)))
    if outside and clip:
        scaled = np.clip(scaled, 0.0, 1.0)
    return ScaleResult(scaled, (lo, hi), outside)


def inverse_scale_unit(scaled: Sequence[float], fit_range: Tuple[float, float]) -> np.ndarray:
    lo, hi = fit_range
    return np.asarray(scaled, dtype=float) * (hi - lo) + lo


def load_prices(path: str) -> pd.Series:
    """Read a Yahoo Finance style CSV; returns the date-indexed Close series"""
    try:
        frame = pd.read_csv(path, dtype={"Date": str})
    except FileNotFoundError:
        raise PriceFileError(f"Price file not found: {path}")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise PriceFileError(f"Cannot read price file {path}: {e}")
    missing = [column for column in ("Date", "Close") if column not in frame.columns]
    if missing:
        raise PriceFileError(f"Price file {path} lacks column(s) {', '.join(missing)}")
    try:
        dates = pd.to_datetime(frame["Date"], format="%Y-%m-%d")
    except ValueError as e:
        raise PriceFileError(f"Price file {path}: dates must be YYYY-MM-DD ({e})")
    closes = pd.Series(pd.to_numeric(frame["Close"], errors="coerce").to_numpy(), index=pd.DatetimeIndex(dates), name="Close")
    if closes.isna().any():
        raise PriceFileError(f"Price file {path}: non-numeric Close value(s)")
    closes = closes.sort_index()
    if closes.index.has_duplicates:
        raise PriceFileError(f"Price file {path}: duplicate dates")
    closes.index.name = "date"
    return validate_series(closes, name=path)


def write_panel_csv(path: str, panel: pd.DataFrame) -> None:
    out = panel[[*PANEL_COLUMNS, "DJIA"]].copy()
    out.index = out.index.strftime("%Y-%m-%d")
    out.index.name = "date"
    out.to_csv(path, float_format="%.17g", lineterminator="\n")


def read_panel_csv(path: str) -> pd.DataFrame:
    try:
        panel = pd.read_csv(path, index_col="date", parse_dates=["date"])
    except (OSError, ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Cannot read panel file {path}: {e}")
    expected = [*PANEL_COLUMNS, "DJIA"]
    if list(panel.columns) != expected:
        raise DataError(f"Panel file {path} must have header 'date,{','.join(expected)}'")
    return panel.astype(float)


class PanelService:
    """Turns daily mood scores and closing prices into the z-scored trading-day panel"""

    def __init__(self, zscore_k: int, causal: bool = False):
        if zscore_k < 1:
            raise ValueError(f"z-score half-width k must be >= 1, got {zscore_k}")
        self.zscore_k = zscore_k
        self.causal = causal

    def build(self, moods: Union[List[DailyMood], pd.DataFrame], closes: pd.Series) -> pd.DataFrame:
        frame = moods_to_frame(moods) if isinstance(moods, list) else moods
        normalized = normalize_moods(frame, self.zscore_k, causal=self.causal)
        return align_panel(normalized, closes)

    def from_files(self, mood_path: str, prices_path: str) -> pd.DataFrame:
        """Panel from a mood CSV written by score and a Yahoo-format price CSV"""
        return self.build(read_mood_csv(mood_path), load_prices(prices_path))
