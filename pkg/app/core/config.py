# app/core/config.py
import os
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional

from dotenv import load_dotenv, dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator

from app.core.exceptions import UsageError

load_dotenv()

logger = logging.getLogger(__name__)

RESOURCES_DIR = Path(__file__).resolve().parent.parent / "resources"


def parse_lags(value) -> List[int]:
    """Parse "1..7", "1,3,5" or a list into a sorted list of positive lags"""
    if isinstance(value, (list, tuple)):
        lags = [int(v) for v in value]
    else:
        text = str(value).strip()
        if ".." in text:
            start, end = text.split("..", 1)
            lags = list(range(int(start), int(end) + 1))
        else:
            lags = [int(part) for part in text.split(",") if part.strip()]
    if not lags or any(lag < 1 for lag in lags):
        raise UsageError(f"Invalid --lags value: {value!r} (lags must be >= 1)")
    return sorted(set(lags))


def parse_float_list(value) -> List[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(part) for part in str(value).split(",") if part.strip()]


class Settings:
    # App Configuration
    APP_NAME: str = "Twitter Mood Forecast"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Reproducibility
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "42"))

    # Bundled resources (overridable per deployment)
    STOPWORDS_PATH: str = os.getenv("STOPWORDS_PATH", str(RESOURCES_DIR / "stopwords_en.txt"))
    POMS_BASE_PATH: str = os.getenv("POMS_BASE_PATH", str(RESOURCES_DIR / "poms_base.tsv"))
    OF_LEXICON_PATH: str = os.getenv("OF_LEXICON_PATH", str(RESOURCES_DIR / "of_lexicon.tsv"))

    # SOFNN defaults
    SOFNN_DELTA: float = float(os.getenv("SOFNN_DELTA", "0.04"))
    SOFNN_SIGMA0: float = float(os.getenv("SOFNN_SIGMA0", "0.01"))
    SOFNN_K_RMSE: float = float(os.getenv("SOFNN_K_RMSE", "0.05"))
    SOFNN_K_D: float = float(os.getenv("SOFNN_K_D", "0.1"))
    SOFNN_EPOCHS: int = int(os.getenv("SOFNN_EPOCHS", "1"))
    SOFNN_ROWS_PER_PARAMETER: float = float(os.getenv("SOFNN_ROWS_PER_PARAMETER", "3"))

    # Analysis defaults
    DEFAULT_LAGS: str = os.getenv("DEFAULT_LAGS", "1..7")
    DEFAULT_N_LAGS: int = int(os.getenv("DEFAULT_N_LAGS", "3"))

    # GPOMS lexicon construction
    GPOMS_MIN_WEIGHT: float = float(os.getenv("GPOMS_MIN_WEIGHT", "0.5"))
    GPOMS_MAX_TERMS: int = int(os.getenv("GPOMS_MAX_TERMS", "964"))

    @property
    def log_level(self) -> int:
        return getattr(logging, self.LOG_LEVEL.upper(), logging.INFO)


settings = Settings()


class RunConfig(BaseModel):
    """Resolved parameters of one CLI invocation"""

    command: str
    corpus: List[str] = Field(default_factory=list)
    stopwords: str = settings.STOPWORDS_PATH
    of_lexicon: str = settings.OF_LEXICON_PATH
    poms_base: str = settings.POMS_BASE_PATH
    gpoms_lexicon: Optional[str] = None
    ngrams: Optional[str] = None
    documents: Optional[str] = None
    mood: Optional[str] = None
    prices: Optional[str] = None
    panel: Optional[str] = None
    model: Optional[str] = None
    out: str = "out"

    zscore_k: Optional[int] = Field(default=None, ge=1)
    causal_zscore: bool = False
    lags: List[int] = Field(default_factory=lambda: parse_lags(settings.DEFAULT_LAGS))
    n_lags: int = Field(default=settings.DEFAULT_N_LAGS, ge=1)
    start: Optional[str] = None
    end: Optional[str] = None

    delta: float = settings.SOFNN_DELTA
    sigma0: float = settings.SOFNN_SIGMA0
    k_rmse: float = settings.SOFNN_K_RMSE
    k_d: List[float] = Field(default_factory=lambda: [settings.SOFNN_K_D])
    width_rule: Literal["nearest", "fixed"] = "fixed"
    epochs: int = settings.SOFNN_EPOCHS
    rows_per_parameter: float = settings.SOFNN_ROWS_PER_PARAMETER
    rolling: bool = False
    split_date: Optional[str] = None
    specs: List[str] = Field(default_factory=list)
    n_periods: float = Field(default=1.0, gt=0.0)

    min_weight: float = Field(default=settings.GPOMS_MIN_WEIGHT, gt=0.0, le=1.0)
    max_terms: int = Field(default=settings.GPOMS_MAX_TERMS, ge=1)
    raw_sums: bool = False

    seed: int = settings.DEFAULT_SEED
    n_days: int = 200
    tweets_per_day: int = 100
    coupling_dimension: str = "Calm"
    coupling_lag: int = 3
    coupling_strength: float = 3.0
    noise_std: float = 1.0
    lag: int = Field(default=3, ge=1)

    json_output: bool = False

    @field_validator("lags", mode="before")
    @classmethod
    def _coerce_lags(cls, value):
        return parse_lags(value)

    @field_validator("k_d", mode="before")
    @classmethod
    def _coerce_k_d(cls, value):
        return parse_float_list(value)

    @field_validator("corpus", "specs", mode="before")
    @classmethod
    def _coerce_list(cls, value):
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    def require(self, *names: str) -> None:
        """Raise a usage error naming the first missing required parameter"""
        for name in names:
            value = getattr(self, name)
            if value is None or value == []:
                flag = "--" + name.replace("_", "-")
                raise UsageError(f"Missing required parameter {flag} for '{self.command}'")

    def parameters(self) -> Dict[str, object]:
        return self.model_dump(exclude={"json_output"})


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """Read a key=value run-config file"""
    if not path:
        return {}
    if not os.path.exists(path):
        raise UsageError(f"Config file not found: {path}")
    values = {key: value for key, value in dotenv_values(path).items() if value is not None}
    unknown = sorted(set(values) - set(RunConfig.model_fields))
    if unknown:
        raise UsageError(f"Unknown keys in config file {path}: {', '.join(unknown)}")
    logger.info(f"📄 Loaded {len(values)} settings from {path}")
    return values


def resolve_run_config(command: str, flags: Dict[str, object], config_path: Optional[str] = None) -> RunConfig:
    """Merge settings, config file and CLI flags (flags win)"""
    merged: Dict[str, object] = dict(load_config_file(config_path))
    merged.update({key: value for key, value in flags.items() if value is not None})
    merged["command"] = command
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise UsageError(f"Invalid value for '{field}': {first['msg']}")
