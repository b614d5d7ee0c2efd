from datetime import date
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from app.models.econometrics_models import BinomialSignificance
from app.models.lexicon_models import DIMENSIONS

SPEC_NAMES = ("IOF", "I0", "I1", "I1_2", "I1_3", "I1_4", "I1_5", "I1_6")
MOOD_COLUMNS = DIMENSIONS + ("OF",)


class InputSpec(BaseModel):
    name: str
    columns: List[str]
    n_lags: int = Field(default=3, ge=1)

    @model_validator(mode="after")
    def _djia_first(self):
        if not self.columns or self.columns[0] != "DJIA":
            raise ValueError("DJIA must be the first input column")
        extra = [c for c in self.columns[1:] if c not in MOOD_COLUMNS]
        if extra:
            raise ValueError(f"unknown mood columns {extra}")
        return self

    @classmethod
    def named(cls, name: str, n_lags: int = 3) -> "InputSpec":
        if name == "I0":
            columns = ["DJIA"]
        elif name == "IOF":
            columns = ["DJIA", "OF"]
        elif name == "I1":
            columns = ["DJIA", "Calm"]
        elif name.startswith("I1_") and name[3:].isdigit() and 2 <= int(name[3:]) <= 6:
            columns = ["DJIA", "Calm", DIMENSIONS[int(name[3:]) - 1]]
        else:
            raise ValueError(f"Unknown input spec '{name}' (expected one of {', '.join(SPEC_NAMES)})")
        return cls(name=name, columns=columns, n_lags=n_lags)

    @property
    def label(self) -> str:
        """Subscripted label used in the forecast table header, e.g. I_1,6"""
        if self.name == "IOF":
            return "I_OF"
        return "I_" + self.name[1:].replace("_", ",")


class PredictionRow(BaseModel):
    date: date
    predicted: float
    actual: float
    previous: float


class SpecResult(BaseModel):
    name: str
    label: str
    mape_pct: float = Field(ge=0.0)
    direction_pct: float = Field(ge=0.0, le=100.0)
    hits: int
    n_test: int
    n_train: int
    neurons: int
    train_rmse: float
    predictions: List[PredictionRow]


class EvalReport(BaseModel):
    split_date: date
    rows: List[SpecResult]
    best_mape: List[str]
    best_direction: List[str]
    significance: Optional[BinomialSignificance] = None
    significance_spec: Optional[str] = None
