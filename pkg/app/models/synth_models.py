from datetime import date

from pydantic import BaseModel, Field, model_validator

from app.models.lexicon_models import Dimension


class Coupling(BaseModel):
    dimension: Dimension = "Calm"
    lag: int = Field(default=3, ge=1)
    strength: float = 3.0


class GenConfig(BaseModel):
    seed: int
    n_days: int
    tweets_per_day: int = Field(ge=0)
    coupling: Coupling = Field(default_factory=Coupling)
    noise_std: float = Field(default=1.0, gt=0.0)
    start_date: date = date(2008, 2, 28)
    ar_coef: float = Field(default=0.7, gt=-1.0, lt=1.0)
    start_close: float = 10000.0
    spam_share: float = Field(default=0.05, ge=0.0, lt=1.0)
    chatter_share: float = Field(default=0.05, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _long_enough(self):
        if self.n_days <= self.coupling.lag + 10:
            raise ValueError(f"n_days must exceed lag + 10 (got n_days={self.n_days}, lag={self.coupling.lag})")
        return self
