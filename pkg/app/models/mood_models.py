import math
from datetime import date
from typing import Dict, Optional

from pydantic import BaseModel, field_validator

from app.models.lexicon_models import DIMENSIONS


class DailyMood(BaseModel):
    date: date
    of_ratio: Optional[float] = None
    gpoms: Dict[str, float]
    zero_match: bool = False

    @field_validator("of_ratio")
    @classmethod
    def _finite_ratio(cls, value):
        if value is not None and (not math.isfinite(value) or value < 0):
            raise ValueError("of_ratio must be finite and non-negative")
        return value

    @field_validator("gpoms")
    @classmethod
    def _six_dimensions(cls, value):
        if set(value) != set(DIMENSIONS):
            raise ValueError(f"gpoms must carry exactly the dimensions {DIMENSIONS}")
        if not all(math.isfinite(v) for v in value.values()):
            raise ValueError("gpoms values must be finite")
        return {dim: float(value[dim]) for dim in DIMENSIONS}
