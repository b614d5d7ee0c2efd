from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class OlsFit(BaseModel):
    names: List[str]
    coefficients: List[float]
    std_errors: List[float]
    t_stats: List[float]
    p_values: List[float]
    rss: float = Field(ge=0.0)
    residual_std_err: float
    r2: float
    adj_r2: float
    f_stat: float
    f_dof: Tuple[int, int]
    f_p_value: float
    n_obs: int

    def coefficient(self, name: str) -> float:
        return self.coefficients[self.names.index(name)]

    def p_value(self, name: str) -> float:
        return self.p_values[self.names.index(name)]


class GrangerRow(BaseModel):
    lag: int = Field(ge=1)
    series_name: str
    f_stat: Optional[float] = None
    p_value: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    rss_restricted: Optional[float] = None
    rss_unrestricted: Optional[float] = None
    dof: Optional[Tuple[int, int]] = None
    n_obs: Optional[int] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class NestedFTest(BaseModel):
    f_stat: float
    p_value: float
    q: int
    dof: Tuple[int, int]
    rss_reduced: float
    rss_full: float
    label: str = ""


class BinomialSignificance(BaseModel):
    successes: int
    trials: int
    p: float
    n_periods: float
    exact_prob: float
    window_adjusted_prob: float
