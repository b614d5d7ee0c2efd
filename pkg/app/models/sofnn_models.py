from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

MODEL_FILE_VERSION = 1


class SofnnParams(BaseModel):
    delta: float = Field(gt=0.0)
    sigma0: float = Field(gt=0.0)
    k_rmse: float = Field(gt=0.0)
    k_d: List[float]
    width_rule: Literal["nearest", "fixed"] = "fixed"
    epochs: int = Field(default=1, ge=1)
    widen_factor: float = Field(default=1.1, gt=1.0)
    prune_threshold: float = Field(default=1e-4, ge=0.0)
    rls_init: float = Field(default=1e4, gt=0.0)
    # neuron cap: at least this many samples per consequent parameter; 0 disables
    rows_per_parameter: float = Field(default=3.0, ge=0.0)
    batch_refit: bool = True

    @field_validator("k_d")
    @classmethod
    def _positive(cls, value):
        if not value or any(v <= 0 for v in value):
            raise ValueError("k_d thresholds must be strictly positive")
        return value

    def max_neurons(self, n_samples: int, r: int) -> Optional[int]:
        if self.rows_per_parameter == 0:
            return None
        return max(1, int(n_samples // (self.rows_per_parameter * (r + 1))))

    def for_inputs(self, r: int) -> "SofnnParams":
        """Broadcast a single k_d threshold to r inputs"""
        if len(self.k_d) == r:
            return self
        if len(self.k_d) == 1:
            return self.model_copy(update={"k_d": self.k_d * r})
        raise ValueError(f"k_d has {len(self.k_d)} entries but the input dimension is {r}")


class NeuronRecord(BaseModel):
    centers: List[float]
    widths: List[float]


class SofnnModelFile(BaseModel):
    version: int
    r: int = Field(ge=1)
    neurons: List[NeuronRecord]
    consequents: List[List[float]]
    params: SofnnParams


class TrainingLog(BaseModel):
    rmse_so_far: List[float] = Field(default_factory=list)
    additions: List[int] = Field(default_factory=list)
    widenings: List[int] = Field(default_factory=list)
    pruned: List[int] = Field(default_factory=list)
    capped: List[int] = Field(default_factory=list)
    ridge_penalty: List[Optional[float]] = Field(default_factory=list)
    neuron_counts: List[int] = Field(default_factory=list)
    epoch_rmse: List[float] = Field(default_factory=list)
    final_rmse: float = 0.0
    epochs_run: int = 0
