"""
Queries answered by the privacy accountant alone.
"""
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class AccountPrivacyQuery(BaseModel):
    """Privacy of Q answered queries, optionally with logged margins."""
    model_config = ConfigDict(extra="forbid")

    scheme: Literal["AE", "KNN"] = "AE"
    granularity: Literal["agent", "instance"] = "agent"
    queries: int = Field(..., ge=0)
    sigma: float = Field(..., gt=0)
    delta: float = 1e-3
    k: Optional[int] = Field(None, ge=1)
    num_agents: int = Field(1, ge=1)
    num_classes: int = Field(2, ge=2)
    margins: Optional[List[float]] = None
    margins_path: Optional[Path] = None
    bound: Optional[Literal["closed_form", "lemma"]] = None

    @field_validator("delta")
    @classmethod
    def _delta_in_range(cls, value: float) -> float:
        if not (0.0 < value < 1.0):
            raise ValueError(f"delta out of range (0, 1): {value}")
        return value

    @model_validator(mode="after")
    def _check_knn(self) -> 'AccountPrivacyQuery':
        if self.scheme == "KNN" and self.granularity == "instance" and self.k is None:
            raise ValueError("kNN instance-level accounting needs k")
        if self.margins is not None and self.margins_path is not None:
            raise ValueError("give margins inline or as a file, not both")
        return self


class CalibrateSigmaQuery(BaseModel):
    """Noise scale that spends exactly a target epsilon."""
    model_config = ConfigDict(extra="forbid")

    scheme: Literal["AE", "KNN", "DPFedAvg"] = "AE"
    granularity: Literal["agent", "instance"] = "agent"
    releases: int = Field(..., ge=1)
    epsilon: float = Field(..., gt=0)
    delta: float = 1e-3
    k: Optional[int] = Field(None, ge=1)

    @field_validator("delta")
    @classmethod
    def _delta_in_range(cls, value: float) -> float:
        if not (0.0 < value < 1.0):
            raise ValueError(f"delta out of range (0, 1): {value}")
        return value
