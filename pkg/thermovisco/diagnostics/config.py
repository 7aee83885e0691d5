from pydantic import BaseModel, ConfigDict, Field

__all__ = ["DiagnosticsTolerances"]


class DiagnosticsTolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # energy residual may exceed zero by energy * F(0)
    energy: float = Field(default=1e-9, ge=0)
    # entropy residual may fall below zero by entropy * (1 + |S|)
    entropy: float = Field(default=1e-8, ge=0)
    corner: float = Field(default=1e-8, ge=0)
    chain: float = Field(default=1e-10, ge=0)
    chain_samples: int = Field(default=20, ge=0)
    # largest record spacing accepted inside a window integral
    window_max_gap: float = Field(default=0.05, gt=0)
    # records averaged for the entropy limit L
    limit_window: int = Field(default=10, ge=2)
