"""
Single-period T-Bill valuation.

Currency amounts are plain floats.
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DomainError


class TBill(BaseModel):
    """One-step binomial payoff: ``v_high`` with probability ``p_no_change``."""

    model_config = ConfigDict(frozen=True)

    face_value: float = 1.0
    v_low: float = 0.0
    v_high: float = 1.0
    p_no_change: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def check_branches(self) -> "TBill":
        if self.v_low > self.v_high:
            raise ValueError("v_low must not exceed v_high")
        return self


class RatePath(BaseModel):
    """Principal compounded at ``rate`` per period, with a rate shift scenario."""

    model_config = ConfigDict(frozen=True)

    principal: float
    rate: float
    shift: float = 0.0
    periods: int = Field(default=1, ge=0)

    @model_validator(mode="after")
    def check_discount(self) -> "RatePath":
        if 1 + self.rate <= 0 or 1 + self.rate + self.shift <= 0:
            raise ValueError("1 + rate and 1 + rate + shift must be positive")
        return self


def future_value(rp: RatePath) -> float:
    """P_0 * (1 + r) ** periods."""
    return rp.principal * (1 + rp.rate) ** rp.periods


def shifted_value(rp: RatePath, face: float, p: float) -> float:
    """
    Present value of ``face`` when the rate stays at ``r`` with probability
    ``p`` and moves to ``r + shift`` otherwise.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")
    return (1 - p) * face / (1 + rp.rate + rp.shift) + p * face / (1 + rp.rate)


def expected_value(tb: TBill) -> float:
    """(1 - p) * v_low + p * v_high."""
    return (1 - tb.p_no_change) * tb.v_low + tb.p_no_change * tb.v_high
