"""Result models emitted by the analysis stages and the CLI."""

import math
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field

from src.models.quantum import AttackStrategy, Event, Protocol


class SimEstimate(BaseModel):
    """Monte Carlo estimate of an event probability."""

    trials: int = Field(ge=1)
    successes: int = Field(ge=0)
    point_estimate: float = Field(ge=0.0, le=1.0)
    standard_error: float = Field(ge=0.0)
    seed: int = Field(ge=0, lt=2**64)
    protocol: Protocol
    attack: AttackStrategy
    rounds: int = Field(ge=1)
    event: Event

    def within(self, exact: float, band: float) -> bool:
        """True if ``exact`` lies within ``band`` standard errors of the estimate."""
        return abs(self.point_estimate - exact) <= band * self.standard_error


class TrialOutcome(BaseModel):
    """Replay of a single simulated run."""

    trial: int = Field(ge=0)
    detected: bool
    correct_count: int = Field(ge=0)
    rounds_played: int = Field(ge=0)


class FitForm(StrEnum):
    """Exponential trend families."""

    DECAY = "decay"  # a * exp(-b N)
    ONE_MINUS_DECAY = "one-minus-decay"  # 1 - a * exp(-b N)


class FitModel(BaseModel):
    """Converged exponential fit with diagnostics."""

    form: FitForm
    a: float = Field(description="Amplitude")
    b: float = Field(description="Decay rate")
    sse: float = Field(ge=0.0, description="Sum of squared residuals")
    initial_sse: float = Field(ge=0.0, description="SSE of the log-linear initialization")
    iterations: int = Field(ge=0)
    converged: bool = Field(default=True)
    points: int = Field(ge=0, description="Number of fitted points")

    def predict(self, n: float) -> float:
        decay = self.a * math.exp(-self.b * n)
        return decay if self.form is FitForm.DECAY else 1.0 - decay

    def equation(self) -> str:
        core = f"({self.a:.4f})e^(-{self.b:.4f}N)"
        return core if self.form is FitForm.DECAY else f"1-{core}"


class SweepRow(BaseModel):
    """One N of a sweep."""

    N: int = Field(ge=1)
    rounds: int = Field(ge=1)
    p_exact: float = Field(ge=0.0, le=1.0)
    p_mc: float | None = Field(default=None, ge=0.0, le=1.0)
    mc_stderr: float | None = Field(default=None, ge=0.0)
    exact: str | None = Field(default=None, description="Exact rational as 'a/b'")


class SweepMetadata(BaseModel):
    """Parameters echoed alongside every sweep."""

    protocol: Protocol
    attack: AttackStrategy
    event: Event
    inclusive_rounds: bool
    detection: str
    eve_rule: str
    stop_on_detect: bool
    mc_trials: int | None = None
    seed: int | None = None


class SweepResult(BaseModel):
    """Ordered sweep rows plus their metadata."""

    metadata: SweepMetadata
    rows: list[SweepRow] = Field(default_factory=list)


class TableRow(BaseModel):
    """One row of a detection/knowledge table."""

    N: int
    rounds: int
    p_ed_random_substitution: float
    p_ed_intercept_resend: float
    p_cm_random_substitution: float
    p_cm_intercept_resend: float


class TrendReport(BaseModel):
    """Monotonicity verdict plus exponential fit for a probability column."""

    column: str
    monotone: bool
    direction: str = Field(description="'nondecreasing' or 'nonincreasing'")
    fit: FitModel | None = None
    note: str | None = None


class TableReport(BaseModel):
    """Table reproduction output."""

    protocol: Protocol
    inclusive_rounds: bool
    eve_rule: str
    rows: list[TableRow]
    trends: list[TrendReport] = Field(default_factory=list)


class ComparisonRow(BaseModel):
    """BB84 and B92 at the same N."""

    N: int
    rounds: int
    bb84: float
    b92: float
    difference: float = Field(description="b92 - bb84")


class PrismModel(BaseModel):
    """Generated PRISM model source plus its properties sidecar."""

    model_config = ConfigDict(frozen=True)

    text: str
    properties: str
    protocol: Protocol
    attack: AttackStrategy
    rounds: int = Field(ge=1)
