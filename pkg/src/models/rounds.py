"""Single-round outcome models."""

from pydantic import BaseModel, ConfigDict, Field

from src.models.quantum import Basis, PureState
from src.utils.rational import ExactProb


class RoundOutcome(BaseModel):
    """One fully resolved protocol round."""

    model_config = ConfigDict(frozen=True)

    alice_bit: int = Field(ge=0, le=1, description="Bit Alice encodes")
    alice_basis: Basis = Field(description="Basis Alice encodes in")
    eve_basis: Basis | None = Field(default=None, description="Basis Eve measures in")
    eve_bit: int | None = Field(default=None, ge=0, le=1, description="Eve's decoded guess")
    forwarded_state: PureState = Field(description="State arriving at Bob")
    bob_basis: Basis = Field(description="Basis Bob measures in")
    bob_result: int = Field(ge=0, le=1, description="Raw measurement result")
    bob_bit: int = Field(ge=0, le=1, description="Bit Bob decodes")
    sifted: bool = Field(description="Bob's basis equals Alice's")
    detected: bool = Field(description="Round exposes the eavesdropper")
    eve_correct: bool = Field(description="Eve's measurement counts as correct")
    probability: ExactProb = Field(description="Exact dyadic probability")


class RoundBranch(BaseModel):
    """Joint probability of a (detected, eve_correct) pair in one round."""

    model_config = ConfigDict(frozen=True)

    detected: bool
    eve_correct: bool
    probability: ExactProb


class RoundStats(BaseModel):
    """Aggregated event probabilities of one round."""

    model_config = ConfigDict(frozen=True)

    p_detect: ExactProb = Field(description="P(round flags the eavesdropper)")
    p_sift: ExactProb = Field(description="P(bases match)")
    p_eve_correct: ExactProb = Field(description="P(Eve's measurement counts as correct)")
    branches: tuple[RoundBranch, ...] = Field(
        description="Joint (detected, eve_correct) distribution, zero branches omitted"
    )
