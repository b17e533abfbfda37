"""Enumerations shared by the quantum, protocol and chain layers."""

from enum import IntEnum, StrEnum


class Basis(IntEnum):
    """Measurement/encoding basis; the integer value is the basis coin."""

    RECTILINEAR = 0
    DIAGONAL = 1

    @property
    def symbol(self) -> str:
        return "+" if self is Basis.RECTILINEAR else "x"


class PureState(IntEnum):
    """The four protocol qubit states.

    Values follow the qubit channel alphabet: 0 = |0>, 1 = |1>, 2 = |+>, 3 = |->.
    """

    ZERO = 0
    ONE = 1
    PLUS = 2
    MINUS = 3

    @property
    def eigenbasis(self) -> Basis:
        return Basis(self.value >> 1)

    @property
    def bit(self) -> int:
        """Measurement result this state gives in its own eigenbasis."""
        return self.value & 1

    @classmethod
    def from_basis_bit(cls, basis: Basis, bit: int) -> "PureState":
        return cls(2 * int(basis) + bit)


class Protocol(StrEnum):
    """Key distribution protocol."""

    BB84 = "bb84"
    B92 = "b92"


class AttackStrategy(StrEnum):
    """Eavesdropper behaviour on the quantum channel."""

    NO_EVE = "none"
    INTERCEPT_RESEND = "ir"
    RANDOM_SUBSTITUTION = "rs"

    @property
    def label(self) -> str:
        return {
            AttackStrategy.NO_EVE: "no eavesdropper",
            AttackStrategy.INTERCEPT_RESEND: "intercept-resend",
            AttackStrategy.RANDOM_SUBSTITUTION: "random-substitution",
        }[self]

    @property
    def measures(self) -> bool:
        """Whether Eve measures the transiting qubit."""
        return self is not AttackStrategy.NO_EVE


class DetectionRule(StrEnum):
    """How Alice and Bob decide a round exposes an eavesdropper."""

    SAME_BASIS_MISMATCH = "same-basis-mismatch"
    CONCLUSIVE_CONTRADICTION = "conclusive-contradiction"
    BOTH = "both"

    @property
    def b92_only(self) -> bool:
        return self is not DetectionRule.SAME_BASIS_MISMATCH


class EveCorrectRule(StrEnum):
    """When Eve's measurement counts as correct."""

    BIT_MATCH = "bit-match"
    BASIS_AND_BIT_MATCH = "basis-and-bit-match"
    BASIS_AND_BIT_MATCH_SIFTED = "basis-and-bit-match-sifted"


class Event(StrEnum):
    """Run-level events estimated by simulation and swept by the CLI."""

    DETECTED = "detect"
    CM_EXCEEDS_HALF = "cm"
