"""Protocol semantics: exhaustive enumeration of one protocol round.

A round is Alice encoding a uniformly random bit, an optional eavesdropper
action, Bob measuring in a uniformly random basis and the classical sifting
and detection step. Every branch is a fair coin, so the leaf probabilities
are exact dyadic rationals.
"""

from collections import defaultdict
from collections.abc import Iterator
from fractions import Fraction

from src.analysis.quantum import (
    basis_of_b92,
    conclusive_bit,
    decode_bit,
    encode_b92,
    encode_bb84,
    measure,
)
from src.errors import InvalidCombinationError
from src.models.quantum import (
    AttackStrategy,
    Basis,
    DetectionRule,
    EveCorrectRule,
    Protocol,
    PureState,
)
from src.models.rounds import RoundBranch, RoundOutcome, RoundStats
from src.utils.logging import get_logger
from src.utils.rational import HALF, ONE, ZERO

logger = get_logger(__name__)

QUARTER = Fraction(1, 4)


def validate_combination(protocol: Protocol, detection: DetectionRule) -> None:
    """
    Reject detection rules that only make sense for B92.

    Raises:
        InvalidCombinationError: If a B92-only rule is paired with BB84
    """
    if detection.b92_only and protocol is not Protocol.B92:
        raise InvalidCombinationError(
            f"Detection rule '{detection.value}' is only defined for B92, not {protocol.value}"
        )


def enumerate_round(
    protocol: Protocol,
    attack: AttackStrategy,
    detection: DetectionRule = DetectionRule.SAME_BASIS_MISMATCH,
    eve_rule: EveCorrectRule = EveCorrectRule.BASIS_AND_BIT_MATCH_SIFTED,
    alice_bit: int | None = None,
) -> list[RoundOutcome]:
    """
    Enumerate every outcome of a single round with its exact probability.

    Args:
        protocol: BB84 or B92
        attack: Eavesdropper strategy
        detection: Rule deciding when a round exposes Eve
        eve_rule: Rule deciding when Eve's measurement counts as correct
        alice_bit: Fix Alice's bit instead of drawing it uniformly

    Returns:
        Mutually exclusive outcomes whose probabilities sum to exactly 1

    Raises:
        InvalidCombinationError: If ``detection`` is B92-only and protocol is BB84
    """
    validate_combination(protocol, detection)

    outcomes: list[RoundOutcome] = []
    for bit, p_bit in _alice_bits(alice_bit):
        for alice_basis, p_basis in _alice_bases(protocol, bit):
            sent = encode_b92(bit) if protocol is Protocol.B92 else encode_bb84(bit, alice_basis)

            for eve_basis, eve_bit, forwarded, p_eve in _eve_actions(protocol, attack, sent):
                for bob_basis in Basis:
                    for result, _, p_result in measure(forwarded, bob_basis):
                        bob_bit = decode_bit(protocol, bob_basis, result)
                        sifted = bob_basis is alice_basis
                        outcomes.append(
                            RoundOutcome(
                                alice_bit=bit,
                                alice_basis=alice_basis,
                                eve_basis=eve_basis,
                                eve_bit=eve_bit,
                                forwarded_state=forwarded,
                                bob_basis=bob_basis,
                                bob_result=result,
                                bob_bit=bob_bit,
                                sifted=sifted,
                                detected=_is_detected(
                                    detection, bit, bob_basis, result, bob_bit, sifted
                                ),
                                eve_correct=_is_eve_correct(
                                    eve_rule, bit, alice_basis, eve_basis, eve_bit, sifted
                                ),
                                probability=p_bit * p_basis * p_eve * HALF * p_result,
                            )
                        )

    logger.debug(
        "Round enumerated",
        protocol=protocol.value,
        attack=attack.value,
        detection=detection.value,
        outcomes=len(outcomes),
    )
    return outcomes


def round_stats(outcomes: list[RoundOutcome]) -> RoundStats:
    """
    Aggregate enumerated outcomes into per-round event probabilities.

    Args:
        outcomes: Output of ``enumerate_round``

    Returns:
        RoundStats with exact marginal and joint probabilities
    """
    p_detect = ZERO
    p_sift = ZERO
    p_eve_correct = ZERO
    joint: dict[tuple[bool, bool], Fraction] = defaultdict(Fraction)

    for outcome in outcomes:
        p = outcome.probability
        if outcome.detected:
            p_detect += p
        if outcome.sifted:
            p_sift += p
        if outcome.eve_correct:
            p_eve_correct += p
        joint[(outcome.detected, outcome.eve_correct)] += p

    branches = tuple(
        RoundBranch(detected=detected, eve_correct=correct, probability=p)
        for (detected, correct), p in sorted(joint.items())
        if p > 0
    )
    return RoundStats(
        p_detect=p_detect,
        p_sift=p_sift,
        p_eve_correct=p_eve_correct,
        branches=branches,
    )


def _alice_bits(fixed: int | None) -> Iterator[tuple[int, Fraction]]:
    if fixed is None:
        yield from ((0, HALF), (1, HALF))
    elif fixed in (0, 1):
        yield fixed, ONE
    else:
        raise ValueError(f"Not a bit: {fixed!r}")


def _alice_bases(protocol: Protocol, bit: int) -> Iterator[tuple[Basis, Fraction]]:
    if protocol is Protocol.B92:
        yield basis_of_b92(bit), ONE
    else:
        for basis in Basis:
            yield basis, HALF


def _eve_actions(
    protocol: Protocol, attack: AttackStrategy, sent: PureState
) -> Iterator[tuple[Basis | None, int | None, PureState, Fraction]]:
    """Yield (eve_basis, eve_bit, forwarded_state, probability)."""
    if not attack.measures:
        yield None, None, sent, ONE
        return

    for eve_basis in Basis:
        for result, post, p_result in measure(sent, eve_basis):
            eve_bit = decode_bit(protocol, eve_basis, result)
            if attack is AttackStrategy.INTERCEPT_RESEND:
                yield eve_basis, eve_bit, post, HALF * p_result
            else:
                # Substitute a fresh state, independent of what she measured
                for substitute in PureState:
                    yield eve_basis, eve_bit, substitute, HALF * p_result * QUARTER


def _is_detected(
    rule: DetectionRule,
    alice_bit: int,
    bob_basis: Basis,
    bob_result: int,
    bob_bit: int,
    sifted: bool,
) -> bool:
    mismatch = sifted and bob_bit != alice_bit
    if rule is DetectionRule.SAME_BASIS_MISMATCH:
        return mismatch

    inferred = conclusive_bit(bob_basis, bob_result)
    contradiction = inferred is not None and inferred != alice_bit
    if rule is DetectionRule.CONCLUSIVE_CONTRADICTION:
        return contradiction
    return mismatch or contradiction


def _is_eve_correct(
    rule: EveCorrectRule,
    alice_bit: int,
    alice_basis: Basis,
    eve_basis: Basis | None,
    eve_bit: int | None,
    sifted: bool,
) -> bool:
    if eve_basis is None or eve_bit is None:
        return False
    correct = eve_bit == alice_bit
    if rule is EveCorrectRule.BIT_MATCH:
        return correct
    correct = correct and eve_basis is alice_basis
    if rule is EveCorrectRule.BASIS_AND_BIT_MATCH:
        return correct
    return correct and sifted
