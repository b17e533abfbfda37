"""Monte Carlo oracle: simulate n-round runs with a counter-based random stream.

Randomness comes from Philox4x32-10 (Salmon et al., SC'11; multipliers
0xD2511F53/0xCD9E8D57, Weyl key increments 0x9E3779B9/0xBB67AE85). Each
(trial, round) pair owns one 128-bit block:

    key     = (seed & 0xFFFFFFFF, seed >> 32)
    counter = (trial & 0xFFFFFFFF, trial >> 32, round, 0)

and the coins of that round are bits of the block's first word. A trial is
therefore a pure function of (seed, trial index): results do not depend on
chunking, worker count or execution order, and any trial can be replayed
alone.
"""

from concurrent.futures import ThreadPoolExecutor
from math import sqrt

import numpy as np
import numpy.typing as npt

from src.analysis.protocol import validate_combination
from src.analysis.quantum import encode_b92, encode_bb84
from src.constants import DEFAULT_CHUNK_SIZE, MAX_SEED
from src.models.chain import ChainSpec
from src.models.quantum import (
    AttackStrategy,
    Basis,
    DetectionRule,
    EveCorrectRule,
    Event,
    Protocol,
)
from src.models.results import SimEstimate, TrialOutcome
from src.utils.logging import get_logger

logger = get_logger(__name__)

type U64Array = npt.NDArray[np.uint64]

MASK32 = np.uint64(0xFFFFFFFF)
PHILOX_M0 = np.uint64(0xD2511F53)
PHILOX_M1 = np.uint64(0xCD9E8D57)
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
PHILOX_ROUNDS = 10

# Bit positions of the per-round coins in the first output word
COIN_ALICE_BIT = 0
COIN_ALICE_BASIS = 1
COIN_EVE_BASIS = 2
COIN_EVE_RESULT = 3
COIN_SUBSTITUTE_BIT = 4
COIN_SUBSTITUTE_BASIS = 5
COIN_BOB_BASIS = 6
COIN_BOB_RESULT = 7

# encode tables indexed by [basis, bit] and [bit]
BB84_ENCODING = np.array(
    [[int(encode_bb84(bit, basis)) for bit in (0, 1)] for basis in Basis], dtype=np.int64
)
B92_ENCODING = np.array([int(encode_b92(bit)) for bit in (0, 1)], dtype=np.int64)


def philox4x32(counter: list[U64Array], key: tuple[int, int]) -> list[U64Array]:
    """
    Philox4x32-10 block function, vectorized over counters.

    Args:
        counter: Four arrays of 32-bit words (held in uint64)
        key: Two 32-bit key words

    Returns:
        Four arrays of 32-bit output words
    """
    c0, c1, c2, c3 = (np.asarray(word, dtype=np.uint64) & MASK32 for word in counter)
    k0, k1 = key[0] & 0xFFFFFFFF, key[1] & 0xFFFFFFFF

    for round_no in range(PHILOX_ROUNDS):
        if round_no:
            k0 = (k0 + PHILOX_W0) & 0xFFFFFFFF
            k1 = (k1 + PHILOX_W1) & 0xFFFFFFFF
        product0 = PHILOX_M0 * c0
        product1 = PHILOX_M1 * c2
        hi0, lo0 = product0 >> np.uint64(32), product0 & MASK32
        hi1, lo1 = product1 >> np.uint64(32), product1 & MASK32
        c0, c1, c2, c3 = (
            hi1 ^ c1 ^ np.uint64(k0),
            lo1,
            hi0 ^ c3 ^ np.uint64(k1),
            lo0,
        )

    return [c0, c1, c2, c3]


def simulate(
    spec: ChainSpec,
    event: Event,
    trials: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> SimEstimate:
    """
    Estimate the probability of ``event`` over ``trials`` simulated runs.

    Args:
        spec: Protocol, attack, rules, rounds and stop-on-detect behaviour
        event: ``detect`` or ``cm`` (Eve correct on more than half the rounds)
        trials: Number of independent runs
        seed: 64-bit unsigned seed
        workers: Threads sharing the trial range
        chunk_size: Trials per vectorized batch

    Returns:
        SimEstimate, bitwise identical for identical inputs

    Raises:
        InvalidCombinationError: If the protocol/detection pairing is invalid
    """
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    validate_combination(spec.protocol, spec.detection)

    chunks = [(start, min(start + chunk_size, trials)) for start in range(0, trials, chunk_size)]

    def count(chunk: tuple[int, int]) -> int:
        detected, correct, _ = _run_trials(spec, seed, np.arange(*chunk, dtype=np.uint64))
        return int(np.count_nonzero(_event_mask(spec, event, detected, correct)))

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(count, chunks))
    else:
        successes = sum(count(chunk) for chunk in chunks)

    estimate = successes / trials
    standard_error = sqrt(estimate * (1.0 - estimate) / trials)

    logger.info(
        "Simulation finished",
        protocol=spec.protocol.value,
        attack=spec.attack.value,
        rounds=spec.rounds,
        event=event.value,
        trials=trials,
        successes=successes,
        seed=seed,
    )
    return SimEstimate(
        trials=trials,
        successes=successes,
        point_estimate=estimate,
        standard_error=standard_error,
        seed=seed,
        protocol=spec.protocol,
        attack=spec.attack,
        rounds=spec.rounds,
        event=event,
    )


def simulate_trial(spec: ChainSpec, seed: int, trial: int) -> TrialOutcome:
    """Replay one trial of ``simulate`` from its (seed, trial index)."""
    validate_combination(spec.protocol, spec.detection)
    detected, correct, played = _run_trials(spec, seed, np.array([trial], dtype=np.uint64))
    return TrialOutcome(
        trial=trial,
        detected=bool(detected[0]),
        correct_count=int(correct[0]),
        rounds_played=int(played[0]),
    )


def _event_mask(
    spec: ChainSpec,
    event: Event,
    detected: npt.NDArray[np.bool_],
    correct: npt.NDArray[np.int64],
) -> npt.NDArray[np.bool_]:
    if event is Event.DETECTED:
        return detected
    return correct > spec.rounds // 2


def _run_trials(
    spec: ChainSpec, seed: int, trial_ids: U64Array
) -> tuple[npt.NDArray[np.bool_], npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Simulate a batch of trials; returns (detected, correct count, rounds played)."""
    size = trial_ids.shape[0]
    key = (seed & 0xFFFFFFFF, seed >> 32)
    low, high = trial_ids & MASK32, trial_ids >> np.uint64(32)
    zeros = np.zeros(size, dtype=np.uint64)

    active = np.ones(size, dtype=bool)
    detected = np.zeros(size, dtype=bool)
    correct = np.zeros(size, dtype=np.int64)
    played = np.zeros(size, dtype=np.int64)

    for round_no in range(spec.rounds):
        word = philox4x32([low, high, zeros + np.uint64(round_no), zeros], key)[0]

        def coin(position: int, word: U64Array = word) -> npt.NDArray[np.int64]:
            return ((word >> np.uint64(position)) & np.uint64(1)).astype(np.int64)

        alice_bit = coin(COIN_ALICE_BIT)
        if spec.protocol is Protocol.B92:
            alice_basis = alice_bit
            state = B92_ENCODING[alice_bit]
        else:
            alice_basis = coin(COIN_ALICE_BASIS)
            state = BB84_ENCODING[alice_basis, alice_bit]

        eve_basis: npt.NDArray[np.int64] | None = None
        eve_bit: npt.NDArray[np.int64] | None = None
        if spec.attack.measures:
            eve_basis = coin(COIN_EVE_BASIS)
            eve_result, state = _measure(state, eve_basis, coin(COIN_EVE_RESULT))
            eve_bit = _decode(spec.protocol, eve_basis, eve_result)
            if spec.attack is AttackStrategy.RANDOM_SUBSTITUTION:
                state = 2 * coin(COIN_SUBSTITUTE_BASIS) + coin(COIN_SUBSTITUTE_BIT)

        bob_basis = coin(COIN_BOB_BASIS)
        bob_result, _ = _measure(state, bob_basis, coin(COIN_BOB_RESULT))
        bob_bit = _decode(spec.protocol, bob_basis, bob_result)
        sifted = bob_basis == alice_basis

        flagged = _flagged(spec.detection, alice_bit, bob_basis, bob_result, bob_bit, sifted)
        eve_correct = _eve_correct(
            spec.eve_rule, alice_bit, alice_basis, eve_basis, eve_bit, sifted
        )

        detected |= flagged & active
        correct += (eve_correct & active).astype(np.int64)
        played += active.astype(np.int64)
        if spec.stop_on_detect:
            active &= ~flagged

    return detected, correct, played


def _measure(
    state: npt.NDArray[np.int64], basis: npt.NDArray[np.int64], coin: npt.NDArray[np.int64]
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Vectorized projective measurement on channel-alphabet states."""
    same = (state >> 1) == basis
    result = np.where(same, state & 1, coin)
    post = np.where(same, state, 2 * basis + coin)
    return result, post


def _decode(
    protocol: Protocol, basis: npt.NDArray[np.int64], result: npt.NDArray[np.int64]
) -> npt.NDArray[np.int64]:
    if protocol is Protocol.B92:
        return np.where(basis == int(Basis.DIAGONAL), 1 - result, result)
    return result


def _flagged(
    rule: DetectionRule,
    alice_bit: npt.NDArray[np.int64],
    bob_basis: npt.NDArray[np.int64],
    bob_result: npt.NDArray[np.int64],
    bob_bit: npt.NDArray[np.int64],
    sifted: npt.NDArray[np.bool_],
) -> npt.NDArray[np.bool_]:
    mismatch = sifted & (bob_bit != alice_bit)
    if rule is DetectionRule.SAME_BASIS_MISMATCH:
        return mismatch
    # Conclusive: rectilinear 1 means "sent 1", diagonal 1 means "sent 0"
    inferred = np.where(bob_basis == int(Basis.RECTILINEAR), 1, 0)
    contradiction = (bob_result == 1) & (inferred != alice_bit)
    if rule is DetectionRule.CONCLUSIVE_CONTRADICTION:
        return contradiction
    return mismatch | contradiction


def _eve_correct(
    rule: EveCorrectRule,
    alice_bit: npt.NDArray[np.int64],
    alice_basis: npt.NDArray[np.int64],
    eve_basis: npt.NDArray[np.int64] | None,
    eve_bit: npt.NDArray[np.int64] | None,
    sifted: npt.NDArray[np.bool_],
) -> npt.NDArray[np.bool_]:
    if eve_basis is None or eve_bit is None:
        return np.zeros(alice_bit.shape[0], dtype=bool)
    correct = eve_bit == alice_bit
    if rule is EveCorrectRule.BIT_MATCH:
        return correct
    correct &= eve_basis == alice_basis
    if rule is EveCorrectRule.BASIS_AND_BIT_MATCH:
        return correct
    return correct & sifted
