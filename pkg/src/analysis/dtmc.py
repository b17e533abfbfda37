"""DTMC engine: compile an n-round protocol run into an explicit chain and solve reachability.

The chain tracks only the counters the properties need: the round number,
whether Eve has been detected and how many of her measurements were correct.
Round strictly increases along every non-loop transition, so built chains
are acyclic up to the absorbing self-loops and are solved by a single
forward pass in topological order.
"""

import json
from collections import deque
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np
from pydantic import ValidationError
from scipy import sparse

from src.analysis.protocol import enumerate_round, round_stats
from src.constants import ITERATIVE_MAX_SWEEPS, ITERATIVE_TOLERANCE
from src.errors import ChainError, UnknownVariableError
from src.models.chain import ChainSpec, Dtmc, StatePredicate, StateVariable, Transition
from src.models.rounds import RoundStats
from src.utils.logging import get_logger
from src.utils.rational import ONE, ZERO, as_fraction, complement_power

logger = get_logger(__name__)

ROUND = "round"
DETECTED = "detected"
CORRECT_COUNT = "correctCount"


def build_chain(spec: ChainSpec, stats: RoundStats | None = None) -> Dtmc:
    """
    Compile ``spec`` into a chain over (round, detected, correctCount).

    Args:
        spec: Protocol, attack, rules and number of rounds
        stats: Precomputed round statistics for ``spec`` (enumerated if omitted)

    Returns:
        Row-stochastic, acyclic chain whose initial state is index 0

    Raises:
        InvalidCombinationError: If the protocol/detection pairing is invalid
    """
    if stats is None:
        stats = round_stats(
            enumerate_round(spec.protocol, spec.attack, spec.detection, spec.eve_rule)
        )

    n = spec.rounds
    initial = (0, 0, 0)
    index: dict[tuple[int, int, int], int] = {initial: 0}
    valuations: list[tuple[int, int, int]] = [initial]
    rows: list[tuple[Transition, ...]] = []
    absorbing: set[int] = set()

    # Insertion order is breadth-first by round, hence topological
    state = 0
    while state < len(valuations):
        round_no, detected, count = valuations[state]

        if round_no == n or (detected and spec.stop_on_detect):
            rows.append((Transition(target=state, probability=ONE),))
            absorbing.add(state)
            state += 1
            continue

        targets: dict[int, Fraction] = {}
        for branch in stats.branches:
            successor = (
                round_no + 1,
                int(detected or branch.detected),
                count + int(branch.eve_correct),
            )
            if successor not in index:
                index[successor] = len(valuations)
                valuations.append(successor)
            target = index[successor]
            targets[target] = targets.get(target, ZERO) + branch.probability

        rows.append(
            tuple(Transition(target=t, probability=p) for t, p in sorted(targets.items()))
        )
        state += 1

    chain = Dtmc(
        variables=(
            StateVariable(name=ROUND, high=n),
            StateVariable(name=DETECTED, kind="bool", high=1),
            StateVariable(name=CORRECT_COUNT, high=n),
        ),
        valuations=tuple(valuations),
        initial=0,
        rows=tuple(rows),
        absorbing=frozenset(absorbing),
    )

    logger.debug(
        "Chain built",
        protocol=spec.protocol.value,
        attack=spec.attack.value,
        rounds=n,
        states=chain.num_states,
        absorbing=len(absorbing),
    )
    return chain


def reach_probability(chain: Dtmc, target: StatePredicate) -> Fraction:
    """
    Exact probability of eventually reaching a state satisfying ``target``.

    Acyclic chains are solved by a forward pass in topological order; chains
    with cycles fall back to Gaussian elimination over the rationals.

    Raises:
        UnknownVariableError: If ``target`` names undeclared variables
    """
    satisfied = _satisfying_states(chain, target)
    if satisfied[chain.initial]:
        return ONE

    order = topological_order(chain)
    if order is None:
        logger.debug("Cyclic chain, solving linear system", states=chain.num_states)
        return _solve_exact(chain, satisfied)

    mass = [ZERO] * chain.num_states
    mass[chain.initial] = ONE
    reached = ZERO

    for state in order:
        current = mass[state]
        if current == 0:
            continue
        if satisfied[state]:
            reached += current
            continue

        successors = chain.successors(state)
        stay = sum((p for t, p in successors if t == state), ZERO)
        if stay == ONE:
            continue
        scale = current / (ONE - stay)
        for successor, p in successors:
            if successor != state:
                mass[successor] += scale * p

    return reached


def reach_probability_iterative(
    chain: Dtmc,
    target: StatePredicate,
    tolerance: float = ITERATIVE_TOLERANCE,
    max_sweeps: int = ITERATIVE_MAX_SWEEPS,
) -> float:
    """
    Floating-point reachability by Jacobi sweeps over a sparse matrix.

    Intended for imported cyclic chains too large for exact elimination.
    Stops when no value changes by more than ``tolerance`` or after
    ``max_sweeps`` sweeps.
    """
    satisfied = _satisfying_states(chain, target)
    if satisfied[chain.initial]:
        return 1.0

    unknown = _maybe_states(chain, satisfied)
    if chain.initial not in unknown:
        return 0.0

    position = {state: i for i, state in enumerate(unknown)}
    data: list[float] = []
    row_idx: list[int] = []
    col_idx: list[int] = []
    constant = np.zeros(len(unknown))

    for state, i in position.items():
        for successor, p in chain.successors(state):
            if satisfied[successor]:
                constant[i] += float(p)
            elif successor in position:
                row_idx.append(i)
                col_idx.append(position[successor])
                data.append(float(p))

    matrix = sparse.csr_matrix((data, (row_idx, col_idx)), shape=(len(unknown), len(unknown)))
    values = np.zeros(len(unknown))

    for sweep in range(1, max_sweeps + 1):
        updated = matrix @ values + constant
        delta = float(np.max(np.abs(updated - values)))
        values = updated
        if delta < tolerance:
            logger.debug("Iterative solve converged", sweeps=sweep, delta=delta)
            break
    else:
        logger.warning("Iterative solve hit sweep limit", sweeps=max_sweeps)

    return float(values[position[chain.initial]])


def detection_probability_closed_form(p_detect: Fraction, n: int) -> Fraction:
    """
    Probability of at least one detection in ``n`` independent rounds.

    Examples:
        >>> detection_probability_closed_form(Fraction(1, 8), 6)
        Fraction(144495, 262144)
    """
    p_detect = as_fraction(p_detect)
    if n < 0:
        raise ValueError(f"Number of rounds must be non-negative, got {n}")
    return complement_power(p_detect, n)


def cm_probability(p_eve_correct: Fraction, n: int, threshold: int) -> Fraction:
    """
    Exact binomial upper tail P(X > threshold) for X ~ Binomial(n, p_eve_correct).

    Equals the reachability of ``correctCount > threshold`` on a chain that
    keeps exchanging after detection.
    """
    p = as_fraction(p_eve_correct)
    if not 0 <= threshold <= n:
        raise ValueError(f"Threshold {threshold} outside [0, {n}]")
    q = ONE - p
    return sum(
        (comb(n, k) * p**k * q ** (n - k) for k in range(threshold + 1, n + 1)),
        ZERO,
    )


def topological_order(chain: Dtmc) -> list[int] | None:
    """Kahn ordering that ignores self-loops; None if the chain has a cycle."""
    indegree = [0] * chain.num_states
    for state in range(chain.num_states):
        for successor, _ in chain.successors(state):
            if successor != state:
                indegree[successor] += 1

    ready = deque(s for s in range(chain.num_states) if indegree[s] == 0)
    order: list[int] = []
    while ready:
        state = ready.popleft()
        order.append(state)
        for successor, _ in chain.successors(state):
            if successor == state:
                continue
            indegree[successor] -= 1
            if indegree[successor] == 0:
                ready.append(successor)

    return order if len(order) == chain.num_states else None


def load_chain(path: Path | str) -> Dtmc:
    """
    Import a chain from a JSON document.

    The document mirrors ``Dtmc``: ``variables``, ``valuations``, ``initial``,
    ``rows`` (lists of ``{"target", "probability"}`` with probabilities as
    ``"a/b"`` strings) and ``absorbing``.

    Raises:
        ChainError: If the file is unreadable or the chain is malformed
    """
    chain_path = Path(path)
    try:
        document = json.loads(chain_path.read_text())
        chain = Dtmc.model_validate(document)
    except (OSError, json.JSONDecodeError) as e:
        logger.error("Failed to read chain file", path=str(chain_path), error=str(e))
        raise ChainError(f"Cannot read chain file {chain_path}: {e}") from e
    except ValidationError as e:
        logger.error("Invalid chain file", path=str(chain_path), error=str(e))
        raise ChainError(f"Invalid chain in {chain_path}: {e}") from e

    logger.info("Chain loaded", path=str(chain_path), states=chain.num_states)
    return chain


def dump_chain(chain: Dtmc) -> str:
    """Serialize a chain to the JSON document ``load_chain`` reads."""
    return chain.model_dump_json(indent=2)


def _satisfying_states(chain: Dtmc, target: StatePredicate) -> list[bool]:
    declared = chain.variable_names
    unknown = [name for name in target.variables if name not in declared]
    if unknown:
        raise UnknownVariableError(unknown, declared)

    checks = [
        (declared.index(c.variable), c.comparator, c.constant) for c in target.conjuncts
    ]
    return [
        all(cmp.holds(valuation[i], constant) for i, cmp, constant in checks)
        for valuation in chain.valuations
    ]


def _maybe_states(chain: Dtmc, satisfied: list[bool]) -> list[int]:
    """States outside the target from which the target is reachable."""
    predecessors: list[list[int]] = [[] for _ in range(chain.num_states)]
    for state in range(chain.num_states):
        for successor, p in chain.successors(state):
            if p > 0:
                predecessors[successor].append(state)

    seen = [False] * chain.num_states
    queue = deque(s for s in range(chain.num_states) if satisfied[s])
    for s in queue:
        seen[s] = True
    while queue:
        state = queue.popleft()
        for predecessor in predecessors[state]:
            if not seen[predecessor]:
                seen[predecessor] = True
                queue.append(predecessor)

    return [s for s in range(chain.num_states) if seen[s] and not satisfied[s]]


def _solve_exact(chain: Dtmc, satisfied: list[bool]) -> Fraction:
    """Solve (I - P_UU) x = P_US 1 by Gauss-Jordan elimination over Fractions."""
    unknown = _maybe_states(chain, satisfied)
    if chain.initial not in unknown:
        return ZERO

    position = {state: i for i, state in enumerate(unknown)}
    size = len(unknown)
    matrix = [[ZERO] * (size + 1) for _ in range(size)]

    for state, i in position.items():
        matrix[i][i] += ONE
        for successor, p in chain.successors(state):
            if satisfied[successor]:
                matrix[i][size] += p
            elif successor in position:
                matrix[i][position[successor]] -= p

    for col in range(size):
        pivot = next((r for r in range(col, size) if matrix[r][col] != 0), None)
        if pivot is None:
            raise ChainError("Singular reachability system")
        matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
        lead = matrix[col][col]
        matrix[col] = [value / lead for value in matrix[col]]
        for row in range(size):
            factor = matrix[row][col]
            if row != col and factor != 0:
                pivot_row = matrix[col]
                matrix[row] = [a - factor * b for a, b in zip(matrix[row], pivot_row, strict=True)]

    return matrix[position[chain.initial]][size]
