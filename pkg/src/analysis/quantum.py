"""Quantum core: the four protocol states, the two bases and projective measurement.

Only |0>, |1>, |+>, |-> ever occur, so every measurement distribution is
exactly dyadic and is returned as Fractions.
"""

from fractions import Fraction

from src.models.quantum import Basis, Protocol, PureState
from src.utils.rational import HALF, ONE

type Distribution = tuple[tuple[int, PureState, Fraction], ...]


def measure(state: PureState, basis: Basis) -> Distribution:
    """
    Measure ``state`` in ``basis``.

    Returns:
        Tuple of (result bit, post-measurement state, probability) entries

    Examples:
        >>> measure(PureState.ZERO, Basis.RECTILINEAR)
        ((0, <PureState.ZERO: 0>, Fraction(1, 1)),)
        >>> [(b, s.name) for b, s, _ in measure(PureState.PLUS, Basis.RECTILINEAR)]
        [(0, 'ZERO'), (1, 'ONE')]
    """
    if state.eigenbasis is basis:
        return ((state.bit, state, ONE),)
    return tuple((bit, PureState.from_basis_bit(basis, bit), HALF) for bit in (0, 1))


def encode_bb84(bit: int, basis: Basis) -> PureState:
    """Encode ``bit`` in ``basis``: (0,R)->|0>, (1,R)->|1>, (0,D)->|+>, (1,D)->|->."""
    _check_bit(bit)
    return PureState.from_basis_bit(basis, bit)


def basis_of_b92(bit: int) -> Basis:
    """B92 ties the basis to the bit: 0 -> rectilinear, 1 -> diagonal."""
    _check_bit(bit)
    return Basis.RECTILINEAR if bit == 0 else Basis.DIAGONAL


def encode_b92(bit: int) -> PureState:
    """Encode ``bit`` with the B92 codebook: 0 -> |0>, 1 -> |+>."""
    return PureState.ZERO if basis_of_b92(bit) is Basis.RECTILINEAR else PureState.PLUS


def decode_bit(protocol: Protocol, basis: Basis, result: int) -> int:
    """
    Turn a measurement result into the sender bit it suggests.

    BB84 reads the result directly. B92 uses its codebook: a rectilinear result
    is the bit itself, a diagonal |+> means 1 and a diagonal |-> means 0.
    """
    _check_bit(result)
    if protocol is Protocol.B92 and basis is Basis.DIAGONAL:
        return 1 - result
    return result


def conclusive_bit(basis: Basis, result: int) -> int | None:
    """B92 conclusive inference: rectilinear 1 excludes |0>, diagonal 1 excludes |+>."""
    if result != 1:
        return None
    return 1 if basis is Basis.RECTILINEAR else 0


def _check_bit(bit: int) -> None:
    if bit not in (0, 1):
        raise ValueError(f"Not a bit: {bit!r}")
