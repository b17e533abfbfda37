"""PRISM-language export of a protocol run.

The model has one module per agent (Alice, Bob and Eve when there is an
attacker). Channels are global variables; the qubit channel carries the
alphabet 0=|0>, 1=|1>, 2=|+>, 3=|-> plus 4 for "empty". Alice and Bob step
to the next qubit together on ``[loop]`` and finish together on ``[stop]``.

State numbering used by the emitted properties:

    Alice: 0 draw bit, 1 basis, 2 send, 3 compare, 4 next/finish,
           5 detected (stopping), 6 done, 7 detected (absorbing)
    Bob:   0 wait, 1 measure, 2 announced, 3 done
    Eve:   0 wait, 1 measure, 2 resend, 3 bookkeeping, 4 synchronised, 5 done
"""

from fractions import Fraction

from src.analysis.protocol import enumerate_round, round_stats
from src.analysis.quantum import decode_bit, measure
from src.constants import EMPTY_CHANNEL, PRISM_SIGNIFICANT_DIGITS
from src.models.chain import ChainSpec
from src.models.quantum import (
    AttackStrategy,
    Basis,
    DetectionRule,
    EveCorrectRule,
    Protocol,
    PureState,
)
from src.models.results import PrismModel
from src.models.rounds import RoundStats
from src.utils.logging import get_logger
from src.utils.rational import HALF, to_decimal_string

logger = get_logger(__name__)

ALICE_DETECTED_STATE = 7
ALICE_DONE_STATE = 6
BOB_DONE_STATE = 3


def export_prism(
    spec: ChainSpec,
    digits: int = PRISM_SIGNIFICANT_DIGITS,
) -> PrismModel:
    """
    Generate the PRISM model and properties for ``spec``.

    Args:
        spec: Protocol, attack, rules and number of rounds
        digits: Significant digits of probability literals

    Returns:
        PrismModel with deterministic model and properties text

    Raises:
        InvalidCombinationError: If the protocol/detection pairing is invalid
    """
    stats = round_stats(
        enumerate_round(spec.protocol, spec.attack, spec.detection, spec.eve_rule)
    )
    writer = _ModelWriter(spec, digits)

    lines = [
        *_header(spec, stats, writer),
        *_alice_module(spec, writer),
        *_bob_module(spec, writer),
    ]
    if spec.attack.measures:
        lines += _eve_module(spec, writer)

    model = PrismModel(
        text="\n".join(lines) + "\n",
        properties=_properties(spec),
        protocol=spec.protocol,
        attack=spec.attack,
        rounds=spec.rounds,
    )
    logger.debug(
        "PRISM model generated",
        protocol=spec.protocol.value,
        attack=spec.attack.value,
        rounds=spec.rounds,
        lines=len(lines),
    )
    return model


class _ModelWriter:
    """Formats probabilities and the channel Bob listens on."""

    def __init__(self, spec: ChainSpec, digits: int) -> None:
        self.digits = digits
        self.bob_channel = "forwardChannel" if spec.attack.measures else "qubitChannel"

    def prob(self, value: Fraction) -> str:
        return to_decimal_string(value, self.digits)

    def choice(self, branches: list[tuple[Fraction, str]]) -> str:
        if len(branches) == 1:
            return branches[0][1]
        return " + ".join(f"{self.prob(p)}:{update}" for p, update in branches)


def _header(spec: ChainSpec, stats: RoundStats, writer: _ModelWriter) -> list[str]:
    lines = [
        f"// {spec.protocol.value.upper()} key exchange, {spec.attack.label}, N qubit exchanges",
        f"// detection rule: {spec.detection.value}; eve-correct rule: {spec.eve_rule.value}",
        "// qubit channel alphabet: 0=|0>, 1=|1>, 2=|+>, 3=|->, 4=empty",
        "",
        "dtmc",
        "",
        f"const int N = {spec.rounds};",
        "",
        "// per-round event probabilities of the collapsed chain",
        f"const double P_DETECT_ROUND = {writer.prob(stats.p_detect)};",
        f"const double P_SIFT_ROUND = {writer.prob(stats.p_sift)};",
        f"const double P_EVE_CORRECT_ROUND = {writer.prob(stats.p_eve_correct)};",
        "",
        "// channels",
        f"global qubitChannel : [0..{EMPTY_CHANNEL}] init {EMPTY_CHANNEL};",
    ]
    if spec.attack.measures:
        lines.append(f"global forwardChannel : [0..{EMPTY_CHANNEL}] init {EMPTY_CHANNEL};")
    lines += ["global eveDetected : [0..1] init 0;", ""]
    return lines


def _alice_module(spec: ChainSpec, writer: _ModelWriter) -> list[str]:
    detected = _detection_guard(spec.detection)
    after_detection = 5 if spec.stop_on_detect else 4

    if spec.protocol is Protocol.B92:
        basis_command = "  [] aliceState=1 -> (aliceBasis'=aliceBit)&(aliceState'=2);"
        send_command = (
            f"  [] aliceState=2 -> (qubitChannel'={int(PureState.PLUS)}*aliceBit)&(aliceState'=3);"
        )
    else:
        basis_command = "  [] aliceState=1 -> " + writer.choice(
            [(HALF, f"(aliceBasis'={b})&(aliceState'=2)") for b in (0, 1)]
        ) + ";"
        send_command = "  [] aliceState=2 -> (qubitChannel'=2*aliceBasis+aliceBit)&(aliceState'=3);"

    return [
        "module Alice",
        f"  aliceState : [0..{ALICE_DETECTED_STATE}] init 0;",
        "  aliceRound : [0..N] init 0;",
        "  aliceBit : [0..1] init 0;",
        "  aliceBasis : [0..1] init 0;",
        "",
        "  [] aliceState=0 -> "
        + writer.choice([(HALF, f"(aliceBit'={b})&(aliceState'=1)") for b in (0, 1)])
        + ";",
        basis_command,
        send_command,
        f"  [] aliceState=3 & bobState=2 & ({detected}) -> "
        f"(eveDetected'=1)&(aliceState'={after_detection});",
        f"  [] aliceState=3 & bobState=2 & !({detected}) -> (aliceState'=4);",
        "  [loop] aliceState=4 & aliceRound<N-1 -> (aliceRound'=aliceRound+1)&(aliceState'=0);",
        f"  [stop] aliceState=4 & aliceRound=N-1 -> (aliceState'={ALICE_DONE_STATE});",
        f"  [stop] aliceState=5 -> (aliceState'={ALICE_DETECTED_STATE});",
        f"  [] aliceState>={ALICE_DONE_STATE} -> true;",
        "endmodule",
        "",
    ]


def _bob_module(spec: ChainSpec, writer: _ModelWriter) -> list[str]:
    channel = writer.bob_channel
    lines = [
        "module Bob",
        f"  bobState : [0..{BOB_DONE_STATE}] init 0;",
        "  bobBasis : [0..1] init 0;",
        "  bobResult : [0..1] init 0;",
        "  bobBit : [0..1] init 0;",
        "",
        f"  [] bobState=0 & {channel}<{EMPTY_CHANNEL} -> "
        + writer.choice([(HALF, f"(bobBasis'={b})&(bobState'=1)") for b in (0, 1)])
        + ";",
    ]
    for state in PureState:
        for basis in Basis:
            branches = [
                (
                    p,
                    f"(bobResult'={result})"
                    f"&(bobBit'={decode_bit(spec.protocol, basis, result)})"
                    f"&({channel}'={EMPTY_CHANNEL})&(bobState'=2)",
                )
                for result, _, p in measure(state, basis)
            ]
            lines.append(
                f"  [] bobState=1 & {channel}={int(state)} & bobBasis={int(basis)} -> "
                + writer.choice(branches)
                + ";"
            )
    lines += [
        "  [loop] bobState=2 -> (bobState'=0);",
        f"  [stop] bobState=2 -> (bobState'={BOB_DONE_STATE});",
        f"  [] bobState={BOB_DONE_STATE} -> true;",
        "endmodule",
        "",
    ]
    return lines


def _eve_module(spec: ChainSpec, writer: _ModelWriter) -> list[str]:
    correct = _eve_correct_guard(spec.eve_rule)
    lines = [
        "module Eve",
        "  eveState : [0..5] init 0;",
        "  eveBasis : [0..1] init 0;",
        "  eveResult : [0..1] init 0;",
        "  eveBit : [0..1] init 0;",
        "  eveHolding : [0..3] init 0;",
        "  correctMeasurement : [0..N] init 0;",
        "",
        f"  [] eveState=0 & qubitChannel<{EMPTY_CHANNEL} -> "
        + writer.choice([(HALF, f"(eveBasis'={b})&(eveState'=1)") for b in (0, 1)])
        + ";",
    ]
    for state in PureState:
        for basis in Basis:
            branches = [
                (
                    p,
                    f"(eveResult'={result})"
                    f"&(eveBit'={decode_bit(spec.protocol, basis, result)})"
                    f"&(eveHolding'={int(post)})"
                    f"&(qubitChannel'={EMPTY_CHANNEL})&(eveState'=2)",
                )
                for result, post, p in measure(state, basis)
            ]
            lines.append(
                f"  [] eveState=1 & qubitChannel={int(state)} & eveBasis={int(basis)} -> "
                + writer.choice(branches)
                + ";"
            )

    if spec.attack is AttackStrategy.INTERCEPT_RESEND:
        lines.append("  [] eveState=2 -> (forwardChannel'=eveHolding)&(eveState'=3);")
    else:
        substitutes = [
            (Fraction(1, 4), f"(forwardChannel'={int(state)})&(eveState'=3)")
            for state in PureState
        ]
        lines.append("  [] eveState=2 -> " + writer.choice(substitutes) + ";")

    lines += [
        f"  [] eveState=3 & bobState=2 & ({correct}) & correctMeasurement<N -> "
        "(correctMeasurement'=correctMeasurement+1)&(eveState'=4);",
        f"  [] eveState=3 & bobState=2 & !(({correct}) & correctMeasurement<N) -> (eveState'=4);",
        "  [loop] eveState=4 -> (eveState'=0);",
        "  [stop] eveState=4 -> (eveState'=5);",
        "  [] eveState=5 -> true;",
        "endmodule",
        "",
    ]
    return lines


def _detection_guard(rule: DetectionRule) -> str:
    mismatch = "bobBasis=aliceBasis & bobBit!=aliceBit"
    # Rectilinear 1 means "sent 1", diagonal 1 means "sent 0"
    contradiction = "bobResult=1 & ((bobBasis=0 & aliceBit=0) | (bobBasis=1 & aliceBit=1))"
    if rule is DetectionRule.SAME_BASIS_MISMATCH:
        return mismatch
    if rule is DetectionRule.CONCLUSIVE_CONTRADICTION:
        return contradiction
    return f"({mismatch}) | ({contradiction})"


def _eve_correct_guard(rule: EveCorrectRule) -> str:
    guard = "eveBit=aliceBit"
    if rule is EveCorrectRule.BIT_MATCH:
        return guard
    guard += " & eveBasis=aliceBasis"
    if rule is EveCorrectRule.BASIS_AND_BIT_MATCH:
        return guard
    return guard + " & bobBasis=aliceBasis"


def _properties(spec: ChainSpec) -> str:
    lines = [
        'label "detected" = eveDetected=1;',
        "",
        "// Probability that the eavesdropper is detected",
        "P=?[F(eveDetected=1)]",
    ]
    if spec.stop_on_detect:
        lines += [
            "",
            "// Same event through Alice's absorbing detection state",
            f"P=?[F(aliceState={ALICE_DETECTED_STATE})]",
        ]
    if spec.attack.measures:
        lines += [
            "",
            "// Probability that Eve measures more than half of the qubits correctly",
            f"P=?[F(correctMeasurement>{spec.rounds // 2})]",
        ]
    return "\n".join(lines) + "\n"
