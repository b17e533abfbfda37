"""Unit tests for the PRISM model exporter."""

import re
from decimal import Decimal
from fractions import Fraction

import pytest

from src.analysis.dtmc import build_chain
from src.analysis.pctl import evaluate, parse_query
from src.analysis.prism import export_prism
from src.analysis.protocol import enumerate_round, round_stats
from src.errors import InvalidCombinationError
from src.models.chain import ChainSpec
from src.models.quantum import AttackStrategy, DetectionRule, Protocol
from src.utils.rational import to_decimal_string

ALL_CONFIGURATIONS = [(p, a) for p in Protocol for a in AttackStrategy]


def command_lines(text: str) -> list[str]:
    return [
        line.strip()
        for line in text.splitlines()
        if "->" in line and not line.lstrip().startswith("//")
    ]


def update_total(command: str) -> Fraction:
    """Sum the branch probabilities of one guarded command."""
    updates = command.split("->", 1)[1].rstrip(";").strip()
    total = Fraction(0)
    for branch in updates.split(" + "):
        if ":" in branch:
            total += Fraction(Decimal(branch.split(":", 1)[0]))
        else:
            total += 1
    return total


def constant(text: str, name: str) -> str:
    match = re.search(rf"const double {name} = ([0-9.]+);", text)
    assert match is not None
    return match.group(1)


class TestExportStructure:
    """Structural checks on the emitted model."""

    def test_bb84_intercept_resend(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=5)

        text = export_prism(spec).text

        assert "dtmc" in text.splitlines()
        assert "const int N = 5;" in text
        for fragment in ("module Alice", "module Bob", "module Eve", "[loop]", "[stop]"):
            assert fragment in text
        assert "global forwardChannel : [0..4] init 4;" in text

    def test_no_eve_has_no_eve_module(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.NO_EVE, rounds=3)

        model = export_prism(spec)

        assert "module Eve" not in model.text
        assert "forwardChannel" not in model.text
        assert "correctMeasurement" not in model.properties

    def test_deterministic(self) -> None:
        spec = ChainSpec(protocol=Protocol.B92, attack=AttackStrategy.RANDOM_SUBSTITUTION, rounds=4)

        assert export_prism(spec).text == export_prism(spec).text

    @pytest.mark.parametrize(("protocol", "attack"), ALL_CONFIGURATIONS)
    def test_every_update_sums_to_one(self, protocol: Protocol, attack: AttackStrategy) -> None:
        text = export_prism(ChainSpec(protocol=protocol, attack=attack, rounds=3)).text

        commands = command_lines(text)
        assert commands
        for command in commands:
            assert update_total(command) == 1, command

    @pytest.mark.parametrize(("protocol", "attack"), ALL_CONFIGURATIONS)
    def test_every_command_is_guarded(self, protocol: Protocol, attack: AttackStrategy) -> None:
        text = export_prism(ChainSpec(protocol=protocol, attack=attack, rounds=3)).text

        for command in command_lines(text):
            assert re.match(r"^\[\w*\] \S", command), command

    def test_measurement_enumerated_per_state_and_basis(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=2)
        text = export_prism(spec).text

        bob = [c for c in command_lines(text) if c.startswith("[] bobState=1 &")]
        eve = [c for c in command_lines(text) if c.startswith("[] eveState=1 &")]
        assert len(bob) == 8
        assert len(eve) == 8

    def test_b92_encoding(self) -> None:
        spec = ChainSpec(protocol=Protocol.B92, attack=AttackStrategy.INTERCEPT_RESEND, rounds=2)
        text = export_prism(spec).text

        assert "(aliceBasis'=aliceBit)" in text
        assert "(qubitChannel'=2*aliceBit)" in text

    def test_detection_is_absorbing_when_stopping(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=2)
        text = export_prism(spec).text

        assert "(eveDetected'=1)&(aliceState'=5)" in text
        assert "[stop] aliceState=5 -> (aliceState'=7);" in text
        assert "[] aliceState>=6 -> true;" in text

    def test_detection_continues_without_stop(self) -> None:
        spec = ChainSpec(
            protocol=Protocol.BB84,
            attack=AttackStrategy.INTERCEPT_RESEND,
            rounds=2,
            stop_on_detect=False,
        )
        model = export_prism(spec)

        assert "(eveDetected'=1)&(aliceState'=4)" in model.text
        assert "aliceState=7" not in model.properties

    def test_invalid_combination(self) -> None:
        spec = ChainSpec(
            protocol=Protocol.BB84,
            attack=AttackStrategy.NO_EVE,
            detection=DetectionRule.CONCLUSIVE_CONTRADICTION,
            rounds=2,
        )
        with pytest.raises(InvalidCombinationError):
            export_prism(spec)

    def test_metadata(self) -> None:
        spec = ChainSpec(protocol=Protocol.B92, attack=AttackStrategy.NO_EVE, rounds=7)

        model = export_prism(spec)

        assert model.protocol is Protocol.B92
        assert model.attack is AttackStrategy.NO_EVE
        assert model.rounds == 7


class TestRoundConstants:
    """The per-round constants agree with the enumerated round statistics."""

    @pytest.mark.parametrize(("protocol", "attack"), ALL_CONFIGURATIONS)
    def test_constants_match_round_stats(self, protocol: Protocol, attack: AttackStrategy) -> None:
        stats = round_stats(enumerate_round(protocol, attack))
        text = export_prism(ChainSpec(protocol=protocol, attack=attack, rounds=2)).text

        assert constant(text, "P_DETECT_ROUND") == to_decimal_string(stats.p_detect)
        assert constant(text, "P_SIFT_ROUND") == to_decimal_string(stats.p_sift)
        assert constant(text, "P_EVE_CORRECT_ROUND") == to_decimal_string(stats.p_eve_correct)

    def test_literal_values(self) -> None:
        spec = ChainSpec(
            protocol=Protocol.BB84, attack=AttackStrategy.RANDOM_SUBSTITUTION, rounds=2
        )
        text = export_prism(spec).text

        assert "const double P_DETECT_ROUND = 0.25;" in text
        assert "const double P_SIFT_ROUND = 0.5;" in text

    def test_significant_digits(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=2)

        assert "P_DETECT_ROUND = 0.1;" in export_prism(spec, digits=1).text


class TestProperties:
    """Test the properties sidecar."""

    def test_contents(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=5)

        properties = export_prism(spec).properties

        assert 'label "detected" = eveDetected=1;' in properties
        assert "P=?[F(eveDetected=1)]" in properties
        assert "P=?[F(aliceState=7)]" in properties
        assert "P=?[F(correctMeasurement>2)]" in properties

    def test_properties_evaluate_on_the_chain(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=6)
        chain = build_chain(spec)
        properties = export_prism(spec).properties

        detect = evaluate(chain, parse_query("P=?[F(eveDetected=1)]"))
        assert "P=?[F(eveDetected=1)]" in properties
        assert detect == Fraction(144495, 262144)
