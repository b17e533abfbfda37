"""Steps shared by the BDD feature files."""

import pytest
from pytest_bdd import given, parsers, when

from src.analysis.sweep import exact_probability, rounds_for
from src.models.chain import ChainSpec
from src.models.quantum import AttackStrategy, Event, Protocol


@pytest.fixture
def context() -> dict:
    """Shared scenario storage."""
    return {"inclusive_rounds": False}


@given(parsers.parse('the "{protocol}" protocol under the "{attack}" attack'))
def protocol_under_attack(context: dict, protocol: str, attack: str) -> None:
    """Select the protocol and the eavesdropper."""
    context["protocol"] = Protocol(protocol)
    context["attack"] = AttackStrategy(attack)


@when(parsers.parse("I compute the detection probability for N={n:d}"))
def compute_detection(context: dict, n: int) -> None:
    """Build the chain for N and solve for detection."""
    spec = ChainSpec(
        protocol=context["protocol"],
        attack=context["attack"],
        rounds=rounds_for(n, context["inclusive_rounds"]),
    )
    context["spec"] = spec
    context["exact"] = exact_probability(spec, Event.DETECTED)
