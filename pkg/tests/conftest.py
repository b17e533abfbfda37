"""Shared pytest fixtures and configuration."""

from collections.abc import Iterator
from fractions import Fraction
from pathlib import Path

import pytest
import yaml
from loguru import logger

from src.models.chain import ChainSpec, Dtmc, StateVariable, Transition
from src.models.config import AnalysisConfig
from src.models.quantum import AttackStrategy, Protocol


@pytest.fixture(autouse=True)
def reset_logging() -> Iterator[None]:
    """Drop sinks a test installed so later tests never write to a closed stream."""
    yield
    logger.remove()


@pytest.fixture
def bb84_ir_spec() -> ChainSpec:
    """BB84 under intercept-resend, six exchanges (the N=5 table entry)."""
    return ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=6)


@pytest.fixture
def analysis_config() -> AnalysisConfig:
    """Default analysis settings with sequential sweeps."""
    return AnalysisConfig(max_concurrent=2)


@pytest.fixture
def cyclic_chain() -> Dtmc:
    """Four-state chain with a cycle between states 0 and 1.

    From 0: half to 1, half to the target 2. From 1: half back to 0, half
    to the trap 3. Reaching 2 from 0 has probability 2/3.
    """
    half = Fraction(1, 2)
    return Dtmc(
        variables=(StateVariable(name="s", high=3),),
        valuations=((0,), (1,), (2,), (3,)),
        initial=0,
        rows=(
            (Transition(target=1, probability=half), Transition(target=2, probability=half)),
            (Transition(target=0, probability=half), Transition(target=3, probability=half)),
            (Transition(target=2, probability=Fraction(1)),),
            (Transition(target=3, probability=Fraction(1)),),
        ),
        absorbing=frozenset({2, 3}),
    )


@pytest.fixture
def quiet_config_file(tmp_path: Path) -> Path:
    """analyzer.yaml in a temporary working tree that only logs critical messages."""
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    path = config_dir / "analyzer.yaml"
    path.write_text(
        yaml.dump(
            {
                "analysis": {"max_concurrent": 2},
                "simulation": {"trials": 2000, "seed": 7},
                "logging": {"level": "CRITICAL", "colorize": False},
            }
        )
    )
    return path
