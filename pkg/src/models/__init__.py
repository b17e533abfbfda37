"""Pydantic data models for the analyzer."""

from src.models.chain import (
    ChainSpec,
    Comparator,
    Conjunct,
    Dtmc,
    PctlQuery,
    StatePredicate,
    StateVariable,
    Transition,
)
from src.models.config import (
    AnalysisConfig,
    AnalyzerConfig,
    AnalyzerMetadata,
    AnalyzerSettings,
    ExportConfig,
    FittingConfig,
    LoggingConfig,
    SimulationConfig,
    SolverConfig,
)
from src.models.quantum import (
    AttackStrategy,
    Basis,
    DetectionRule,
    Event,
    EveCorrectRule,
    Protocol,
    PureState,
)
from src.models.results import (
    ComparisonRow,
    FitForm,
    FitModel,
    PrismModel,
    SimEstimate,
    SweepMetadata,
    SweepResult,
    SweepRow,
    TableReport,
    TableRow,
    TrendReport,
    TrialOutcome,
)
from src.models.rounds import RoundBranch, RoundOutcome, RoundStats

__all__ = [
    # Quantum
    "AttackStrategy",
    "Basis",
    "DetectionRule",
    "Event",
    "EveCorrectRule",
    "Protocol",
    "PureState",
    # Rounds
    "RoundBranch",
    "RoundOutcome",
    "RoundStats",
    # Chains
    "ChainSpec",
    "Comparator",
    "Conjunct",
    "Dtmc",
    "PctlQuery",
    "StatePredicate",
    "StateVariable",
    "Transition",
    # Results
    "ComparisonRow",
    "FitForm",
    "FitModel",
    "PrismModel",
    "SimEstimate",
    "SweepMetadata",
    "SweepResult",
    "SweepRow",
    "TableReport",
    "TableRow",
    "TrendReport",
    "TrialOutcome",
    # Config
    "AnalysisConfig",
    "AnalyzerConfig",
    "AnalyzerMetadata",
    "AnalyzerSettings",
    "ExportConfig",
    "FittingConfig",
    "LoggingConfig",
    "SimulationConfig",
    "SolverConfig",
]
