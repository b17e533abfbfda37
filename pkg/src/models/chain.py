"""Markov chain models: chain specifications, explicit chains and predicates."""

from enum import StrEnum
from fractions import Fraction
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.quantum import AttackStrategy, DetectionRule, EveCorrectRule, Protocol
from src.utils.rational import ExactProb


class ChainSpec(BaseModel):
    """An n-round protocol run under a given attack."""

    model_config = ConfigDict(frozen=True)

    protocol: Protocol
    attack: AttackStrategy
    detection: DetectionRule = Field(default=DetectionRule.SAME_BASIS_MISMATCH)
    eve_rule: EveCorrectRule = Field(default=EveCorrectRule.BASIS_AND_BIT_MATCH_SIFTED)
    rounds: int = Field(ge=1, description="Number of qubit exchanges")
    stop_on_detect: bool = Field(
        default=True, description="Alice and Bob stop exchanging once Eve is detected"
    )


class StateVariable(BaseModel):
    """Declared integer or boolean state variable."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    kind: Literal["int", "bool"] = Field(default="int")
    low: int = Field(default=0)
    high: int

    @model_validator(mode="after")
    def _check_range(self) -> Self:
        if self.low > self.high:
            raise ValueError(f"Empty range for {self.name}: [{self.low}..{self.high}]")
        if self.kind == "bool" and (self.low, self.high) != (0, 1):
            raise ValueError(f"Boolean variable {self.name} must range over [0..1]")
        return self


class Transition(BaseModel):
    """One entry of a sparse transition row."""

    model_config = ConfigDict(frozen=True)

    target: int = Field(ge=0)
    probability: ExactProb


class Dtmc(BaseModel):
    """Explicit-state discrete-time Markov chain with exact rows.

    Booleans are stored as 0/1 in valuations. Absorbing states carry a single
    self-loop with probability 1.
    """

    model_config = ConfigDict(frozen=True)

    variables: tuple[StateVariable, ...] = Field(min_length=1)
    valuations: tuple[tuple[int, ...], ...] = Field(min_length=1)
    initial: int = Field(default=0, ge=0)
    rows: tuple[tuple[Transition, ...], ...]
    absorbing: frozenset[int] = Field(default_factory=frozenset)

    @model_validator(mode="after")
    def _check_stochastic(self) -> Self:
        n_states = len(self.valuations)
        if len(self.rows) != n_states:
            raise ValueError(f"{len(self.rows)} rows for {n_states} states")
        if self.initial >= n_states:
            raise ValueError(f"Initial state {self.initial} out of range")

        width = len(self.variables)
        for index, valuation in enumerate(self.valuations):
            if len(valuation) != width:
                raise ValueError(f"State {index} has {len(valuation)} values, expected {width}")
            for variable, value in zip(self.variables, valuation, strict=True):
                if not variable.low <= value <= variable.high:
                    raise ValueError(f"State {index}: {variable.name}={value} out of range")

        for index, row in enumerate(self.rows):
            if not row:
                raise ValueError(f"State {index} has an empty row")
            if any(t.target >= n_states for t in row):
                raise ValueError(f"State {index} points outside the chain")
            total = sum((t.probability for t in row), Fraction(0))
            if total != 1:
                raise ValueError(f"Row {index} sums to {total}, not 1")

        for index in self.absorbing:
            row = self.rows[index] if index < n_states else ()
            if len(row) != 1 or row[0].target != index:
                raise ValueError(f"Absorbing state {index} must self-loop with probability 1")
        return self

    @property
    def num_states(self) -> int:
        return len(self.valuations)

    @property
    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def value(self, state: int, name: str) -> int:
        return self.valuations[state][self.variable_names.index(name)]

    def successors(self, state: int) -> list[tuple[int, Fraction]]:
        return [(t.target, t.probability) for t in self.rows[state]]


class Comparator(StrEnum):
    """Comparison operator of a predicate conjunct."""

    EQ = "="
    LT = "<"
    GT = ">"
    LE = "<="
    GE = ">="

    def holds(self, left: int, right: int) -> bool:
        match self:
            case Comparator.EQ:
                return left == right
            case Comparator.LT:
                return left < right
            case Comparator.GT:
                return left > right
            case Comparator.LE:
                return left <= right
            case Comparator.GE:
                return left >= right


class Conjunct(BaseModel):
    """``(variable comparator constant)``."""

    model_config = ConfigDict(frozen=True)

    variable: str = Field(min_length=1)
    comparator: Comparator
    constant: int

    def __str__(self) -> str:
        return f"({self.variable}{self.comparator.value}{self.constant})"


class StatePredicate(BaseModel):
    """Conjunction of comparisons over chain variables."""

    model_config = ConfigDict(frozen=True)

    conjuncts: tuple[Conjunct, ...] = Field(min_length=1)

    @classmethod
    def of(cls, variable: str, comparator: Comparator | str, constant: int) -> "StatePredicate":
        """Shorthand for a single-conjunct predicate."""
        return cls(
            conjuncts=(
                Conjunct(variable=variable, comparator=Comparator(comparator), constant=constant),
            )
        )

    @property
    def variables(self) -> list[str]:
        return list(dict.fromkeys(c.variable for c in self.conjuncts))

    def __str__(self) -> str:
        return "&".join(str(c) for c in self.conjuncts)


class PctlQuery(BaseModel):
    """``P=?[F target]``: probability of eventually reaching ``target``."""

    model_config = ConfigDict(frozen=True)

    mode: Literal["P=?"] = "P=?"
    path: Literal["F"] = "F"
    target: StatePredicate

    def __str__(self) -> str:
        return f"{self.mode}[{self.path}{self.target}]"
